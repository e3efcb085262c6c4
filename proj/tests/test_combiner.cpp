#include "luxp/combiner.hpp"
#include "luxp/error.hpp"
#include "luxp/simulator.hpp"

#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "support/suites.hpp"
#include "support/synthetic.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace luxp;

namespace {

const ExperimentFilter t1_diffuse(Task::Accuracy, Material::Diffuse);

std::vector<double> negated(const std::vector<double>& v) {
    std::vector<double> out(v);
    for (double& x : out) x = -x;
    return out;
}

} // namespace

TEST_CASE("dataset accounting with the default pair convention") {
    const SimulatedData data = simulate_dataset(fixture::accounting_spec(3));
    const PreferenceTable table = build_preference_table(data.records, t1_diffuse);
    const auto rows = build_dataset(table, data.vectors, t1_diffuse);
    CHECK(rows.size() == 800);
    const RowSplit split = split_rows(rows, 20, 5, 77);
    CHECK(split.train.size() == 640);
    CHECK(split.validation.size() == 160);

    CHECK(build_dataset(table, data.vectors, t1_diffuse, PairCounting::Unordered).size() == 25 * 20 + 25 * 6);

    // the split is per setting and never shares a scene
    REQUIRE(split.per_setting.size() == 2);
    for (const auto& s : split.per_setting) {
        CHECK(s.train.size() == 20);
        CHECK(s.validation.size() == 5);
    }
    std::set<std::string> train_scenes, val_scenes;
    for (const auto& r : split.train) train_scenes.insert(r.scene_id);
    for (const auto& r : split.validation) val_scenes.insert(r.scene_id);
    std::vector<std::string> both;
    std::set_intersection(train_scenes.begin(), train_scenes.end(), val_scenes.begin(), val_scenes.end(),
                          std::back_inserter(both));
    CHECK(both.empty());
    CHECK(train_scenes.size() + val_scenes.size() == 50);

    // same seed, same split; another seed moves scenes
    const RowSplit again = split_rows(rows, 20, 5, 77);
    CHECK(again.per_setting[0].validation == split.per_setting[0].validation);
    CHECK(split_rows(rows, 20, 5, 78).per_setting[0].validation != split.per_setting[0].validation);
}

TEST_CASE("dataset rows come in antisymmetric twins") {
    const SimulatedData data = simulate_dataset(fixture::accounting_spec(4));
    const PreferenceTable table = build_preference_table(data.records, t1_diffuse);
    const auto rows = build_dataset(table, data.vectors, t1_diffuse, PairCounting::Unordered);
    std::map<std::tuple<std::string, std::string, std::string>, const FeatureRow*> index;
    for (const auto& r : rows) index[{r.scene_id, r.method_a, r.method_b}] = &r;
    CHECK(index.size() == rows.size());
    for (const auto& r : rows) {
        const FeatureRow* twin = index.at({r.scene_id, r.method_b, r.method_a});
        CHECK(twin->features == negated(r.features));
        CHECK(r.target + twin->target == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(r.features.size() == combiner_metrics().size());
        const double expected = *table.preference(r.experiment.setting, r.scene_id, r.method_a, r.method_b);
        CHECK(r.target == expected);
    }

    // one scene with two methods
    const ExperimentKey key{Task::Plausibility, Material::Glossy, Setting::Indoor};
    const std::vector<ChoiceRecord> one{{"o", key, "s", "a", "b", Choice::A, Choice::A, "2024-01-01T00:00:00Z"}};
    std::vector<MetricVector> vectors(2);
    vectors[0] = {"s", "a", {}};
    vectors[1] = {"s", "b", {}};
    for (MetricId id : combiner_metrics()) {
        vectors[0].values[id] = 1.0;
        vectors[1].values[id] = 0.5;
    }
    CHECK(build_dataset(build_preference_table(one, key), vectors, key).size() == 2);

    vectors[1].values.erase(MetricId::Flip);
    try {
        build_dataset(build_preference_table(one, key), vectors, key);
        FAIL("missing metric accepted");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("flip") != std::string::npos);
        CHECK(std::string(e.what()).find("s/b") != std::string::npos);
    }
}

TEST_CASE("scene split preconditions") {
    std::vector<std::string> ids;
    for (int i = 0; i < 25; ++i) ids.push_back("s" + std::to_string(i));
    const SceneSplit s = split_scenes(ids, 20, 5, 1);
    CHECK(s.train.size() == 20);
    CHECK(s.validation.size() == 5);
    CHECK_THROWS_AS(split_scenes(ids, 20, 4, 1), ValidationError);
    ids.back() = ids.front();
    CHECK_THROWS_AS(split_scenes(ids, 20, 5, 1), ValidationError);
}

TEST_CASE("SVR dual matches a generic QP solver on small instances") {
    Rng rng = make_rng(50, 0);
    int compared = 0;
    double worst = 0.0;
    for (int c = 0; c < 50; ++c) {
        const std::size_t n = 2 + uniform_index(rng, 9);
        const std::size_t k = 1 + uniform_index(rng, 4);
        SvrConfig config;
        config.kernel = c % 3 == 2 ? KernelType::Linear : KernelType::Rbf;
        config.cost = std::array{1.0, 0.5, 5.0}[c % 3];
        config.epsilon = std::array{0.1, 0.02, 0.3}[(c / 3) % 3];
        std::vector<std::vector<double>> x(n, std::vector<double>(k));
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (double& v : x[i]) v = 4.0 * uniform01(rng) - 2.0;
            y[i] = uniform01(rng);
        }
        const SvrModel model = train_svr(x, y, config);
        const oracle::QpSolution qp = oracle::svr_dual_barrier(fixture::oracle_kernel(x, config.kernel), y, config.epsilon,
                                                               config.cost);
        CAPTURE(c);
        CHECK(std::abs(model.diagnostics.dual_objective - qp.objective) <= 1e-6);
        worst = std::max(worst, std::abs(model.diagnostics.dual_objective - qp.objective));
        for (double b : model.dual_coefficients) CHECK(std::abs(b) <= config.cost + 1e-12);
        CHECK(std::abs(std::accumulate(model.dual_coefficients.begin(), model.dual_coefficients.end(), 0.0)) < 1e-9);
        CHECK(model.diagnostics.max_violation < config.tolerance);
        ++compared;
    }
    CHECK(compared == 50);
    MESSAGE("largest objective gap " << worst);
}

TEST_CASE("SVR degenerate and closed-form fits") {
    std::vector<std::vector<double>> x{{0.0}, {1.0}, {2.0}, {3.0}, {4.0}, {5.0}};
    const SvrModel constant = train_svr(x, std::vector<double>(6, 0.37));
    CHECK(constant.bias == doctest::Approx(0.37).epsilon(1e-12));
    CHECK(constant.support_vectors.empty());
    for (double probe : {-3.0, 0.5, 9.0}) CHECK(constant.predict(std::vector<double>{probe}) == doctest::Approx(0.37));

    const SvrModel flat = train_svr(std::vector<std::vector<double>>(4, {2.0, 2.0}), {0.1, 0.2, 0.3, 0.6});
    CHECK(flat.bias == doctest::Approx(0.3));
    CHECK(flat.support_vectors.empty());

    // y = 2x on six points; the line lies inside the hypothesis space
    std::vector<std::vector<double>> xs;
    std::vector<double> ys;
    for (int i = 0; i < 6; ++i) {
        xs.push_back({0.1 * i});
        ys.push_back(0.2 * i);
    }
    SvrConfig linear;
    linear.kernel = KernelType::Linear;
    const SvrModel line = train_svr(xs, ys, linear);
    for (int i = 0; i < 6; ++i) CHECK(std::abs(line.predict(xs[i]) - ys[i]) <= linear.epsilon + 1e-6);

    CHECK_THROWS_AS(train_svr({{1.0}}, {0.5}), ValidationError);
    CHECK_THROWS_AS(train_svr({{1.0}, {NAN}}, {0.5, 0.5}), ValidationError);
    SvrConfig bad;
    bad.cost = 0.0;
    CHECK_THROWS_AS(train_svr(xs, ys, bad), ValidationError);
}

TEST_CASE("antisymmetric training gives complementary predictions") {
    const SimulatedData data = simulate_dataset(fixture::accounting_spec(5));
    const ExperimentFilter indoor(Task::Accuracy, Material::Diffuse, Setting::Indoor);
    const PreferenceTable table = build_preference_table(data.records, indoor);
    const auto rows = build_dataset(table, data.vectors, indoor);
    const CombinerModel model = train_combiner(rows, indoor);

    const std::vector<double> zero(combiner_metrics().size(), 0.0);
    CHECK(std::abs(predict_preference(model, zero) - model.svr.bias) <= 1e-6);
    CHECK(model.svr.bias == doctest::Approx(0.5).epsilon(0.02));
    Rng rng = make_rng(6, 0);
    for (const auto& r : rows) {
        CHECK(std::abs(predict_preference(model, r.features) + predict_preference(model, negated(r.features)) - 1.0) <=
              1e-3);
    }
    for (int i = 0; i < 50; ++i) {
        std::vector<double> probe(zero.size());
        for (double& v : probe) v = standard_normal(rng);
        CHECK(std::abs(predict_preference(model, probe) + predict_preference(model, negated(probe)) - 1.0) <= 1e-3);
    }
    for (double b : model.svr.dual_coefficients) CHECK(std::abs(b) <= model.svr.config.cost);
}

TEST_CASE("rescaling a raw feature leaves decisions unchanged") {
    Rng rng = make_rng(8, 0);
    std::vector<std::vector<double>> x(40, std::vector<double>(3));
    std::vector<double> y(40);
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (double& v : x[i]) v = standard_normal(rng);
        y[i] = 0.5 + 0.3 * std::tanh(x[i][0] - 0.5 * x[i][2]);
    }
    auto scaled = x;
    for (auto& r : scaled) r[1] *= 250.0;
    const SvrModel a = train_svr(x, y), b = train_svr(scaled, y);
    for (int i = 0; i < 30; ++i) {
        std::vector<double> probe{standard_normal(rng), standard_normal(rng), standard_normal(rng)};
        std::vector<double> probe_scaled = probe;
        probe_scaled[1] *= 250.0;
        CHECK(a.predict(probe) == doctest::Approx(b.predict(probe_scaled)).epsilon(1e-9));
        CHECK((a.predict(probe) > 0.5) == (b.predict(probe_scaled) > 0.5));
    }
}

TEST_CASE("combiner decisions and agreement") {
    const auto study = fixture::mixture_study(21, MetricId::Ssim, 1.0, MetricId::Lpips, 0.0);
    const PreferenceTable table = build_preference_table(study.records, study.experiment);
    const auto rows = build_dataset(table, study.vectors, study.experiment);
    const RowSplit split = split_rows(rows, 20, 5, 21);
    const CombinerModel model = train_combiner(split.train, study.experiment);

    const auto choices = combiner_choices(model, split.validation);
    CHECK(choices.size() == split.validation.size());
    for (const auto& c : choices) CHECK(c.observer_id == "combiner");
    const double omega = *evaluate_combiner(model, split.validation, table);
    const double ssim_omega = *metric_omega_on_rows(MetricId::Ssim, study.vectors, split.validation, table);
    CHECK(omega > 0.8);
    CHECK(ssim_omega > 0.8);

    CHECK_THROWS_AS(train_combiner(split.train, ExperimentFilter(Task::Plausibility, Material::Diffuse)),
                    ValidationError);
}

TEST_CASE("combiner beats its ingredients on a hidden mixture") {
    int wins = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const fixture::DominanceRun run = fixture::dominance_run(seed);
        CHECK(run.train_rows == 400);
        CHECK(run.validation_rows == 100);
        wins += run.dominates() ? 1 : 0;
    }
    CHECK(wins >= 4);
}

TEST_CASE("hold one method out") {
    const auto study = fixture::mixture_study(31, MetricId::Vif, 1.0, MetricId::Lpips, 0.0);
    const ExperimentFilter indoor(study.experiment);
    const HoldoutResult result = holdout_method(study.records, study.vectors, "method2", indoor);
    CHECK(result.train_rows == 25 * 6 * 2);
    CHECK(result.eval_rows == 25 * 4 * 2);
    REQUIRE(result.omega.has_value());
    CHECK(*result.omega > 0.5);

    CHECK_THROWS_AS(holdout_method(study.records, study.vectors, "method9", indoor), ValidationError);
    CHECK_THROWS_AS(holdout_method(study.records, study.vectors, "method2",
                                   ExperimentFilter(Task::Accuracy, Material::Diffuse, Setting::Outdoor)),
                    ValidationError);
}

TEST_CASE("model files round-trip exactly") {
    const auto study = fixture::mixture_study(41, MetricId::Ssim, 0.6, MetricId::Lpips, 0.4, 6);
    const PreferenceTable table = build_preference_table(study.records, study.experiment);
    const auto rows = build_dataset(table, study.vectors, study.experiment);
    const CombinerModel model = train_combiner(rows, study.experiment);

    fixture::TempDir dir;
    save_model(dir / "model.json", model);
    const CombinerModel back = load_model(dir / "model.json");
    CHECK(back.experiment == model.experiment);
    CHECK(back.metrics == model.metrics);
    CHECK(back.svr.bias == model.svr.bias);
    CHECK(back.svr.gamma == model.svr.gamma);
    CHECK(back.svr.dual_coefficients == model.svr.dual_coefficients);
    CHECK(back.svr.support_vectors == model.svr.support_vectors);
    for (const auto& r : rows) CHECK(predict_preference(back, r.features) == predict_preference(model, r.features));
    CHECK(model_to_json(back) == model_to_json(model));

    std::string text = model_to_json(model);
    text.replace(text.find("luxp-combiner"), 13, "something-else");
    CHECK_THROWS_AS(model_from_json(text), ValidationError);
    CHECK_THROWS_AS(model_from_json("{}"), ValidationError);
    CHECK_THROWS_AS(load_model(dir / "absent.json"), IoError);
}
