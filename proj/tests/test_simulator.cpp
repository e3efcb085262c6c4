#include "luxp/agreement.hpp"
#include "luxp/error.hpp"
#include "luxp/simulator.hpp"

#include <doctest.h>

#include <cmath>

using namespace luxp;

namespace {

const ExperimentKey key{Task::Plausibility, Material::Diffuse, Setting::Indoor};

double share_of_a(const std::vector<ChoiceRecord>& records) {
    double a = 0;
    for (const auto& r : records) a += r.chosen == Choice::A ? 1.0 : 0.0;
    return a / static_cast<double>(records.size());
}

std::vector<std::string> many_scenes(std::size_t n) { return scene_ids(Setting::Indoor, n); }

// One record per slot choosing the method with the higher latent score.
std::vector<ChoiceRecord> noiseless_majority(const std::map<std::string, double>& scores,
                                             const std::vector<std::string>& scenes) {
    std::vector<std::string> methods;
    for (const auto& [m, s] : scores) methods.push_back(m);
    std::vector<ChoiceRecord> out;
    for (const auto& scene : scenes)
        for (const auto& [a, b] : all_pairs(methods))
            out.push_back({"truth", key, scene, a, b, scores.at(a) > scores.at(b) ? Choice::A : Choice::B, Choice::A,
                           "2024-01-01T00:00:00Z"});
    return out;
}

} // namespace

TEST_CASE("choice probabilities follow the Case V model") {
    SyntheticObserverSpec equal{{{"a", 0.3}, {"b", 0.3}}};
    equal.seed = 1;
    const auto even = simulate_choices(equal, observer_ids(100), many_scenes(100), {{"a", "b"}}, key);
    REQUIRE(even.size() == 10000);
    CHECK(std::abs(share_of_a(even) - 0.5) <= 0.01);

    SyntheticObserverSpec apart{{{"a", std::sqrt(2.0)}, {"b", 0.0}}};
    apart.seed = 2;
    const double phi1 = 0.5 * std::erfc(-1.0 / std::sqrt(2.0));
    CHECK(phi1 == doctest::Approx(0.8413).epsilon(1e-4));
    const auto skewed = simulate_choices(apart, observer_ids(100), many_scenes(100), {{"a", "b"}}, key);
    CHECK(std::abs(share_of_a(skewed) - phi1) <= 0.01);

    // contamination at rate r mixes in fair coin flips
    SyntheticObserverSpec noisy = apart;
    noisy.noise = NoiseModel::Contaminated;
    noisy.rate = 0.5;
    const auto mixed = simulate_choices(noisy, observer_ids(100), many_scenes(100), {{"a", "b"}}, key);
    CHECK(std::abs(share_of_a(mixed) - (0.5 * 0.5 + 0.5 * phi1)) <= 0.01);
    noisy.rate = 1.0;
    const auto coin = simulate_choices(noisy, observer_ids(100), many_scenes(100), {{"a", "b"}}, key);
    CHECK(std::abs(share_of_a(coin) - 0.5) <= 0.01);
}

TEST_CASE("simulation is deterministic under its seed") {
    SyntheticObserverSpec spec{{{"a", 0.0}, {"b", 0.4}, {"c", 1.0}}};
    spec.seed = 9;
    const auto pairs = all_pairs({"a", "b", "c"});
    const auto first = simulate_choices(spec, observer_ids(5), many_scenes(4), pairs, key);
    const auto second = simulate_choices(spec, observer_ids(5), many_scenes(4), pairs, key);
    REQUIRE(first.size() == 60);
    for (std::size_t i = 0; i < first.size(); ++i) CHECK(to_jsonl_line(first[i]) == to_jsonl_line(second[i]));

    // an observer's stream does not depend on who else is simulated
    const auto alone = simulate_choices(spec, {"obs03"}, many_scenes(4), pairs, key);
    std::vector<ChoiceRecord> extracted;
    for (const auto& r : first)
        if (r.observer_id == "obs03") extracted.push_back(r);
    REQUIRE(alone.size() == extracted.size());
    for (std::size_t i = 0; i < alone.size(); ++i) CHECK(to_jsonl_line(alone[i]) == to_jsonl_line(extracted[i]));

    spec.seed = 10;
    const auto other = simulate_choices(spec, observer_ids(5), many_scenes(4), pairs, key);
    bool differs = false;
    for (std::size_t i = 0; i < other.size(); ++i) differs |= other[i].chosen != first[i].chosen;
    CHECK(differs);

    CHECK_THROWS_AS(simulate_choices(spec, {"o"}, {"s"}, {{"a", "zzz"}}, key), ValidationError);
    spec.rate = 1.5;
    spec.noise = NoiseModel::Contaminated;
    CHECK_THROWS_AS(spec.validate(), ValidationError);
}

TEST_CASE("identifier helpers") {
    CHECK(observer_ids(3) == std::vector<std::string>{"obs00", "obs01", "obs02"});
    CHECK(observer_ids(2, 29).back() == "obs30");
    CHECK(scene_ids(Setting::Outdoor, 2) == std::vector<std::string>{"out00", "out01"});
    CHECK(all_pairs({"c", "a", "b"}) == std::vector<MethodPair>{{"a", "b"}, {"a", "c"}, {"b", "c"}});
}

TEST_CASE("metric fidelity controls agreement") {
    const std::map<std::string, double> scores{{"a", -1.0}, {"b", -0.3}, {"c", 0.2}, {"d", 0.6}, {"e", 1.1}};
    SyntheticObserverSpec spec{scores};
    const auto scenes = many_scenes(1000);
    const auto truth = noiseless_majority(scores, scenes);
    const PreferenceTable table = build_preference_table(truth, key);
    const auto pairs = trial_pairs(truth, key);
    REQUIRE(pairs.size() == 10000);

    const std::map<MetricId, double> fidelity{{MetricId::Ssim, 1.0}, {MetricId::Lpips, 1.0}, {MetricId::Vif, 0.0},
                                              {MetricId::Psnr, -1.0}};
    const auto vectors = simulate_metric_scores(spec, scenes, fidelity, 77);
    CHECK(vectors.size() == 5000);
    CHECK(vectors.front().values.size() == 4);

    auto omega = [&](MetricId id) { return *metric_agreement(metric_as_observer(vectors, id, pairs), table).begin()->second; };
    CHECK(omega(MetricId::Ssim) == 1.0);
    CHECK(omega(MetricId::Lpips) == 1.0);
    CHECK(std::abs(omega(MetricId::Vif) - 0.5) <= 0.02);
    CHECK(omega(MetricId::Psnr) < 0.5);

    CHECK(simulate_metric_scores(spec, scenes, fidelity, 77).front().values == vectors.front().values);
    CHECK_THROWS_AS(simulate_metric_scores(spec, scenes, {{MetricId::Ssim, 1.2}}, 1), ValidationError);
}

TEST_CASE("contamination never raises the expected agreement") {
    const std::map<std::string, double> scores{{"a", -1.0}, {"b", -0.5}, {"c", 0.0}, {"d", 0.5}, {"e", 1.0}};
    const auto scenes = many_scenes(50);
    const auto pairs = all_pairs({"a", "b", "c", "d", "e"});
    double previous = 2.0;
    for (double rate : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        SyntheticObserverSpec spec{scores, NoiseModel::Contaminated, rate, 5};
        const auto records = simulate_choices(spec, observer_ids(30), scenes, pairs, key);
        const AgreementReport report = observer_agreement(records, key, build_preference_table(records, key));
        CAPTURE(rate);
        CHECK(*report.expected <= previous);
        previous = *report.expected;
    }
    CHECK(previous < 0.6);
}

TEST_CASE("full simulated study") {
    SimulationSpec spec;
    spec.seed = 12;
    spec.observers = 6;
    spec.contaminated_observers = 1;
    spec.scenes = {{Setting::Indoor, 4}, {Setting::Outdoor, 3}};
    spec.methods[Setting::Indoor] = {{"i1", -0.5}, {"i2", 0.0}, {"i3", 0.5}, {"i4", 1.0}};
    spec.methods[Setting::Outdoor] = {{"o1", 0.0}, {"o2", 0.4}};
    spec.experiments = {{Task::Accuracy, Material::Glossy}, {Task::Plausibility, Material::Diffuse}};
    spec.fidelity = {{MetricId::Ssim, 0.9}};
    const SimulatedData data = simulate_dataset(spec);
    CHECK(data.records.size() == 2 * 6 * (4 * 6 + 3 * 1));
    CHECK(data.vectors.size() == 4 * 4 + 3 * 2);
    for (const auto& v : data.vectors) CHECK(v.values.size() == all_metrics().size());
    for (const auto& r : data.records) CHECK_NOTHROW(r.validate());

    const auto json = R"({"seed": 12, "observers": 6, "contaminated_observers": 1, "contamination_rate": 1.0,
        "scenes": {"indoor": 4, "outdoor": 3},
        "methods": {"indoor": {"i1": -0.5, "i2": 0.0, "i3": 0.5, "i4": 1.0}, "outdoor": {"o1": 0.0, "o2": 0.4}},
        "experiments": [{"task": 1, "material": "glossy"}, {"task": 2, "material": "diffuse"}],
        "fidelity": {"ssim": 0.9}})";
    const SimulatedData again = simulate_dataset(simulation_spec_from_json(json));
    REQUIRE(again.records.size() == data.records.size());
    for (std::size_t i = 0; i < data.records.size(); ++i)
        CHECK(to_jsonl_line(again.records[i]) == to_jsonl_line(data.records[i]));

    CHECK_THROWS_AS(simulation_spec_from_json(R"({"observers": 0})"), ValidationError);
    CHECK_THROWS_AS(simulation_spec_from_json("not json"), ValidationError);
}
