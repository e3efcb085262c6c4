#include "luxp/combiner.hpp"

#include "luxp/error.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace luxp {

using nlohmann::ordered_json;

CombinerModel train_combiner(const std::vector<FeatureRow>& rows, const ExperimentFilter& experiment,
                             const SvrConfig& config) {
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    x.reserve(rows.size());
    y.reserve(rows.size());
    for (const auto& r : rows) {
        if (!experiment.matches(r.experiment))
            fail_validation("row of " + to_string(r.experiment) + " in training set for " + to_string(experiment));
        x.push_back(r.features);
        y.push_back(r.target);
    }
    CombinerModel model;
    model.experiment = experiment;
    model.metrics = combiner_metrics();
    model.svr = train_svr(x, y, config);
    return model;
}

double predict_preference(const CombinerModel& model, std::span<const double> features) {
    return model.svr.predict(features);
}

std::vector<ChoiceRecord> combiner_choices(const CombinerModel& model, const std::vector<FeatureRow>& rows,
                                           const std::string& subject) {
    std::vector<ChoiceRecord> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        const double f = predict_preference(model, row.features);
        ChoiceRecord r;
        r.observer_id = subject;
        r.experiment = row.experiment;
        r.scene_id = row.scene_id;
        r.method_a = row.method_a;
        r.method_b = row.method_b;
        r.chosen = f > 0.5 ? Choice::A : (f < 0.5 ? Choice::B : Choice::Tie);
        r.presented_left = Choice::A;
        out.push_back(std::move(r));
    }
    return out;
}

std::optional<double> evaluate_combiner(const CombinerModel& model, const std::vector<FeatureRow>& rows,
                                        const PreferenceTable& table) {
    const auto scores = metric_agreement(combiner_choices(model, rows), table);
    if (scores.empty()) return std::nullopt;
    return scores.begin()->second;
}

std::optional<double> metric_omega_on_rows(MetricId metric, const std::vector<MetricVector>& vectors,
                                           const std::vector<FeatureRow>& rows, const PreferenceTable& table) {
    std::vector<TrialPair> pairs;
    std::set<PairKey> seen;
    for (const auto& r : rows)
        if (seen.insert(make_pair_key(r.experiment.setting, r.scene_id, r.method_a, r.method_b)).second)
            pairs.push_back({r.experiment, r.scene_id, r.method_a, r.method_b});
    const auto scores = metric_agreement(metric_as_observer(vectors, metric, pairs), table);
    if (scores.empty()) return std::nullopt;
    return scores.begin()->second;
}

HoldoutResult holdout_method(const std::vector<ChoiceRecord>& records, const std::vector<MetricVector>& vectors,
                             const std::string& held_out, const ExperimentFilter& experiment,
                             const SvrConfig& config, PairCounting counting) {
    if (experiment.setting && *experiment.setting != Setting::Indoor)
        fail_validation("hold-one-method-out runs on indoor data only");
    const ExperimentFilter indoor(experiment.task, experiment.material, Setting::Indoor);
    const PreferenceTable table = build_preference_table(records, indoor);

    bool present = false;
    for (const auto& [key, entry] : table.entries())
        present = present || key.first == held_out || key.second == held_out;
    if (!present) fail_validation("method '" + held_out + "' does not appear in " + to_string(indoor));

    std::vector<FeatureRow> train, eval;
    for (auto& row : build_dataset(table, vectors, indoor, counting)) {
        if (row.method_a == held_out || row.method_b == held_out) eval.push_back(std::move(row));
        else train.push_back(std::move(row));
    }
    HoldoutResult result;
    result.train_rows = train.size();
    result.eval_rows = eval.size();
    result.model = train_combiner(train, indoor, config);
    result.omega = evaluate_combiner(result.model, eval, table);
    return result;
}

namespace {

ordered_json filter_to_json(const ExperimentFilter& f) {
    ordered_json j;
    j["task"] = static_cast<int>(f.task);
    j["material"] = to_string(f.material);
    j["setting"] = f.setting ? to_string(*f.setting) : "both";
    return j;
}

ExperimentFilter filter_from_json(const ordered_json& j) {
    ExperimentFilter f;
    f.task = parse_task(std::to_string(j.at("task").get<int>()));
    f.material = parse_material(j.at("material").get<std::string>());
    const auto setting = j.at("setting").get<std::string>();
    if (setting != "both") f.setting = parse_setting(setting);
    return f;
}

} // namespace

std::string model_to_json(const CombinerModel& model) {
    const SvrModel& svr = model.svr;
    ordered_json j;
    j["format"] = "luxp-combiner";
    j["experiment"] = filter_to_json(model.experiment);
    ordered_json metrics = ordered_json::array();
    for (MetricId m : model.metrics) metrics.push_back(std::string(metric_name(m)));
    j["metrics"] = metrics;
    j["kernel"] = svr.config.kernel == KernelType::Rbf ? "rbf" : "linear";
    j["epsilon"] = svr.config.epsilon;
    j["cost"] = svr.config.cost;
    j["gamma"] = svr.gamma;
    j["gamma_auto"] = !svr.config.gamma.has_value();
    j["tolerance"] = svr.config.tolerance;
    j["feature_mean"] = svr.standardizer.mean;
    j["feature_scale"] = svr.standardizer.scale;
    j["bias"] = svr.bias;
    j["dual_coefficients"] = svr.dual_coefficients;
    j["support_vectors"] = svr.support_vectors;
    j["solver"] = {{"iterations", svr.diagnostics.iterations},
                   {"dual_objective", svr.diagnostics.dual_objective},
                   {"max_violation", svr.diagnostics.max_violation},
                   {"polished", svr.diagnostics.polished}};
    return j.dump(2) + "\n";
}

CombinerModel model_from_json(std::string_view text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        fail_validation(std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        if (j.at("format") != "luxp-combiner") fail_validation("not a combiner model file");
        CombinerModel model;
        model.experiment = filter_from_json(j.at("experiment"));
        for (const auto& name : j.at("metrics")) model.metrics.push_back(parse_metric(name.get<std::string>()));
        SvrModel& svr = model.svr;
        const auto kernel = j.at("kernel").get<std::string>();
        if (kernel != "rbf" && kernel != "linear") fail_validation("unknown kernel '" + kernel + "'");
        svr.config.kernel = kernel == "rbf" ? KernelType::Rbf : KernelType::Linear;
        svr.config.epsilon = j.at("epsilon").get<double>();
        svr.config.cost = j.at("cost").get<double>();
        svr.gamma = j.at("gamma").get<double>();
        if (!j.at("gamma_auto").get<bool>()) svr.config.gamma = svr.gamma;
        svr.config.tolerance = j.at("tolerance").get<double>();
        svr.config.validate();
        svr.standardizer.mean = j.at("feature_mean").get<std::vector<double>>();
        svr.standardizer.scale = j.at("feature_scale").get<std::vector<double>>();
        svr.bias = j.at("bias").get<double>();
        svr.dual_coefficients = j.at("dual_coefficients").get<std::vector<double>>();
        svr.support_vectors = j.at("support_vectors").get<std::vector<std::vector<double>>>();
        const auto& solver = j.at("solver");
        svr.diagnostics.iterations = solver.at("iterations").get<long>();
        svr.diagnostics.dual_objective = solver.at("dual_objective").get<double>();
        svr.diagnostics.max_violation = solver.at("max_violation").get<double>();
        svr.diagnostics.polished = solver.at("polished").get<bool>();

        const std::size_t k = model.metrics.size();
        if (svr.standardizer.mean.size() != k || svr.standardizer.scale.size() != k)
            fail_validation("standardization size does not match the metric list");
        if (svr.support_vectors.size() != svr.dual_coefficients.size())
            fail_validation("support vector and coefficient counts differ");
        for (const auto& sv : svr.support_vectors)
            if (sv.size() != k) fail_validation("support vector has the wrong dimension");
        for (double b : svr.dual_coefficients)
            if (std::abs(b) > svr.config.cost * (1.0 + 1e-12)) fail_validation("dual coefficient exceeds the cost bound");
        return model;
    } catch (const nlohmann::json::exception& e) {
        fail_validation(std::string("malformed model file: ") + e.what());
    }
}

void save_model(const std::filesystem::path& path, const CombinerModel& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail_io("cannot write " + path.string());
    out << model_to_json(model);
    if (!out) fail_io("failed writing " + path.string());
}

CombinerModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_io("cannot read " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return model_from_json(buffer.str());
}

} // namespace luxp
