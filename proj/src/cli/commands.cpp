#include "luxp/cli.hpp"

#include "luxp/agreement.hpp"
#include "luxp/color.hpp"
#include "luxp/combiner.hpp"
#include "luxp/csv.hpp"
#include "luxp/error.hpp"
#include "luxp/http_server.hpp"
#include "luxp/image_io.hpp"
#include "luxp/psychometrics.hpp"
#include "luxp/scene_selection.hpp"
#include "luxp/simulator.hpp"
#include "luxp/spherical_harmonics.hpp"
#include "luxp/study.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <pthread.h>
#include <signal.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <thread>

namespace luxp {

namespace fs = std::filesystem;

namespace {

using nlohmann::ordered_json;

struct ExperimentFlags {
    int task = 1;
    std::string material = "diffuse";
    std::string setting = "both";

    void add_to(CLI::App& cmd, bool setting_required = false) {
        cmd.add_option("--task", task, "1 (accuracy) or 2 (plausibility)")->check(CLI::IsMember({1, 2}))->required();
        cmd.add_option("--material", material, "diffuse or glossy")
            ->check(CLI::IsMember({"diffuse", "glossy"}))
            ->required();
        auto* opt = cmd.add_option("--setting", setting, "indoor, outdoor or both");
        if (setting_required) opt->check(CLI::IsMember({"indoor", "outdoor"}))->required();
        else opt->check(CLI::IsMember({"indoor", "outdoor", "both"}))->capture_default_str();
    }

    ExperimentFilter filter() const {
        ExperimentFilter f(parse_task(std::to_string(task)), parse_material(material));
        if (setting != "both") f.setting = parse_setting(setting);
        return f;
    }

    void record(RunManifest& m) const {
        m.config.emplace_back("task", std::to_string(task));
        m.config.emplace_back("material", material);
        m.config.emplace_back("setting", setting);
    }
};

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) fail_io("cannot write " + path.string());
}

struct Choices {
    std::vector<ChoiceRecord> records;
    std::set<std::string> excluded;
};

Choices load_choices(const fs::path& path, bool keep_all, std::ostream& out) {
    Choices c;
    c.records = read_choices(path);
    if (!keep_all) {
        c.excluded = observers_below_chance(c.records);
        c.records = remove_observers(c.records, c.excluded);
        if (!c.excluded.empty()) {
            out << "excluded observers:";
            for (const auto& o : c.excluded) out << ' ' << o;
            out << '\n';
        }
    }
    return c;
}

/// Metrics with a value in every vector.
std::vector<MetricId> complete_metrics(const std::vector<MetricVector>& vectors) {
    std::vector<MetricId> out;
    for (MetricId m : all_metrics()) {
        const bool everywhere = !vectors.empty() && std::all_of(vectors.begin(), vectors.end(), [m](const auto& v) {
            return v.get(m).has_value();
        });
        if (everywhere) out.push_back(m);
    }
    return out;
}

std::string omega_text(const std::optional<double>& omega) {
    if (!omega.has_value()) return {};
    return format_number(omega.value());
}

// ---------------------------------------------------------------- commands

struct ComputeMetricsArgs {
    fs::path stimuli, gt, external, out;
    int jobs = 1;
};

void cmd_compute_metrics(const ComputeMetricsArgs& a, std::ostream& out) {
    if (!fs::is_directory(a.stimuli)) fail_io("stimulus directory not found: " + a.stimuli.string());
    if (!fs::is_directory(a.gt)) fail_io("ground-truth directory not found: " + a.gt.string());

    RunManifest m;
    m.command = "compute-metrics";
    m.config = {{"stimuli", a.stimuli.generic_string()},
                {"gt", a.gt.generic_string()},
                {"external", a.external.generic_string()},
                {"jobs", std::to_string(a.jobs)}};

    std::vector<fs::path> scene_dirs;
    for (const auto& entry : fs::directory_iterator(a.stimuli)) {
        if (entry.path().filename().string().starts_with(".")) continue;
        if (!entry.is_directory()) fail_validation("layout violation: expected a scene directory at " + entry.path().string());
        scene_dirs.push_back(entry.path());
    }
    std::sort(scene_dirs.begin(), scene_dirs.end());
    if (scene_dirs.empty()) fail_validation("no scene directories under " + a.stimuli.string());

    std::vector<Stimulus> stimuli;
    std::map<std::string, fs::path> gt;
    for (const auto& dir : scene_dirs) {
        const std::string scene = dir.filename().string();
        const fs::path gt_path = a.gt / (scene + ".png");
        if (!fs::is_regular_file(gt_path)) fail_validation("layout violation: missing ground truth " + gt_path.string());
        gt[scene] = gt_path;
        m.inputs.push_back(gt_path);
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (entry.path().filename().string().starts_with(".")) continue;
            if (!entry.is_regular_file() || entry.path().extension() != ".png")
                fail_validation("layout violation: expected <method>.png at " + entry.path().string());
            files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
        if (files.empty()) fail_validation("layout violation: scene directory has no stimuli: " + dir.string());
        for (const auto& f : files) {
            stimuli.push_back({scene, f.stem().string(), f});
            m.inputs.push_back(f);
        }
    }

    ExternalScoreTable external;
    if (!a.external.empty()) {
        external = ingest_external_scores(a.external);
        m.inputs.push_back(a.external);
    }
    const auto vectors = compute_metric_vectors(stimuli, gt, external, a.jobs);
    write_metric_vectors(a.out, vectors);
    m.outputs = {a.out};
    write_manifests(m);
    out << "metric vectors: " << vectors.size() << '\n';
}

struct ScaleArgs {
    fs::path choices, out, bars;
    ExperimentFlags exp;
    std::uint64_t seed = 0;
    int replicates = 1000;
    double confidence = 0.95;
    double alpha = 0.05;
    bool keep_all = false;
};

void cmd_scale(ScaleArgs a, std::ostream& out) {
    if (a.bars.empty()) a.bars = fs::path(a.out).replace_extension(".csv");
    if (a.bars == a.out) fail_validation("--bars must differ from --out");
    const Choices c = load_choices(a.choices, a.keep_all, out);
    const ExperimentFilter filter = a.exp.filter();

    ScaleOptions options;
    options.bootstrap_replicates = a.replicates;
    options.confidence = a.confidence;
    options.seed = a.seed;
    const ScaleResult result = scale_experiment(c.records, filter, options);
    const auto tests = pairwise_tests(c.records, filter, a.alpha);

    ordered_json j;
    j["experiment"] = to_string(filter);
    j["n_scenes"] = result.n_scenes;
    j["bootstrap_replicates"] = a.replicates;
    j["confidence"] = a.confidence;
    j["excluded_observers"] = std::vector<std::string>(c.excluded.begin(), c.excluded.end());
    ordered_json scores = ordered_json::object();
    for (const auto& [method, s] : result.scores)
        scores[method] = {{"score", s}, {"ci_low", result.ci_low.at(method)}, {"ci_high", result.ci_high.at(method)}};
    j["scores"] = scores;
    ordered_json pairs = ordered_json::array();
    for (const auto& t : tests)
        pairs.push_back({{"method_a", t.method_a},
                         {"method_b", t.method_b},
                         {"wins_a", t.wins_a},
                         {"wins_b", t.wins_b},
                         {"p_value", t.p_value},
                         {"significant", t.significant}});
    j["pairwise"] = pairs;

    std::string bars = csv_line({"method", "score", "ci_low", "ci_high"}) + "\n";
    for (const auto& [method, s] : result.scores)
        bars += csv_line({method, format_number(s), format_number(result.ci_low.at(method)),
                          format_number(result.ci_high.at(method))}) +
                "\n";

    write_text(a.out, j.dump(2) + "\n");
    write_text(a.bars, bars);

    RunManifest m;
    m.command = "scale";
    m.config = {{"choices", a.choices.generic_string()}};
    a.exp.record(m);
    m.config.emplace_back("bootstrap", std::to_string(a.replicates));
    m.config.emplace_back("confidence", format_number(a.confidence));
    m.config.emplace_back("alpha", format_number(a.alpha));
    m.config.emplace_back("keep_all_observers", a.keep_all ? "true" : "false");
    m.inputs = {a.choices};
    m.seed = a.seed;
    m.outputs = {a.out, a.bars};
    write_manifests(m);
    for (const auto& [method, s] : result.scores) out << method << ' ' << format_number(s) << '\n';
}

struct AgreementArgs {
    fs::path choices, metrics, out;
    ExperimentFlags exp;
    bool keep_all = false;
};

void cmd_agreement(const AgreementArgs& a, std::ostream& out) {
    const Choices c = load_choices(a.choices, a.keep_all, out);
    const auto vectors = read_metric_vectors(a.metrics);
    const ExperimentFilter requested = a.exp.filter();
    std::set<Setting> settings;
    for (const auto& r : filter_records(c.records, requested)) settings.insert(r.experiment.setting);
    if (settings.empty()) fail_validation("no choice records for " + to_string(requested));

    std::string csv = csv_line({"subject_id", "subject_type", "task", "material", "setting", "omega"}) + "\n";
    for (Setting setting : settings) {
        const ExperimentKey key{requested.task, requested.material, setting};
        const PreferenceTable table = build_preference_table(c.records, key);
        const AgreementReport humans = observer_agreement(c.records, key, table);
        const auto pairs = trial_pairs(c.records, key);
        auto row = [&](const std::string& subject, const char* type, const std::optional<double>& omega) {
            csv += csv_line({subject, type, to_string(key.task), to_string(key.material), to_string(key.setting),
                             omega_text(omega)}) +
                   "\n";
        };
        row("expected_observer", "expected", humans.expected);
        out << to_string(key) << " expected_observer " << omega_text(humans.expected) << '\n';
        for (MetricId metric : complete_metrics(vectors)) {
            const std::string name(metric_name(metric));
            const auto scores = metric_agreement(metric_as_observer(vectors, metric, pairs), table);
            const auto it = scores.find(name);
            std::optional<double> omega;
            if (it != scores.end()) omega = it->second;
            row(name, "metric", omega);
            out << to_string(key) << ' ' << name << ' ' << omega_text(omega) << '\n';
        }
        for (const auto& s : humans.subjects) row(s.subject_id, "observer", s.omega);
    }
    write_text(a.out, csv);

    RunManifest m;
    m.command = "agreement";
    m.config = {{"choices", a.choices.generic_string()}, {"metrics", a.metrics.generic_string()}};
    a.exp.record(m);
    m.config.emplace_back("keep_all_observers", a.keep_all ? "true" : "false");
    m.inputs = {a.choices, a.metrics};
    m.outputs = {a.out};
    write_manifests(m);
}

struct SvrFlags {
    double epsilon = 0.1;
    double cost = 1.0;
    std::string kernel = "rbf";
    std::optional<double> gamma;

    void add_to(CLI::App& cmd) {
        cmd.add_option("--epsilon", epsilon, "SVR epsilon")->capture_default_str();
        cmd.add_option("--cost", cost, "SVR cost C")->capture_default_str();
        cmd.add_option("--kernel", kernel, "rbf or linear")
            ->check(CLI::IsMember({"rbf", "linear"}))
            ->capture_default_str();
        cmd.add_option("--gamma", gamma, "RBF width (default: 1 / (K * mean feature variance))");
    }
    SvrConfig config() const {
        SvrConfig c;
        c.epsilon = epsilon;
        c.cost = cost;
        c.kernel = kernel == "rbf" ? KernelType::Rbf : KernelType::Linear;
        c.gamma = gamma;
        c.validate();
        return c;
    }
    void record(RunManifest& m) const {
        m.config.emplace_back("epsilon", format_number(epsilon));
        m.config.emplace_back("cost", format_number(cost));
        m.config.emplace_back("kernel", kernel);
        m.config.emplace_back("gamma", gamma ? format_number(*gamma) : "auto");
    }
};

struct TrainArgs {
    fs::path choices, metrics, out, report;
    ExperimentFlags exp;
    SvrFlags svr;
    std::uint64_t seed = 0;
    std::size_t n_train = 20;
    std::size_t n_val = 5;
    std::string counting = "paper";
    bool keep_all = false;
};

std::string omega_rows(const std::string& experiment, const std::vector<std::pair<std::string, std::optional<double>>>& rows) {
    std::string csv = csv_line({"experiment", "subject", "omega"}) + "\n";
    for (const auto& [subject, omega] : rows) csv += csv_line({experiment, subject, omega_text(omega)}) + "\n";
    return csv;
}

void cmd_train(const TrainArgs& a, std::ostream& out) {
    const Choices c = load_choices(a.choices, a.keep_all, out);
    const auto vectors = read_metric_vectors(a.metrics);
    const ExperimentFilter filter = a.exp.filter();
    const SvrConfig config = a.svr.config();
    const PreferenceTable table = build_preference_table(c.records, filter);
    const auto rows = build_dataset(table, vectors, filter, parse_pair_counting(a.counting));
    const RowSplit split = split_rows(rows, a.n_train, a.n_val, a.seed);
    out << "training rows: " << split.train.size() << '\n' << "validation rows: " << split.validation.size() << '\n';

    const CombinerModel model = train_combiner(split.train, filter, config);
    const auto omega = evaluate_combiner(model, split.validation, table);
    out << "validation agreement: " << omega_text(omega) << '\n';

    std::vector<std::pair<std::string, std::optional<double>>> report{{"combiner", omega}};
    for (MetricId metric : complete_metrics(vectors))
        report.emplace_back(std::string(metric_name(metric)), metric_omega_on_rows(metric, vectors, split.validation, table));

    save_model(a.out, model);
    if (!a.report.empty()) write_text(a.report, omega_rows(to_string(filter), report));

    RunManifest m;
    m.command = "train";
    m.config = {{"choices", a.choices.generic_string()}, {"metrics", a.metrics.generic_string()}};
    a.exp.record(m);
    a.svr.record(m);
    m.config.emplace_back("train_scenes", std::to_string(a.n_train));
    m.config.emplace_back("validation_scenes", std::to_string(a.n_val));
    m.config.emplace_back("pair_counting", a.counting);
    m.config.emplace_back("keep_all_observers", a.keep_all ? "true" : "false");
    m.config.emplace_back("training_rows", std::to_string(split.train.size()));
    m.config.emplace_back("validation_rows", std::to_string(split.validation.size()));
    m.inputs = {a.choices, a.metrics};
    m.seed = a.seed;
    m.outputs = {a.out};
    if (!a.report.empty()) m.outputs.push_back(a.report);
    write_manifests(m);
}

struct EvalArgs {
    fs::path model, choices, metrics, out;
    bool keep_all = false;
};

void cmd_eval(const EvalArgs& a, std::ostream& out) {
    const CombinerModel model = load_model(a.model);
    const Choices c = load_choices(a.choices, a.keep_all, out);
    const auto vectors = read_metric_vectors(a.metrics);
    const PreferenceTable table = build_preference_table(c.records, model.experiment);
    const auto rows = build_dataset(table, vectors, model.experiment, PairCounting::Unordered);

    std::vector<std::pair<std::string, std::optional<double>>> report{
        {"combiner", evaluate_combiner(model, rows, table)}};
    for (MetricId metric : complete_metrics(vectors))
        report.emplace_back(std::string(metric_name(metric)), metric_omega_on_rows(metric, vectors, rows, table));
    write_text(a.out, omega_rows(to_string(model.experiment), report));
    for (const auto& [subject, omega] : report) out << subject << ' ' << omega_text(omega) << '\n';

    RunManifest m;
    m.command = "eval";
    m.config = {{"model", a.model.generic_string()},
                {"choices", a.choices.generic_string()},
                {"metrics", a.metrics.generic_string()},
                {"keep_all_observers", a.keep_all ? "true" : "false"}};
    m.inputs = {a.model, a.choices, a.metrics};
    m.outputs = {a.out};
    write_manifests(m);
}

struct HoldoutArgs {
    fs::path choices, metrics, out;
    ExperimentFlags exp;
    SvrFlags svr;
    std::vector<std::string> methods;
    std::string counting = "paper";
    bool keep_all = false;
};

void cmd_holdout(HoldoutArgs a, std::ostream& out) {
    if (a.exp.setting == "both") a.exp.setting = "indoor";
    const ExperimentFilter filter = a.exp.filter();
    const SvrConfig config = a.svr.config();
    const Choices c = load_choices(a.choices, a.keep_all, out);
    const auto vectors = read_metric_vectors(a.metrics);

    auto methods = a.methods;
    if (methods.empty()) {
        std::set<std::string> seen;
        for (const auto& r : filter_records(c.records, filter)) {
            seen.insert(r.method_a);
            seen.insert(r.method_b);
        }
        methods.assign(seen.begin(), seen.end());
    }
    std::vector<std::pair<std::string, std::optional<double>>> report;
    for (const auto& method : methods) {
        const auto r = holdout_method(c.records, vectors, method, filter, config, parse_pair_counting(a.counting));
        out << "holdout " << method << ": training rows " << r.train_rows << ", evaluation rows " << r.eval_rows
            << ", agreement " << omega_text(r.omega) << '\n';
        report.emplace_back("holdout:" + method, r.omega);
    }
    write_text(a.out, omega_rows(to_string(filter), report));

    RunManifest m;
    m.command = "holdout";
    m.config = {{"choices", a.choices.generic_string()}, {"metrics", a.metrics.generic_string()}};
    a.exp.record(m);
    a.svr.record(m);
    std::string joined;
    for (const auto& method : methods) joined += (joined.empty() ? "" : ",") + method;
    m.config.emplace_back("methods", joined);
    m.config.emplace_back("pair_counting", a.counting);
    m.config.emplace_back("keep_all_observers", a.keep_all ? "true" : "false");
    m.inputs = {a.choices, a.metrics};
    m.outputs = {a.out};
    write_manifests(m);
}

struct SimulateArgs {
    fs::path spec, out_choices, out_metrics;
    std::optional<std::uint64_t> seed;
};

void cmd_simulate(const SimulateArgs& a, std::ostream& out) {
    SimulationSpec spec = load_simulation_spec(a.spec);
    if (a.seed) spec.seed = *a.seed;
    const SimulatedData data = simulate_dataset(spec);
    write_choices(a.out_choices, data.records);
    write_metric_vectors(a.out_metrics, data.vectors);

    RunManifest m;
    m.command = "simulate";
    m.config = {{"spec", a.spec.generic_string()}};
    m.inputs = {a.spec};
    m.seed = spec.seed;
    m.outputs = {a.out_choices, a.out_metrics};
    write_manifests(m);
    out << "choice records: " << data.records.size() << '\n' << "metric vectors: " << data.vectors.size() << '\n';
}

struct SelectScenesArgs {
    fs::path panoramas, out;
    int k = 25;
    std::uint64_t seed = 0;
};

void cmd_select_scenes(const SelectScenesArgs& a, std::ostream& out) {
    if (!fs::is_directory(a.panoramas)) fail_io("panorama directory not found: " + a.panoramas.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(a.panoramas)) {
        const auto ext = entry.path().extension().string();
        if (entry.is_regular_file() && (ext == ".hdr" || ext == ".pfm" || ext == ".png")) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.size() < static_cast<std::size_t>(std::max(a.k, 1)))
        fail_validation("need at least " + std::to_string(a.k) + " panoramas, found " + std::to_string(files.size()));

    std::vector<Sh1Coefficients> coefficients;
    for (const auto& f : files) {
        ImageBuffer img = load_image(f);
        if (img.space() == ColorSpace::SrgbEncoded) img = srgb_to_linear(img);
        coefficients.push_back(sh1_project(Panorama(std::move(img))));
    }
    const auto selected = select_scenes(coefficients, a.k, a.seed);
    std::string text;
    for (std::size_t i : selected) text += files[i].filename().string() + "\n";
    write_text(a.out, text);

    RunManifest m;
    m.command = "select-scenes";
    m.config = {{"panoramas", a.panoramas.generic_string()}, {"k", std::to_string(a.k)}};
    m.inputs = files;
    m.seed = a.seed;
    m.outputs = {a.out};
    write_manifests(m);
    out << text;
}

struct ServeArgs {
    fs::path studies, log, static_dir;
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string operator_token;
};

void cmd_serve(ServeArgs a, std::ostream& out) {
    if (a.operator_token.empty())
        if (const char* env = std::getenv("LUXP_OPERATOR_TOKEN")) a.operator_token = env;
    if (a.operator_token.empty()) fail_validation("an operator token is required (--operator-token or LUXP_OPERATOR_TOKEN)");

    StudyService service(load_study_definitions(a.studies), a.log);
    StudyHttpServer server(service, a.operator_token, a.static_dir);

    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    const int port = server.bind(a.host, a.port);
    out << "listening on http://" << a.host << ':' << port << std::endl;
    std::thread waiter([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        server.stop();
    });
    server.listen();
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
    pthread_sigmask(SIG_UNBLOCK, &signals, nullptr);
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Perceptual evaluation toolkit for lighting estimation", "luxp"};
    app.set_version_flag("--version", std::string(LUXP_VERSION));
    app.require_subcommand(1);

    ComputeMetricsArgs cm;
    auto* c_metrics = app.add_subcommand("compute-metrics", "Compute metric vectors of every stimulus");
    c_metrics->add_option("--stimuli", cm.stimuli, "<root>/<scene>/<method>.png")->required();
    c_metrics->add_option("--gt", cm.gt, "<gt_root>/<scene>.png")->required();
    c_metrics->add_option("--external", cm.external, "CSV of externally computed scores");
    c_metrics->add_option("--out", cm.out, "output CSV")->required();
    c_metrics->add_option("--jobs", cm.jobs, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();

    ScaleArgs sc;
    auto* c_scale = app.add_subcommand("scale", "Thurstone Case V scores with bootstrap intervals");
    c_scale->add_option("--choices", sc.choices, "choice log (JSON Lines)")->required();
    sc.exp.add_to(*c_scale, true);
    c_scale->add_option("--seed", sc.seed, "bootstrap seed")->capture_default_str();
    c_scale->add_option("--bootstrap", sc.replicates, "bootstrap replicates")->check(CLI::Range(1, 1000000))->capture_default_str();
    c_scale->add_option("--confidence", sc.confidence, "interval coverage")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    c_scale->add_option("--alpha", sc.alpha, "pairwise test level")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    c_scale->add_flag("--keep-all-observers", sc.keep_all, "skip the below-chance observer exclusion");
    c_scale->add_option("--out", sc.out, "output JSON")->required();
    c_scale->add_option("--bars", sc.bars, "per-method CSV (default: --out with .csv)");

    AgreementArgs ag;
    auto* c_agree = app.add_subcommand("agreement", "Agreement of metrics and observers with the majority");
    c_agree->add_option("--choices", ag.choices, "choice log (JSON Lines)")->required();
    c_agree->add_option("--metrics", ag.metrics, "metric CSV")->required();
    ag.exp.add_to(*c_agree);
    c_agree->add_flag("--keep-all-observers", ag.keep_all, "skip the below-chance observer exclusion");
    c_agree->add_option("--out", ag.out, "output CSV")->required();

    TrainArgs tr;
    auto* c_train = app.add_subcommand("train", "Train the learned metric combination");
    c_train->add_option("--choices", tr.choices, "choice log (JSON Lines)")->required();
    c_train->add_option("--metrics", tr.metrics, "metric CSV")->required();
    tr.exp.add_to(*c_train);
    tr.svr.add_to(*c_train);
    c_train->add_option("--seed", tr.seed, "scene split seed")->capture_default_str();
    c_train->add_option("--train-scenes", tr.n_train, "training scenes per setting")->capture_default_str();
    c_train->add_option("--val-scenes", tr.n_val, "validation scenes per setting")->capture_default_str();
    c_train->add_option("--pair-counting", tr.counting, "paper or unordered")
        ->check(CLI::IsMember({"paper", "unordered"}))
        ->capture_default_str();
    c_train->add_flag("--keep-all-observers", tr.keep_all, "skip the below-chance observer exclusion");
    c_train->add_option("--out", tr.out, "output model JSON")->required();
    c_train->add_option("--report", tr.report, "validation agreement CSV");

    EvalArgs ev;
    auto* c_eval = app.add_subcommand("eval", "Agreement of a trained model on new data");
    c_eval->add_option("--model", ev.model, "model JSON")->required();
    c_eval->add_option("--choices", ev.choices, "choice log (JSON Lines)")->required();
    c_eval->add_option("--metrics", ev.metrics, "metric CSV")->required();
    c_eval->add_flag("--keep-all-observers", ev.keep_all, "skip the below-chance observer exclusion");
    c_eval->add_option("--out", ev.out, "output CSV")->required();

    HoldoutArgs ho;
    auto* c_holdout = app.add_subcommand("holdout", "Hold-one-method-out retraining (indoor data)");
    c_holdout->add_option("--choices", ho.choices, "choice log (JSON Lines)")->required();
    c_holdout->add_option("--metrics", ho.metrics, "metric CSV")->required();
    ho.exp.add_to(*c_holdout);
    ho.svr.add_to(*c_holdout);
    c_holdout->add_option("--method", ho.methods, "method to hold out (repeatable; default: each in turn)");
    c_holdout->add_option("--pair-counting", ho.counting, "paper or unordered")
        ->check(CLI::IsMember({"paper", "unordered"}))
        ->capture_default_str();
    c_holdout->add_flag("--keep-all-observers", ho.keep_all, "skip the below-chance observer exclusion");
    c_holdout->add_option("--out", ho.out, "output CSV")->required();

    SimulateArgs si;
    auto* c_sim = app.add_subcommand("simulate", "Generate a synthetic study");
    c_sim->add_option("--spec", si.spec, "simulation spec JSON")->required();
    c_sim->add_option("--seed", si.seed, "overrides the spec seed");
    c_sim->add_option("--out-choices", si.out_choices, "output choice log")->required();
    c_sim->add_option("--out-metrics", si.out_metrics, "output metric CSV")->required();

    SelectScenesArgs ss;
    auto* c_select = app.add_subcommand("select-scenes", "Pick representative panoramas by SH clustering");
    c_select->add_option("--panoramas", ss.panoramas, "directory of .hdr/.pfm/.png panoramas")->required();
    c_select->add_option("--k", ss.k, "number of scenes")->check(CLI::PositiveNumber)->capture_default_str();
    c_select->add_option("--seed", ss.seed, "k-means seed")->capture_default_str();
    c_select->add_option("--out", ss.out, "output list")->required();

    ServeArgs sv;
    auto* c_serve = app.add_subcommand("serve", "Run the study server");
    c_serve->add_option("--studies", sv.studies, "study definitions JSON")->required();
    c_serve->add_option("--log", sv.log, "append-only event log")->required();
    c_serve->add_option("--host", sv.host)->capture_default_str();
    c_serve->add_option("--port", sv.port)->check(CLI::Range(0, 65535))->capture_default_str();
    c_serve->add_option("--operator-token", sv.operator_token, "export credential (or LUXP_OPERATOR_TOKEN)");
    c_serve->add_option("--static", sv.static_dir, "directory served at /");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 1;
    }

    try {
        if (*c_metrics) cmd_compute_metrics(cm, out);
        else if (*c_scale) cmd_scale(sc, out);
        else if (*c_agree) cmd_agreement(ag, out);
        else if (*c_train) cmd_train(tr, out);
        else if (*c_eval) cmd_eval(ev, out);
        else if (*c_holdout) cmd_holdout(ho, out);
        else if (*c_sim) cmd_simulate(si, out);
        else if (*c_select) cmd_select_scenes(ss, out);
        else if (*c_serve) cmd_serve(sv, out);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << '\n';
        return 2;
    } catch (const fs::filesystem_error& e) {
        err << "I/O error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

} // namespace luxp
