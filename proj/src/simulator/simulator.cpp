#include "luxp/simulator.hpp"

#include "luxp/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <ctime>
#include <fstream>
#include <numbers>
#include <sstream>

namespace luxp {

namespace {

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t experiment_code(const ExperimentKey& key) {
    return static_cast<std::uint64_t>(key.task) * 100 + static_cast<std::uint64_t>(key.material) * 10 +
           static_cast<std::uint64_t>(key.setting);
}

std::string iso_timestamp(std::int64_t offset_seconds) {
    const std::time_t t = static_cast<std::time_t>(1704067200 + offset_seconds); // 2024-01-01T00:00:00Z
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string padded(std::size_t i, std::size_t width) {
    std::string s = std::to_string(i);
    return std::string(width > s.size() ? width - s.size() : 0, '0') + s;
}

std::size_t digits_for(std::size_t n) {
    std::size_t w = 2;
    for (std::size_t limit = 100; n > limit; limit *= 10) ++w;
    return w;
}

} // namespace

void SyntheticObserverSpec::validate() const {
    if (true_scores.empty()) fail_validation("observer spec has no true scores");
    for (const auto& [method, s] : true_scores)
        if (!std::isfinite(s)) fail_validation("true score of '" + method + "' is not finite");
    if (!(rate >= 0.0 && rate <= 1.0)) fail_validation("contamination rate must lie in [0, 1]");
}

std::vector<MethodPair> all_pairs(std::vector<std::string> methods) {
    std::sort(methods.begin(), methods.end());
    methods.erase(std::unique(methods.begin(), methods.end()), methods.end());
    std::vector<MethodPair> out;
    for (std::size_t i = 0; i < methods.size(); ++i)
        for (std::size_t j = i + 1; j < methods.size(); ++j) out.emplace_back(methods[i], methods[j]);
    return out;
}

std::vector<std::string> observer_ids(std::size_t n, std::size_t first, const std::string& prefix) {
    const std::size_t width = digits_for(first + n);
    std::vector<std::string> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + padded(first + i, width));
    return out;
}

std::vector<std::string> scene_ids(Setting setting, std::size_t n) {
    return observer_ids(n, 0, setting == Setting::Indoor ? "in" : "out");
}

double standard_normal(Rng& rng) {
    const double u1 = 1.0 - uniform01(rng); // (0, 1]
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<ChoiceRecord> simulate_choices(const SyntheticObserverSpec& spec, const std::vector<std::string>& observers,
                                           const std::vector<std::string>& scenes,
                                           const std::vector<MethodPair>& pairs, const ExperimentKey& experiment) {
    spec.validate();
    auto score = [&](const std::string& m) {
        auto it = spec.true_scores.find(m);
        if (it == spec.true_scores.end()) fail_validation("method '" + m + "' has no true score");
        return it->second;
    };
    for (const auto& [a, b] : pairs) {
        score(a);
        score(b);
        if (a == b) fail_validation("pair compares '" + a + "' with itself");
    }

    std::vector<ChoiceRecord> out;
    out.reserve(observers.size() * scenes.size() * pairs.size());
    for (const auto& observer : observers) {
        Rng rng = make_rng(derive_seed(spec.seed, fnv1a(observer)), experiment_code(experiment));
        std::int64_t clock = 0;
        for (const auto& scene : scenes) {
            for (const auto& [a, b] : pairs) {
                const double p = 0.5 * std::erfc(-(score(a) - score(b)) / 2.0); // Phi(d / sqrt 2)
                const double u_choice = uniform01(rng);
                const double u_noise = uniform01(rng);
                const double u_side = uniform01(rng);
                bool picks_a = u_choice < p;
                if (spec.noise == NoiseModel::Contaminated && u_noise < spec.rate) picks_a = u_choice < 0.5;
                ChoiceRecord r;
                r.observer_id = observer;
                r.experiment = experiment;
                r.scene_id = scene;
                r.method_a = a;
                r.method_b = b;
                r.chosen = picks_a ? Choice::A : Choice::B;
                r.presented_left = u_side < 0.5 ? Choice::A : Choice::B;
                clock += 3;
                r.timestamp = iso_timestamp(clock);
                out.push_back(std::move(r));
            }
        }
    }
    return out;
}

std::vector<MetricVector> simulate_metric_scores(const SyntheticObserverSpec& spec,
                                                 const std::vector<std::string>& scenes,
                                                 const std::map<MetricId, double>& fidelity, std::uint64_t seed) {
    spec.validate();
    for (const auto& [metric, f] : fidelity)
        if (!(f >= -1.0 && f <= 1.0))
            fail_validation("fidelity of " + std::string(metric_name(metric)) + " must lie in [-1, 1]");
    std::vector<MetricVector> out;
    for (const auto& scene : scenes) {
        for (const auto& [method, s] : spec.true_scores) {
            Rng rng = make_rng(seed, fnv1a(scene + "/" + method));
            MetricVector v;
            v.scene_id = scene;
            v.method_id = method;
            for (MetricId metric : all_metrics()) {
                const double z = standard_normal(rng);
                auto it = fidelity.find(metric);
                if (it == fidelity.end()) continue;
                const double f = it->second;
                v.values[metric] = orientation_sign(metric) * (f * s + std::sqrt(std::max(0.0, 1.0 - f * f)) * z);
            }
            out.push_back(std::move(v));
        }
    }
    return out;
}

void SimulationSpec::validate() const {
    if (observers == 0) fail_validation("simulation needs at least one observer");
    if (contaminated_observers > observers) fail_validation("more contaminated observers than observers");
    if (!(contamination_rate >= 0.0 && contamination_rate <= 1.0))
        fail_validation("contamination rate must lie in [0, 1]");
    if (methods.empty()) fail_validation("simulation spec lists no methods");
    for (const auto& [setting, m] : methods) {
        if (m.size() < 2) fail_validation(to_string(setting) + " needs at least two methods");
        auto it = scenes.find(setting);
        if (it == scenes.end() || it->second == 0) fail_validation(to_string(setting) + " has no scenes");
    }
    for (const auto& [metric, f] : fidelity)
        if (!(f >= -1.0 && f <= 1.0))
            fail_validation("fidelity of " + std::string(metric_name(metric)) + " must lie in [-1, 1]");
}

SimulationSpec simulation_spec_from_json(std::string_view text) {
    using nlohmann::json;
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        fail_validation(std::string("simulation spec is not valid JSON: ") + e.what());
    }
    SimulationSpec spec;
    try {
        spec.seed = j.value("seed", std::uint64_t{0});
        spec.observers = j.value("observers", std::size_t{30});
        spec.contaminated_observers = j.value("contaminated_observers", std::size_t{0});
        spec.contamination_rate = j.value("contamination_rate", 1.0);
        if (j.contains("scenes")) {
            spec.scenes.clear();
            for (const auto& [name, n] : j.at("scenes").items()) spec.scenes[parse_setting(name)] = n.get<std::size_t>();
        }
        for (const auto& [name, scores] : j.at("methods").items())
            spec.methods[parse_setting(name)] = scores.get<std::map<std::string, double>>();
        if (j.contains("experiments")) {
            for (const auto& e : j.at("experiments"))
                spec.experiments.emplace_back(parse_task(std::to_string(e.at("task").get<int>())),
                                              parse_material(e.at("material").get<std::string>()));
        }
        if (j.contains("fidelity"))
            for (const auto& [name, f] : j.at("fidelity").items()) spec.fidelity[parse_metric(name)] = f.get<double>();
    } catch (const nlohmann::json::exception& e) {
        fail_validation(std::string("malformed simulation spec: ") + e.what());
    }
    spec.validate();
    return spec;
}

SimulationSpec load_simulation_spec(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_io("cannot read " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return simulation_spec_from_json(buffer.str());
}

SimulatedData simulate_dataset(const SimulationSpec& spec) {
    spec.validate();
    auto experiments = spec.experiments;
    if (experiments.empty())
        for (Task t : {Task::Accuracy, Task::Plausibility})
            for (Material m : {Material::Diffuse, Material::Glossy}) experiments.emplace_back(t, m);

    const auto ids = observer_ids(spec.observers);
    const std::vector<std::string> clean(ids.begin(), ids.end() - static_cast<std::ptrdiff_t>(spec.contaminated_observers));
    const std::vector<std::string> noisy(ids.end() - static_cast<std::ptrdiff_t>(spec.contaminated_observers), ids.end());

    std::map<MetricId, double> fidelity;
    for (MetricId m : all_metrics()) fidelity[m] = 0.0;
    for (const auto& [m, f] : spec.fidelity) fidelity[m] = f;

    SimulatedData data;
    for (const auto& [setting, scores] : spec.methods) {
        const auto scenes = scene_ids(setting, spec.scenes.at(setting));
        std::vector<std::string> names;
        for (const auto& [name, s] : scores) names.push_back(name);
        const auto pairs = all_pairs(names);

        SyntheticObserverSpec observer{scores, NoiseModel::Thurstonian, 0.0, spec.seed};
        SyntheticObserverSpec contaminated{scores, NoiseModel::Contaminated, spec.contamination_rate, spec.seed};
        for (const auto& [task, material] : experiments) {
            const ExperimentKey key{task, material, setting};
            for (auto& r : simulate_choices(observer, clean, scenes, pairs, key)) data.records.push_back(std::move(r));
            for (auto& r : simulate_choices(contaminated, noisy, scenes, pairs, key))
                data.records.push_back(std::move(r));
        }
        for (auto& v : simulate_metric_scores(observer, scenes, fidelity, derive_seed(spec.seed, 0x6d6574726963ULL)))
            data.vectors.push_back(std::move(v));
    }
    return data;
}

} // namespace luxp
