#pragma once

#include "luxp/metric_id.hpp"
#include "luxp/records.hpp"
#include "luxp/rng.hpp"
#include "luxp/score_table.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace luxp {

enum class NoiseModel { Thurstonian, Contaminated };

/// Latent quality per method. A Thurstonian observer prefers a over b with
/// probability Phi((s_a - s_b) / sqrt 2); a contaminated one answers
/// uniformly at random with probability `rate` and like a Thurstonian
/// observer otherwise.
struct SyntheticObserverSpec {
    std::map<std::string, double> true_scores;
    NoiseModel noise = NoiseModel::Thurstonian;
    double rate = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

using MethodPair = std::pair<std::string, std::string>;

/// All unordered pairs of `methods` in lexicographic order.
std::vector<MethodPair> all_pairs(std::vector<std::string> methods);

/// "obs00", "obs01", ... with the width needed for n.
std::vector<std::string> observer_ids(std::size_t n, std::size_t first = 0, const std::string& prefix = "obs");

/// One record per (observer, scene, pair). Each observer draws from its own
/// stream derived from the seed, the observer id and the experiment, so
/// results do not depend on how observers are grouped into calls.
std::vector<ChoiceRecord> simulate_choices(const SyntheticObserverSpec& spec, const std::vector<std::string>& observers,
                                           const std::vector<std::string>& scenes,
                                           const std::vector<MethodPair>& pairs, const ExperimentKey& experiment);

/// Metric values with controlled fidelity: after orientation, metric k of
/// method i on every scene equals fidelity_k * s_i + sqrt(1 - fidelity_k^2) * z
/// with z standard normal. Fidelity 1 always ranks like the true scores,
/// fidelity -1 always ranks against them.
std::vector<MetricVector> simulate_metric_scores(const SyntheticObserverSpec& spec,
                                                 const std::vector<std::string>& scenes,
                                                 const std::map<MetricId, double>& fidelity, std::uint64_t seed);

/// Standard normal draw (Box-Muller on two uniforms).
double standard_normal(Rng& rng);

/// Full synthetic study: both settings, the requested experiments, observers
/// shared across experiments, and metric vectors for every stimulus.
struct SimulationSpec {
    std::uint64_t seed = 0;
    std::size_t observers = 30;
    std::size_t contaminated_observers = 0; // the last ids of the observer list
    double contamination_rate = 1.0;
    std::map<Setting, std::size_t> scenes{{Setting::Indoor, 25}, {Setting::Outdoor, 25}};
    std::map<Setting, std::map<std::string, double>> methods;
    std::vector<std::pair<Task, Material>> experiments; // empty: all four
    std::map<MetricId, double> fidelity;                // missing metrics get 0

    void validate() const;
};

SimulationSpec simulation_spec_from_json(std::string_view text);
SimulationSpec load_simulation_spec(const std::filesystem::path& path);

/// Scene ids are "in00".. for indoor and "out00".. for outdoor.
std::vector<std::string> scene_ids(Setting setting, std::size_t n);

struct SimulatedData {
    std::vector<ChoiceRecord> records;
    std::vector<MetricVector> vectors;
};

SimulatedData simulate_dataset(const SimulationSpec& spec);

} // namespace luxp
