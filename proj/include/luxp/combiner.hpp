#pragma once

#include "luxp/agreement.hpp"
#include "luxp/metric_id.hpp"
#include "luxp/records.hpp"
#include "luxp/score_table.hpp"
#include "luxp/svr.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace luxp {

/// How many rows one unordered comparison slot contributes.
///  - Unordered: both orders once, i.e. 2 rows per slot.
///  - PaperAccounting: as Unordered, except that a setting compared over
///    exactly three methods emits each order twice (3 pairs counted as 6),
///    which is what makes 5/3 methods over 20 training scenes come to 640.
enum class PairCounting { Unordered, PaperAccounting };

std::string to_string(PairCounting counting);
PairCounting parse_pair_counting(std::string_view text);

/// Metric-difference features of one ordered stimulus pair and the observed
/// preference for its first member.
struct FeatureRow {
    ExperimentKey experiment;
    std::string scene_id;
    std::string method_a;
    std::string method_b;
    std::vector<double> features; // metric(a) - metric(b), in combiner_metrics() order
    double target = 0.5;          // share of observers preferring a
};

/// Rows for every slot of `table` that matches `experiment`, both orders.
/// Throws if any of the ten full-reference metrics is missing for a
/// referenced stimulus, naming the gap.
std::vector<FeatureRow> build_dataset(const PreferenceTable& table, const std::vector<MetricVector>& vectors,
                                      const ExperimentFilter& experiment,
                                      PairCounting counting = PairCounting::PaperAccounting);

struct SceneSplit {
    std::set<std::string> train;
    std::set<std::string> validation;
};

/// Seeded shuffle of exactly n_train + n_val distinct scene ids.
SceneSplit split_scenes(std::vector<std::string> scene_ids, std::size_t n_train, std::size_t n_val,
                        std::uint64_t seed);

struct RowSplit {
    std::vector<FeatureRow> train;
    std::vector<FeatureRow> validation;
    std::vector<SceneSplit> per_setting; // indoor first, then outdoor when present
};

/// Splits the scenes of each setting separately so that no scene has rows on
/// both sides.
RowSplit split_rows(const std::vector<FeatureRow>& rows, std::size_t n_train, std::size_t n_val, std::uint64_t seed);

/// Trained preference function of one experiment.
struct CombinerModel {
    ExperimentFilter experiment;
    std::vector<MetricId> metrics; // feature order
    SvrModel svr;
};

CombinerModel train_combiner(const std::vector<FeatureRow>& rows, const ExperimentFilter& experiment,
                             const SvrConfig& config = {});

/// Raw regression output for one ordered pair, not clamped to [0, 1].
double predict_preference(const CombinerModel& model, std::span<const double> features);

/// Turns predictions into pseudo-observer records (observer "combiner"):
/// above 0.5 picks a, below picks b, exactly 0.5 is a tie.
std::vector<ChoiceRecord> combiner_choices(const CombinerModel& model, const std::vector<FeatureRow>& rows,
                                           const std::string& subject = "combiner");

/// Agreement of the combiner's decisions on `rows` with the majority in `table`.
std::optional<double> evaluate_combiner(const CombinerModel& model, const std::vector<FeatureRow>& rows,
                                        const PreferenceTable& table);

/// Agreement of one metric on the slots covered by `rows`.
std::optional<double> metric_omega_on_rows(MetricId metric, const std::vector<MetricVector>& vectors,
                                           const std::vector<FeatureRow>& rows, const PreferenceTable& table);

struct HoldoutResult {
    CombinerModel model;
    std::optional<double> omega;
    std::size_t train_rows = 0;
    std::size_t eval_rows = 0;
};

/// Retrains without every comparison that involves `held_out` and scores the
/// model on exactly those comparisons. Indoor data only.
HoldoutResult holdout_method(const std::vector<ChoiceRecord>& records, const std::vector<MetricVector>& vectors,
                             const std::string& held_out, const ExperimentFilter& experiment,
                             const SvrConfig& config = {}, PairCounting counting = PairCounting::PaperAccounting);

void save_model(const std::filesystem::path& path, const CombinerModel& model);
CombinerModel load_model(const std::filesystem::path& path);
std::string model_to_json(const CombinerModel& model);
CombinerModel model_from_json(std::string_view text);

} // namespace luxp
