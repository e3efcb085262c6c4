#pragma once

#include "luxp/metric_id.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace luxp {

/// Metric values of one stimulus (scene, method) against its scene's ground
/// truth. Values are finite except PSNR, which is +inf for a stimulus
/// identical to its reference.
struct MetricVector {
    std::string scene_id;
    std::string method_id;
    std::map<MetricId, double> values;

    std::optional<double> get(MetricId id) const;
};

struct ScoreRow {
    std::string scene_id;
    std::string method_id;
    MetricId metric = MetricId::Lpips;
    double value = 0.0;
};

/// Carrier for scores computed outside the toolkit (LPIPS, PieAPP, FLIP,
/// HyperIQA). Keys (scene, method, metric) are unique and values finite.
class ExternalScoreTable {
public:
    void add(ScoreRow row);
    std::optional<double> find(const std::string& scene, const std::string& method, MetricId metric) const;

    const std::vector<ScoreRow>& rows() const { return rows_; }
    std::size_t size() const { return rows_.size(); }
    bool empty() const { return rows_.empty(); }

private:
    std::vector<ScoreRow> rows_;
    std::map<std::tuple<std::string, std::string, MetricId>, std::size_t> index_;
};

/// Header `scene_id,method_id,metric,value`; unknown metric names, duplicate
/// keys and non-finite values are rejected.
ExternalScoreTable ingest_external_scores(const std::filesystem::path& path);

/// Long-format metric CSV (same header as the external score file). Rows are
/// written sorted by scene, method, then metric registry order.
void write_metric_vectors(const std::filesystem::path& path, const std::vector<MetricVector>& vectors);
std::vector<MetricVector> read_metric_vectors(const std::filesystem::path& path);

/// Indexes vectors by (scene, method); duplicates are rejected.
std::map<std::pair<std::string, std::string>, const MetricVector*>
index_vectors(const std::vector<MetricVector>& vectors);

struct Stimulus {
    std::string scene_id;
    std::string method_id;
    std::filesystem::path path;
};

/// Computes the seven native metrics of every stimulus against its scene's
/// ground-truth image and merges any external rows for the same stimulus.
/// `jobs` > 1 spreads stimuli over threads; output order follows `stimuli`.
std::vector<MetricVector> compute_metric_vectors(const std::vector<Stimulus>& stimuli,
                                                 const std::map<std::string, std::filesystem::path>& ground_truth,
                                                 const ExternalScoreTable& external, int jobs = 1);

} // namespace luxp
