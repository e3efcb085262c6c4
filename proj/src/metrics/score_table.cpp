#include "luxp/score_table.hpp"

#include "luxp/csv.hpp"
#include "luxp/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace luxp {

namespace {

const CsvRow score_header{"scene_id", "method_id", "metric", "value"};

std::vector<ScoreRow> parse_rows(const std::filesystem::path& path) {
    std::vector<ScoreRow> rows;
    for (const auto& fields : read_csv(path, score_header)) {
        if (fields[0].empty() || fields[1].empty())
            fail_validation(path.string() + ": empty scene_id or method_id");
        rows.push_back({fields[0], fields[1], parse_metric(fields[2]), parse_number(fields[3])});
    }
    return rows;
}

} // namespace

std::optional<double> MetricVector::get(MetricId id) const {
    auto it = values.find(id);
    if (it == values.end()) return std::nullopt;
    return it->second;
}

void ExternalScoreTable::add(ScoreRow row) {
    if (!std::isfinite(row.value))
        fail_validation("non-finite " + std::string(metric_name(row.metric)) + " score for " + row.scene_id + "/" +
                        row.method_id);
    auto key = std::make_tuple(row.scene_id, row.method_id, row.metric);
    if (index_.count(key))
        fail_validation("duplicate score row for " + row.scene_id + "/" + row.method_id + "/" +
                        std::string(metric_name(row.metric)));
    index_.emplace(std::move(key), rows_.size());
    rows_.push_back(std::move(row));
}

std::optional<double> ExternalScoreTable::find(const std::string& scene, const std::string& method,
                                               MetricId metric) const {
    auto it = index_.find(std::make_tuple(scene, method, metric));
    if (it == index_.end()) return std::nullopt;
    return rows_[it->second].value;
}

ExternalScoreTable ingest_external_scores(const std::filesystem::path& path) {
    ExternalScoreTable table;
    for (auto& row : parse_rows(path)) table.add(std::move(row));
    return table;
}

void write_metric_vectors(const std::filesystem::path& path, const std::vector<MetricVector>& vectors) {
    std::vector<const MetricVector*> sorted;
    for (const auto& v : vectors) sorted.push_back(&v);
    std::stable_sort(sorted.begin(), sorted.end(), [](const MetricVector* a, const MetricVector* b) {
        return std::tie(a->scene_id, a->method_id) < std::tie(b->scene_id, b->method_id);
    });
    std::ofstream out(path, std::ios::binary);
    if (!out) fail_io("cannot write " + path.string());
    out << csv_line(score_header) << '\n';
    for (const MetricVector* v : sorted)
        for (const auto& [id, value] : v->values)
            out << csv_line({v->scene_id, v->method_id, std::string(metric_name(id)), format_number(value)}) << '\n';
    if (!out) fail_io("error while writing " + path.string());
}

std::vector<MetricVector> read_metric_vectors(const std::filesystem::path& path) {
    std::map<std::pair<std::string, std::string>, MetricVector> by_key;
    for (auto& row : parse_rows(path)) {
        const bool psnr_identity = row.metric == MetricId::Psnr && row.value == INFINITY;
        if (!std::isfinite(row.value) && !psnr_identity)
            fail_validation(path.string() + ": non-finite " + std::string(metric_name(row.metric)) + " value for " +
                            row.scene_id + "/" + row.method_id);
        auto& v = by_key[{row.scene_id, row.method_id}];
        v.scene_id = row.scene_id;
        v.method_id = row.method_id;
        if (!v.values.emplace(row.metric, row.value).second)
            fail_validation(path.string() + ": duplicate " + std::string(metric_name(row.metric)) + " for " +
                            row.scene_id + "/" + row.method_id);
    }
    std::vector<MetricVector> out;
    for (auto& [key, v] : by_key) out.push_back(std::move(v));
    return out;
}

std::map<std::pair<std::string, std::string>, const MetricVector*>
index_vectors(const std::vector<MetricVector>& vectors) {
    std::map<std::pair<std::string, std::string>, const MetricVector*> index;
    for (const auto& v : vectors)
        if (!index.emplace(std::make_pair(v.scene_id, v.method_id), &v).second)
            fail_validation("duplicate metric vector for " + v.scene_id + "/" + v.method_id);
    return index;
}

} // namespace luxp
