#pragma once

#include "luxp/records.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace luxp {

/// N x N tally where count(i, j) is how often method i was preferred over j.
class ComparisonMatrix {
public:
    explicit ComparisonMatrix(std::vector<std::string> methods);

    const std::vector<std::string>& methods() const { return methods_; }
    std::size_t size() const { return methods_.size(); }

    long count(std::size_t winner, std::size_t loser) const { return counts_[winner * size() + loser]; }
    void add(std::size_t winner, std::size_t loser, long n = 1);

    std::optional<std::size_t> index_of(const std::string& method) const;
    long total() const;
    ComparisonMatrix transposed() const;

    bool operator==(const ComparisonMatrix&) const = default;

private:
    std::vector<std::string> methods_;
    std::vector<long> counts_;
};

/// Tallies the A/B records matching `filter` (and `scene`, when given). Ties
/// carry no vote and are skipped. Methods are sorted by id.
ComparisonMatrix build_matrix(const std::vector<ChoiceRecord>& records, const ExperimentFilter& filter,
                              const std::optional<std::string>& scene = std::nullopt);

/// Same, over a fixed method list; records naming other methods are an error.
ComparisonMatrix build_matrix(const std::vector<ChoiceRecord>& records, const ExperimentFilter& filter,
                              const std::optional<std::string>& scene, const std::vector<std::string>& methods);

using ScoreMap = std::map<std::string, double>;

/// Case V scale values from a matrix of preference proportions p[i][j]
/// (probability that i beats j). Only the upper triangle is read;
/// z[j][i] = -z[i][j] so the scores sum to zero by construction.
std::vector<double> case_v_scores(const std::vector<std::vector<double>>& proportions);

/// wins / total clamped to [1/(2 total), 1 - 1/(2 total)]; 0.5 when total = 0.
double clamped_proportion(long wins, long total);

/// Thurstone Case V scaling of one comparison matrix: s_i = mean_j z_ij.
ScoreMap thurstone_case_v(const ComparisonMatrix& matrix);

struct Interval {
    double low = 0.0;
    double high = 0.0;
};

struct ScaleResult {
    ScoreMap scores;
    ScoreMap ci_low;
    ScoreMap ci_high;
    std::size_t n_scenes = 0;
};

/// Alternative interval estimator (e.g. a closed-form dispersion model). It
/// receives the filtered records and the point estimates.
using IntervalEstimator =
    std::function<std::map<std::string, Interval>(const std::vector<ChoiceRecord>&, const ScaleResult&)>;

struct ScaleOptions {
    int bootstrap_replicates = 1000;
    double confidence = 0.95;
    std::uint64_t seed = 0;
    IntervalEstimator interval_estimator; // empty: observer bootstrap
};

/// Per-scene Case V scaling averaged with equal scene weights. The default
/// interval is a percentile bootstrap over observers; each replicate draws
/// from its own seeded stream. Intervals are widened to contain the point
/// estimate when the percentile range misses it.
ScaleResult scale_experiment(const std::vector<ChoiceRecord>& records, const ExperimentFilter& filter,
                             const ScaleOptions& options = {});

/// Exact two-sided binomial test against p = 0.5.
double binomial_two_sided_p(long successes, long trials);

struct PairTest {
    std::string method_a;
    std::string method_b;
    long wins_a = 0;
    long wins_b = 0;
    double p_value = 1.0;
    bool significant = false;
};

/// Head-to-head counts pooled over scenes, one exact binomial test per pair.
std::vector<PairTest> pairwise_tests(const std::vector<ChoiceRecord>& records, const ExperimentFilter& filter,
                                     double alpha = 0.05);

/// Pairs (sorted ids) whose two-sided p-value is below alpha.
std::set<std::pair<std::string, std::string>> pairwise_significance(const std::vector<ChoiceRecord>& records,
                                                                     const ExperimentFilter& filter,
                                                                     double alpha = 0.05);

} // namespace luxp
