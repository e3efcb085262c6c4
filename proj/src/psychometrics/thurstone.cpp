#include "luxp/error.hpp"
#include "luxp/psychometrics.hpp"
#include "luxp/rng.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <set>

namespace luxp {

namespace {

double inverse_normal(double p) {
    static const boost::math::normal standard;
    return boost::math::quantile(standard, p);
}

// Linear interpolation between order statistics (the usual "type 7" rule).
double percentile(std::vector<double> values, double q) {
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

// One observer's tallies within one scene, as (winner, loser, count) triples.
struct Tally {
    std::size_t observer;
    std::size_t winner;
    std::size_t loser;
};

std::vector<double> scores_from_counts(const std::vector<double>& counts, std::size_t n) {
    std::vector<std::vector<double>> p(n, std::vector<double>(n, 0.5));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double wins = counts[i * n + j], losses = counts[j * n + i];
            const double total = wins + losses;
            if (total <= 0.0) continue;
            p[i][j] = std::clamp(wins / total, 0.5 / total, 1.0 - 0.5 / total);
        }
    return case_v_scores(p);
}

} // namespace

double clamped_proportion(long wins, long total) {
    if (total <= 0) return 0.5;
    const double m = static_cast<double>(total);
    return std::clamp(static_cast<double>(wins) / m, 0.5 / m, 1.0 - 0.5 / m);
}

std::vector<double> case_v_scores(const std::vector<std::vector<double>>& proportions) {
    const std::size_t n = proportions.size();
    if (n < 2) fail_validation("Case V scaling needs at least two methods");
    std::vector<double> scores(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (proportions[i].size() != n) fail_validation("proportion matrix is not square");
        for (std::size_t j = i + 1; j < n; ++j) {
            const double p = proportions[i][j];
            if (!(p > 0.0 && p < 1.0)) fail_validation("preference proportions must lie strictly inside (0,1)");
            const double z = inverse_normal(p);
            scores[i] += z;
            scores[j] -= z;
        }
    }
    for (double& s : scores) s /= static_cast<double>(n);
    return scores;
}

ScoreMap thurstone_case_v(const ComparisonMatrix& matrix) {
    const std::size_t n = matrix.size();
    if (n < 2) fail_validation("Case V scaling needs at least two methods");
    std::vector<std::vector<double>> p(n, std::vector<double>(n, 0.5));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            p[i][j] = clamped_proportion(matrix.count(i, j), matrix.count(i, j) + matrix.count(j, i));
    const auto s = case_v_scores(p);
    ScoreMap out;
    for (std::size_t i = 0; i < n; ++i) out[matrix.methods()[i]] = s[i];
    return out;
}

ScaleResult scale_experiment(const std::vector<ChoiceRecord>& records, const ExperimentFilter& filter,
                             const ScaleOptions& options) {
    const auto selected = filter_records(records, filter);
    std::set<std::string> method_set, scene_set, observer_set;
    for (const auto& r : selected) {
        method_set.insert(r.method_a);
        method_set.insert(r.method_b);
        scene_set.insert(r.scene_id);
        observer_set.insert(r.observer_id);
    }
    if (scene_set.empty()) fail_validation("no scenes to scale for " + to_string(filter));
    const std::vector<std::string> methods(method_set.begin(), method_set.end());
    const std::vector<std::string> scenes(scene_set.begin(), scene_set.end());
    const std::vector<std::string> observers(observer_set.begin(), observer_set.end());
    const std::size_t n = methods.size();
    if (n < 2) fail_validation("Case V scaling needs at least two methods");

    auto position = [](const std::vector<std::string>& v, const std::string& key) {
        return static_cast<std::size_t>(std::lower_bound(v.begin(), v.end(), key) - v.begin());
    };

    std::vector<std::vector<Tally>> per_scene(scenes.size());
    for (const auto& r : selected) {
        if (r.chosen == Choice::Tie) continue;
        const std::size_t a = position(methods, r.method_a), b = position(methods, r.method_b);
        const bool a_wins = r.chosen == Choice::A;
        per_scene[position(scenes, r.scene_id)].push_back(
            {position(observers, r.observer_id), a_wins ? a : b, a_wins ? b : a});
    }

    auto scene_mean = [&](const std::vector<double>& observer_weight) {
        std::vector<double> mean(n, 0.0);
        std::vector<double> counts(n * n);
        for (const auto& tallies : per_scene) {
            std::fill(counts.begin(), counts.end(), 0.0);
            for (const auto& t : tallies) counts[t.winner * n + t.loser] += observer_weight[t.observer];
            const auto s = scores_from_counts(counts, n);
            for (std::size_t i = 0; i < n; ++i) mean[i] += s[i];
        }
        for (double& v : mean) v /= static_cast<double>(per_scene.size());
        return mean;
    };

    ScaleResult result;
    result.n_scenes = scenes.size();
    const auto point = scene_mean(std::vector<double>(observers.size(), 1.0));
    for (std::size_t i = 0; i < n; ++i) result.scores[methods[i]] = point[i];

    if (options.interval_estimator) {
        const auto intervals = options.interval_estimator(selected, result);
        for (const auto& m : methods) {
            auto it = intervals.find(m);
            if (it == intervals.end()) fail_validation("interval estimator returned no interval for " + m);
            result.ci_low[m] = std::min(it->second.low, result.scores[m]);
            result.ci_high[m] = std::max(it->second.high, result.scores[m]);
        }
        return result;
    }

    if (options.bootstrap_replicates < 1) fail_validation("bootstrap needs at least one replicate");
    if (!(options.confidence > 0.0 && options.confidence < 1.0)) fail_validation("confidence must lie in (0,1)");

    std::vector<std::vector<double>> samples(n, std::vector<double>(options.bootstrap_replicates));
    std::vector<double> weight(observers.size());
    for (int b = 0; b < options.bootstrap_replicates; ++b) {
        Rng rng = make_rng(options.seed, static_cast<std::uint64_t>(b));
        std::fill(weight.begin(), weight.end(), 0.0);
        for (std::size_t k = 0; k < observers.size(); ++k) weight[uniform_index(rng, observers.size())] += 1.0;
        const auto s = scene_mean(weight);
        for (std::size_t i = 0; i < n; ++i) samples[i][b] = s[i];
    }
    const double tail = (1.0 - options.confidence) / 2.0;
    for (std::size_t i = 0; i < n; ++i) {
        result.ci_low[methods[i]] = std::min(percentile(samples[i], tail), point[i]);
        result.ci_high[methods[i]] = std::max(percentile(samples[i], 1.0 - tail), point[i]);
    }
    return result;
}

} // namespace luxp
