#include "luxp/scene_selection.hpp"

#include "luxp/error.hpp"
#include "luxp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace luxp {

namespace {

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

std::vector<std::vector<double>> seed_plus_plus(std::span<const std::vector<double>> points, int k, Rng& rng) {
    const std::size_t n = points.size();
    std::vector<std::vector<double>> centroids;
    std::vector<bool> chosen(n, false);
    std::size_t first = uniform_index(rng, n);
    centroids.push_back(points[first]);
    chosen[first] = true;

    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(points[i], centroids[0]);

    while (static_cast<int>(centroids.size()) < k) {
        const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
        std::size_t pick = n;
        if (total > 0.0) {
            double target = uniform01(rng) * total;
            for (std::size_t i = 0; i < n; ++i) {
                if (d2[i] <= 0.0) continue;
                pick = i;
                target -= d2[i];
                if (target < 0.0) break;
            }
        } else {
            // every remaining point coincides with a centroid: choose uniformly among unused ones
            std::vector<std::size_t> unused;
            for (std::size_t i = 0; i < n; ++i)
                if (!chosen[i]) unused.push_back(i);
            pick = unused[uniform_index(rng, unused.size())];
        }
        chosen[pick] = true;
        centroids.push_back(points[pick]);
        for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], squared_distance(points[i], centroids.back()));
    }
    return centroids;
}

} // namespace

KMeansResult kmeans(std::span<const std::vector<double>> points, int k, std::uint64_t seed,
                    const KMeansOptions& options) {
    if (k <= 0) fail_validation("k must be positive");
    if (points.size() < static_cast<std::size_t>(k))
        fail_validation("k-means needs at least k=" + std::to_string(k) + " points, got " +
                        std::to_string(points.size()));
    const std::size_t dim = points.front().size();
    for (const auto& p : points)
        if (p.size() != dim) fail_validation("k-means points have inconsistent dimensions");

    Rng rng = make_rng(seed, 0);
    KMeansResult result;
    result.centroids = seed_plus_plus(points, k, rng);
    result.assignment.assign(points.size(), 0);

    for (int iter = 0; iter < options.max_iterations; ++iter) {
        result.iterations = iter + 1;
        for (std::size_t i = 0; i < points.size(); ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                const double d = squared_distance(points[i], result.centroids[c]);
                if (d < best) {
                    best = d;
                    result.assignment[i] = c;
                }
            }
        }

        std::vector<std::vector<double>> next(k, std::vector<double>(dim, 0.0));
        std::vector<std::size_t> sizes(k, 0);
        for (std::size_t i = 0; i < points.size(); ++i) {
            const int c = result.assignment[i];
            ++sizes[c];
            for (std::size_t j = 0; j < dim; ++j) next[c][j] += points[i][j];
        }
        for (int c = 0; c < k; ++c) {
            if (sizes[c] == 0) {
                std::size_t far = 0;
                double far_d = -1.0;
                for (std::size_t i = 0; i < points.size(); ++i) {
                    const double d = squared_distance(points[i], result.centroids[result.assignment[i]]);
                    if (d > far_d) {
                        far_d = d;
                        far = i;
                    }
                }
                next[c] = points[far];
                result.assignment[far] = c;
                continue;
            }
            for (double& v : next[c]) v /= static_cast<double>(sizes[c]);
        }

        double max_shift = 0.0;
        for (int c = 0; c < k; ++c)
            max_shift = std::max(max_shift, std::sqrt(squared_distance(next[c], result.centroids[c])));
        result.centroids = std::move(next);
        if (max_shift < options.shift_tolerance) break;
    }
    return result;
}

std::vector<std::size_t> cluster_representatives(std::span<const std::vector<double>> points,
                                                 const KMeansResult& clustering) {
    std::vector<bool> taken(points.size(), false);
    std::vector<std::size_t> reps;
    std::vector<std::size_t> order(points.size());
    for (const auto& centroid : clustering.centroids) {
        std::iota(order.begin(), order.end(), 0);
        std::vector<double> d(points.size());
        for (std::size_t i = 0; i < points.size(); ++i) d[i] = squared_distance(points[i], centroid);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
        for (std::size_t i : order) {
            if (!taken[i]) {
                taken[i] = true;
                reps.push_back(i);
                break;
            }
        }
    }
    return reps;
}

std::vector<std::size_t> select_scenes(std::span<const Sh1Coefficients> coefficients, int k, std::uint64_t seed) {
    std::vector<std::vector<double>> points;
    points.reserve(coefficients.size());
    for (const auto& c : coefficients) {
        auto flat = c.flatten();
        for (double v : flat)
            if (!std::isfinite(v)) fail_validation("non-finite SH coefficient");
        points.emplace_back(flat.begin(), flat.end());
    }
    const auto clustering = kmeans(points, k, seed);
    auto reps = cluster_representatives(points, clustering);
    std::sort(reps.begin(), reps.end());
    return reps;
}

} // namespace luxp
