#pragma once

#include "luxp/spherical_harmonics.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace luxp {

struct KMeansOptions {
    int max_iterations = 100;
    double shift_tolerance = 1e-6; // stop when every centroid moves less than this
};

struct KMeansResult {
    std::vector<std::vector<double>> centroids;
    std::vector<int> assignment;
    int iterations = 0;
};

/// Lloyd's algorithm with k-means++ seeding. Empty clusters are re-seeded with
/// the point farthest from its current centroid. Deterministic for a seed.
KMeansResult kmeans(std::span<const std::vector<double>> points, int k, std::uint64_t seed,
                    const KMeansOptions& options = {});

/// For each cluster (in cluster order) the index of the point nearest to its
/// centroid. If that point already represents an earlier cluster, the next
/// nearest unused point is taken, so the k indices are always distinct.
std::vector<std::size_t> cluster_representatives(std::span<const std::vector<double>> points,
                                                 const KMeansResult& clustering);

/// Clusters panoramas by their 12 first-order SH coefficients and returns the
/// k representative indices in ascending order.
std::vector<std::size_t> select_scenes(std::span<const Sh1Coefficients> coefficients, int k = 25,
                                       std::uint64_t seed = 0);

} // namespace luxp
