#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "journeymap/distance.hpp"
#include "journeymap/model.hpp"

namespace journey {

struct ClusteringResult {
    std::size_t k = 0;
    /// Ascending row indices; cluster c is represented by medoids[c].
    std::vector<std::size_t> medoids;
    /// Cluster id per row: the nearest medoid with ties going to the lower
    /// index. A medoid row always belongs to its own cluster.
    std::vector<std::size_t> assignment;
    /// Sum of each row's distance to its medoid.
    double objective = 0.0;
    /// Mean silhouette; absent when k == 1.
    std::optional<double> silhouette;
    std::uint64_t seed = 0;
    /// Seeding result before any swap, in selection order.
    std::vector<std::size_t> initial_medoids;
    double initial_objective = 0.0;
    std::size_t swaps = 0;

    std::vector<std::size_t> cluster_sizes() const;
};

/// k-medoids++ seeding: first medoid uniform, each further medoid drawn with
/// probability proportional to the squared distance to its nearest chosen
/// medoid. Once every remaining row coincides with a chosen medoid the draw
/// falls back to uniform over unchosen rows. Throws Error(InvalidK) unless 1 <= k <= n.
std::vector<std::size_t> kmedoids_pp_init(const DistanceMatrix& matrix, std::size_t k, std::uint64_t seed);

/// Sum over rows of the distance to the closest medoid, accumulated in row order.
double medoid_objective(const DistanceMatrix& matrix, std::span<const std::size_t> medoids);

/// PAM swap phase from a k-medoids++ start. Each step applies the swap with
/// the lowest resulting objective (first in (medoid slot, candidate row)
/// order on ties) and stops when no swap strictly lowers it.
ClusteringResult kmedoids(const DistanceMatrix& matrix, std::size_t k, std::uint64_t seed);

/// Mean silhouette. Cluster ids must cover 0..K-1 with K >= 2, every cluster
/// non-empty; otherwise Error(InvalidAssignment). Singletons score 0.
double silhouette(const DistanceMatrix& matrix, std::span<const std::size_t> assignment);
std::vector<double> silhouette_samples(const DistanceMatrix& matrix, std::span<const std::size_t> assignment);

struct SweepCell {
    std::size_t config_index = 0;
    std::size_t k = 0;
    ClusteringResult result;
};

struct SweepReport {
    std::vector<DistanceConfig> configs;
    std::vector<std::size_t> ks;
    std::uint64_t seed = 0;
    /// Row-major over (config, k).
    std::vector<SweepCell> cells;

    const SweepCell& cell(std::size_t config_index, std::size_t k) const;
    /// Medoid journeys of one cell, in cluster order.
    std::vector<Journey> prototypes(const Dataset& dataset, std::size_t config_index, std::size_t k) const;
};

/// Every cell uses the same seed. ks must all be >= 2 so each cell has a silhouette.
SweepReport sweep(const Dataset& dataset, std::span<const DistanceConfig> configs,
                  std::span<const std::size_t> ks, std::uint64_t seed);

}  // namespace journey
