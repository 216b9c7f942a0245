#include "journeymap/clustering.hpp"

#include <algorithm>
#include <limits>

#include "journeymap/error.hpp"
#include "journeymap/rng.hpp"

namespace journey {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_k(std::size_t k, std::size_t n) {
    if (k < 1 || k > n) {
        throw Error(ErrorCode::InvalidK,
                    "k=" + std::to_string(k) + " is outside [1, " + std::to_string(n) + "]");
    }
}

std::vector<std::size_t> assign(const DistanceMatrix& m, std::span<const std::size_t> sorted_medoids) {
    std::vector<std::size_t> out(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        // A medoid always represents its own cluster, even next to a duplicate.
        if (const auto own = std::find(sorted_medoids.begin(), sorted_medoids.end(), i); own != sorted_medoids.end()) {
            out[i] = static_cast<std::size_t>(own - sorted_medoids.begin());
            continue;
        }
        std::size_t best = 0;
        for (std::size_t c = 1; c < sorted_medoids.size(); ++c) {
            if (m(i, sorted_medoids[c]) < m(i, sorted_medoids[best])) best = c;
        }
        out[i] = best;
    }
    return out;
}

}  // namespace

std::vector<std::size_t> ClusteringResult::cluster_sizes() const {
    std::vector<std::size_t> sizes(k, 0);
    for (auto c : assignment) ++sizes[c];
    return sizes;
}

std::vector<std::size_t> kmedoids_pp_init(const DistanceMatrix& matrix, std::size_t k, std::uint64_t seed) {
    const std::size_t n = matrix.size();
    check_k(k, n);
    Rng rng(seed);
    std::vector<std::size_t> chosen;
    chosen.reserve(k);
    std::vector<bool> taken(n, false);
    std::vector<double> nearest(n, kInf);

    auto take = [&](std::size_t idx) {
        chosen.push_back(idx);
        taken[idx] = true;
        for (std::size_t i = 0; i < n; ++i) nearest[i] = std::min(nearest[i], matrix(i, idx));
    };

    take(static_cast<std::size_t>(rng.below(n)));
    while (chosen.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!taken[i]) total += nearest[i] * nearest[i];
        }
        std::size_t pick = n;
        if (total > 0.0) {
            const double target = rng.uniform() * total;
            double cumulative = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (taken[i] || nearest[i] == 0.0) continue;
                cumulative += nearest[i] * nearest[i];
                pick = i;
                if (cumulative > target) break;
            }
        } else {
            auto slot = rng.below(n - chosen.size());
            for (std::size_t i = 0; i < n; ++i) {
                if (taken[i]) continue;
                if (slot-- == 0) {
                    pick = i;
                    break;
                }
            }
        }
        take(pick);
    }
    return chosen;
}

double medoid_objective(const DistanceMatrix& matrix, std::span<const std::size_t> medoids) {
    double total = 0.0;
    for (std::size_t i = 0; i < matrix.size(); ++i) {
        double best = kInf;
        for (auto m : medoids) best = std::min(best, matrix(i, m));
        total += best;
    }
    return total;
}

ClusteringResult kmedoids(const DistanceMatrix& matrix, std::size_t k, std::uint64_t seed) {
    const std::size_t n = matrix.size();
    check_k(k, n);

    ClusteringResult result;
    result.k = k;
    result.seed = seed;
    result.initial_medoids = kmedoids_pp_init(matrix, k, seed);
    result.initial_objective = medoid_objective(matrix, result.initial_medoids);

    std::vector<std::size_t> medoids = result.initial_medoids;
    std::vector<bool> is_medoid(n, false);
    for (auto m : medoids) is_medoid[m] = true;
    double current = result.initial_objective;

    std::vector<std::size_t> nearest_slot(n);
    std::vector<double> first(n), second(n);
    while (true) {
        for (std::size_t i = 0; i < n; ++i) {
            first[i] = second[i] = kInf;
            nearest_slot[i] = 0;
            for (std::size_t s = 0; s < k; ++s) {
                const double d = matrix(i, medoids[s]);
                if (d < first[i]) {
                    second[i] = first[i];
                    first[i] = d;
                    nearest_slot[i] = s;
                } else if (d < second[i]) {
                    second[i] = d;
                }
            }
        }

        // Each candidate total is summed in row order from exact per-row minima,
        // so it equals medoid_objective() of the swapped set bit for bit.
        double best_total = current;
        std::size_t best_slot = k;
        std::size_t best_row = n;
        for (std::size_t s = 0; s < k; ++s) {
            for (std::size_t x = 0; x < n; ++x) {
                if (is_medoid[x]) continue;
                double total = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double keep = nearest_slot[i] == s ? second[i] : first[i];
                    total += std::min(keep, matrix(i, x));
                }
                if (total < best_total) {
                    best_total = total;
                    best_slot = s;
                    best_row = x;
                }
            }
        }
        if (best_slot == k) break;
        is_medoid[medoids[best_slot]] = false;
        is_medoid[best_row] = true;
        medoids[best_slot] = best_row;
        current = best_total;
        ++result.swaps;
    }

    std::sort(medoids.begin(), medoids.end());
    result.medoids = medoids;
    result.assignment = assign(matrix, medoids);
    result.objective = 0.0;
    for (std::size_t i = 0; i < n; ++i) result.objective += matrix(i, medoids[result.assignment[i]]);
    if (k >= 2) result.silhouette = silhouette(matrix, result.assignment);
    return result;
}

std::vector<double> silhouette_samples(const DistanceMatrix& matrix, std::span<const std::size_t> assignment) {
    const std::size_t n = matrix.size();
    if (assignment.size() != n) {
        throw Error(ErrorCode::InvalidAssignment, "assignment length " + std::to_string(assignment.size()) +
                                                      " does not match matrix size " + std::to_string(n));
    }
    std::size_t clusters = 0;
    for (auto c : assignment) clusters = std::max(clusters, c + 1);
    std::vector<std::size_t> sizes(clusters, 0);
    for (auto c : assignment) ++sizes[c];
    if (clusters < 2) throw Error(ErrorCode::InvalidAssignment, "silhouette needs at least two clusters");
    if (std::find(sizes.begin(), sizes.end(), 0u) != sizes.end()) {
        throw Error(ErrorCode::InvalidAssignment, "cluster ids must be contiguous with no empty cluster");
    }

    std::vector<double> scores(n, 0.0);
    std::vector<double> sums(clusters);
    for (std::size_t i = 0; i < n; ++i) {
        const auto own = assignment[i];
        if (sizes[own] == 1) continue;
        std::fill(sums.begin(), sums.end(), 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) sums[assignment[j]] += matrix(i, j);
        }
        const double a = sums[own] / static_cast<double>(sizes[own] - 1);
        double b = kInf;
        for (std::size_t c = 0; c < clusters; ++c) {
            if (c != own) b = std::min(b, sums[c] / static_cast<double>(sizes[c]));
        }
        const double denom = std::max(a, b);
        scores[i] = denom > 0.0 ? (b - a) / denom : 0.0;
    }
    return scores;
}

double silhouette(const DistanceMatrix& matrix, std::span<const std::size_t> assignment) {
    const auto scores = silhouette_samples(matrix, assignment);
    double total = 0.0;
    for (double s : scores) total += s;
    return total / static_cast<double>(scores.size());
}

const SweepCell& SweepReport::cell(std::size_t config_index, std::size_t k) const {
    for (const auto& c : cells) {
        if (c.config_index == config_index && c.k == k) return c;
    }
    throw Error(ErrorCode::NotFound, "no sweep cell for config " + std::to_string(config_index) + ", k=" +
                                         std::to_string(k));
}

std::vector<Journey> SweepReport::prototypes(const Dataset& dataset, std::size_t config_index,
                                             std::size_t k) const {
    std::vector<Journey> out;
    for (auto m : cell(config_index, k).result.medoids) out.push_back(dataset[m]);
    return out;
}

SweepReport sweep(const Dataset& dataset, std::span<const DistanceConfig> configs,
                  std::span<const std::size_t> ks, std::uint64_t seed) {
    if (configs.empty() || ks.empty()) throw Error(ErrorCode::InvalidArgument, "empty sweep grid");
    for (auto k : ks) {
        if (k < 2) throw Error(ErrorCode::InvalidK, "sweep needs k >= 2 for a silhouette");
    }
    SweepReport report;
    report.configs.assign(configs.begin(), configs.end());
    report.ks.assign(ks.begin(), ks.end());
    report.seed = seed;
    for (std::size_t c = 0; c < configs.size(); ++c) {
        const auto matrix = distance_matrix(dataset, configs[c]);
        for (auto k : ks) report.cells.push_back({c, k, kmedoids(matrix, k, seed)});
    }
    return report;
}

}  // namespace journey
