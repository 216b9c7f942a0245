#pragma once

// Per-stage edit distances and the stage-weighted journey metric
//
//   D(a, b) = sum_g w_g * d(a restricted to stage g, b restricted to stage g)
//
// with d the unit-cost Levenshtein (or Damerau-Levenshtein) distance over
// canonical symbols. Stages never exchange symbols, so each stage is aligned
// on its own.

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "journeymap/model.hpp"
#include "journeymap/rational.hpp"

namespace journey {

enum class Kernel { levenshtein, damerau_levenshtein };

std::string_view to_string(Kernel kernel);
Kernel parse_kernel(std::string_view name);

struct StageWeights {
    std::array<Rational, 3> w{Rational(1), Rational(1), Rational(1)};

    StageWeights() = default;
    StageWeights(Rational w1, Rational w2, Rational w3) : w{w1, w2, w3} {}

    const Rational& operator[](StageId s) const { return w[stage_index(s)]; }
    /// Throws Error(InvalidArgument) on negative weights.
    void check_non_negative() const;
    bool all_zero() const;
    std::string to_string() const;

    friend bool operator==(const StageWeights&, const StageWeights&) = default;
};

/// Which stages contribute to a distance. Masked-out stages weigh zero.
class StageMask {
public:
    constexpr StageMask() = default;
    constexpr StageMask(bool st1, bool st2, bool st3) : on_{st1, st2, st3} {}
    static constexpr StageMask all() { return {true, true, true}; }
    static constexpr StageMask pre_purchase() { return {true, true, false}; }
    /// Parses "st1,st2" style lists.
    static StageMask parse(std::string_view text);

    constexpr bool contains(StageId s) const { return on_[stage_index(s)]; }
    constexpr bool empty() const { return !on_[0] && !on_[1] && !on_[2]; }
    std::string to_string() const;

    friend constexpr bool operator==(const StageMask&, const StageMask&) = default;

private:
    std::array<bool, 3> on_{true, true, true};
};

struct DistanceConfig {
    StageWeights weights;
    Kernel kernel = Kernel::levenshtein;
    StageMask mask = StageMask::all();

    /// Weights after zeroing masked stages.
    StageWeights effective_weights() const;
    /// Throws Error(InvalidArgument) for negative weights and
    /// Error(DegenerateConfig) when every effective weight is zero.
    void validate() const;

    friend bool operator==(const DistanceConfig&, const DistanceConfig&) = default;
};

std::size_t levenshtein(std::span<const Symbol> x, std::span<const Symbol> y);
/// Unrestricted Damerau-Levenshtein: adjacent transpositions cost 1 and may be
/// followed by further edits, which keeps the triangle inequality intact.
std::size_t damerau_levenshtein(std::span<const Symbol> x, std::span<const Symbol> y);
std::size_t edit_distance(std::span<const Symbol> x, std::span<const Symbol> y, Kernel kernel);

/// Unweighted per-stage distances between two journeys.
std::array<std::size_t, 3> stage_distances(const Journey& a, const Journey& b, Kernel kernel);

double staged_distance(const Journey& a, const Journey& b, const DistanceConfig& config);
Rational staged_distance_exact(const Journey& a, const Journey& b, const DistanceConfig& config);

/// Dense symmetric pairwise matrix with zero diagonal.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    DistanceMatrix(std::vector<std::string> ids, std::vector<double> values, DistanceConfig config);

    /// Wraps a raw matrix (tests, external sources). Checks shape, symmetry,
    /// zero diagonal and non-negativity; throws Error(InvalidArgument).
    static DistanceMatrix from_values(std::size_t n, std::vector<double> values);

    std::size_t size() const noexcept { return n_; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return values_[i * n_ + j]; }
    std::span<const double> row(std::size_t i) const { return {values_.data() + i * n_, n_}; }
    std::span<const double> values() const noexcept { return values_; }
    const std::vector<std::string>& ids() const noexcept { return ids_; }
    const DistanceConfig& config() const noexcept { return config_; }

    /// Worst violation of d(i,k) <= d(i,j) + d(j,k) over all triples (<= 0 means none).
    double max_triangle_violation() const;

private:
    std::size_t n_ = 0;
    std::vector<std::string> ids_;
    std::vector<double> values_;
    DistanceConfig config_;
};

/// Computes every pair independently, optionally across `threads` workers.
/// The result is identical for any thread count.
DistanceMatrix distance_matrix(std::span<const Journey> journeys, const DistanceConfig& config,
                               unsigned threads = 0);
DistanceMatrix distance_matrix(const Dataset& dataset, const DistanceConfig& config, unsigned threads = 0);

}  // namespace journey
