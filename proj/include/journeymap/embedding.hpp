#pragma once

// Classical multidimensional scaling of a journey distance matrix.

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "journeymap/distance.hpp"

namespace journey {

/// Dense row-major square matrix.
class SquareMatrix {
public:
    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

    static SquareMatrix identity(std::size_t n);

    std::size_t size() const noexcept { return n_; }
    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * n_ + j]; }

    double frobenius_norm() const;
    double off_diagonal_norm() const;

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

/// -1/2 * C * D^2 * C with C = I - (1/n) 1 1', D^2 the entry-wise square.
SquareMatrix double_center(const DistanceMatrix& matrix);

struct EigenSystem {
    /// Descending.
    std::vector<double> values;
    /// vectors(i, c) is component i of the eigenvector for values[c]. Columns
    /// are orthonormal; the first component above 1e-12 in magnitude is positive.
    SquareMatrix vectors;
    std::size_t sweeps = 0;
};

inline constexpr std::size_t kMaxJacobiSweeps = 100;

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm falls to
/// 1e-10 of the full norm. Throws Error(NoConvergence) past kMaxJacobiSweeps
/// and Error(InvalidArgument) for non-symmetric input.
EigenSystem eigendecompose(const SquareMatrix& symmetric);

struct Embedding {
    std::vector<std::string> ids;
    std::vector<std::array<double, 2>> xy;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    /// Sum of |lambda| over negative eigenvalues, i.e. the non-Euclidean part
    /// of the input that two coordinates cannot represent.
    double negative_mass = 0.0;
    /// Fewer than two positive eigenvalues; the missing columns are zero.
    bool degenerate = false;
};

/// Coordinates from the two largest positive eigenvalues, scaled by sqrt(lambda).
/// Throws Error(TooFewPoints) for n < 3.
Embedding mds(const DistanceMatrix& matrix);

}  // namespace journey
