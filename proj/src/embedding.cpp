#include "journeymap/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "journeymap/error.hpp"

namespace journey {

SquareMatrix SquareMatrix::identity(std::size_t n) {
    SquareMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

double SquareMatrix::frobenius_norm() const {
    double sum = 0.0;
    for (double v : data_) sum += v * v;
    return std::sqrt(sum);
}

double SquareMatrix::off_diagonal_norm() const {
    double sum = 0.0;
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j)
            if (i != j) sum += (*this)(i, j) * (*this)(i, j);
    return std::sqrt(sum);
}

SquareMatrix double_center(const DistanceMatrix& matrix) {
    const std::size_t n = matrix.size();
    SquareMatrix sq(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) sq(i, j) = matrix(i, j) * matrix(i, j);

    std::vector<double> row_mean(n, 0.0);
    double grand = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) row_mean[i] += sq(i, j);
        grand += row_mean[i];
        row_mean[i] /= static_cast<double>(n);
    }
    grand /= static_cast<double>(n * n);

    // Squared distances are symmetric, so column means equal row means.
    SquareMatrix out(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            out(i, j) = -0.5 * (sq(i, j) - row_mean[i] - row_mean[j] + grand);
    return out;
}

EigenSystem eigendecompose(const SquareMatrix& symmetric) {
    const std::size_t n = symmetric.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(symmetric(i, j) - symmetric(j, i)) > 1e-12 * (1.0 + std::abs(symmetric(i, j)))) {
                throw Error(ErrorCode::InvalidArgument, "eigendecompose needs a symmetric matrix");
            }

    SquareMatrix a = symmetric;
    SquareMatrix v = SquareMatrix::identity(n);
    const double threshold = 1e-10 * symmetric.frobenius_norm();

    std::size_t sweeps = 0;
    while (a.off_diagonal_norm() > threshold) {
        if (sweeps == kMaxJacobiSweeps) {
            throw Error(ErrorCode::NoConvergence,
                        "Jacobi did not converge in " + std::to_string(kMaxJacobiSweeps) + " sweeps");
        }
        ++sweeps;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

    EigenSystem out;
    out.sweeps = sweeps;
    out.values.resize(n);
    out.vectors = SquareMatrix(n);
    for (std::size_t c = 0; c < n; ++c) {
        const auto src = order[c];
        out.values[c] = a(src, src);
        double sign = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (std::abs(v(i, src)) > 1e-12) {
                sign = v(i, src) < 0.0 ? -1.0 : 1.0;
                break;
            }
        }
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, c) = sign * v(i, src);
    }
    return out;
}

Embedding mds(const DistanceMatrix& matrix) {
    const std::size_t n = matrix.size();
    if (n < 3) throw Error(ErrorCode::TooFewPoints, "MDS needs at least 3 journeys, got " + std::to_string(n));

    const auto centered = double_center(matrix);
    const auto eig = eigendecompose(centered);

    double scale = 0.0;
    for (double lambda : eig.values) scale = std::max(scale, std::abs(lambda));
    const double positive_floor = 1e-10 * scale;

    Embedding out;
    out.ids = matrix.ids();
    out.xy.assign(n, {0.0, 0.0});
    std::array<double, 2> kept{0.0, 0.0};
    for (std::size_t c = 0; c < 2; ++c) {
        if (eig.values[c] > positive_floor) {
            kept[c] = eig.values[c];
            const double root = std::sqrt(eig.values[c]);
            for (std::size_t i = 0; i < n; ++i) out.xy[i][c] = eig.vectors(i, c) * root;
        } else {
            out.degenerate = true;
        }
    }
    out.lambda1 = kept[0];
    out.lambda2 = kept[1];
    for (double lambda : eig.values) {
        if (lambda < -positive_floor) out.negative_mass += -lambda;
    }
    return out;
}

}  // namespace journey
