#include "doctest.h"
#include "journeymap/embedding.hpp"
#include "journeymap/error.hpp"
#include "oracles.hpp"

using namespace journey;

namespace {

DistanceMatrix from_points(const std::vector<std::array<double, 2>>& pts) {
    const auto n = pts.size();
    std::vector<double> v(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            v[i * n + j] = std::hypot(pts[i][0] - pts[j][0], pts[i][1] - pts[j][1]);
        }
    }
    // Force exact symmetry of the rounding.
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) v[i * n + j] = v[j * n + i];
    }
    return DistanceMatrix::from_values(n, std::move(v));
}

double embedded(const Embedding& e, std::size_t i, std::size_t j) {
    return std::hypot(e.xy[i][0] - e.xy[j][0], e.xy[i][1] - e.xy[j][1]);
}

}  // namespace

TEST_CASE("double centering") {
    const auto c = double_center(DistanceMatrix::from_values(2, {0, 2, 2, 0}));
    CHECK(c(0, 0) == doctest::Approx(1.0));
    CHECK(c(0, 1) == doctest::Approx(-1.0));
    CHECK(c(1, 1) == doctest::Approx(1.0));
    const auto z = double_center(DistanceMatrix::from_values(3, std::vector<double>(9, 0.0)));
    CHECK(z.frobenius_norm() == 0.0);

    std::mt19937_64 gen(4);
    std::vector<Journey> js;
    for (int t = 0; t < 30; ++t) js.push_back(oracle::random_journey(gen, "r" + std::to_string(t)));
    const auto m = distance_matrix(js, {StageWeights(2, 1, 10), Kernel::levenshtein, StageMask::all()});
    const auto dc = double_center(m);
    double max_entry = 0.0;
    for (std::size_t i = 0; i < dc.size(); ++i) {
        for (std::size_t j = 0; j < dc.size(); ++j) max_entry = std::max(max_entry, std::abs(dc(i, j)));
    }
    for (std::size_t i = 0; i < dc.size(); ++i) {
        double row = 0.0, col = 0.0;
        for (std::size_t j = 0; j < dc.size(); ++j) {
            row += dc(i, j);
            col += dc(j, i);
        }
        CHECK(std::abs(row) <= 1e-9 * 30 * max_entry);
        CHECK(std::abs(col) <= 1e-9 * 30 * max_entry);
    }
}

TEST_CASE("jacobi eigendecomposition") {
    SquareMatrix d(2);
    d(0, 0) = 3;
    d(1, 1) = 1;
    const auto e = eigendecompose(d);
    CHECK(e.values[0] == doctest::Approx(3));
    CHECK(e.values[1] == doctest::Approx(1));
    CHECK(e.vectors(0, 0) == doctest::Approx(1));
    CHECK(e.vectors(1, 1) == doctest::Approx(1));

    SquareMatrix p(2);
    p(0, 0) = 1;
    p(0, 1) = -1;
    p(1, 0) = -1;
    p(1, 1) = 1;
    const auto f = eigendecompose(p);
    CHECK(f.values[0] == doctest::Approx(2));
    CHECK(f.values[1] == doctest::Approx(0).epsilon(1e-12));
    CHECK(f.vectors(0, 0) == doctest::Approx(1 / std::sqrt(2.0)));
    CHECK(f.vectors(1, 0) == doctest::Approx(-1 / std::sqrt(2.0)));

    SquareMatrix bad(2);
    bad(0, 1) = 1;
    CHECK_THROWS_AS(eigendecompose(bad), Error);
}

TEST_CASE("random symmetric matrices are reconstructed") {
    std::mt19937_64 gen(8);
    std::uniform_real_distribution<double> u(-5, 5);
    for (int t = 0; t < 20; ++t) {
        const std::size_t n = 8;
        SquareMatrix a(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j <= i; ++j) a(i, j) = a(j, i) = u(gen);
        }
        const auto e = eigendecompose(a);
        CHECK(std::is_sorted(e.values.rbegin(), e.values.rend()));
        double trace = 0.0, sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            trace += a(i, i);
            sum += e.values[i];
        }
        CHECK(sum == doctest::Approx(trace).epsilon(1e-8));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                double rec = 0.0, gram = 0.0;
                for (std::size_t c = 0; c < n; ++c) {
                    rec += e.vectors(i, c) * e.values[c] * e.vectors(j, c);
                    gram += e.vectors(c, i) * e.vectors(c, j);
                }
                CHECK(std::abs(rec - a(i, j)) <= 1e-8 * a.frobenius_norm());
                CHECK(std::abs(gram - (i == j ? 1.0 : 0.0)) <= 1e-9);
            }
        }
        // Sign convention.
        for (std::size_t c = 0; c < n; ++c) {
            for (std::size_t i = 0; i < n; ++i) {
                if (std::abs(e.vectors(i, c)) > 1e-12) {
                    CHECK(e.vectors(i, c) > 0);
                    break;
                }
            }
        }
    }
}

TEST_CASE("mds recovers planar configurations") {
    const auto line = mds(from_points({{0, 0}, {1, 0}, {2, 0}}));
    CHECK(embedded(line, 0, 1) == doctest::Approx(1).epsilon(1e-6));
    CHECK(embedded(line, 1, 2) == doctest::Approx(1).epsilon(1e-6));
    CHECK(embedded(line, 0, 2) == doctest::Approx(2).epsilon(1e-6));
    CHECK(line.degenerate);

    const auto square = from_points({{0, 0}, {3, 0}, {3, 4}, {-1, 2}});
    const auto e = mds(square);
    CHECK_FALSE(e.degenerate);
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) CHECK(std::abs(embedded(e, i, j) - square(i, j)) < 1e-6);
    }

    const auto tri = mds(DistanceMatrix::from_values(3, {0, 2, 2, 2, 0, 2, 2, 2, 0}));
    CHECK(embedded(tri, 0, 1) == doctest::Approx(2).epsilon(1e-6));
    CHECK(embedded(tri, 1, 2) == doctest::Approx(2).epsilon(1e-6));
    CHECK(embedded(tri, 0, 2) == doctest::Approx(2).epsilon(1e-6));

    CHECK_THROWS_AS(mds(DistanceMatrix::from_values(2, {0, 1, 1, 0})), Error);
}

TEST_CASE("mds on journey matrices reports the non-Euclidean part") {
    std::mt19937_64 gen(21);
    std::vector<Journey> js;
    for (int t = 0; t < 40; ++t) js.push_back(oracle::random_journey(gen, "r" + std::to_string(t)));
    const auto m = distance_matrix(js, {StageWeights(2, 1, 10), Kernel::levenshtein, StageMask::all()});
    const auto a = mds(m);
    const auto b = mds(m);
    CHECK(a.lambda1 >= a.lambda2);
    CHECK(a.lambda2 > 0);
    CHECK(a.negative_mass >= 0);
    CHECK(a.ids.size() == 40);
    for (std::size_t i = 0; i < a.xy.size(); ++i) {
        CHECK(a.xy[i][0] == b.xy[i][0]);
        CHECK(a.xy[i][1] == b.xy[i][1]);
    }
}
