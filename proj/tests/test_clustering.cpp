#include "doctest.h"
#include "journeymap/clustering.hpp"
#include "journeymap/error.hpp"
#include "journeymap/ingestion.hpp"
#include "oracles.hpp"

using namespace journey;

namespace {

DistanceMatrix random_matrix(std::mt19937_64& gen, std::size_t n) {
    // Points on a small integer grid give many distance ties.
    std::uniform_int_distribution<int> coord(0, 6);
    std::vector<std::array<int, 2>> pts(n);
    for (auto& p : pts) p = {coord(gen), coord(gen)};
    std::vector<double> v(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            v[i * n + j] = std::abs(pts[i][0] - pts[j][0]) + std::abs(pts[i][1] - pts[j][1]);
        }
    }
    return DistanceMatrix::from_values(n, std::move(v));
}

std::vector<std::vector<double>> dense(const DistanceMatrix& m) {
    std::vector<std::vector<double>> d(m.size(), std::vector<double>(m.size()));
    for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t j = 0; j < m.size(); ++j) d[i][j] = m(i, j);
    }
    return d;
}

double objective_of(const DistanceMatrix& m, const std::vector<std::size_t>& medoids) {
    double total = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        double best = INFINITY;
        for (auto c : medoids) best = std::min(best, m(i, c));
        total += best;
    }
    return total;
}

}  // namespace

TEST_CASE("k-medoids++ seeding") {
    const auto m = DistanceMatrix::from_values(3, {0, 0, 9, 0, 0, 9, 9, 9, 0});
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto init = kmedoids_pp_init(m, 2, seed);
        REQUIRE(init.size() == 2);
        // Whichever point comes first, the far one or a duplicate pair member is completed.
        const bool has_far = init[0] == 2 || init[1] == 2;
        CHECK(has_far);
    }
    std::mt19937_64 gen(1);
    const auto r = random_matrix(gen, 12);
    auto all = kmedoids_pp_init(r, 12, 3);
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < 12; ++i) CHECK(all[i] == i);
    CHECK(kmedoids_pp_init(r, 1, 9) == kmedoids_pp_init(r, 1, 9));
    CHECK_THROWS_AS(kmedoids_pp_init(r, 0, 1), Error);
    CHECK_THROWS_AS(kmedoids_pp_init(r, 13, 1), Error);
}

TEST_CASE("k-medoids separates identical groups") {
    const Dataset ds({oracle::make("a", "c,e,1"), oracle::make("b", "c,e,1"), oracle::make("c", "c,e,1"),
                      oracle::make("d", "d,h,0"), oracle::make("e", "d,h,0")},
                     "");
    const auto m = distance_matrix(ds, {StageWeights(1, 1, 1), Kernel::levenshtein, StageMask::all()});
    const auto r = kmedoids(m, 2, 42);
    CHECK(r.objective == 0.0);
    CHECK(r.assignment[0] == r.assignment[1]);
    CHECK(r.assignment[1] == r.assignment[2]);
    CHECK(r.assignment[3] == r.assignment[4]);
    CHECK(r.assignment[0] != r.assignment[3]);
    CHECK(*r.silhouette == doctest::Approx(1.0));

    const auto all = kmedoids(m, 5, 1);
    CHECK(all.objective == 0.0);
}

TEST_CASE("k-medoids invariants on random instances") {
    std::mt19937_64 gen(2024);
    for (int t = 0; t < 25; ++t) {
        const std::size_t n = 5 + gen() % 30;
        const auto m = random_matrix(gen, n);
        const std::size_t k = 1 + gen() % std::min<std::size_t>(n, 6);
        const auto r = kmedoids(m, k, t);
        REQUIRE(r.medoids.size() == k);
        CHECK(std::is_sorted(r.medoids.begin(), r.medoids.end()));
        CHECK(r.objective == objective_of(m, r.medoids));
        CHECK(r.objective <= r.initial_objective);
        double from_assignment = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto own = m(i, r.medoids[r.assignment[i]]);
            from_assignment += own;
            for (std::size_t c = 0; c < k; ++c) {
                CHECK(own <= m(i, r.medoids[c]));
                const bool is_medoid = std::find(r.medoids.begin(), r.medoids.end(), i) != r.medoids.end();
                if (m(i, r.medoids[c]) == own && !is_medoid) {
                    CHECK(r.assignment[i] <= c);
                }
            }
        }
        CHECK(from_assignment == doctest::Approx(r.objective));
        // No single swap lowers the objective.
        for (std::size_t slot = 0; slot < k; ++slot) {
            for (std::size_t x = 0; x < n; ++x) {
                if (std::find(r.medoids.begin(), r.medoids.end(), x) != r.medoids.end()) continue;
                auto swapped = r.medoids;
                swapped[slot] = x;
                CHECK(objective_of(m, swapped) >= r.objective - 1e-9);
            }
        }
        if (k == 1) CHECK(r.objective == oracle::brute_force_one_medoid(m).second);
        // Determinism.
        const auto again = kmedoids(m, k, t);
        CHECK(again.medoids == r.medoids);
        CHECK(again.assignment == r.assignment);
        CHECK(again.objective == r.objective);
    }
}

TEST_CASE("silhouette hand case and conventions") {
    const auto m = DistanceMatrix::from_values(3, {0, 1, 4, 1, 0, 4, 4, 4, 0});
    const std::vector<std::size_t> assign{0, 0, 1};
    const auto s = silhouette_samples(m, assign);
    CHECK(s[0] == doctest::Approx(0.75));
    CHECK(s[1] == doctest::Approx(0.75));
    CHECK(s[2] == 0.0);
    CHECK(silhouette(m, assign) == doctest::Approx(0.5));
    CHECK(silhouette(m, std::vector<std::size_t>{0, 1, 2}) == 0.0);
    CHECK_THROWS_AS(silhouette(m, std::vector<std::size_t>{0, 0, 0}), Error);
    CHECK_THROWS_AS(silhouette(m, std::vector<std::size_t>{0, 2, 2}), Error);
    CHECK_THROWS_AS(silhouette(m, std::vector<std::size_t>{0, 1}), Error);
}

TEST_CASE("silhouette equals the naive reference") {
    std::mt19937_64 gen(77);
    for (int t = 0; t < 50; ++t) {
        const std::size_t n = 4 + gen() % 40;
        const auto m = random_matrix(gen, n);
        const std::size_t k = 2 + gen() % 3;
        std::vector<std::size_t> assign(n);
        for (std::size_t i = 0; i < n; ++i) assign[i] = i < k ? i : gen() % k;
        CHECK(silhouette(m, assign) == doctest::Approx(oracle::naive_silhouette(dense(m), assign)).epsilon(1e-12));
    }
}

TEST_CASE("sweep grid and prototypes") {
    const auto ds = cleanse(load_file(JM_FIXTURE, InputFormat::csv)).dataset;
    const std::vector<DistanceConfig> configs{{StageWeights(2, 1, 10), Kernel::levenshtein, StageMask::all()}};
    const std::vector<std::size_t> ks{6};
    const auto rep = sweep(ds, configs, ks, 42);
    CHECK(rep.cells.size() == 1);
    const auto protos = rep.prototypes(ds, 0, 6);
    CHECK(protos.size() == 6);
    for (const auto& p : protos) CHECK(p.has_outcome());
    const auto& cell = rep.cell(0, 6);
    std::size_t total = 0;
    for (auto s : cell.result.cluster_sizes()) total += s;
    CHECK(total == 104);
    CHECK_THROWS_AS(sweep(ds, configs, std::vector<std::size_t>{1}, 42), Error);
}
