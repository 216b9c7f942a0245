// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "journeymap/clustering.hpp"
#include "journeymap/counterfactual.hpp"
#include "journeymap/embedding.hpp"
#include "journeymap/ingestion.hpp"
#include "journeymap/prediction.hpp"
#include "oracles.hpp"

using namespace journey;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

int failures = 0;

void criterion(const std::string& name, double budget_seconds, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = body();
    } catch (const std::exception& e) {
        out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (budget_seconds > 0 && secs > budget_seconds) {
        out.ok = false;
        out.detail += " (over the " + std::to_string(budget_seconds) + " s budget)";
    }
    if (!out.ok) ++failures;
    char timing[32];
    std::snprintf(timing, sizeof timing, "%.2fs", secs);
    std::cout << (out.ok ? "PASS " : "FAIL ") << name << " [" << timing << "] " << out.detail << std::endl;
}

Dataset fixture() { return cleanse(load_file(JM_FIXTURE, InputFormat::csv)).dataset; }

const std::array<StageWeights, 3> kWeightSets = {StageWeights(1, 1, 1), StageWeights(2, 1, 1), StageWeights(2, 1, 10)};

// Wagner-Fischer table, written separately from the library.
std::size_t dp_levenshtein(const std::vector<Symbol>& x, const std::vector<Symbol>& y) {
    std::vector<std::vector<std::size_t>> t(x.size() + 1, std::vector<std::size_t>(y.size() + 1));
    for (std::size_t i = 0; i <= x.size(); ++i) t[i][0] = i;
    for (std::size_t j = 0; j <= y.size(); ++j) t[0][j] = j;
    for (std::size_t i = 1; i <= x.size(); ++i) {
        for (std::size_t j = 1; j <= y.size(); ++j) {
            t[i][j] = std::min({t[i - 1][j] + 1, t[i][j - 1] + 1, t[i - 1][j - 1] + (x[i - 1] == y[j - 1] ? 0 : 1)});
        }
    }
    return t[x.size()][y.size()];
}

// Pre-purchase D' with w = (2, 1), computed without the library's metric.
double reference_pre_purchase(const Journey& a, const Journey& b) {
    return 2.0 * static_cast<double>(dp_levenshtein(a.stage_symbols(StageId::st1), b.stage_symbols(StageId::st1))) +
           1.0 * static_cast<double>(dp_levenshtein(a.stage_symbols(StageId::st2), b.stage_symbols(StageId::st2)));
}

Outcome metric_axioms() {
    std::mt19937_64 gen(20240101);
    std::size_t trials = 0, symmetry_fail = 0, triangle_fail = 0, identity_fail = 0;
    for (; trials < 12000; ++trials) {
        const auto a = oracle::random_journey(gen, "a");
        const auto b = oracle::random_journey(gen, "b");
        const auto c = oracle::random_journey(gen, "c");
        const DistanceConfig config{kWeightSets[trials % 3],
                                    trials % 2 ? Kernel::damerau_levenshtein : Kernel::levenshtein,
                                    StageMask::all()};
        const auto ab = staged_distance_exact(a, b, config);
        const auto ba = staged_distance_exact(b, a, config);
        const auto bc = staged_distance_exact(b, c, config);
        const auto ac = staged_distance_exact(a, c, config);
        if (ab != ba || staged_distance(a, b, config) != staged_distance(b, a, config)) ++symmetry_fail;
        if (ac > ab + bc) ++triangle_fail;
        bool same = true;
        for (auto s : kAllStages) same = same && a.stage_symbols(s) == b.stage_symbols(s);
        if ((ab == Rational(0)) != same || staged_distance_exact(a, a, config) != Rational(0)) ++identity_fail;
    }
    return {symmetry_fail + triangle_fail + identity_fail == 0,
            std::to_string(trials) + " triples, symmetry failures " + std::to_string(symmetry_fail) +
                ", triangle failures " + std::to_string(triangle_fail) + ", identity failures " +
                std::to_string(identity_fail)};
}

Outcome edit_distance_oracle() {
    const auto strings = oracle::all_strings("abc", 4);
    std::size_t pairs = 0, mismatches = 0;
    for (const auto& x : strings) {
        const auto graph = oracle::edit_graph_bfs(x, "abc", 6);
        for (const auto& y : strings) {
            const auto xs = oracle::symbols(x), ys = oracle::symbols(y);
            if (levenshtein(xs, ys) != oracle::naive_levenshtein(x, y)) ++mismatches;
            if (damerau_levenshtein(xs, ys) != graph.at(y)) ++mismatches;
            ++pairs;
        }
    }
    return {mismatches == 0, std::to_string(pairs) + " pairs x 2 kernels, mismatches " + std::to_string(mismatches)};
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

Outcome swap_optimality() {
    std::mt19937_64 gen(606);
    std::size_t improving = 0, one_medoid_fail = 0, checked_swaps = 0;
    for (int inst = 0; inst < 50; ++inst) {
        const std::size_t n = 10 + gen() % 51;
        std::vector<Journey> js;
        for (std::size_t i = 0; i < n; ++i) js.push_back(oracle::random_journey(gen, "r" + std::to_string(i), 6));
        const DistanceConfig config{kWeightSets[inst % 3], Kernel::levenshtein, StageMask::all()};
        const auto m = distance_matrix(js, config);
        const std::size_t k = 2 + gen() % 7;
        const auto r = kmedoids(m, k, inst);
        for (std::size_t slot = 0; slot < k; ++slot) {
            for (std::size_t x = 0; x < n; ++x) {
                if (std::find(r.medoids.begin(), r.medoids.end(), x) != r.medoids.end()) continue;
                auto swapped = r.medoids;
                swapped[slot] = x;
                ++checked_swaps;
                if (objective_of(m, swapped) < r.objective) ++improving;
            }
        }
        const auto one = kmedoids(m, 1, inst);
        if (one.objective != oracle::brute_force_one_medoid(m).second) ++one_medoid_fail;
    }
    return {improving == 0 && one_medoid_fail == 0,
            "50 instances, " + std::to_string(checked_swaps) + " swaps checked, improving " +
                std::to_string(improving) + ", k=1 mismatches " + std::to_string(one_medoid_fail)};
}

Outcome silhouette_reference() {
    const auto hand = DistanceMatrix::from_values(3, {0, 1, 4, 1, 0, 4, 4, 4, 0});
    const std::vector<std::size_t> hand_assign{0, 0, 1};
    const auto s = silhouette_samples(hand, hand_assign);
    const bool hand_ok = s[0] == 0.75 && s[1] == 0.75 && s[2] == 0.0 && silhouette(hand, hand_assign) == 0.5;

    std::mt19937_64 gen(909);
    std::size_t cases = 0, mismatches = 0;
    for (; cases < 200; ++cases) {
        const std::size_t n = 3 + gen() % 40;
        std::vector<Journey> js;
        for (std::size_t i = 0; i < n; ++i) js.push_back(oracle::random_journey(gen, "r" + std::to_string(i), 5));
        const auto m = distance_matrix(js, {kWeightSets[cases % 3], Kernel::levenshtein, StageMask::all()});
        const std::size_t k = 2 + gen() % std::min<std::size_t>(n - 1, 5);
        std::vector<std::size_t> assign(n);
        for (std::size_t i = 0; i < n; ++i) assign[i] = i < k ? i : gen() % k;
        std::vector<std::vector<double>> d(n, std::vector<double>(n));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) d[i][j] = m(i, j);
        }
        if (silhouette(m, assign) != oracle::naive_silhouette(d, assign)) ++mismatches;
    }
    return {hand_ok && mismatches == 0, std::string("hand case ") + (hand_ok ? "ok" : "wrong") + ", " +
                                            std::to_string(cases) + " random assignments, mismatches " +
                                            std::to_string(mismatches)};
}

Outcome mds_round_trip() {
    std::mt19937_64 gen(1234);
    std::uniform_real_distribution<double> coord(-10, 10);
    double worst_distance = 0.0, worst_rowsum = 0.0, worst_reconstruction = 0.0;
    for (int set = 0; set < 100; ++set) {
        const std::size_t n = 3 + gen() % 28;
        std::vector<std::array<double, 2>> pts(n);
        for (auto& p : pts) p = {coord(gen), coord(gen)};
        std::vector<double> v(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                v[i * n + j] = v[j * n + i] = std::hypot(pts[i][0] - pts[j][0], pts[i][1] - pts[j][1]);
            }
        }
        const auto m = DistanceMatrix::from_values(n, v);
        const auto e = mds(m);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                const double got = std::hypot(e.xy[i][0] - e.xy[j][0], e.xy[i][1] - e.xy[j][1]);
                worst_distance = std::max(worst_distance, std::abs(got - m(i, j)));
            }
        }
        const auto dc = double_center(m);
        double max_entry = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) max_entry = std::max(max_entry, std::abs(dc(i, j)));
        }
        for (std::size_t i = 0; i < n; ++i) {
            double row = 0.0;
            for (std::size_t j = 0; j < n; ++j) row += dc(i, j);
            worst_rowsum = std::max(worst_rowsum, std::abs(row) / (static_cast<double>(n) * max_entry));
        }
        const auto eig = eigendecompose(dc);
        const double norm = dc.frobenius_norm();
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                double rec = 0.0;
                for (std::size_t c = 0; c < n; ++c) rec += eig.vectors(i, c) * eig.values[c] * eig.vectors(j, c);
                worst_reconstruction = std::max(worst_reconstruction, std::abs(rec - dc(i, j)) / norm);
            }
        }
    }
    const bool ok = worst_distance <= 1e-6 && worst_rowsum <= 1e-9 && worst_reconstruction <= 1e-8;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "100 planar sets, max distance error %.2e, max scaled row sum %.2e, max reconstruction error %.2e",
                  worst_distance, worst_rowsum, worst_reconstruction);
    return {ok, buf};
}

Dataset separable_dataset() {
    std::mt19937_64 gen(4242);
    std::vector<Journey> js;
    auto add = [&](const char* st1, const char* st2, char outcome, int count) {
        for (int t = 0; t < count; ++t) {
            std::string items(1, st1[gen() % 2]);
            const auto len = gen() % 4;
            for (std::size_t i = 0; i < len; ++i) items += st2[gen() % 2];
            items += outcome;
            js.push_back(oracle::make("s" + std::to_string(js.size()), items));
        }
    };
    add("ab", "ef", 'i', 86);
    add("cd", "gh", 'k', 18);
    return Dataset(js, "separable");
}

Outcome knn_checks() {
    std::mt19937_64 gen(5150);
    std::size_t oracle_mismatch = 0, leaks = 0, queries = 0;
    for (int inst = 0; inst < 60; ++inst) {
        const std::size_t n = 1 + gen() % 50;
        std::vector<Journey> train;
        std::vector<int> labels;
        for (std::size_t i = 0; i < n; ++i) {
            train.push_back(oracle::random_journey(gen, "t" + std::to_string(i), 4));
            labels.push_back(*train.back().label());
        }
        const DistanceConfig config{kWeightSets[inst % 3], Kernel::levenshtein, StageMask::all()};
        const std::size_t k = 1 + gen() % n;
        const KnnModel model(train, k, config);
        for (int q = 0; q < 10; ++q, ++queries) {
            const auto query = oracle::random_journey(gen, "q", 4);
            std::vector<double> d;
            for (const auto& t : train) d.push_back(staged_distance(query, t, pre_purchase_config(config)));
            const double y = model.predict_value(query);
            if (y != oracle::full_sort_knn(d, labels, k)) ++oracle_mismatch;
            auto items = query.items();
            for (auto outcome : {ItemCode::i, ItemCode::j, ItemCode::k}) {
                items.back() = outcome;
                if (model.predict_value(Journey("p", std::vector<Event>(items.begin(), items.end()))) != y) ++leaks;
            }
        }
    }
    const std::vector<std::size_t> ks{1};
    const auto rep = evaluate(separable_dataset(), {StageWeights(2, 1, 10), Kernel::levenshtein, StageMask::all()},
                              ks, 100, 42);
    const double acc = rep.rows[0].accuracy_mean;
    return {oracle_mismatch == 0 && leaks == 0 && acc == 1.0,
            std::to_string(queries) + " queries, oracle mismatches " + std::to_string(oracle_mismatch) +
                ", outcome leaks " + std::to_string(leaks) + ", separable mean accuracy " + std::to_string(acc) +
                " over 100 repetitions"};
}

Outcome counterfactual_checks() {
    const auto ds = fixture();
    const DistanceConfig config{StageWeights(2, 1, 10), Kernel::levenshtein, StageMask::all()};
    const KnnModel model(std::vector<Journey>(ds.journeys().begin(), ds.journeys().end()), 5, config);
    const std::array<double, 5> lambdas{0.0, 0.1, 1.0, 10.0, 1e9};

    std::size_t queries = 0, not_optimal = 0, non_monotone = 0;
    for (std::size_t b = 0; b < ds.size(); ++b) {
        for (int y_obj : {0, 1}) {
            double previous = INFINITY;
            for (double lambda : lambdas) {
                const auto r = find_counterfactual(ds, model, CfQuery{ds[b], y_obj, lambda, b, std::nullopt});
                ++queries;
                // Second pass over every candidate with the reference distance.
                std::tuple<double, double, std::size_t> best{INFINITY, INFINITY, 0};
                for (std::size_t j = 0; j < ds.size(); ++j) {
                    if (j == b) continue;
                    const double d = reference_pre_purchase(ds[b], ds[j]);
                    const double loss = *ds[j].label() == y_obj ? 0.0 : 1.0;
                    best = std::min(best, std::make_tuple(loss + lambda * d, d, j));
                }
                if (r.index != std::get<2>(best) || r.objective != std::get<0>(best)) ++not_optimal;
                if (r.distance > previous) ++non_monotone;
                previous = r.distance;
            }
        }
    }

    std::size_t round_trip_fail = 0, pairs = 0;
    for (std::size_t a = 0; a < ds.size(); ++a) {
        for (std::size_t b = 0; b < ds.size(); ++b, ++pairs) {
            const auto script = edit_script(ds[a], ds[b]);
            std::size_t expected_len = 0;
            for (auto stage : kAllStages) {
                std::vector<Symbol> got;
                for (auto item : apply_edits(project(ds[a], stage).items, script, stage)) {
                    got.push_back(canonical_symbol(item));
                }
                if (got != ds[b].stage_symbols(stage)) ++round_trip_fail;
                expected_len += dp_levenshtein(ds[a].stage_symbols(stage), ds[b].stage_symbols(stage));
            }
            if (script.size() != expected_len) ++round_trip_fail;
        }
    }

    // Case 1: base [c,c,e,g] with outcome 0 against the fixture's [c,b,e,g] -> 1.
    const auto base_index = matching_row(ds, oracle::make("q", "c,c,e,g,0"));
    bool case1 = false;
    std::string case1_text = "base row missing";
    if (base_index) {
        const auto r = find_counterfactual(ds, model, CfQuery{ds[*base_index], 1, 1.0, base_index, std::nullopt});
        case1 = r.counterfactual.canonical_string() == "[c, b, e, g, 1]" && r.edits.size() == 1 &&
                r.edits.ops[0].kind == EditKind::substitute && r.edits.ops[0].stage == StageId::st1 &&
                r.edits.ops[0].stage_position == 2 && r.edits.ops[0].from == ItemCode::c &&
                r.edits.ops[0].to == ItemCode::b;
        case1_text = r.counterfactual.canonical_string() + " via '" +
                     (r.edits.empty() ? std::string("no edits") : r.edits.ops[0].narrative()) + "'";
    }
    return {not_optimal == 0 && non_monotone == 0 && round_trip_fail == 0 && case1,
            std::to_string(queries) + " queries, non-optimal " + std::to_string(not_optimal) + ", non-monotone " +
                std::to_string(non_monotone) + "; " + std::to_string(pairs) + " edit scripts, round-trip failures " +
                std::to_string(round_trip_fail) + "; case 1 " + case1_text};
}

Outcome cleansing_fixture() {
    const auto res = cleanse(load_file(JM_FIXTURE, InputFormat::csv));
    const auto h = res.report.histogram();
    const std::map<RejectReason, std::size_t> expected{
        {RejectReason::UnknownSymbol, 2},     {RejectReason::NoOutcome, 9},        {RejectReason::EventAfterOutcome, 4},
        {RejectReason::IllegalTransition, 4}, {RejectReason::PostPurchaseItem, 3}, {RejectReason::TooLong, 1}};
    std::string hist;
    for (const auto& [reason, count] : h) hist += " " + std::string(to_string(reason)) + "=" + std::to_string(count);
    return {res.report.accepted == 104 && res.report.rejected.size() == 23 && h == expected,
            std::to_string(res.report.accepted) + " accepted / " + std::to_string(res.report.rejected.size()) +
                " rejected;" + hist};
}

Outcome directional_silhouette() {
    const auto ds = fixture();
    const std::vector<DistanceConfig> configs{{StageWeights(1, 1, 1), Kernel::levenshtein, StageMask::all()},
                                              {StageWeights(2, 1, 10), Kernel::levenshtein, StageMask::all()}};
    const std::vector<std::size_t> ks{2, 3, 4, 5, 6};
    const auto rep = sweep(ds, configs, ks, 42);
    int holds = 0;
    std::string detail;
    for (auto k : ks) {
        const double plain = *rep.cell(0, k).result.silhouette;
        const double weighted = *rep.cell(1, k).result.silhouette;
        if (weighted >= plain) ++holds;
        char buf[64];
        std::snprintf(buf, sizeof buf, " k=%zu: %.4f vs %.4f;", k, weighted, plain);
        detail += buf;
    }
    return {holds >= 4, std::to_string(holds) + "/5 k values with SC(2,1,10) >= SC(1,1,1):" + detail};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome determinism() {
    const auto root = std::filesystem::temp_directory_path() / "journeymap_acceptance";
    std::filesystem::remove_all(root);
    const std::vector<std::string> commands{
        "cluster --input " JM_FIXTURE " --all-configs",
        "embed --input " JM_FIXTURE,
        "predict --input " JM_FIXTURE " --reps 100",
        "explain --input " JM_FIXTURE " --sequence c,c,e,g,0",
        "explain --input " JM_FIXTURE " --all",
    };
    std::size_t differing = 0, failed = 0, compared = 0;
    for (std::size_t c = 0; c < commands.size(); ++c) {
        std::vector<std::filesystem::path> dirs;
        for (int run = 0; run < 2; ++run) {
            const auto dir = root / ("cmd" + std::to_string(c) + "_run" + std::to_string(run));
            std::filesystem::create_directories(dir);
            const std::string cmd = std::string("\"") + JM_CLI + "\" " + commands[c] + " --out-dir \"" +
                                    dir.string() + "\" > \"" + (dir / "stdout.txt").string() + "\" 2>&1";
            if (std::system(cmd.c_str()) != 0) ++failed;
            dirs.push_back(dir);
        }
        for (const auto& entry : std::filesystem::directory_iterator(dirs[0])) {
            ++compared;
            if (slurp(entry.path()) != slurp(dirs[1] / entry.path().filename())) ++differing;
        }
    }
    std::filesystem::remove_all(root);
    return {differing == 0 && failed == 0 && compared >= 10,
            std::to_string(commands.size()) + " commands run twice, " + std::to_string(compared) +
                " artifacts compared, differing " + std::to_string(differing) + ", failed runs " +
                std::to_string(failed)};
}

}  // namespace

int main() {
    criterion("metric-axioms", 10, metric_axioms);
    criterion("edit-distance-oracle", 5, edit_distance_oracle);
    criterion("kmedoids-swap-optimality", 30, swap_optimality);
    criterion("silhouette-reference", 0, silhouette_reference);
    criterion("mds-round-trip", 10, mds_round_trip);
    criterion("knn", 0, knn_checks);
    criterion("counterfactual", 0, counterfactual_checks);
    criterion("cleansing-fixture", 0, cleansing_fixture);
    criterion("directional-silhouette", 0, directional_silhouette);
    criterion("determinism", 0, determinism);
    std::cout << (failures == 0 ? "all acceptance criteria passed" : std::to_string(failures) + " criteria failed")
              << std::endl;
    return failures == 0 ? 0 : 1;
}
