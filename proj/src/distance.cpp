#include "journeymap/distance.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "journeymap/error.hpp"

namespace journey {

std::string_view to_string(Kernel kernel) {
    return kernel == Kernel::levenshtein ? "levenshtein" : "damerau_levenshtein";
}

Kernel parse_kernel(std::string_view name) {
    if (name == "levenshtein" || name == "ld") return Kernel::levenshtein;
    if (name == "damerau_levenshtein" || name == "damerau" || name == "dl") return Kernel::damerau_levenshtein;
    throw Error(ErrorCode::InvalidArgument, "unknown kernel '" + std::string(name) + "'");
}

void StageWeights::check_non_negative() const {
    for (std::size_t g = 0; g < 3; ++g) {
        if (w[g] < Rational(0)) {
            throw Error(ErrorCode::InvalidArgument,
                        "weight w" + std::to_string(g + 1) + " is negative (" + w[g].to_string() + ")");
        }
    }
}

bool StageWeights::all_zero() const {
    return std::all_of(w.begin(), w.end(), [](const Rational& r) { return r == Rational(0); });
}

std::string StageWeights::to_string() const {
    return "(" + w[0].to_string() + "," + w[1].to_string() + "," + w[2].to_string() + ")";
}

StageMask StageMask::parse(std::string_view text) {
    StageMask mask(false, false, false);
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto token = text.substr(start, comma == text.npos ? text.npos : comma - start);
        if (token == "st1" || token == "1") {
            mask.on_[0] = true;
        } else if (token == "st2" || token == "2") {
            mask.on_[1] = true;
        } else if (token == "st3" || token == "3") {
            mask.on_[2] = true;
        } else {
            throw Error(ErrorCode::InvalidArgument, "unknown stage '" + std::string(token) + "'");
        }
        if (comma == text.npos) break;
        start = comma + 1;
    }
    return mask;
}

std::string StageMask::to_string() const {
    std::string out;
    for (auto s : kAllStages) {
        if (!contains(s)) continue;
        if (!out.empty()) out += ',';
        out += journey::to_string(s);
    }
    return out;
}

StageWeights DistanceConfig::effective_weights() const {
    StageWeights out = weights;
    for (auto s : kAllStages) {
        if (!mask.contains(s)) out.w[stage_index(s)] = Rational(0);
    }
    return out;
}

void DistanceConfig::validate() const {
    weights.check_non_negative();
    if (effective_weights().all_zero()) {
        throw Error(ErrorCode::DegenerateConfig, "all stage weights are zero after masking " +
                                                     weights.to_string() + " with {" + mask.to_string() + "}");
    }
}

std::size_t levenshtein(std::span<const Symbol> x, std::span<const Symbol> y) {
    if (x.size() < y.size()) std::swap(x, y);
    std::vector<std::size_t> row(y.size() + 1);
    for (std::size_t j = 0; j <= y.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= x.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= y.size(); ++j) {
            const std::size_t up = row[j];
            const std::size_t sub = diag + (x[i - 1] == y[j - 1] ? 0 : 1);
            row[j] = std::min({sub, up + 1, row[j - 1] + 1});
            diag = up;
        }
    }
    return row[y.size()];
}

std::size_t damerau_levenshtein(std::span<const Symbol> x, std::span<const Symbol> y) {
    const std::size_t n = x.size();
    const std::size_t m = y.size();
    const std::size_t inf = n + m;
    const std::size_t cols = m + 2;
    std::vector<std::size_t> h((n + 2) * cols);
    auto at = [&](std::size_t i, std::size_t j) -> std::size_t& { return h[i * cols + j]; };

    at(0, 0) = inf;
    for (std::size_t i = 0; i <= n; ++i) {
        at(i + 1, 0) = inf;
        at(i + 1, 1) = i;
    }
    for (std::size_t j = 0; j <= m; ++j) {
        at(0, j + 1) = inf;
        at(1, j + 1) = j;
    }

    // Last row (1-based) where each symbol occurred in x.
    std::array<std::size_t, 256> last_row{};
    for (std::size_t i = 1; i <= n; ++i) {
        std::size_t last_match_col = 0;
        for (std::size_t j = 1; j <= m; ++j) {
            const std::size_t i1 = last_row[static_cast<unsigned char>(y[j - 1])];
            const std::size_t j1 = last_match_col;
            const std::size_t cost = x[i - 1] == y[j - 1] ? 0 : 1;
            if (cost == 0) last_match_col = j;
            at(i + 1, j + 1) = std::min({at(i, j) + cost, at(i + 1, j) + 1, at(i, j + 1) + 1,
                                         at(i1, j1) + (i - i1 - 1) + 1 + (j - j1 - 1)});
        }
        last_row[static_cast<unsigned char>(x[i - 1])] = i;
    }
    return at(n + 1, m + 1);
}

std::size_t edit_distance(std::span<const Symbol> x, std::span<const Symbol> y, Kernel kernel) {
    return kernel == Kernel::levenshtein ? levenshtein(x, y) : damerau_levenshtein(x, y);
}

std::array<std::size_t, 3> stage_distances(const Journey& a, const Journey& b, Kernel kernel) {
    std::array<std::size_t, 3> out{};
    for (auto s : kAllStages) {
        out[stage_index(s)] = edit_distance(a.stage_symbols(s), b.stage_symbols(s), kernel);
    }
    return out;
}

double staged_distance(const Journey& a, const Journey& b, const DistanceConfig& config) {
    const auto w = config.effective_weights();
    double total = 0.0;
    for (auto s : kAllStages) {
        const auto& wg = w[s];
        if (wg == Rational(0)) continue;
        const auto d = edit_distance(a.stage_symbols(s), b.stage_symbols(s), config.kernel);
        total += wg.to_double() * static_cast<double>(d);
    }
    return total;
}

Rational staged_distance_exact(const Journey& a, const Journey& b, const DistanceConfig& config) {
    const auto w = config.effective_weights();
    Rational total(0);
    for (auto s : kAllStages) {
        const auto d = edit_distance(a.stage_symbols(s), b.stage_symbols(s), config.kernel);
        total += w[s] * Rational(static_cast<std::int64_t>(d));
    }
    return total;
}

DistanceMatrix::DistanceMatrix(std::vector<std::string> ids, std::vector<double> values, DistanceConfig config)
    : n_(ids.size()), ids_(std::move(ids)), values_(std::move(values)), config_(config) {
    if (values_.size() != n_ * n_) throw Error(ErrorCode::InvalidArgument, "distance matrix shape mismatch");
}

DistanceMatrix DistanceMatrix::from_values(std::size_t n, std::vector<double> values) {
    if (values.size() != n * n) throw Error(ErrorCode::InvalidArgument, "distance matrix shape mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        if (values[i * n + i] != 0.0) throw Error(ErrorCode::InvalidArgument, "non-zero diagonal");
        for (std::size_t j = 0; j < n; ++j) {
            const double v = values[i * n + j];
            if (!(v >= 0.0) || !std::isfinite(v)) {
                throw Error(ErrorCode::InvalidArgument, "distances must be finite and non-negative");
            }
            if (v != values[j * n + i]) throw Error(ErrorCode::InvalidArgument, "matrix is not symmetric");
        }
    }
    std::vector<std::string> ids;
    ids.reserve(n);
    for (std::size_t i = 0; i < n; ++i) ids.push_back(std::to_string(i));
    return DistanceMatrix(std::move(ids), std::move(values), DistanceConfig{});
}

double DistanceMatrix::max_triangle_violation() const {
    double worst = n_ ? -std::numeric_limits<double>::infinity() : 0.0;
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j)
            for (std::size_t k = 0; k < n_; ++k)
                worst = std::max(worst, (*this)(i, k) - (*this)(i, j) - (*this)(j, k));
    return worst;
}

DistanceMatrix distance_matrix(std::span<const Journey> journeys, const DistanceConfig& config,
                               unsigned threads) {
    config.validate();
    const std::size_t n = journeys.size();

    // Stage projections are reused n times each.
    std::vector<std::array<std::vector<Symbol>, 3>> projections(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (auto s : kAllStages) projections[i][stage_index(s)] = journeys[i].stage_symbols(s);
    }
    const auto w = config.effective_weights();
    std::array<double, 3> wd{};
    for (std::size_t g = 0; g < 3; ++g) wd[g] = w.w[g].to_double();

    std::vector<double> values(n * n, 0.0);
    auto fill_row = [&](std::size_t i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double total = 0.0;
            for (std::size_t g = 0; g < 3; ++g) {
                if (wd[g] == 0.0) continue;
                total += wd[g] * static_cast<double>(
                                     edit_distance(projections[i][g], projections[j][g], config.kernel));
            }
            values[i * n + j] = total;
            values[j * n + i] = total;
        }
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fill_row(i);
    } else {
        // Rows interleaved across workers; each cell written by exactly one worker.
        std::vector<std::jthread> workers;
        for (unsigned t = 0; t < threads; ++t) {
            workers.emplace_back([&, t] {
                for (std::size_t i = t; i < n; i += threads) fill_row(i);
            });
        }
    }

    std::vector<std::string> ids;
    ids.reserve(n);
    for (const auto& j : journeys) ids.push_back(j.id());
    return DistanceMatrix(std::move(ids), std::move(values), config);
}

DistanceMatrix distance_matrix(const Dataset& dataset, const DistanceConfig& config, unsigned threads) {
    return distance_matrix(dataset.journeys(), config, threads);
}

}  // namespace journey
