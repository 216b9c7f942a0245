#include "journeymap/prediction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "journeymap/error.hpp"
#include "journeymap/rng.hpp"

namespace journey {

namespace {

void check_k(std::size_t k, std::size_t n) {
    if (k < 1 || k > n) {
        throw Error(ErrorCode::InvalidK, "k'=" + std::to_string(k) + " is outside [1, " + std::to_string(n) + "]");
    }
}

double mean(std::span<const double> xs) {
    if (xs.empty()) return 0.0;
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs, double mu) {
    if (xs.size() < 2) return 0.0;
    double s = 0.0;
    for (double x : xs) s += (x - mu) * (x - mu);
    return s / static_cast<double>(xs.size() - 1);
}

}  // namespace

std::vector<std::size_t> nearest_indices(std::span<const double> distances, std::size_t k) {
    std::vector<std::size_t> idx(distances.size());
    std::iota(idx.begin(), idx.end(), 0);
    k = std::min(k, idx.size());
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                      [&](std::size_t a, std::size_t b) {
                          return distances[a] < distances[b] || (distances[a] == distances[b] && a < b);
                      });
    idx.resize(k);
    return idx;
}

DistanceConfig pre_purchase_config(DistanceConfig config) {
    config.mask = StageMask(config.mask.contains(StageId::st1), config.mask.contains(StageId::st2), false);
    return config;
}

KnnModel::KnnModel(std::vector<Journey> training, std::size_t k, DistanceConfig config)
    : training_(std::move(training)), k_(k), config_(pre_purchase_config(config)) {
    if (training_.empty()) throw Error(ErrorCode::EmptyModel, "k-NN model has no training journeys");
    for (const auto& j : training_) {
        if (!j.has_outcome()) throw Error(ErrorCode::MissingOutcome, "training journey '" + j.id() + "' has no label");
    }
    check_k(k_, training_.size());
    config_.validate();
}

std::vector<Neighbor> KnnModel::neighbors(const Journey& query) const {
    std::vector<double> d(training_.size());
    for (std::size_t i = 0; i < training_.size(); ++i) d[i] = staged_distance(query, training_[i], config_);
    std::vector<Neighbor> out;
    for (auto i : nearest_indices(d, k_)) out.push_back({i, training_[i].id(), d[i], *training_[i].label()});
    return out;
}

double KnnModel::predict_value(const Journey& query) const {
    double sum = 0.0;
    for (const auto& nb : neighbors(query)) sum += nb.label;
    return sum / static_cast<double>(k_);
}

int KnnModel::classify(const Journey& query, double threshold) const {
    return predict_value(query) >= threshold ? 1 : 0;
}

double Confusion::accuracy() const {
    const auto total = tp + fp + tn + fn;
    return total ? static_cast<double>(tp + tn) / static_cast<double>(total) : 0.0;
}

double Confusion::f1() const {
    const auto denom = 2 * tp + fp + fn;
    return denom ? static_cast<double>(2 * tp) / static_cast<double>(denom) : 0.0;
}

Confusion confusion(std::span<const int> truth, std::span<const int> predicted) {
    if (truth.size() != predicted.size()) throw Error(ErrorCode::InvalidArgument, "confusion size mismatch");
    Confusion c;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] == 1) {
            predicted[i] == 1 ? ++c.tp : ++c.fn;
        } else {
            predicted[i] == 1 ? ++c.fp : ++c.tn;
        }
    }
    return c;
}

Split stratified_split(std::span<const int> labels, double test_fraction, std::uint64_t seed) {
    Rng rng(seed);
    Split split;
    for (int cls : {0, 1}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == cls) members.push_back(i);
        }
        rng.shuffle(std::span<std::size_t>(members));
        auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(members.size())));
        if (members.size() >= 2) n_test = std::clamp<std::size_t>(n_test, 1, members.size() - 1);
        else n_test = 0;
        split.test.insert(split.test.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_test));
        split.train.insert(split.train.end(), members.begin() + static_cast<std::ptrdiff_t>(n_test), members.end());
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

EvalReport evaluate(const Dataset& dataset, DistanceConfig config, std::span<const std::size_t> ks,
                    std::size_t repetitions, std::uint64_t base_seed, const EvalOptions& options) {
    config = pre_purchase_config(config);
    config.validate();
    const auto labels = dataset.labels();
    const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
    if (positives == 0 || positives == labels.size()) {
        throw Error(ErrorCode::SingleClassDataset, "evaluation needs both purchase and non-purchase journeys");
    }
    if (ks.empty()) throw Error(ErrorCode::InvalidArgument, "no k' values to evaluate");
    if (repetitions == 0) throw Error(ErrorCode::InvalidArgument, "repetitions must be positive");

    const auto matrix = distance_matrix(dataset, config, options.threads);

    // scores[r][ki] = {accuracy, f1}
    std::vector<std::vector<std::pair<double, double>>> scores(repetitions);
    std::vector<std::exception_ptr> failures(repetitions);
    auto run = [&](std::size_t r) {
        try {
            const auto split = stratified_split(labels, options.test_fraction, base_seed + r);
            std::vector<int> truth;
            for (auto t : split.test) truth.push_back(labels[t]);
            std::vector<double> d(split.train.size());
            for (auto k : ks) {
                check_k(k, split.train.size());
                std::vector<int> predicted;
                for (auto t : split.test) {
                    for (std::size_t i = 0; i < split.train.size(); ++i) d[i] = matrix(t, split.train[i]);
                    double sum = 0.0;
                    for (auto nb : nearest_indices(d, k)) sum += labels[split.train[nb]];
                    predicted.push_back(sum / static_cast<double>(k) >= options.threshold ? 1 : 0);
                }
                const auto c = confusion(truth, predicted);
                scores[r].emplace_back(c.accuracy(), c.f1());
            }
        } catch (...) {
            failures[r] = std::current_exception();
        }
    };

    unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, repetitions));
    if (threads <= 1) {
        for (std::size_t r = 0; r < repetitions; ++r) run(r);
    } else {
        std::vector<std::jthread> workers;
        for (unsigned t = 0; t < threads; ++t) {
            workers.emplace_back([&, t] {
                for (std::size_t r = t; r < repetitions; r += threads) run(r);
            });
        }
    }
    for (const auto& f : failures) {
        if (f) std::rethrow_exception(f);
    }

    EvalReport report;
    report.config = config;
    report.ks.assign(ks.begin(), ks.end());
    report.repetitions = repetitions;
    report.base_seed = base_seed;
    report.test_fraction = options.test_fraction;
    report.threshold = options.threshold;
    for (std::size_t ki = 0; ki < ks.size(); ++ki) {
        EvalRow row;
        row.k = ks[ki];
        for (std::size_t r = 0; r < repetitions; ++r) {
            row.accuracy.push_back(scores[r][ki].first);
            row.f1.push_back(scores[r][ki].second);
        }
        row.accuracy_mean = mean(row.accuracy);
        row.accuracy_variance = sample_variance(row.accuracy, row.accuracy_mean);
        row.f1_mean = mean(row.f1);
        row.f1_variance = sample_variance(row.f1, row.f1_mean);
        report.rows.push_back(std::move(row));
    }
    return report;
}

}  // namespace journey
