#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "journeymap/distance.hpp"
#include "journeymap/model.hpp"

namespace journey {

struct Neighbor {
    std::size_t index = 0;
    std::string id;
    double distance = 0.0;
    int label = 0;
};

/// Indices of the k smallest entries, ordered by (distance, index).
std::vector<std::size_t> nearest_indices(std::span<const double> distances, std::size_t k);

/// k-NN regressor over the pre-purchase stages. The outcome stage is always
/// masked out of the metric so labels cannot leak into neighbor selection.
class KnnModel {
public:
    /// Throws Error(EmptyModel) without training journeys, Error(InvalidK)
    /// unless 1 <= k <= training size, and the config's validation errors.
    KnnModel(std::vector<Journey> training, std::size_t k, DistanceConfig config);

    std::size_t k() const noexcept { return k_; }
    std::size_t size() const noexcept { return training_.size(); }
    const DistanceConfig& config() const noexcept { return config_; }
    std::span<const Journey> training() const noexcept { return training_; }

    std::vector<Neighbor> neighbors(const Journey& query) const;
    /// Mean label of the k nearest training journeys.
    double predict_value(const Journey& query) const;
    /// 1 iff predict_value >= threshold.
    int classify(const Journey& query, double threshold = 0.5) const;

private:
    std::vector<Journey> training_;
    std::size_t k_;
    DistanceConfig config_;
};

/// Restricts a config to st1 and st2.
DistanceConfig pre_purchase_config(DistanceConfig config);

struct Confusion {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;

    double accuracy() const;
    /// Positive class is purchase; a zero denominator gives 0.
    double f1() const;
};

Confusion confusion(std::span<const int> truth, std::span<const int> predicted);

struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Per-class shuffle, then round(test_fraction * class size) rows of each
/// class go to the test side (at least one when the class has two or more
/// rows, never the whole class). Both index lists come back ascending.
Split stratified_split(std::span<const int> labels, double test_fraction, std::uint64_t seed);

struct EvalRow {
    std::size_t k = 0;
    std::vector<double> accuracy;
    std::vector<double> f1;
    double accuracy_mean = 0.0;
    double accuracy_variance = 0.0;
    double f1_mean = 0.0;
    double f1_variance = 0.0;
};

struct EvalReport {
    DistanceConfig config;
    std::vector<std::size_t> ks;
    std::size_t repetitions = 0;
    std::uint64_t base_seed = 0;
    double test_fraction = 0.2;
    double threshold = 0.5;
    std::vector<EvalRow> rows;
};

struct EvalOptions {
    double test_fraction = 0.2;
    double threshold = 0.5;
    unsigned threads = 0;
};

/// Repetition r shuffles with seed base_seed + r; every k sees the same
/// splits. Variances are the unbiased (n - 1) sample variance.
/// Throws Error(SingleClassDataset) unless both outcomes occur.
EvalReport evaluate(const Dataset& dataset, DistanceConfig config, std::span<const std::size_t> ks,
                    std::size_t repetitions, std::uint64_t base_seed, const EvalOptions& options = {});

}  // namespace journey
