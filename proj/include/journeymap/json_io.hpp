#pragma once

// JSON forms of every report the CLI writes and the service returns.

#include "json.hpp"

#include "journeymap/clustering.hpp"
#include "journeymap/counterfactual.hpp"
#include "journeymap/distance.hpp"
#include "journeymap/embedding.hpp"
#include "journeymap/ingestion.hpp"
#include "journeymap/prediction.hpp"

namespace journey {

using Json = nlohmann::ordered_json;

Json to_json(const Journey& journey);
Json to_json(const CleansingReport& report);
Json to_json(const StageStats& stats);
Json to_json(const CooccurrenceMatrix& matrix);
Json to_json(const DistanceConfig& config);
Json to_json(const DistanceMatrix& matrix);
/// Includes the medoid journeys and cluster sizes when a dataset is given.
Json to_json(const ClusteringResult& result, const Dataset* dataset = nullptr);
Json to_json(const SweepReport& report, const Dataset& dataset);
/// Per-row cluster ids and outcomes are attached when supplied.
Json to_json(const Embedding& embedding, const std::vector<std::size_t>* clusters = nullptr,
             const std::vector<int>* outcomes = nullptr, const std::vector<std::size_t>* medoids = nullptr);
Json to_json(const EvalReport& report);
Json to_json(const Neighbor& neighbor);
Json to_json(const EditOp& op);
Json to_json(const CfResult& result);

/// Snapshot persistence: {"provenance", "journeys": [{"id", "items"}]}.
Json dataset_to_json(const Dataset& dataset);
/// Re-validates every journey; throws Error(InvalidArgument) on bad content.
Dataset dataset_from_json(const Json& json);

}  // namespace journey
