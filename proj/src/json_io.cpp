#include "journeymap/json_io.hpp"

#include "journeymap/error.hpp"

namespace journey {

namespace {

Json item_list(std::span<const ItemCode> items) {
    Json out = Json::array();
    for (auto item : items) out.push_back(std::string(1, to_char(item)));
    return out;
}

Json symbol_list(const Journey& j) {
    Json out = Json::array();
    for (const auto& ev : j.events()) out.push_back(std::string(1, ev.symbol()));
    return out;
}

}  // namespace

Json to_json(const Journey& journey) {
    Json out;
    out["id"] = journey.id();
    out["items"] = item_list(journey.items());
    out["canonical"] = symbol_list(journey);
    if (journey.label()) {
        out["label"] = *journey.label();
    } else {
        out["label"] = nullptr;
    }
    return out;
}

Json to_json(const CleansingReport& report) {
    Json out;
    out["accepted"] = report.accepted;
    out["rejected_count"] = report.rejected.size();
    Json hist = Json::object();
    const auto h = report.histogram();
    for (auto reason : kAllRejectReasons) {
        const auto it = h.find(reason);
        hist[std::string(to_string(reason))] = it == h.end() ? 0 : it->second;
    }
    out["reasons"] = hist;
    Json rejected = Json::array();
    for (const auto& r : report.rejected) {
        rejected.push_back({{"id", r.id}, {"reason", std::string(to_string(r.reason))}});
    }
    out["rejected"] = rejected;
    return out;
}

Json to_json(const StageStats& stats) {
    Json out;
    out["journeys"] = stats.journeys;
    out["purchases"] = stats.purchases;
    out["non_purchases"] = stats.non_purchases;
    Json stages = Json::array();
    for (auto s : kAllStages) {
        const auto g = stage_index(s);
        Json freq = Json::object();
        for (const auto& [item, count] : stats.frequencies[g]) freq[std::string(1, to_char(item))] = count;
        stages.push_back({{"stage", std::string(to_string(s))},
                          {"frequencies", freq},
                          {"length", {{"min", stats.lengths[g].min},
                                      {"max", stats.lengths[g].max},
                                      {"mean", stats.lengths[g].mean}}}});
    }
    out["stages"] = stages;
    return out;
}

Json to_json(const CooccurrenceMatrix& matrix) {
    Json out;
    Json symbols = Json::array();
    for (auto s : kCanonicalSymbols) symbols.push_back(std::string(1, s));
    out["symbols"] = symbols;
    Json rows = Json::array();
    for (const auto& row : matrix.counts) rows.push_back(row);
    out["counts"] = rows;
    out["total"] = matrix.total();
    return out;
}

Json to_json(const DistanceConfig& config) {
    Json out;
    out["w1"] = config.weights.w[0].to_string();
    out["w2"] = config.weights.w[1].to_string();
    out["w3"] = config.weights.w[2].to_string();
    out["kernel"] = std::string(to_string(config.kernel));
    out["stages"] = config.mask.to_string();
    return out;
}

Json to_json(const DistanceMatrix& matrix) {
    Json out;
    out["ids"] = matrix.ids();
    out["config"] = to_json(matrix.config());
    out["values"] = std::vector<double>(matrix.values().begin(), matrix.values().end());
    return out;
}

Json to_json(const ClusteringResult& result, const Dataset* dataset) {
    Json out;
    out["k"] = result.k;
    out["seed"] = result.seed;
    out["medoids"] = result.medoids;
    out["assignment"] = result.assignment;
    out["sizes"] = result.cluster_sizes();
    out["objective"] = result.objective;
    if (result.silhouette) {
        out["silhouette"] = *result.silhouette;
    } else {
        out["silhouette"] = nullptr;
    }
    out["initial_medoids"] = result.initial_medoids;
    out["initial_objective"] = result.initial_objective;
    out["swaps"] = result.swaps;
    if (dataset) {
        Json protos = Json::array();
        const auto sizes = result.cluster_sizes();
        for (std::size_t c = 0; c < result.medoids.size(); ++c) {
            Json p = to_json((*dataset)[result.medoids[c]]);
            p["cluster"] = c;
            p["size"] = sizes[c];
            protos.push_back(p);
        }
        out["prototypes"] = protos;
    }
    return out;
}

Json to_json(const SweepReport& report, const Dataset& dataset) {
    Json out;
    out["seed"] = report.seed;
    out["ks"] = report.ks;
    Json configs = Json::array();
    for (const auto& c : report.configs) configs.push_back(to_json(c));
    out["configs"] = configs;
    Json grid = Json::array();
    for (std::size_t c = 0; c < report.configs.size(); ++c) {
        Json row = Json::array();
        for (auto k : report.ks) row.push_back(*report.cell(c, k).result.silhouette);
        grid.push_back(row);
    }
    out["silhouette"] = grid;
    Json cells = Json::array();
    for (const auto& cell : report.cells) {
        Json j = to_json(cell.result, &dataset);
        j["config_index"] = cell.config_index;
        cells.push_back(j);
    }
    out["cells"] = cells;
    return out;
}

Json to_json(const Embedding& embedding, const std::vector<std::size_t>* clusters,
             const std::vector<int>* outcomes, const std::vector<std::size_t>* medoids) {
    Json out;
    out["ids"] = embedding.ids;
    Json xy = Json::array();
    for (const auto& p : embedding.xy) xy.push_back({p[0], p[1]});
    out["xy"] = xy;
    out["lambda1"] = embedding.lambda1;
    out["lambda2"] = embedding.lambda2;
    out["negative_mass"] = embedding.negative_mass;
    out["degenerate"] = embedding.degenerate;
    if (clusters) out["cluster"] = *clusters;
    if (outcomes) out["outcome"] = *outcomes;
    if (medoids) out["medoids"] = *medoids;
    return out;
}

Json to_json(const EvalReport& report) {
    Json out;
    out["config"] = to_json(report.config);
    out["ks"] = report.ks;
    out["repetitions"] = report.repetitions;
    out["base_seed"] = report.base_seed;
    out["split"] = {{"train", 1.0 - report.test_fraction}, {"test", report.test_fraction}, {"stratified", true}};
    out["threshold"] = report.threshold;
    Json rows = Json::array();
    for (const auto& r : report.rows) {
        rows.push_back({{"k", r.k},
                        {"accuracy_mean", r.accuracy_mean},
                        {"accuracy_variance", r.accuracy_variance},
                        {"f1_mean", r.f1_mean},
                        {"f1_variance", r.f1_variance},
                        {"accuracy", r.accuracy},
                        {"f1", r.f1}});
    }
    out["rows"] = rows;
    return out;
}

Json to_json(const Neighbor& neighbor) {
    return {{"index", neighbor.index}, {"id", neighbor.id}, {"distance", neighbor.distance}, {"label", neighbor.label}};
}

Json to_json(const EditOp& op) {
    Json out;
    out["op"] = std::string(to_string(op.kind));
    out["stage"] = std::string(to_string(op.stage));
    out["stage_position"] = op.stage_position;
    out["position"] = op.position;
    out["from"] = op.from ? Json(std::string(1, to_char(*op.from))) : Json(nullptr);
    out["to"] = op.to ? Json(std::string(1, to_char(*op.to))) : Json(nullptr);
    out["narrative"] = op.narrative();
    return out;
}

Json to_json(const CfResult& result) {
    Json out;
    out["base_id"] = result.base_id;
    out["counterfactual"] = to_json(result.counterfactual);
    out["index"] = result.index;
    out["y_obj"] = result.y_obj;
    out["lambda"] = result.lambda;
    out["objective"] = result.objective;
    out["distance"] = result.distance;
    out["loss"] = result.loss;
    out["model_check"] = result.model_check;
    Json edits = Json::array();
    for (const auto& op : result.edits.ops) edits.push_back(to_json(op));
    out["edits"] = edits;
    out["narrative"] = result.edits.narrative();
    out["warnings"] = result.warnings;
    return out;
}

Json dataset_to_json(const Dataset& dataset) {
    Json out;
    out["provenance"] = dataset.provenance();
    Json journeys = Json::array();
    for (const auto& j : dataset.journeys()) journeys.push_back({{"id", j.id()}, {"items", item_list(j.items())}});
    out["journeys"] = journeys;
    return out;
}

Dataset dataset_from_json(const Json& json) {
    try {
        std::vector<Journey> journeys;
        for (const auto& entry : json.at("journeys")) {
            RawRecord rec{entry.at("id").get<std::string>(), entry.at("items").get<std::vector<std::string>>()};
            auto result = validate(rec);
            if (auto* r = std::get_if<RejectReason>(&result)) {
                throw Error(ErrorCode::InvalidArgument,
                            "snapshot journey '" + rec.id + "' is invalid: " + std::string(to_string(*r)));
            }
            journeys.push_back(std::get<Journey>(std::move(result)));
        }
        return Dataset(std::move(journeys), json.value("provenance", std::string{}));
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("bad dataset snapshot: ") + e.what());
    }
}

}  // namespace journey
