#include "journeymap/service.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "httplib.h"

#include "journeymap/clustering.hpp"
#include "journeymap/counterfactual.hpp"
#include "journeymap/embedding.hpp"
#include "journeymap/error.hpp"
#include "journeymap/prediction.hpp"

namespace journey {

namespace {

constexpr std::uint64_t kDefaultSeed = 42;

using Params = std::map<std::string, std::string>;

Reply error_reply(int status, std::string_view code, const std::string& message) {
    return {status, Json{{"error", std::string(code)}, {"message", message}}};
}

Reply error_reply(const Error& e) { return error_reply(http_status_for(e.code()), to_string(e.code()), e.what()); }

std::string param(const Params& params, const std::string& key, const std::string& fallback) {
    const auto it = params.find(key);
    return it == params.end() || it->second.empty() ? fallback : it->second;
}

std::uint64_t parse_uint(const std::string& text, const std::string& name) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw Error(ErrorCode::InvalidArgument, name + " must be a non-negative integer, got '" + text + "'");
    }
    return v;
}

DistanceConfig config_from(const Params& params) {
    DistanceConfig config;
    config.weights = StageWeights(Rational::parse(param(params, "w1", "2")), Rational::parse(param(params, "w2", "1")),
                                  Rational::parse(param(params, "w3", "10")));
    config.kernel = parse_kernel(param(params, "kernel", "levenshtein"));
    if (const auto it = params.find("stages"); it != params.end() && !it->second.empty()) {
        config.mask = StageMask::parse(it->second);
    }
    config.validate();
    return config;
}

/// JSON bodies carry numbers or strings for the same fields; both are accepted.
Params params_from_body(const Json& body) {
    Params out;
    for (const auto& key : {"w1", "w2", "w3", "kernel", "stages", "k", "seed"}) {
        if (!body.contains(key)) continue;
        const auto& v = body.at(key);
        if (v.is_string()) {
            out[key] = v.get<std::string>();
        } else if (v.is_number_integer()) {
            out[key] = std::to_string(v.get<std::int64_t>());
        } else if (v.is_number()) {
            std::ostringstream os;
            os << v.get<double>();
            out[key] = os.str();
        } else {
            throw Error(ErrorCode::InvalidArgument, std::string("field '") + key + "' has the wrong type");
        }
    }
    return out;
}

Json parse_body(const std::string& body) {
    try {
        auto json = Json::parse(body);
        if (!json.is_object()) throw Error(ErrorCode::InvalidArgument, "request body must be a JSON object");
        return json;
    } catch (const Json::parse_error& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("invalid JSON body: ") + e.what());
    }
}

struct DraftOrReject {
    std::optional<Journey> journey;
    std::optional<RejectReason> reason;
};

DraftOrReject draft_from(const Json& body, const std::string& id) {
    if (!body.contains("items") || !body.at("items").is_array()) {
        throw Error(ErrorCode::InvalidArgument, "body needs an 'items' array");
    }
    std::vector<std::string> symbols;
    for (const auto& item : body.at("items")) {
        if (!item.is_string()) throw Error(ErrorCode::InvalidArgument, "items must be strings");
        symbols.push_back(item.get<std::string>());
    }
    if (symbols.empty()) return {std::nullopt, RejectReason::NoOutcome};
    auto result = validate_draft(literal_record(id, symbols));
    if (auto* r = std::get_if<RejectReason>(&result)) return {std::nullopt, *r};
    return {std::get<Journey>(std::move(result)), std::nullopt};
}

Reply reject_reply(RejectReason reason) {
    return {422, Json{{"error", "ValidationFailed"},
                      {"reason", std::string(to_string(reason))},
                      {"message", "journey rejected: " + std::string(to_string(reason))}}};
}

Reply no_dataset() { return error_reply(409, "NoDataset", "no dataset has been uploaded yet"); }

template <typename F>
Reply guarded(F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        return error_reply(e);
    } catch (const Json::exception& e) {
        return error_reply(400, "InvalidArgument", e.what());
    } catch (const std::exception& e) {
        return error_reply(500, "Internal", e.what());
    }
}

}  // namespace

int http_status_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument:
        case ErrorCode::MalformedRow:
        case ErrorCode::DegenerateConfig:
        case ErrorCode::InvalidK:
        case ErrorCode::InvalidAssignment: return 400;
        case ErrorCode::NotFound: return 404;
        case ErrorCode::EmptyDataset:
        case ErrorCode::MissingOutcome:
        case ErrorCode::TooFewPoints:
        case ErrorCode::EmptyModel:
        case ErrorCode::SingleClassDataset:
        case ErrorCode::NoCandidates: return 422;
        case ErrorCode::NoConvergence: return 500;
    }
    return 500;
}

ServiceState::ServiceState(ServiceOptions options) : options_(std::move(options)) {
    if (!options_.snapshot_path.empty() && std::filesystem::exists(options_.snapshot_path)) {
        std::ifstream in(options_.snapshot_path);
        Json json;
        try {
            json = Json::parse(in);
        } catch (const Json::parse_error& e) {
            throw Error(ErrorCode::InvalidArgument, "unreadable snapshot '" + options_.snapshot_path + "': " + e.what());
        }
        install(dataset_from_json(json));
    }
}

std::uint64_t ServiceState::install(Dataset dataset) {
    auto snap = std::make_shared<Snapshot>();
    snap->stats = describe(dataset);
    snap->cooccurrence = cooccurrence(dataset);
    snap->dataset = std::move(dataset);
    std::lock_guard lock(snapshot_mutex_);
    snap->version = next_version_++;
    current_ = std::move(snap);
    return current_->version;
}

std::shared_ptr<const Snapshot> ServiceState::snapshot() const {
    std::lock_guard lock(snapshot_mutex_);
    return current_;
}

std::size_t ServiceState::cached_matrices() const {
    std::lock_guard lock(cache_mutex_);
    return cache_.size();
}

std::shared_ptr<const DistanceMatrix> ServiceState::matrix_for(const Snapshot& snap,
                                                               const DistanceConfig& config) const {
    const auto& w = config.weights.w;
    CacheKey key{snap.version, w[0].to_string(), w[1].to_string(), w[2].to_string(),
                 std::string(to_string(config.kernel)), config.mask.to_string()};
    {
        std::lock_guard lock(cache_mutex_);
        for (auto it = cache_.begin(); it != cache_.end(); ++it) {
            if (it->first == key) {
                cache_.splice(cache_.begin(), cache_, it);
                return cache_.front().second;
            }
        }
    }
    // Computed outside the lock; concurrent misses may both compute, the first insert wins.
    auto computed = std::make_shared<const DistanceMatrix>(distance_matrix(snap.dataset, config));
    std::lock_guard lock(cache_mutex_);
    for (auto it = cache_.begin(); it != cache_.end(); ++it) {
        if (it->first == key) {
            cache_.splice(cache_.begin(), cache_, it);
            return cache_.front().second;
        }
    }
    cache_.emplace_front(key, computed);
    while (cache_.size() > options_.cache_capacity) cache_.pop_back();
    return computed;
}

void ServiceState::persist(const Dataset& dataset) const {
    if (options_.snapshot_path.empty()) return;
    const auto tmp = options_.snapshot_path + ".tmp";
    {
        std::ofstream out(tmp);
        out << dataset_to_json(dataset).dump(2) << '\n';
        if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write snapshot '" + tmp + "'");
    }
    std::filesystem::rename(tmp, options_.snapshot_path);
}

Reply ServiceState::health() const {
    const auto snap = snapshot();
    return {200, Json{{"status", "ok"},
                      {"version", std::string("journeymap ") + JOURNEYMAP_VERSION},
                      {"dataset_version", snap ? Json(snap->version) : Json(nullptr)}}};
}

Reply ServiceState::upload(const std::string& body, std::optional<InputFormat> format) {
    return guarded([&]() -> Reply {
        if (!format) {
            const auto first = body.find_first_not_of(" \t\r\n");
            format = first != std::string::npos && body[first] == '{' ? InputFormat::jsonl : InputFormat::csv;
        }
        std::istringstream in(body);
        const auto records = load(in, *format);
        auto result = cleanse_allow_empty(records, "upload");
        if (result.dataset.empty()) {
            return {422, Json{{"error", "EmptyDataset"}, {"report", to_json(result.report)}}};
        }
        persist(result.dataset);
        const auto version = install(std::move(result.dataset));
        return {200, Json{{"version", version}, {"report", to_json(result.report)}}};
    });
}

Reply ServiceState::stats() const {
    const auto snap = snapshot();
    if (!snap) return no_dataset();
    return {200, Json{{"version", snap->version},
                      {"stats", to_json(snap->stats)},
                      {"cooccurrence", to_json(snap->cooccurrence)}}};
}

Reply ServiceState::clusters(const Params& params) const {
    const auto snap = snapshot();
    if (!snap) return no_dataset();
    return guarded([&]() -> Reply {
        const auto config = config_from(params);
        const auto k = parse_uint(param(params, "k", "6"), "k");
        const auto seed = parse_uint(param(params, "seed", std::to_string(kDefaultSeed)), "seed");
        const auto matrix = matrix_for(*snap, config);
        const auto result = kmedoids(*matrix, k, seed);
        return {200, Json{{"version", snap->version},
                          {"config", to_json(config)},
                          {"clustering", to_json(result, &snap->dataset)}}};
    });
}

Reply ServiceState::embedding(const Params& params) const {
    const auto snap = snapshot();
    if (!snap) return no_dataset();
    return guarded([&]() -> Reply {
        const auto config = config_from(params);
        const auto k = parse_uint(param(params, "k", "6"), "k");
        const auto seed = parse_uint(param(params, "seed", std::to_string(kDefaultSeed)), "seed");
        const auto matrix = matrix_for(*snap, config);
        const auto emb = mds(*matrix);
        const auto clustering = kmedoids(*matrix, k, seed);
        const auto outcomes = snap->dataset.labels();
        return {200, Json{{"version", snap->version},
                          {"config", to_json(config)},
                          {"k", k},
                          {"embedding", to_json(emb, &clustering.assignment, &outcomes, &clustering.medoids)}}};
    });
}

Reply ServiceState::predict(const std::string& body) const {
    const auto snap = snapshot();
    if (!snap) return no_dataset();
    return guarded([&]() -> Reply {
        const auto json = parse_body(body);
        auto params = params_from_body(json);
        const auto draft = draft_from(json, "query");
        if (!draft.journey) return reject_reply(*draft.reason);
        const auto k = parse_uint(param(params, "k", "5"), "k");
        const KnnModel model(std::vector<Journey>(snap->dataset.journeys().begin(), snap->dataset.journeys().end()),
                             k, config_from(params));
        const auto neighbors = model.neighbors(*draft.journey);
        double sum = 0.0;
        Json list = Json::array();
        for (const auto& nb : neighbors) {
            sum += nb.label;
            list.push_back(to_json(nb));
        }
        return {200, Json{{"version", snap->version},
                          {"k", k},
                          {"config", to_json(model.config())},
                          {"y_hat", sum / static_cast<double>(k)},
                          {"neighbors", list}}};
    });
}

Reply ServiceState::counterfactual(const std::string& body) const {
    const auto snap = snapshot();
    if (!snap) return no_dataset();
    return guarded([&]() -> Reply {
        const auto json = parse_body(body);
        auto params = params_from_body(json);
        const auto draft = draft_from(json, "query");
        if (!draft.journey) return reject_reply(*draft.reason);
        const int y_obj = json.value("y_obj", 1);
        const double lambda = json.value("lambda", 1.0);
        const auto k = parse_uint(param(params, "k", "5"), "k");
        const KnnModel model(std::vector<Journey>(snap->dataset.journeys().begin(), snap->dataset.journeys().end()),
                             k, config_from(params));
        CfQuery query{.base = *draft.journey, .y_obj = y_obj, .lambda = lambda, .base_index = std::nullopt,
                      .metric = std::nullopt};
        // A draft is matched by content, never by id.
        query.base_index = matching_row(snap->dataset, *draft.journey).value_or(snap->dataset.size());
        auto out = to_json(find_counterfactual(snap->dataset, model, query));
        out["version"] = snap->version;
        return {200, out};
    });
}

void install_routes(httplib::Server& server, ServiceState& state) {
    const std::string origin = state.options().cors_origin;
    server.set_default_headers({{"Access-Control-Allow-Origin", origin},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});

    auto send = [](httplib::Response& res, const Reply& reply) {
        res.status = reply.status;
        res.set_content(reply.body.dump(), "application/json");
    };
    auto params_of = [](const httplib::Request& req) {
        Params p;
        for (const auto& [k, v] : req.params) p[k] = v;
        return p;
    };

    server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    server.Get("/api/health", [&, send](const httplib::Request&, httplib::Response& res) { send(res, state.health()); });
    server.Post("/api/dataset", [&, send](const httplib::Request& req, httplib::Response& res) {
        std::optional<InputFormat> format;
        try {
            if (req.has_param("format")) {
                format = parse_format(req.get_param_value("format"));
            } else {
                const auto type = req.get_header_value("Content-Type");
                if (type.find("jsonl") != std::string::npos || type.find("ndjson") != std::string::npos) {
                    format = InputFormat::jsonl;
                } else if (type.find("csv") != std::string::npos) {
                    format = InputFormat::csv;
                }
            }
        } catch (const Error& e) {
            send(res, error_reply(e));
            return;
        }
        send(res, state.upload(req.body, format));
    });
    server.Get("/api/stats", [&, send](const httplib::Request&, httplib::Response& res) { send(res, state.stats()); });
    server.Get("/api/clusters", [&, send, params_of](const httplib::Request& req, httplib::Response& res) {
        send(res, state.clusters(params_of(req)));
    });
    server.Get("/api/embedding", [&, send, params_of](const httplib::Request& req, httplib::Response& res) {
        send(res, state.embedding(params_of(req)));
    });
    server.Post("/api/predict", [&, send](const httplib::Request& req, httplib::Response& res) {
        send(res, state.predict(req.body));
    });
    server.Post("/api/counterfactual", [&, send](const httplib::Request& req, httplib::Response& res) {
        send(res, state.counterfactual(req.body));
    });
}

}  // namespace journey
