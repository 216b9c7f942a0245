#include "journeymap/cli.hpp"

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "httplib.h"

#include "journeymap/clustering.hpp"
#include "journeymap/counterfactual.hpp"
#include "journeymap/embedding.hpp"
#include "journeymap/error.hpp"
#include "journeymap/ingestion.hpp"
#include "journeymap/json_io.hpp"
#include "journeymap/prediction.hpp"
#include "journeymap/service.hpp"
#include "journeymap/svg.hpp"

namespace journey::cli {

namespace {

const std::string kToolVersion = std::string("journeymap ") + JOURNEYMAP_VERSION;

std::atomic<bool> g_shutdown{false};

extern "C" void on_signal(int) { g_shutdown.store(true); }

/// Every flag of every command; echoed into each artifact.
struct RunConfig {
    std::string command;
    std::string input;
    std::string format;
    std::string w1 = "2";
    std::string w2 = "1";
    std::string w3 = "10";
    std::string kernel = "levenshtein";
    std::string stages;
    std::size_t k = 6;
    std::size_t k_min = 2;
    std::size_t k_max = 8;
    std::string knn_k;
    double lambda = 1.0;
    std::uint64_t seed = 42;
    std::size_t reps = 100;
    std::string out_dir;
    std::string bind = "127.0.0.1:8080";
    std::string snapshot;
    std::string id;
    std::string sequence;
    int y_obj = 1;
    bool all_configs = false;
    bool batch = false;
    bool json = false;
};

Json to_json(const RunConfig& rc) {
    Json j;
    j["command"] = rc.command;
    j["input"] = rc.input;
    j["format"] = rc.format;
    if (rc.command == "validate" || rc.command == "describe") return j;
    j["w1"] = rc.w1;
    j["w2"] = rc.w2;
    j["w3"] = rc.w3;
    j["kernel"] = rc.kernel;
    if (!rc.stages.empty()) j["stages"] = rc.stages;
    j["seed"] = rc.seed;
    if (rc.command == "cluster") {
        j["k"] = rc.k;
        j["k_min"] = rc.k_min;
        j["k_max"] = rc.k_max;
        j["all_configs"] = rc.all_configs;
    } else if (rc.command == "embed") {
        j["k"] = rc.k;
    } else if (rc.command == "predict") {
        j["knn_k"] = rc.knn_k;
        j["reps"] = rc.reps;
    } else if (rc.command == "explain") {
        j["knn_k"] = rc.knn_k;
        j["lambda"] = rc.lambda;
        j["y_obj"] = rc.y_obj;
        if (!rc.id.empty()) j["id"] = rc.id;
        if (!rc.sequence.empty()) j["sequence"] = rc.sequence;
        j["all"] = rc.batch;
    }
    return j;
}

class UsageError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fixed(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ',')) {
        const auto b = token.find_first_not_of(" []");
        const auto e = token.find_last_not_of(" []");
        if (b == std::string::npos) continue;
        out.push_back(token.substr(b, e - b + 1));
    }
    return out;
}

std::vector<std::size_t> parse_counts(const std::string& text, const std::string& flag) {
    std::vector<std::size_t> out;
    for (const auto& tok : split_list(text)) {
        try {
            std::size_t used = 0;
            const auto v = std::stoull(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
            out.push_back(static_cast<std::size_t>(v));
        } catch (const std::exception&) {
            throw UsageError(flag + " expects comma-separated integers, got '" + text + "'");
        }
    }
    if (out.empty()) throw UsageError(flag + " is empty");
    return out;
}

DistanceConfig make_config(const RunConfig& rc) {
    DistanceConfig config;
    try {
        config.weights = StageWeights(Rational::parse(rc.w1), Rational::parse(rc.w2), Rational::parse(rc.w3));
        config.weights.check_non_negative();
        config.kernel = parse_kernel(rc.kernel);
        if (!rc.stages.empty()) config.mask = StageMask::parse(rc.stages);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    return config;
}

InputFormat input_format(const RunConfig& rc) {
    if (!rc.format.empty()) {
        try {
            return parse_format(rc.format);
        } catch (const Error& e) {
            throw UsageError(e.what());
        }
    }
    const auto ext = std::filesystem::path(rc.input).extension().string();
    return ext == ".jsonl" || ext == ".ndjson" ? InputFormat::jsonl : InputFormat::csv;
}

Dataset load_dataset(const RunConfig& rc) {
    return cleanse(load_file(rc.input, input_format(rc)), rc.input).dataset;
}

void emit(const RunConfig& rc, const std::string& name, const Json& result, std::ostream& out) {
    Json artifact;
    artifact["tool"] = kToolVersion;
    artifact["run_config"] = to_json(rc);
    artifact["result"] = result;
    const auto text = artifact.dump(2) + "\n";
    if (!rc.out_dir.empty()) {
        std::filesystem::create_directories(rc.out_dir);
        std::ofstream file(std::filesystem::path(rc.out_dir) / (name + ".json"));
        file << text;
        if (!file) throw Error(ErrorCode::InvalidArgument, "cannot write " + name + ".json in " + rc.out_dir);
    }
    if (rc.json) out << text;
}

std::string config_label(const DistanceConfig& c) {
    return std::string(c.kernel == Kernel::levenshtein ? "LD" : "DL") + " w=" + c.weights.to_string();
}

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

int cmd_validate(const RunConfig& rc, std::ostream& out) {
    const auto result = cleanse_allow_empty(load_file(rc.input, input_format(rc)), rc.input);
    emit(rc, "validate", to_json(result.report), out);
    if (!rc.json) {
        out << "accepted " << result.report.accepted << ", rejected " << result.report.rejected.size() << "\n";
        for (const auto& [reason, count] : result.report.histogram()) {
            out << "  " << pad(std::string(to_string(reason)), 20) << count << "\n";
        }
        for (const auto& r : result.report.rejected) out << "  - " << r.id << ": " << to_string(r.reason) << "\n";
    }
    return result.report.accepted == 0 ? kEmptyResult : kSuccess;
}

int cmd_describe(const RunConfig& rc, std::ostream& out) {
    const auto dataset = load_dataset(rc);
    const auto stats = describe(dataset);
    const auto co = cooccurrence(dataset);
    emit(rc, "describe", Json{{"stats", to_json(stats)}, {"cooccurrence", to_json(co)}}, out);
    if (rc.json) return kSuccess;
    out << "journeys " << stats.journeys << " (purchase " << stats.purchases << ", non-purchase "
        << stats.non_purchases << ")\n";
    for (auto s : kAllStages) {
        const auto g = stage_index(s);
        out << to_string(s) << ": length min " << stats.lengths[g].min << ", max " << stats.lengths[g].max
            << ", mean " << fixed(stats.lengths[g].mean, 2) << "\n";
        for (const auto& [item, count] : stats.frequencies[g]) {
            out << "  " << to_char(item) << "  " << pad(std::to_string(count), 5) << item_caption(item) << "\n";
        }
    }
    out << "co-occurrence (row: from, column: to)\n     ";
    for (auto sym : kCanonicalSymbols) out << pad(std::string(1, sym), 4);
    out << "\n";
    for (std::size_t r = 0; r < kCanonicalSymbols.size(); ++r) {
        out << "  " << pad(std::string(1, kCanonicalSymbols[r]), 3);
        for (std::size_t c = 0; c < kCanonicalSymbols.size(); ++c) out << pad(std::to_string(co.counts[r][c]), 4);
        out << "\n";
    }
    return kSuccess;
}

int cmd_cluster(const RunConfig& rc, std::ostream& out) {
    const auto config = make_config(rc);
    if (rc.k_min < 2 || rc.k_min > rc.k_max) throw UsageError("need 2 <= --k-min <= --k-max");
    if (rc.k < 1) throw UsageError("--k must be positive");
    const auto dataset = load_dataset(rc);

    std::vector<DistanceConfig> configs;
    if (rc.all_configs) {
        configs.push_back({StageWeights(1, 1, 1), Kernel::levenshtein, StageMask::all()});
        configs.push_back({StageWeights(1, 1, 1), Kernel::damerau_levenshtein, StageMask::all()});
        configs.push_back({StageWeights(2, 1, 1), Kernel::levenshtein, StageMask::all()});
        configs.push_back({StageWeights(2, 1, 10), Kernel::levenshtein, StageMask::all()});
    } else {
        configs.push_back(config);
    }
    std::vector<std::size_t> ks;
    for (auto k = rc.k_min; k <= rc.k_max; ++k) ks.push_back(k);
    const auto report = sweep(dataset, configs, ks, rc.seed);

    const auto matrix = distance_matrix(dataset, config);
    const auto chosen = kmedoids(matrix, rc.k, rc.seed);

    emit(rc, "cluster",
         Json{{"sweep", to_json(report, dataset)},
              {"chosen", {{"config", to_json(config)}, {"clustering", to_json(chosen, &dataset)}}}},
         out);
    if (rc.json) return kSuccess;

    out << "Silhouette coefficient (seed " << rc.seed << ")\n" << pad("setting", 24);
    for (auto k : ks) out << pad("k=" + std::to_string(k), 9);
    out << "\n";
    for (std::size_t c = 0; c < configs.size(); ++c) {
        out << pad(config_label(configs[c]), 24);
        for (auto k : ks) out << pad(fixed(*report.cell(c, k).result.silhouette), 9);
        out << "\n";
    }
    out << "\nPrototypes for " << config_label(config) << ", k=" << rc.k << "\n";
    const auto sizes = chosen.cluster_sizes();
    for (std::size_t c = 0; c < chosen.medoids.size(); ++c) {
        const auto& j = dataset[chosen.medoids[c]];
        out << "  " << (c + 1) << ": " << pad(j.canonical_string(), 34) << "size " << pad(std::to_string(sizes[c]), 5)
            << "(" << j.id() << ")\n";
    }
    return kSuccess;
}

int cmd_embed(const RunConfig& rc, std::ostream& out) {
    const auto config = make_config(rc);
    const auto dataset = load_dataset(rc);
    const auto matrix = distance_matrix(dataset, config);
    const auto emb = mds(matrix);
    const auto clustering = kmedoids(matrix, rc.k, rc.seed);
    const auto outcomes = dataset.labels();
    emit(rc, "embedding",
         Json{{"config", to_json(config)},
              {"k", rc.k},
              {"embedding", to_json(emb, &clustering.assignment, &outcomes, &clustering.medoids)}},
         out);
    const auto svg = render_scatter(emb, clustering.assignment, outcomes, clustering.medoids);
    if (!rc.out_dir.empty()) {
        std::ofstream file(std::filesystem::path(rc.out_dir) / "embedding.svg");
        file << svg;
        if (!file) throw Error(ErrorCode::InvalidArgument, "cannot write embedding.svg in " + rc.out_dir);
    }
    if (rc.json) return kSuccess;
    out << "lambda1 " << fixed(emb.lambda1) << ", lambda2 " << fixed(emb.lambda2) << ", negative mass "
        << fixed(emb.negative_mass) << (emb.degenerate ? " (degenerate)" : "") << "\n";
    for (std::size_t i = 0; i < emb.xy.size(); ++i) {
        out << pad(emb.ids[i], 10) << pad(fixed(emb.xy[i][0]), 10) << pad(fixed(emb.xy[i][1]), 10) << "cluster "
            << clustering.assignment[i] << (outcomes[i] ? "  purchase" : "  non-purchase") << "\n";
    }
    return kSuccess;
}

int cmd_predict(const RunConfig& rc, std::ostream& out) {
    const auto config = make_config(rc);
    const auto ks = parse_counts(rc.knn_k.empty() ? "1,2,3,4,5" : rc.knn_k, "--knn-k");
    if (rc.reps == 0) throw UsageError("--reps must be positive");
    const auto dataset = load_dataset(rc);
    const auto report = evaluate(dataset, config, ks, rc.reps, rc.seed);
    emit(rc, "predict", to_json(report), out);
    if (rc.json) return kSuccess;
    out << "k-NN over " << report.config.mask.to_string() << ", " << rc.reps << " stratified 80/20 splits (seed "
        << rc.seed << ")\n";
    out << pad("k'", 5) << pad("accuracy", 11) << pad("acc var", 11) << pad("F1", 11) << "F1 var\n";
    for (const auto& row : report.rows) {
        out << pad(std::to_string(row.k), 5) << pad(fixed(row.accuracy_mean), 11)
            << pad(fixed(row.accuracy_variance, 6), 11) << pad(fixed(row.f1_mean), 11) << fixed(row.f1_variance, 6)
            << "\n";
    }
    return kSuccess;
}

void print_result(const CfResult& r, const Journey& base, std::ostream& out) {
    out << "base            " << pad(base.canonical_string(), 30) << "(" << base.id() << ")\n";
    out << "counterfactual  " << pad(r.counterfactual.canonical_string(), 30) << "(" << r.counterfactual.id()
        << ")\n";
    out << "objective " << fixed(r.objective) << " = loss " << fixed(r.loss, 0) << " + " << r.lambda
        << " * distance " << fixed(r.distance) << "; model y_hat " << fixed(r.model_check, 2) << "\n";
    if (r.edits.empty()) out << "  (no edits in the compared stages)\n";
    for (const auto& line : r.edits.narrative()) out << "  " << line << "\n";
}

int cmd_explain(const RunConfig& rc, std::ostream& out, std::ostream& err) {
    auto config = make_config(rc);
    if (rc.stages.empty()) config.mask = StageMask::pre_purchase();
    const auto knn = parse_counts(rc.knn_k.empty() ? "5" : rc.knn_k, "--knn-k");
    if (knn.size() != 1) throw UsageError("--knn-k takes a single value for explain");
    if (rc.y_obj != 0 && rc.y_obj != 1) throw UsageError("--y-obj must be 0 or 1");
    if (!(rc.lambda >= 0.0)) throw UsageError("--lambda must be non-negative");
    if (static_cast<int>(!rc.id.empty()) + static_cast<int>(!rc.sequence.empty()) + static_cast<int>(rc.batch) != 1) {
        throw UsageError("explain needs exactly one of --id, --sequence or --all");
    }
    const auto dataset = load_dataset(rc);
    const KnnModel model(std::vector<Journey>(dataset.journeys().begin(), dataset.journeys().end()), knn.front(),
                         config);

    if (rc.batch) {
        const auto results = explain_batch(dataset, model, rc.y_obj, rc.lambda);
        Json list = Json::array();
        for (const auto& r : results) list.push_back(journey::to_json(r));
        emit(rc, "explain", Json{{"results", list}}, out);
        if (!rc.json) {
            out << results.size() << " journeys explained\n";
            for (const auto& r : results) {
                print_result(r, dataset[*dataset.find(r.base_id)], out);
                out << "\n";
            }
        }
        return results.empty() ? kEmptyResult : kSuccess;
    }

    std::optional<Journey> base;
    std::optional<std::size_t> base_index;
    if (!rc.id.empty()) {
        base_index = dataset.find(rc.id);
        if (!base_index) throw Error(ErrorCode::NotFound, "no journey with id '" + rc.id + "'");
        base = dataset[*base_index];
    } else {
        auto parsed = validate_draft(literal_record("query", split_list(rc.sequence)));
        if (auto* reason = std::get_if<RejectReason>(&parsed)) {
            throw UsageError("--sequence rejected: " + std::string(to_string(*reason)));
        }
        base = std::get<Journey>(std::move(parsed));
        base_index = matching_row(dataset, *base).value_or(dataset.size());
    }
    if (base->label() && *base->label() == rc.y_obj) {
        err << "warning: the base journey already has outcome " << rc.y_obj << "\n";
    }
    CfQuery query{.base = *base, .y_obj = rc.y_obj, .lambda = rc.lambda, .base_index = base_index,
                  .metric = std::nullopt};
    const auto result = find_counterfactual(dataset, model, query);
    emit(rc, "explain", journey::to_json(result), out);
    if (!rc.json) {
        print_result(result, *base, out);
        for (const auto& w : result.warnings) out << "warning: " << w << "\n";
    }
    return kSuccess;
}

int cmd_serve(const RunConfig& rc, std::ostream& out, std::ostream& err) {
    const auto colon = rc.bind.rfind(':');
    if (colon == std::string::npos) throw UsageError("--bind expects host:port");
    const auto host = rc.bind.substr(0, colon);
    int port = 0;
    try {
        port = std::stoi(rc.bind.substr(colon + 1));
    } catch (const std::exception&) {
        throw UsageError("--bind expects host:port");
    }

    ServiceOptions options;
    options.snapshot_path = rc.snapshot;
    ServiceState state(options);
    if (!rc.input.empty()) state.install(load_dataset(rc));

    httplib::Server server;
    install_routes(server, state);
    const int bound = port == 0 ? server.bind_to_any_port(host) : (server.bind_to_port(host, port) ? port : -1);
    if (bound < 0) {
        err << "error: cannot bind " << rc.bind << "\n";
        return kFailure;
    }
    out << "listening on " << host << ":" << bound << std::endl;

    g_shutdown.store(false);
    auto previous_int = std::signal(SIGINT, on_signal);
    auto previous_term = std::signal(SIGTERM, on_signal);
    std::thread listener([&] { server.listen_after_bind(); });
    while (!g_shutdown.load()) std::this_thread::sleep_for(std::chrono::milliseconds(50));
    server.stop();
    listener.join();
    std::signal(SIGINT, previous_int);
    std::signal(SIGTERM, previous_term);
    out << "shutdown" << std::endl;
    return kSuccess;
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("JM_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
        }
    }
    return 42;
}

}  // namespace

void request_shutdown() { g_shutdown.store(true); }

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig rc;
    rc.seed = default_seed();

    CLI::App app{"Customer-journey analytics: staged edit distance, prototypes, k-NN and counterfactuals",
                 "journeymap"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    auto add_input = [&](CLI::App* sub, bool required = true) {
        auto* opt = sub->add_option("--input", rc.input, "Survey records (CSV or JSONL)");
        if (required) opt->required();
        sub->add_option("--format", rc.format, "csv or jsonl (default: from the file extension)");
    };
    auto add_metric = [&](CLI::App* sub) {
        sub->add_option("--w1", rc.w1, "Stage 1 weight (integer, decimal or p/q)")->capture_default_str();
        sub->add_option("--w2", rc.w2, "Stage 2 weight")->capture_default_str();
        sub->add_option("--w3", rc.w3, "Stage 3 weight")->capture_default_str();
        sub->add_option("--kernel", rc.kernel, "levenshtein or damerau_levenshtein")->capture_default_str();
        sub->add_option("--stages", rc.stages, "Stages entering the distance, e.g. st1,st2");
        sub->add_option("--seed", rc.seed, "Random seed (falls back to JM_SEED)")->capture_default_str();
    };
    auto add_output = [&](CLI::App* sub) {
        sub->add_option("--out-dir", rc.out_dir, "Directory for JSON/SVG artifacts");
        sub->add_flag("--json", rc.json, "Print the JSON artifact instead of text");
    };

    auto* validate_cmd = app.add_subcommand("validate", "Cleanse records and report rejections");
    add_input(validate_cmd);
    add_output(validate_cmd);

    auto* describe_cmd = app.add_subcommand("describe", "Stage statistics and the co-occurrence matrix");
    add_input(describe_cmd);
    add_output(describe_cmd);

    auto* cluster_cmd = app.add_subcommand("cluster", "Silhouette sweep and k-medoids prototypes");
    add_input(cluster_cmd);
    add_metric(cluster_cmd);
    add_output(cluster_cmd);
    cluster_cmd->add_option("--k", rc.k, "Cluster count for the printed prototypes")->capture_default_str();
    cluster_cmd->add_option("--k-min", rc.k_min, "Smallest k of the sweep")->capture_default_str();
    cluster_cmd->add_option("--k-max", rc.k_max, "Largest k of the sweep")->capture_default_str();
    cluster_cmd->add_flag("--all-configs", rc.all_configs, "Sweep LD, DL, w=(2,1,1) and w=(2,1,10)");

    auto* embed_cmd = app.add_subcommand("embed", "Classical MDS map with SVG scatter");
    add_input(embed_cmd);
    add_metric(embed_cmd);
    add_output(embed_cmd);
    embed_cmd->add_option("--k", rc.k, "Cluster count used for colouring")->capture_default_str();

    auto* predict_cmd = app.add_subcommand("predict", "Repeated stratified k-NN evaluation");
    add_input(predict_cmd);
    add_metric(predict_cmd);
    add_output(predict_cmd);
    predict_cmd->add_option("--knn-k", rc.knn_k, "Neighbour counts, e.g. 1,2,3,4,5");
    predict_cmd->add_option("--reps", rc.reps, "Repetitions")->capture_default_str();

    auto* explain_cmd = app.add_subcommand("explain", "Counterfactual journey selected from the data");
    add_input(explain_cmd);
    add_metric(explain_cmd);
    add_output(explain_cmd);
    explain_cmd->add_option("--id", rc.id, "Journey id to explain");
    explain_cmd->add_option("--sequence", rc.sequence, "Literal journey, e.g. c,c,e,g,0");
    explain_cmd->add_flag("--all", rc.batch, "Explain every journey whose outcome differs from --y-obj");
    explain_cmd->add_option("--y-obj", rc.y_obj, "Desired outcome (0 or 1)")->capture_default_str();
    explain_cmd->add_option("--lambda", rc.lambda, "Weight of the distance term")->capture_default_str();
    explain_cmd->add_option("--knn-k", rc.knn_k, "Neighbour count of the checking model (default 5)");

    auto* serve_cmd = app.add_subcommand("serve", "HTTP API for the analyst UI");
    add_input(serve_cmd, false);
    serve_cmd->add_option("--bind", rc.bind, "host:port (port 0 picks a free port)")->capture_default_str();
    serve_cmd->add_option("--snapshot", rc.snapshot, "JSON file the dataset is restored from and saved to");

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == static_cast<int>(CLI::ExitCodes::Success) ? kSuccess : kFailure;
    }

    try {
        if (validate_cmd->parsed()) {
            rc.command = "validate";
            return cmd_validate(rc, out);
        }
        if (describe_cmd->parsed()) {
            rc.command = "describe";
            return cmd_describe(rc, out);
        }
        if (cluster_cmd->parsed()) {
            rc.command = "cluster";
            return cmd_cluster(rc, out);
        }
        if (embed_cmd->parsed()) {
            rc.command = "embed";
            return cmd_embed(rc, out);
        }
        if (predict_cmd->parsed()) {
            rc.command = "predict";
            return cmd_predict(rc, out);
        }
        if (explain_cmd->parsed()) {
            rc.command = "explain";
            return cmd_explain(rc, out, err);
        }
        if (serve_cmd->parsed()) {
            rc.command = "serve";
            return cmd_serve(rc, out, err);
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kFailure;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.code() == ErrorCode::EmptyDataset ? kEmptyResult : kFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kFailure;
}

}  // namespace journey::cli
