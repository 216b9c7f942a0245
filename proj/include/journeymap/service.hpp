#pragma once

// HTTP/JSON API over an immutable, versioned dataset snapshot.
//
//   GET  /api/health          {status, version, dataset_version}
//   POST /api/dataset         CSV or JSONL body -> {version, report}
//   GET  /api/stats           stage statistics + co-occurrence matrix
//   GET  /api/clusters        ?k=&w1=&w2=&w3=&kernel=&seed=
//   GET  /api/embedding       same parameters, rows annotated for plotting
//   POST /api/predict         {items, k} -> {y_hat, neighbors}
//   POST /api/counterfactual  {items, y_obj, lambda, k} -> counterfactual

#include <cstddef>
#include <cstdint>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>

#include "journeymap/distance.hpp"
#include "journeymap/error.hpp"
#include "journeymap/ingestion.hpp"
#include "journeymap/json_io.hpp"

namespace httplib {
class Server;
}

namespace journey {

struct Snapshot {
    std::uint64_t version = 0;
    Dataset dataset;
    StageStats stats;
    CooccurrenceMatrix cooccurrence;
};

struct Reply {
    int status = 200;
    Json body;
};

struct ServiceOptions {
    /// When set, the dataset is restored from and persisted to this JSON file.
    std::string snapshot_path;
    std::string cors_origin = "*";
    std::size_t cache_capacity = 8;
};

/// Request handling independent of the transport. Every method is safe to
/// call concurrently; readers hold a shared_ptr to the snapshot they started
/// with, so an upload never tears an in-flight request.
class ServiceState {
public:
    explicit ServiceState(ServiceOptions options = {});

    /// Installs a dataset as a new snapshot version.
    std::uint64_t install(Dataset dataset);
    std::shared_ptr<const Snapshot> snapshot() const;

    Reply health() const;
    Reply upload(const std::string& body, std::optional<InputFormat> format);
    Reply stats() const;
    Reply clusters(const std::map<std::string, std::string>& params) const;
    Reply embedding(const std::map<std::string, std::string>& params) const;
    Reply predict(const std::string& body) const;
    Reply counterfactual(const std::string& body) const;

    const ServiceOptions& options() const noexcept { return options_; }
    std::size_t cached_matrices() const;

private:
    using CacheKey = std::tuple<std::uint64_t, std::string, std::string, std::string, std::string, std::string>;

    std::shared_ptr<const DistanceMatrix> matrix_for(const Snapshot& snap, const DistanceConfig& config) const;
    void persist(const Dataset& dataset) const;

    ServiceOptions options_;
    mutable std::mutex snapshot_mutex_;
    std::shared_ptr<const Snapshot> current_;
    std::uint64_t next_version_ = 1;

    mutable std::mutex cache_mutex_;
    /// Most recently used at the front.
    mutable std::list<std::pair<CacheKey, std::shared_ptr<const DistanceMatrix>>> cache_;
};

/// Registers the API routes (and CORS headers) on a server.
void install_routes(httplib::Server& server, ServiceState& state);

int http_status_for(ErrorCode code);

}  // namespace journey
