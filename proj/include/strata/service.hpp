#pragma once

#include <chrono>
#include <memory>
#include <string>

#include "strata/labeling.hpp"

namespace strata {

struct ServiceOptions {
    // Overrides the client chosen by each session's label config when set.
    std::shared_ptr<LabelClient> label_client;
    double step_events_per_second = 30.0;
    std::chrono::milliseconds stream_keepalive{15000};
};

// HTTP front end over per-session pipelines.
//
//   POST /sessions                          {dataset_path, run_config?} -> {session_id, ...}
//   GET  /sessions/{id}                     status
//   POST /sessions/{id}/advance             next batch -> snapshot summary; 409 while busy or exhausted
//   GET  /sessions/{id}/snapshots/{k}       stored snapshot k
//   GET  /sessions/{id}/live                current positions + latest clustering
//   GET  /sessions/{id}/lineage             cluster forest with delta cones
//   GET  /sessions/{id}/stream              server-sent events: step, batch_advanced, labeling_completed
//   GET  /sessions/{id}/clusters/{cid}/members
class Service {
public:
    explicit Service(ServiceOptions options = {});
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    // Binds and serves on a background thread. Port 0 picks a free port; the
    // bound port is returned.
    int start(const std::string& host, int port);
    // Binds and serves on the calling thread until stop().
    void run(const std::string& host, int port);
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace strata
