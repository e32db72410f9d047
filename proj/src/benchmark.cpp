#include "strata/benchmark.hpp"

#include <httplib.h>

#include <algorithm>
#include <filesystem>
#include <future>

#include "strata/config.hpp"
#include "strata/persistence.hpp"
#include "strata/service.hpp"
#include "strata/synthetic.hpp"

namespace strata {

namespace {

using Clock = std::chrono::steady_clock;

SyntheticSpec bench_spec(std::size_t nodes, std::uint64_t seed) {
    SyntheticSpec spec;
    spec.n_points = nodes;
    spec.n_topics = std::max<std::size_t>(1, nodes / 6);
    spec.dim = 64;
    spec.batches = 1;
    spec.seed = seed;
    return spec;
}

double percentile(std::vector<double> values, double q) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size())));
    return values[std::min(values.size() - 1, rank == 0 ? 0 : rank - 1)];
}

}  // namespace

BenchRow bench_steps(std::size_t nodes, const PhysicsConfig& physics, std::chrono::milliseconds min_time,
                     std::uint64_t min_steps, std::uint64_t seed) {
    const auto data = generate_synthetic(bench_spec(nodes, seed));
    LayoutEngine engine(physics);
    engine.insert_batch(data.records, 0);
    for (int i = 0; i < 3; ++i) engine.step();

    BenchRow row;
    row.nodes = nodes;
    const auto begin = Clock::now();
    auto elapsed = Clock::duration::zero();
    while (row.steps < min_steps || elapsed < min_time) {
        engine.step();
        ++row.steps;
        elapsed = Clock::now() - begin;
    }
    row.seconds = std::chrono::duration<double>(elapsed).count();
    row.steps_per_second = static_cast<double>(row.steps) / row.seconds;
    return row;
}

LiveLatency measure_live_latency(std::size_t nodes, double steps_per_second, const PhysicsConfig& physics,
                                 std::chrono::milliseconds duration, std::uint64_t seed) {
    const auto data = generate_synthetic(bench_spec(nodes, seed));
    const auto path = std::filesystem::temp_directory_path() /
                      ("strata_bench_" + std::to_string(nodes) + "_" + std::to_string(seed) + ".jsonl");
    save_dataset(data.records, path);

    RunConfig cfg;
    cfg.physics = physics;
    cfg.seed = seed;
    cfg.relax.tol = 0.0;
    cfg.relax.max_iters = std::max(1, static_cast<int>(steps_per_second * std::chrono::duration<double>(duration).count()));
    cfg.timestep = parse_timestep("100 y");

    Service service;
    const int port = service.start("127.0.0.1", 0);
    httplib::Client client("127.0.0.1", port);
    client.set_read_timeout(std::chrono::seconds{600});
    const nlohmann::json body = {{"dataset_path", path.string()}, {"run_config", run_config_to_json(cfg)}};
    auto created = client.Post("/sessions", body.dump(), "application/json");
    if (!created || created->status != 201) throw Error(ErrorCode::Io, "bench session could not be created");
    const auto id = nlohmann::json::parse(created->body).at("session_id").get<std::string>();

    auto advance = std::async(std::launch::async, [&] {
        httplib::Client worker("127.0.0.1", port);
        worker.set_read_timeout(std::chrono::seconds{600});
        return worker.Post("/sessions/" + id + "/advance");
    });

    std::vector<double> latencies;
    httplib::Client poller("127.0.0.1", port);
    while (advance.wait_for(std::chrono::milliseconds{0}) != std::future_status::ready) {
        const auto t0 = Clock::now();
        auto res = poller.Get("/sessions/" + id + "/live");
        const auto t1 = Clock::now();
        if (res && res->status == 200) latencies.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
        std::this_thread::sleep_for(std::chrono::milliseconds{10});
    }
    advance.get();
    service.stop();
    std::filesystem::remove(path);

    LiveLatency out;
    out.nodes = nodes;
    out.requests = latencies.size();
    out.p50_ms = percentile(latencies, 0.50);
    out.p99_ms = percentile(latencies, 0.99);
    out.max_ms = latencies.empty() ? 0.0 : *std::max_element(latencies.begin(), latencies.end());
    return out;
}

}  // namespace strata
