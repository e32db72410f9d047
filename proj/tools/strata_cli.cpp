#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>
#include <thread>

#include "strata/benchmark.hpp"
#include "strata/config.hpp"
#include "strata/persistence.hpp"
#include "strata/pipeline.hpp"
#include "strata/service.hpp"
#include "strata/synthetic.hpp"

namespace {

using namespace strata;

std::vector<std::size_t> parse_sizes(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(static_cast<std::size_t>(std::stoull(item)));
    }
    if (out.empty()) throw Error(ErrorCode::InvalidConfig, "no node counts given");
    return out;
}

RunConfig base_config(const std::string& config_path, const std::optional<std::uint64_t>& seed,
                      const std::string& timestep) {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_run_config(config_path);
    if (seed) cfg.seed = *seed;
    if (!timestep.empty()) {
        const auto origin = cfg.timestep.origin;
        cfg.timestep = parse_timestep(timestep);
        cfg.timestep.origin = origin;
    }
    cfg.physics.seed = cfg.seed;
    cfg.validate();
    return cfg;
}

int run_command(const std::string& input, const std::string& out, const std::string& batches, const RunConfig& cfg) {
    const auto records = load_dataset(input);
    std::optional<int> limit;
    if (batches != "all") limit = std::stoi(batches);
    const auto snapshots = replay(records, cfg, make_label_client(cfg.labels), limit);
    write_snapshots(snapshots, out);
    for (const auto& s : snapshots) {
        std::printf("batch %d: %zu nodes, %zu clusters, %zu misc, stress %.6g\n", s.batch_index, s.nodes.size(),
                    s.clusters.size(), s.misc_ids.size(), s.stress);
    }
    write_file(std::filesystem::path(out) / "lineage.json",
               lineage_to_json(snapshots, cfg.z_spacing).dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Temporal embedding layout engine"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string timestep;

    auto* run = app.add_subcommand("run", "Replay a dataset headlessly and write every snapshot");
    std::string input;
    std::string out = "snapshots";
    std::string batches = "all";
    run->add_option("--input", input, "Dataset file (one JSON record per line)")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out, "Output directory");
    run->add_option("--batches", batches, "Number of batches to advance, or 'all'");
    run->add_option("--timestep", timestep, "Batch width, e.g. \"3 mo\"");
    run->add_option("--seed", seed, "RNG seed");
    run->add_option("--config", config_path, "Run configuration JSON")->check(CLI::ExistingFile);

    auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
    int port = 8080;
    std::string host = "127.0.0.1";
    serve->add_option("--port", port, "Listen port");
    serve->add_option("--host", host, "Listen address");

    auto* bench = app.add_subcommand("bench", "Report relaxation steps per second");
    std::string nodes = "200,360,900";
    unsigned threads = 0;
    bool live = false;
    double min_seconds = 2.0;
    bench->add_option("--nodes", nodes, "Comma-separated node counts");
    bench->add_option("--threads", threads, "Force-loop workers (0: all hardware threads)");
    bench->add_option("--seconds", min_seconds, "Minimum timing window per size");
    bench->add_option("--seed", seed, "RNG seed");
    bench->add_flag("--live", live, "Also measure GET /live latency while stepping");

    auto* generate = app.add_subcommand("generate", "Write a synthetic dataset and its ground truth");
    SyntheticSpec spec;
    std::string data_out = "synthetic.jsonl";
    std::string truth_out;
    std::string scenario = "drift";
    generate->add_option("--out", data_out, "Dataset file to write");
    generate->add_option("--truth", truth_out, "Ground-truth file to write");
    generate->add_option("--points", spec.n_points, "Number of records");
    generate->add_option("--topics", spec.n_topics, "Number of topics");
    generate->add_option("--dim", spec.dim, "Embedding dimension");
    generate->add_option("--batches", spec.batches, "Number of batches");
    generate->add_option("--spread", spec.spread, "Per-point perturbation norm");
    generate->add_option("--drift", spec.drift, "Topic rotation per batch (radians)");
    generate->add_option("--outliers", spec.outlier_fraction, "Fraction of random outliers");
    generate->add_option("--scenario", scenario, "drift or split")->check(CLI::IsMember({"drift", "split"}));
    generate->add_option("--split-batch", spec.split_batch, "Batch at which the split topic diverges");
    generate->add_option("--split-before", spec.split_before, "Half-angle between the split topic's halves before the split");
    generate->add_option("--split-after", spec.split_after, "Half-angle of the new points from the split batch on");
    generate->add_option("--split-weight", spec.split_weight, "Size of the split topic relative to the others");
    generate->add_option("--timestep", timestep, "Batch width, e.g. \"3 mo\"");
    generate->add_option("--seed", spec.seed, "RNG seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return run_command(input, out, batches, base_config(config_path, seed, timestep));
        if (*serve) {
            Service service;
            std::printf("listening on http://%s:%d\n", host.c_str(), port);
            std::fflush(stdout);
            service.run(host, port);
            return 0;
        }
        if (*bench) {
            PhysicsConfig physics;
            physics.threads = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
            const auto window = std::chrono::milliseconds{static_cast<long long>(min_seconds * 1000.0)};
            std::printf("%8s %10s %10s %14s\n", "nodes", "steps", "seconds", "steps/second");
            std::vector<BenchRow> rows;
            for (auto n : parse_sizes(nodes)) {
                rows.push_back(bench_steps(n, physics, window, 10, seed.value_or(1)));
                const auto& r = rows.back();
                std::printf("%8zu %10llu %10.3f %14.2f\n", r.nodes, static_cast<unsigned long long>(r.steps),
                            r.seconds, r.steps_per_second);
                std::fflush(stdout);
            }
            if (live) {
                std::printf("\n%8s %10s %10s %10s %10s\n", "nodes", "requests", "p50 ms", "p99 ms", "max ms");
                for (const auto& r : rows) {
                    const auto l = measure_live_latency(r.nodes, r.steps_per_second, physics, window, seed.value_or(1));
                    std::printf("%8zu %10zu %10.2f %10.2f %10.2f\n", l.nodes, l.requests, l.p50_ms, l.p99_ms, l.max_ms);
                }
            }
            return 0;
        }
        if (*generate) {
            spec.scenario = scenario == "split" ? SyntheticScenario::Split : SyntheticScenario::Drift;
            if (!timestep.empty()) spec.timestep = parse_timestep(timestep);
            const auto data = generate_synthetic(spec);
            save_dataset(data.records, data_out);
            if (!truth_out.empty()) write_file(truth_out, ground_truth_to_json(data).dump(2) + "\n");
            std::printf("wrote %zu records to %s\n", data.records.size(), data_out.c_str());
            return 0;
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
