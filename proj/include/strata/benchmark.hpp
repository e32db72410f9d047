#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <vector>

#include "strata/layout_engine.hpp"

namespace strata {

struct BenchRow {
    std::size_t nodes = 0;
    std::uint64_t steps = 0;
    double seconds = 0.0;
    double steps_per_second = 0.0;
};

// Times LayoutEngine::step on a synthetic graph of `nodes` nodes, stepping for
// at least `min_time` and `min_steps`.
BenchRow bench_steps(std::size_t nodes, const PhysicsConfig& physics,
                     std::chrono::milliseconds min_time = std::chrono::milliseconds{1000},
                     std::uint64_t min_steps = 10, std::uint64_t seed = 1);

struct LiveLatency {
    std::size_t nodes = 0;
    std::size_t requests = 0;
    double p50_ms = 0.0;
    double p99_ms = 0.0;
    double max_ms = 0.0;
};

// Serves a synthetic session on localhost and polls GET /live while an
// advance keeps the engine stepping for roughly `duration`.
LiveLatency measure_live_latency(std::size_t nodes, double steps_per_second, const PhysicsConfig& physics,
                                 std::chrono::milliseconds duration = std::chrono::milliseconds{2000},
                                 std::uint64_t seed = 1);

}  // namespace strata
