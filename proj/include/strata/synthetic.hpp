#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "strata/core.hpp"
#include "strata/temporal.hpp"

namespace strata {

enum class SyntheticScenario { Drift, Split };

struct SyntheticSpec {
    std::size_t n_points = 300;
    std::size_t n_topics = 40;
    std::size_t dim = 256;
    int batches = 4;
    double spread = 0.3;            // norm of the per-point perturbation around the topic direction
    double drift = 0.0;             // radians each topic centre rotates per batch
    double outlier_fraction = 0.05; // points with uniformly random directions
    SyntheticScenario scenario = SyntheticScenario::Drift;
    // Split scenario: one topic's two halves sit `split_before` radians either
    // side of its centre until `split_batch`, after which new points arrive
    // `split_after` radians either side.
    int split_batch = 2;
    double split_before = 0.2;
    double split_after = 0.6;
    double split_weight = 4.0;  // size of the split topic relative to the others
    std::uint64_t seed = 1;
    Instant start = std::chrono::sys_days{std::chrono::year{2025} / 1 / 1};
    TimestepSpec timestep;      // origin is taken from `start`

    void validate() const;
};

struct GroundTruthRecord {
    std::string id;
    int topic = -1;  // -1 for outliers
    std::optional<char> branch;  // 'a' or 'b' for the split topic
    int batch = 0;
};

struct SyntheticDataset {
    std::vector<DataRecord> records;  // sorted by (timestamp, id)
    std::vector<GroundTruthRecord> truth;  // same order as records
    std::optional<int> split_topic;
    int split_batch = 0;
};

SyntheticDataset generate_synthetic(const SyntheticSpec& spec);

// {records: {id: {topic, branch, batch}}, events: [...]} for the dataset.
nlohmann::json ground_truth_to_json(const SyntheticDataset& data);

}  // namespace strata
