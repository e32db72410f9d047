#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>

#include <json.hpp>

#include "strata/clustering.hpp"
#include "strata/labeling.hpp"
#include "strata/layout_engine.hpp"
#include "strata/similarity_graph.hpp"
#include "strata/temporal.hpp"

namespace strata {

enum class LabelMode { TfIdf, External };

struct LabelConfig {
    LabelMode mode = LabelMode::TfIdf;
    std::size_t m = 3;
    ExternalLabelConfig external;
    std::string client = "mock";  // "mock" or "http"
    HttpLabelClient::Options http;

    void validate() const;
};

struct RunConfig {
    TimestepSpec timestep;
    PhysicsConfig physics;
    ThresholdPolicy threshold_policy = ThresholdPolicy::Dynamic;
    double threshold_constant = default_threshold_constant();
    ClusteringConfig clustering;
    LabelConfig labels;
    RelaxStop relax;
    double z_spacing = 1.0;
    std::uint64_t seed = 0;

    void validate() const;
};

// Missing keys keep their defaults; unknown keys are rejected.
RunConfig run_config_from_json(const nlohmann::json& j, RunConfig base = {});
nlohmann::json run_config_to_json(const RunConfig& cfg);
RunConfig load_run_config(const std::filesystem::path& path);

// The client selected by `cfg.client`, or nullptr when labels are TF-IDF only.
std::shared_ptr<LabelClient> make_label_client(const LabelConfig& cfg);

}  // namespace strata
