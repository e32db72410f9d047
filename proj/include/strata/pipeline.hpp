#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "strata/config.hpp"
#include "strata/core.hpp"
#include "strata/geometry.hpp"
#include "strata/labeling.hpp"
#include "strata/layout_engine.hpp"

namespace strata {

struct AdvanceObserver {
    // Called after every relaxation step with the engine in its post-step state.
    std::function<void(const StepReport&, const LayoutEngine&)> on_step;
};

// Drives insert -> relax -> cluster -> label -> freeze, one batch at a time.
class Pipeline {
public:
    explicit Pipeline(RunConfig cfg, std::shared_ptr<LabelClient> label_client = nullptr);

    // Index the next call to advance() will produce.
    int next_batch() const { return static_cast<int>(snapshots_.size()); }

    // Every record must fall in batch next_batch(); an empty span produces a
    // snapshot with no new nodes. The timestep origin is taken from the first
    // non-empty batch when the config leaves it unset.
    const TimestepSnapshot& advance(std::span<const DataRecord> records, const AdvanceObserver& observer = {});

    const std::vector<TimestepSnapshot>& snapshots() const { return snapshots_; }
    const LayoutEngine& engine() const { return engine_; }
    const RunConfig& config() const { return cfg_; }
    const DataRecord* find_record(const std::string& id) const;

private:
    ClusterLabels label_cluster(const std::vector<std::string>& members, const TfIdfIndex& index,
                                int batch_index, std::size_t cluster_index) const;
    std::vector<Vec2> member_positions(const std::vector<std::string>& members, std::optional<int> batch) const;

    RunConfig cfg_;
    std::shared_ptr<LabelClient> label_client_;
    LayoutEngine engine_;
    std::vector<DataRecord> records_;  // insertion order, parallel to engine nodes
    std::unordered_map<std::string, std::size_t> index_of_;
    std::vector<std::string> corpus_;
    std::vector<TimestepSnapshot> snapshots_;
    std::int64_t next_cluster_id_ = 1;
};

// Splits `records` into batches under `cfg.timestep` (origin resolved from the
// data when unset) and advances through at most `max_batches` of them.
std::vector<TimestepSnapshot> replay(std::span<const DataRecord> records, const RunConfig& cfg,
                                     std::shared_ptr<LabelClient> label_client = nullptr,
                                     std::optional<int> max_batches = std::nullopt);

// Writes snapshot_0000.json, snapshot_0001.json, ... into `dir`.
void write_snapshots(std::span<const TimestepSnapshot> snapshots, const std::filesystem::path& dir);

struct LineageLink {
    std::int64_t parent_id = 0;
    std::int64_t child_id = 0;
    int parent_batch = 0;
    int child_batch = 0;
    std::optional<DeltaCone> cone;  // absent when either outline is a point or segment
};

std::vector<LineageLink> lineage_links(std::span<const TimestepSnapshot> snapshots, double z_spacing);

// Every cluster of every snapshot with its parent, plus one delta cone per link.
nlohmann::json lineage_to_json(std::span<const TimestepSnapshot> snapshots, double z_spacing);

}  // namespace strata
