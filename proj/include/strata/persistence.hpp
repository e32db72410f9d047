#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "strata/core.hpp"

namespace strata {

inline constexpr int kSnapshotSchemaVersion = 1;

// Dataset files hold one JSON object per line:
// {id, timestamp, kind: "text"|"image", text?, image_path?, description?, embedding}
// Blank lines are skipped. Loading stops at the first invalid line, reporting its
// 1-based number. Records come back sorted by (timestamp, id).
std::vector<DataRecord> parse_dataset(std::istream& in);
std::vector<DataRecord> load_dataset(const std::filesystem::path& path);

nlohmann::json record_to_json(const DataRecord& record);
void write_dataset(std::span<const DataRecord> records, std::ostream& out);
void save_dataset(std::span<const DataRecord> records, const std::filesystem::path& path);

nlohmann::json snapshot_to_json(const TimestepSnapshot& snapshot);
TimestepSnapshot snapshot_from_json(const nlohmann::json& j);
// Canonical bytes of a snapshot file, trailing newline included.
std::string serialize_snapshot(const TimestepSnapshot& snapshot);
void save_snapshot(const TimestepSnapshot& snapshot, const std::filesystem::path& path);
TimestepSnapshot load_snapshot(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& bytes);

}  // namespace strata
