#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "strata/core.hpp"
#include "strata/persistence.hpp"

namespace strata::testing {

inline std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(STRATA_FIXTURE_DIR) / name; }

inline nlohmann::json load_fixture(const std::string& name) { return nlohmann::json::parse(read_file(fixture(name))); }

inline DataRecord text_record(std::string id, const std::string& timestamp, std::vector<double> embedding,
                              std::string text = "sample text") {
    DataRecord r;
    r.id = std::move(id);
    r.timestamp = *parse_iso8601(timestamp);
    r.payload = TextPayload{std::move(text)};
    r.embedding = std::move(embedding);
    return r;
}

// Fresh directory under the system temp dir, emptied on construction.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("strata_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace strata::testing
