#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <variant>
#include <vector>

namespace strata {

enum class ErrorCode {
    DimensionMismatch,
    NonFiniteEmbedding,
    ZeroEmbedding,
    UnparseableTimestamp,
    DuplicateId,
    MissingDescription,
    MalformedRecord,
    EmptyDataset,
    InsufficientNodes,
    NonFiniteState,
    BeforeOrigin,
    OutOfOrderBatch,
    DegenerateHull,
    EmptyCluster,
    ServiceUnavailable,
    SchemaVersionMismatch,
    InvalidConfig,
    Io,
};

std::string_view to_string(ErrorCode code);

// All recoverable failures in the library are reported through this type.
// `line` is set by the dataset loader (1-based) and is 0 otherwise.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::size_t line = 0);

    ErrorCode code() const noexcept { return code_; }
    std::size_t line() const noexcept { return line_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string detail_;
    std::size_t line_;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    bool operator==(const Vec2&) const = default;

    double norm() const { return std::sqrt(x * x + y * y); }
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec2 xy() const { return {x, y}; }
    bool operator==(const Vec3&) const = default;
};

using Instant = std::chrono::sys_time<std::chrono::milliseconds>;

// Accepts `YYYY-MM-DD`, `YYYY-MM-DDTHH:MM[:SS[.fff]]` with an optional `Z` or
// `+HH:MM`/`-HH:MM` suffix. Offsets are folded into UTC.
std::optional<Instant> parse_iso8601(std::string_view text);
// Always `YYYY-MM-DDTHH:MM:SS.fffZ`.
std::string format_iso8601(Instant t);

struct TextPayload {
    std::string text;
    bool operator==(const TextPayload&) const = default;
};

struct ImagePayload {
    std::string image_path;
    std::string description;
    bool operator==(const ImagePayload&) const = default;
};

using Payload = std::variant<TextPayload, ImagePayload>;

struct DataRecord {
    std::string id;
    Instant timestamp;
    Payload payload;
    std::vector<double> embedding;

    bool operator==(const DataRecord&) const = default;
};

// Unvalidated record as it appears in a dataset line.
struct RawRecord {
    std::string id;
    std::string timestamp;
    std::string kind;
    std::optional<std::string> text;
    std::optional<std::string> image_path;
    std::optional<std::string> description;
    std::vector<double> embedding;
};

// Checks a raw record against the dataset invariants. `known_ids` holds the ids
// accepted so far; a repeat raises DuplicateId.
DataRecord validate_record(const RawRecord& raw, std::size_t expected_dim,
                           const std::unordered_set<std::string>& known_ids = {});

// Text the topic labelers see for a record: the text itself, or the image's
// pre-annotated description.
const std::string& document_text(const DataRecord& record);

struct LayoutNode {
    std::string record_id;
    Vec3 position;
    Vec2 velocity;
    double base_mass = 1.0;
    int batch_index = 0;
};

enum class EdgeClass : std::uint8_t { Attractive, Repulsive };

struct SimilarityEdge {
    std::uint32_t a = 0;
    std::uint32_t b = 0;
    double similarity = 0.0;
    EdgeClass classification = EdgeClass::Repulsive;

    double ideal_distance() const { return 1.0 - similarity; }
    double spring_constant() const { return similarity; }
};

constexpr std::size_t edge_count_for(std::size_t n) { return n < 2 ? 0 : n * (n - 1) / 2; }

struct ClusterLabels {
    std::vector<std::string> tfidf;
    std::optional<std::string> llm;

    // The LLM label when one was produced, otherwise the TF-IDF terms joined by '-'.
    std::string display() const;
    bool operator==(const ClusterLabels&) const = default;
};

struct SliceHull {
    int batch_index = 0;
    double z = 0.0;
    std::vector<Vec2> polygon;
    bool operator==(const SliceHull&) const = default;
};

struct ClusterRecord {
    std::int64_t cluster_id = 0;
    std::vector<std::string> member_ids;  // sorted
    std::optional<std::int64_t> parent_id;
    ClusterLabels labels;
    std::vector<Vec2> outline;            // hull over all members
    std::vector<SliceHull> hulls;         // one per batch slice with members
    bool operator==(const ClusterRecord&) const = default;
};

struct NodeState {
    std::string id;
    Vec3 position;
    int batch_index = 0;
    bool operator==(const NodeState&) const = default;
};

struct TimestepSnapshot {
    int batch_index = 0;
    std::vector<NodeState> nodes;  // insertion order
    std::vector<ClusterRecord> clusters;
    std::vector<std::string> misc_ids;  // sorted
    std::optional<double> threshold;
    double stress = 0.0;

    const ClusterRecord* find_cluster(std::int64_t id) const;
    bool operator==(const TimestepSnapshot&) const = default;
};

}  // namespace strata
