#include "strata/core.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>

namespace strata {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NonFiniteEmbedding: return "NonFiniteEmbedding";
        case ErrorCode::ZeroEmbedding: return "ZeroEmbedding";
        case ErrorCode::UnparseableTimestamp: return "UnparseableTimestamp";
        case ErrorCode::DuplicateId: return "DuplicateId";
        case ErrorCode::MissingDescription: return "MissingDescription";
        case ErrorCode::MalformedRecord: return "MalformedRecord";
        case ErrorCode::EmptyDataset: return "EmptyDataset";
        case ErrorCode::InsufficientNodes: return "InsufficientNodes";
        case ErrorCode::NonFiniteState: return "NonFiniteState";
        case ErrorCode::BeforeOrigin: return "BeforeOrigin";
        case ErrorCode::OutOfOrderBatch: return "OutOfOrderBatch";
        case ErrorCode::DegenerateHull: return "DegenerateHull";
        case ErrorCode::EmptyCluster: return "EmptyCluster";
        case ErrorCode::ServiceUnavailable: return "ServiceUnavailable";
        case ErrorCode::SchemaVersionMismatch: return "SchemaVersionMismatch";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

namespace {

std::string decorate(ErrorCode code, const std::string& message, std::size_t line) {
    std::string out(to_string(code));
    if (line != 0) out += " at line " + std::to_string(line);
    if (!message.empty()) out += ": " + message;
    return out;
}

bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > s.size()) return false;
    for (std::size_t i = pos; i < pos + len; ++i)
        if (s[i] < '0' || s[i] > '9') return false;
    auto [p, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, out);
    return ec == std::errc{} && p == s.data() + pos + len;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message, std::size_t line)
    : std::runtime_error(decorate(code, message, line)), code_(code), detail_(message), line_(line) {}

std::optional<Instant> parse_iso8601(std::string_view s) {
    using namespace std::chrono;
    int y = 0, mo = 0, d = 0;
    if (!read_int(s, 0, 4, y) || s.size() < 10 || s[4] != '-' || !read_int(s, 5, 2, mo) || s[7] != '-' ||
        !read_int(s, 8, 2, d))
        return std::nullopt;
    year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;

    int hh = 0, mm = 0, ss = 0, ms = 0;
    std::size_t pos = 10;
    if (pos < s.size() && (s[pos] == 'T' || s[pos] == ' ')) {
        if (!read_int(s, pos + 1, 2, hh) || pos + 3 >= s.size() || s[pos + 3] != ':' ||
            !read_int(s, pos + 4, 2, mm))
            return std::nullopt;
        pos += 6;
        if (pos < s.size() && s[pos] == ':') {
            if (!read_int(s, pos + 1, 2, ss)) return std::nullopt;
            pos += 3;
            if (pos < s.size() && s[pos] == '.') {
                ++pos;
                std::size_t digits = 0;
                int scale = 100;
                while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
                    if (digits < 3) ms += (s[pos] - '0') * scale;
                    scale /= 10;
                    ++digits;
                    ++pos;
                }
                if (digits == 0) return std::nullopt;
            }
        }
        if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;
    }

    minutes offset{0};
    if (pos < s.size()) {
        if (s[pos] == 'Z' || s[pos] == 'z') {
            ++pos;
        } else if (s[pos] == '+' || s[pos] == '-') {
            int oh = 0, om = 0;
            const int sign = s[pos] == '-' ? -1 : 1;
            if (!read_int(s, pos + 1, 2, oh)) return std::nullopt;
            std::size_t next = pos + 3;
            if (next < s.size() && s[next] == ':') ++next;
            if (!read_int(s, next, 2, om)) return std::nullopt;
            offset = minutes{sign * (oh * 60 + om)};
            pos = next + 2;
        }
    }
    if (pos != s.size()) return std::nullopt;

    return time_point_cast<milliseconds>(sys_days{ymd}) + hours{hh} + minutes{mm} + seconds{ss} +
           milliseconds{ms} - offset;
}

std::string format_iso8601(Instant t) {
    using namespace std::chrono;
    const auto day_point = floor<days>(t);
    const year_month_day ymd{day_point};
    auto rest = t - day_point;
    const auto h = duration_cast<hours>(rest);
    rest -= h;
    const auto m = duration_cast<minutes>(rest);
    rest -= m;
    const auto s = duration_cast<seconds>(rest);
    rest -= s;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(h.count()), static_cast<int>(m.count()), static_cast<int>(s.count()),
                  static_cast<int>(rest.count()));
    return buf;
}

DataRecord validate_record(const RawRecord& raw, std::size_t expected_dim,
                           const std::unordered_set<std::string>& known_ids) {
    if (raw.id.empty()) throw Error(ErrorCode::MalformedRecord, "empty id");
    if (known_ids.contains(raw.id)) throw Error(ErrorCode::DuplicateId, raw.id);
    if (raw.embedding.size() != expected_dim)
        throw Error(ErrorCode::DimensionMismatch, "record " + raw.id + " has " +
                                                      std::to_string(raw.embedding.size()) + " dims, expected " +
                                                      std::to_string(expected_dim));
    if (expected_dim < 2) throw Error(ErrorCode::DimensionMismatch, "embedding dimension must be at least 2");
    if (!std::all_of(raw.embedding.begin(), raw.embedding.end(), [](double v) { return std::isfinite(v); }))
        throw Error(ErrorCode::NonFiniteEmbedding, raw.id);
    if (std::all_of(raw.embedding.begin(), raw.embedding.end(), [](double v) { return v == 0.0; }))
        throw Error(ErrorCode::ZeroEmbedding, raw.id);

    auto ts = parse_iso8601(raw.timestamp);
    if (!ts) throw Error(ErrorCode::UnparseableTimestamp, "'" + raw.timestamp + "'");

    DataRecord rec;
    rec.id = raw.id;
    rec.timestamp = *ts;
    rec.embedding = raw.embedding;
    if (raw.kind == "text") {
        if (!raw.text) throw Error(ErrorCode::MalformedRecord, "text record " + raw.id + " has no text");
        rec.payload = TextPayload{*raw.text};
    } else if (raw.kind == "image") {
        if (!raw.image_path) throw Error(ErrorCode::MalformedRecord, "image record " + raw.id + " has no image_path");
        if (!raw.description) throw Error(ErrorCode::MissingDescription, raw.id);
        rec.payload = ImagePayload{*raw.image_path, *raw.description};
    } else {
        throw Error(ErrorCode::MalformedRecord, "unknown kind '" + raw.kind + "'");
    }
    return rec;
}

const std::string& document_text(const DataRecord& record) {
    if (const auto* text = std::get_if<TextPayload>(&record.payload)) return text->text;
    return std::get<ImagePayload>(record.payload).description;
}

std::string ClusterLabels::display() const {
    if (llm) return *llm;
    std::string out;
    for (const auto& term : tfidf) {
        if (!out.empty()) out += '-';
        out += term;
    }
    return out;
}

const ClusterRecord* TimestepSnapshot::find_cluster(std::int64_t id) const {
    for (const auto& c : clusters)
        if (c.cluster_id == id) return &c;
    return nullptr;
}

}  // namespace strata
