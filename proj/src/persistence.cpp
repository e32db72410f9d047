#include "strata/persistence.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "strata/canonical_json.hpp"

namespace strata {

namespace {

using nlohmann::json;

RawRecord raw_from_json(const json& j) {
    if (!j.is_object()) throw Error(ErrorCode::MalformedRecord, "line is not a JSON object");
    RawRecord raw;
    try {
        raw.id = j.at("id").get<std::string>();
        raw.timestamp = j.at("timestamp").get<std::string>();
        raw.kind = j.at("kind").get<std::string>();
        if (auto it = j.find("text"); it != j.end() && !it->is_null()) raw.text = it->get<std::string>();
        if (auto it = j.find("image_path"); it != j.end() && !it->is_null()) raw.image_path = it->get<std::string>();
        if (auto it = j.find("description"); it != j.end() && !it->is_null()) raw.description = it->get<std::string>();
        const auto& emb = j.at("embedding");
        if (!emb.is_array()) throw Error(ErrorCode::MalformedRecord, "embedding must be an array");
        raw.embedding.reserve(emb.size());
        for (const auto& v : emb) {
            if (!v.is_number()) throw Error(ErrorCode::NonFiniteEmbedding, "embedding entries must be numbers");
            raw.embedding.push_back(v.get<double>());
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedRecord, e.what());
    }
    return raw;
}

json points_to_json(const std::vector<Vec2>& pts) {
    json arr = json::array();
    for (const auto& p : pts) arr.push_back(json::array({p.x, p.y}));
    return arr;
}

std::vector<Vec2> points_from_json(const json& arr) {
    std::vector<Vec2> pts;
    for (const auto& p : arr) pts.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    return pts;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::vector<DataRecord> parse_dataset(std::istream& in) {
    std::vector<DataRecord> records;
    std::unordered_set<std::string> ids;
    std::size_t dim = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            json j;
            try {
                j = json::parse(line);
            } catch (const json::parse_error& e) {
                throw Error(ErrorCode::MalformedRecord, e.what());
            }
            const RawRecord raw = raw_from_json(j);
            if (records.empty()) dim = raw.embedding.size();
            records.push_back(validate_record(raw, dim, ids));
            ids.insert(records.back().id);
        } catch (const Error& e) {
            throw Error(e.code(), e.detail(), line_no);
        }
    }
    if (records.empty()) throw Error(ErrorCode::EmptyDataset, "no records");
    std::stable_sort(records.begin(), records.end(), [](const DataRecord& a, const DataRecord& b) {
        return a.timestamp != b.timestamp ? a.timestamp < b.timestamp : a.id < b.id;
    });
    return records;
}

std::vector<DataRecord> load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    return parse_dataset(in);
}

json record_to_json(const DataRecord& r) {
    json j;
    j["id"] = r.id;
    j["timestamp"] = format_iso8601(r.timestamp);
    if (const auto* text = std::get_if<TextPayload>(&r.payload)) {
        j["kind"] = "text";
        j["text"] = text->text;
    } else {
        const auto& image = std::get<ImagePayload>(r.payload);
        j["kind"] = "image";
        j["image_path"] = image.image_path;
        j["description"] = image.description;
    }
    j["embedding"] = r.embedding;
    return j;
}

void write_dataset(std::span<const DataRecord> records, std::ostream& out) {
    for (const auto& r : records) out << canonical_dump(record_to_json(r)) << '\n';
}

void save_dataset(std::span<const DataRecord> records, const std::filesystem::path& path) {
    std::ostringstream out;
    write_dataset(records, out);
    write_file(path, out.str());
}

json snapshot_to_json(const TimestepSnapshot& s) {
    json j;
    j["schema_version"] = kSnapshotSchemaVersion;
    j["batch_index"] = s.batch_index;
    j["threshold"] = optional_number(s.threshold);
    j["stress"] = s.stress;
    json nodes = json::array();
    for (const auto& n : s.nodes)
        nodes.push_back({{"id", n.id}, {"x", n.position.x}, {"y", n.position.y}, {"z", n.position.z},
                         {"batch_index", n.batch_index}});
    j["nodes"] = std::move(nodes);
    json clusters = json::array();
    for (const auto& c : s.clusters) {
        json hulls = json::array();
        for (const auto& h : c.hulls)
            hulls.push_back({{"batch_index", h.batch_index}, {"z", h.z}, {"polygon", points_to_json(h.polygon)}});
        clusters.push_back({
            {"cluster_id", c.cluster_id},
            {"parent_id", c.parent_id ? json(*c.parent_id) : json(nullptr)},
            {"member_ids", c.member_ids},
            {"labels", {{"tfidf", c.labels.tfidf}, {"llm", c.labels.llm ? json(*c.labels.llm) : json(nullptr)}}},
            {"outline", points_to_json(c.outline)},
            {"hulls", std::move(hulls)},
        });
    }
    j["clusters"] = std::move(clusters);
    j["misc_ids"] = s.misc_ids;
    return j;
}

TimestepSnapshot snapshot_from_json(const json& j) {
    try {
        const int version = j.at("schema_version").get<int>();
        if (version != kSnapshotSchemaVersion)
            throw Error(ErrorCode::SchemaVersionMismatch, "snapshot schema " + std::to_string(version) +
                                                              ", this build reads " +
                                                              std::to_string(kSnapshotSchemaVersion));
        TimestepSnapshot s;
        s.batch_index = j.at("batch_index").get<int>();
        if (!j.at("threshold").is_null()) s.threshold = j.at("threshold").get<double>();
        s.stress = j.at("stress").get<double>();
        for (const auto& n : j.at("nodes"))
            s.nodes.push_back({n.at("id").get<std::string>(),
                               {n.at("x").get<double>(), n.at("y").get<double>(), n.at("z").get<double>()},
                               n.at("batch_index").get<int>()});
        for (const auto& c : j.at("clusters")) {
            ClusterRecord rec;
            rec.cluster_id = c.at("cluster_id").get<std::int64_t>();
            if (!c.at("parent_id").is_null()) rec.parent_id = c.at("parent_id").get<std::int64_t>();
            rec.member_ids = c.at("member_ids").get<std::vector<std::string>>();
            rec.labels.tfidf = c.at("labels").at("tfidf").get<std::vector<std::string>>();
            if (!c.at("labels").at("llm").is_null()) rec.labels.llm = c.at("labels").at("llm").get<std::string>();
            rec.outline = points_from_json(c.at("outline"));
            for (const auto& h : c.at("hulls"))
                rec.hulls.push_back({h.at("batch_index").get<int>(), h.at("z").get<double>(),
                                     points_from_json(h.at("polygon"))});
            s.clusters.push_back(std::move(rec));
        }
        s.misc_ids = j.at("misc_ids").get<std::vector<std::string>>();
        return s;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedRecord, std::string("snapshot: ") + e.what());
    }
}

std::string serialize_snapshot(const TimestepSnapshot& snapshot) {
    return canonical_dump(snapshot_to_json(snapshot)) + "\n";
}

void save_snapshot(const TimestepSnapshot& snapshot, const std::filesystem::path& path) {
    write_file(path, serialize_snapshot(snapshot));
}

TimestepSnapshot load_snapshot(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::MalformedRecord, std::string("snapshot: ") + e.what());
    }
    return snapshot_from_json(j);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out << bytes;
    if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

}  // namespace strata
