#include "strata/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include "strata/clustering.hpp"
#include "strata/persistence.hpp"
#include "strata/random.hpp"
#include "strata/temporal.hpp"

namespace strata {

namespace {

PhysicsConfig seeded_physics(const RunConfig& cfg) {
    PhysicsConfig physics = cfg.physics;
    physics.seed = cfg.seed;
    return physics;
}

bool by_time_then_id(const DataRecord& a, const DataRecord& b) {
    return a.timestamp != b.timestamp ? a.timestamp < b.timestamp : a.id < b.id;
}

}  // namespace

Pipeline::Pipeline(RunConfig cfg, std::shared_ptr<LabelClient> label_client)
    : cfg_(std::move(cfg)),
      label_client_(std::move(label_client)),
      engine_(seeded_physics(cfg_), cfg_.threshold_policy, cfg_.threshold_constant, cfg_.z_spacing) {
    cfg_.physics.seed = cfg_.seed;
    cfg_.validate();
}

const DataRecord* Pipeline::find_record(const std::string& id) const {
    const auto it = index_of_.find(id);
    return it == index_of_.end() ? nullptr : &records_[it->second];
}

std::vector<Vec2> Pipeline::member_positions(const std::vector<std::string>& members, std::optional<int> batch) const {
    std::vector<Vec2> out;
    out.reserve(members.size());
    for (const auto& id : members) {
        const auto& node = engine_.nodes()[index_of_.at(id)];
        if (!batch || node.batch_index == *batch) out.push_back(node.position.xy());
    }
    return out;
}

ClusterLabels Pipeline::label_cluster(const std::vector<std::string>& members, const TfIdfIndex& index,
                                      int batch_index, std::size_t cluster_index) const {
    std::vector<std::string> docs;
    docs.reserve(members.size());
    for (const auto& id : members) docs.push_back(document_text(records_[index_of_.at(id)]));

    ClusterLabels labels;
    labels.tfidf = index.top_terms(docs, cfg_.labels.m);
    if (cfg_.labels.mode == LabelMode::External && label_client_) {
        const auto seed = derive_seed(cfg_.seed, (static_cast<std::uint64_t>(batch_index) << 32) | cluster_index);
        try {
            labels.llm = llm_label(docs, *label_client_, cfg_.labels.external, seed);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::ServiceUnavailable) throw;
        }
    }
    return labels;
}

const TimestepSnapshot& Pipeline::advance(std::span<const DataRecord> records, const AdvanceObserver& observer) {
    const int batch = next_batch();

    if (!cfg_.timestep.origin) {
        if (records.empty())
            throw Error(ErrorCode::InvalidConfig, "the first batch is empty and no timestep origin is configured");
        cfg_.timestep = resolve_origin(cfg_.timestep, records);
    }

    std::vector<DataRecord> incoming(records.begin(), records.end());
    std::stable_sort(incoming.begin(), incoming.end(), by_time_then_id);
    std::unordered_set<std::string> seen;
    for (const auto& r : incoming) {
        const int b = assign_batch(r.timestamp, cfg_.timestep);
        if (b != batch)
            throw Error(ErrorCode::OutOfOrderBatch, "record '" + r.id + "' belongs to batch " + std::to_string(b) +
                                                        ", expected batch " + std::to_string(batch));
        if (index_of_.contains(r.id) || !seen.insert(r.id).second)
            throw Error(ErrorCode::DuplicateId, "record id '" + r.id + "' was already inserted");
    }

    if (incoming.empty()) {
        engine_.set_current_batch(batch);
    } else {
        engine_.insert_batch(incoming, batch);
        for (auto& r : incoming) {
            index_of_.emplace(r.id, records_.size());
            corpus_.push_back(document_text(r));
            records_.push_back(std::move(r));
        }
    }

    StepObserver step_observer;
    if (observer.on_step)
        step_observer = [&](const StepReport& report) { observer.on_step(report, engine_); };
    engine_.relax(cfg_.relax, step_observer);

    TimestepSnapshot snap;
    snap.batch_index = batch;
    snap.threshold = engine_.graph().effective_tau();
    snap.stress = engine_.total_stress();
    snap.nodes.reserve(engine_.size());
    for (const auto& node : engine_.nodes()) snap.nodes.push_back({node.record_id, node.position, node.batch_index});

    Partition partition;
    if (!snap.nodes.empty()) {
        std::vector<PlacedPoint> points;
        points.reserve(snap.nodes.size());
        for (const auto& n : snap.nodes) points.push_back({n.id, n.position.x, n.position.y});
        partition = cluster_timestep(points, cfg_.clustering);
    }

    std::vector<std::optional<std::int64_t>> parents(partition.clusters.size());
    if (!snapshots_.empty()) parents = assign_parents(snapshots_.back(), partition.clusters, cfg_.clustering);

    const TfIdfIndex index(corpus_);
    for (std::size_t c = 0; c < partition.clusters.size(); ++c) {
        const auto& members = partition.clusters[c];
        ClusterRecord cluster;
        cluster.cluster_id = next_cluster_id_++;
        cluster.member_ids = members;
        cluster.parent_id = parents[c];
        cluster.labels = label_cluster(members, index, batch, c);
        cluster.outline = convex_hull(member_positions(members, std::nullopt));

        std::vector<int> slices;
        for (const auto& id : members) slices.push_back(engine_.nodes()[index_of_.at(id)].batch_index);
        std::sort(slices.begin(), slices.end());
        slices.erase(std::unique(slices.begin(), slices.end()), slices.end());
        for (int b : slices)
            cluster.hulls.push_back({b, z_coordinate(b, cfg_.z_spacing), convex_hull(member_positions(members, b))});
        snap.clusters.push_back(std::move(cluster));
    }
    snap.misc_ids = std::move(partition.noise);

    snapshots_.push_back(std::move(snap));
    return snapshots_.back();
}

std::vector<TimestepSnapshot> replay(std::span<const DataRecord> records, const RunConfig& cfg,
                                     std::shared_ptr<LabelClient> label_client, std::optional<int> max_batches) {
    if (records.empty()) throw Error(ErrorCode::EmptyDataset, "no records to replay");
    RunConfig resolved = cfg;
    resolved.timestep = resolve_origin(cfg.timestep, records);
    const auto batches = group_into_batches(records, resolved.timestep);
    const std::size_t limit =
        max_batches ? std::min(batches.size(), static_cast<std::size_t>(std::max(0, *max_batches))) : batches.size();

    Pipeline pipeline(resolved, std::move(label_client));
    for (std::size_t b = 0; b < limit; ++b) pipeline.advance(batches[b]);
    return pipeline.snapshots();
}

void write_snapshots(std::span<const TimestepSnapshot> snapshots, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());
    for (const auto& snap : snapshots) {
        char name[32];
        std::snprintf(name, sizeof name, "snapshot_%04d.json", snap.batch_index);
        save_snapshot(snap, dir / name);
    }
}

std::vector<LineageLink> lineage_links(std::span<const TimestepSnapshot> snapshots, double z_spacing) {
    std::vector<LineageLink> links;
    for (std::size_t k = 1; k < snapshots.size(); ++k) {
        const auto& prev = snapshots[k - 1];
        for (const auto& child : snapshots[k].clusters) {
            if (!child.parent_id) continue;
            const auto* parent = prev.find_cluster(*child.parent_id);
            if (!parent) continue;
            LineageLink link{parent->cluster_id, child.cluster_id, prev.batch_index, snapshots[k].batch_index, {}};
            if (parent->outline.size() >= 3 && child.outline.size() >= 3) {
                try {
                    link.cone = delta_cone(parent->outline, z_coordinate(prev.batch_index, z_spacing), child.outline,
                                           z_coordinate(snapshots[k].batch_index, z_spacing));
                } catch (const Error& e) {
                    if (e.code() != ErrorCode::DegenerateHull) throw;
                }
            }
            links.push_back(std::move(link));
        }
    }
    return links;
}

nlohmann::json lineage_to_json(std::span<const TimestepSnapshot> snapshots, double z_spacing) {
    using nlohmann::json;
    json clusters = json::array();
    for (const auto& snap : snapshots) {
        for (const auto& c : snap.clusters) {
            clusters.push_back({{"cluster_id", c.cluster_id},
                                {"batch_index", snap.batch_index},
                                {"parent_id", c.parent_id ? json(*c.parent_id) : json(nullptr)},
                                {"size", c.member_ids.size()},
                                {"label", c.labels.display()}});
        }
    }
    json links = json::array();
    for (const auto& link : lineage_links(snapshots, z_spacing)) {
        json cone = nullptr;
        if (link.cone) {
            json vertices = json::array();
            for (const auto& v : link.cone->vertices) vertices.push_back({v.x, v.y, v.z});
            json triangles = json::array();
            for (const auto& t : link.cone->triangles) triangles.push_back({t[0], t[1], t[2]});
            cone = {{"vertices", vertices},
                    {"triangles", triangles},
                    {"parent_ring", link.cone->parent_ring},
                    {"child_ring", link.cone->child_ring}};
        }
        links.push_back({{"parent_id", link.parent_id},
                         {"child_id", link.child_id},
                         {"parent_batch", link.parent_batch},
                         {"child_batch", link.child_batch},
                         {"delta_cone", cone}});
    }
    return {{"clusters", clusters}, {"links", links}};
}

}  // namespace strata
