#include "strata/clustering.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

namespace strata {

HdbscanParams ClusteringConfig::resolve(std::size_t n_points) const {
    HdbscanParams p;
    const int automatic = std::max(5, static_cast<int>((n_points + 49) / 50));
    p.min_cluster_size = min_cluster_size > 0 ? min_cluster_size : automatic;
    p.min_samples = min_samples > 0 ? min_samples : p.min_cluster_size;
    return p;
}

void ClusteringConfig::validate() const {
    if (min_cluster_size != 0 && min_cluster_size < 2)
        throw Error(ErrorCode::InvalidConfig, "min_cluster_size must be at least 2");
    if (min_samples < 0) throw Error(ErrorCode::InvalidConfig, "min_samples must be non-negative");
    if (min_shared_members < 1) throw Error(ErrorCode::InvalidConfig, "min_shared_members must be at least 1");
}

Partition cluster_timestep(std::span<const PlacedPoint> points, const ClusteringConfig& cfg) {
    std::vector<PlacedPoint> sorted(points.begin(), points.end());
    std::sort(sorted.begin(), sorted.end(), [](const PlacedPoint& a, const PlacedPoint& b) { return a.id < b.id; });

    std::vector<Vec2> xy;
    xy.reserve(sorted.size());
    for (const auto& p : sorted) xy.push_back({p.x, p.y});
    const auto labels = hdbscan(xy, cfg.resolve(sorted.size()));

    Partition out;
    int k = 0;
    for (int l : labels) k = std::max(k, l + 1);
    out.clusters.resize(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (labels[i] < 0) out.noise.push_back(sorted[i].id);
        else out.clusters[static_cast<std::size_t>(labels[i])].push_back(sorted[i].id);
    }
    std::sort(out.clusters.begin(), out.clusters.end(), [](const auto& a, const auto& b) {
        return a.size() != b.size() ? a.size() > b.size() : a.front() < b.front();
    });
    return out;
}

std::vector<std::optional<std::int64_t>> assign_parents(const TimestepSnapshot& previous,
                                                        std::span<const std::vector<std::string>> current,
                                                        const ClusteringConfig& cfg) {
    std::unordered_map<std::string, std::int64_t> owner;
    for (const auto& c : previous.clusters)
        for (const auto& id : c.member_ids) owner.emplace(id, c.cluster_id);
    std::unordered_set<std::string> noise(previous.misc_ids.begin(), previous.misc_ids.end());

    std::vector<std::optional<std::int64_t>> parents;
    parents.reserve(current.size());
    for (const auto& members : current) {
        std::map<std::int64_t, int> votes;
        int noise_votes = 0;
        for (const auto& id : members) {
            if (auto it = owner.find(id); it != owner.end()) ++votes[it->second];
            else if (noise.contains(id)) ++noise_votes;
        }
        std::optional<std::int64_t> best;
        int best_votes = 0;
        for (const auto& [cid, n] : votes)
            if (n > best_votes) {
                best = cid;
                best_votes = n;
            }
        if (best && (best_votes < noise_votes || best_votes < cfg.min_shared_members)) best.reset();
        parents.push_back(best);
    }
    return parents;
}

}  // namespace strata
