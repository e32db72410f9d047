#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "strata/core.hpp"
#include "strata/hdbscan.hpp"

namespace strata {

struct ClusteringConfig {
    int min_cluster_size = 0;  // 0: max(5, ceil(N / 50))
    int min_samples = 0;       // 0: same as the resolved min_cluster_size
    int min_shared_members = 1;  // parent matching needs at least this many carried-over members

    HdbscanParams resolve(std::size_t n_points) const;
    void validate() const;
};

struct PlacedPoint {
    std::string id;
    double x = 0.0;
    double y = 0.0;
};

struct Partition {
    std::vector<std::vector<std::string>> clusters;  // each sorted; clusters ordered by size desc, then first id
    std::vector<std::string> noise;                  // sorted
};

// Density clustering of one timestep's X-Y positions. The result depends only on
// the set of (id, x, y) triples, not on their order.
Partition cluster_timestep(std::span<const PlacedPoint> points, const ClusteringConfig& cfg);

// For each current cluster, the previous cluster holding the plurality of its
// members that already existed. Ties between previous clusters go to the lower
// id; a plurality held by noise, or an empty carry-over, yields no parent.
std::vector<std::optional<std::int64_t>> assign_parents(const TimestepSnapshot& previous,
                                                        std::span<const std::vector<std::string>> current,
                                                        const ClusteringConfig& cfg = {});

}  // namespace strata
