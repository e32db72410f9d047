#pragma once

#include <span>
#include <vector>

#include "strata/core.hpp"

namespace strata {

struct HdbscanParams {
    int min_cluster_size = 5;
    int min_samples = 5;  // neighbourhood size for core distances, the point itself included
};

// Density-based hierarchical clustering over 2D points: core distances,
// mutual-reachability minimum spanning tree, condensed tree and
// excess-of-mass cluster selection (the root is never selected).
//
// Returns one label per point: -1 for noise, otherwise 0..k-1 numbered in the
// order the clusters appear in the condensed tree.
std::vector<int> hdbscan(std::span<const Vec2> points, const HdbscanParams& params);

}  // namespace strata
