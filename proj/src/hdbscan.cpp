#include "strata/hdbscan.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <numeric>
#include <set>

namespace strata {

namespace {

struct Merge {
    std::size_t left;
    std::size_t right;
    double distance;
    std::size_t size;
};

struct CondensedRow {
    std::size_t parent;
    std::size_t child;
    double lambda;
    std::size_t child_size;
};

double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

std::vector<double> core_distances(std::span<const Vec2> pts, int min_samples) {
    const std::size_t n = pts.size();
    const std::size_t k = static_cast<std::size_t>(std::clamp(min_samples, 1, static_cast<int>(n))) - 1;
    std::vector<double> core(n);
    std::vector<double> row(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) row[j] = distance(pts[i], pts[j]);
        std::nth_element(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(k), row.end());
        core[i] = row[k];
    }
    return core;
}

// Prim's algorithm on the dense mutual-reachability graph.
std::vector<Merge> minimum_spanning_tree(std::span<const Vec2> pts, const std::vector<double>& core) {
    const std::size_t n = pts.size();
    std::vector<bool> in_tree(n, false);
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    std::vector<std::size_t> from(n, 0);
    std::vector<Merge> edges;
    edges.reserve(n - 1);
    std::size_t current = 0;
    in_tree[0] = true;
    for (std::size_t added = 1; added < n; ++added) {
        std::size_t next = n;
        double next_weight = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            if (in_tree[j]) continue;
            const double reach = std::max({core[current], core[j], distance(pts[current], pts[j])});
            if (reach < best[j]) {
                best[j] = reach;
                from[j] = current;
            }
            if (best[j] < next_weight || next == n) {
                next_weight = best[j];
                next = j;
            }
        }
        in_tree[next] = true;
        edges.push_back({from[next], next, next_weight, 0});
        current = next;
    }
    return edges;
}

// Single-linkage dendrogram, scipy layout: merge i creates node n + i.
std::vector<Merge> single_linkage(std::vector<Merge> mst, std::size_t n) {
    std::stable_sort(mst.begin(), mst.end(), [](const Merge& a, const Merge& b) { return a.distance < b.distance; });
    std::vector<std::size_t> parent(2 * n - 1);
    std::iota(parent.begin(), parent.end(), 0);
    std::vector<std::size_t> size(2 * n - 1, 1);
    auto find = [&](std::size_t x) {
        std::size_t root = x;
        while (parent[root] != root) root = parent[root];
        while (parent[x] != root) {
            const std::size_t next = parent[x];
            parent[x] = root;
            x = next;
        }
        return root;
    };
    std::vector<Merge> merges;
    merges.reserve(n - 1);
    std::size_t next_label = n;
    for (const auto& e : mst) {
        const std::size_t a = find(e.left);
        const std::size_t b = find(e.right);
        const std::size_t merged = size[a] + size[b];
        merges.push_back({a, b, e.distance, merged});
        parent[a] = next_label;
        parent[b] = next_label;
        size[next_label] = merged;
        ++next_label;
    }
    return merges;
}

std::vector<std::size_t> bfs_from_hierarchy(const std::vector<Merge>& merges, std::size_t root, std::size_t n) {
    std::vector<std::size_t> order;
    std::vector<std::size_t> frontier{root};
    while (!frontier.empty()) {
        order.insert(order.end(), frontier.begin(), frontier.end());
        std::vector<std::size_t> next;
        for (std::size_t node : frontier) {
            if (node >= n) {
                next.push_back(merges[node - n].left);
                next.push_back(merges[node - n].right);
            }
        }
        frontier = std::move(next);
    }
    return order;
}

double lambda_of(double d) {
    return 1.0 / std::max(d, std::numeric_limits<double>::min());
}

std::vector<CondensedRow> condense(const std::vector<Merge>& merges, std::size_t n, std::size_t min_cluster_size) {
    const std::size_t root = 2 * n - 2;
    std::vector<std::size_t> relabel(2 * n - 1, 0);
    std::vector<bool> ignore(2 * n - 1, false);
    relabel[root] = n;
    std::size_t next_label = n + 1;
    std::vector<CondensedRow> rows;

    auto count_of = [&](std::size_t node) { return node >= n ? merges[node - n].size : std::size_t{1}; };
    auto drop_points = [&](std::size_t subtree, std::size_t parent_label, double lambda) {
        for (std::size_t sub : bfs_from_hierarchy(merges, subtree, n)) {
            if (sub < n) rows.push_back({parent_label, sub, lambda, 1});
            ignore[sub] = true;
        }
    };

    for (std::size_t node : bfs_from_hierarchy(merges, root, n)) {
        if (ignore[node] || node < n) continue;
        const Merge& m = merges[node - n];
        const double lambda = lambda_of(m.distance);
        const std::size_t left_count = count_of(m.left);
        const std::size_t right_count = count_of(m.right);
        const std::size_t label = relabel[node];

        if (left_count >= min_cluster_size && right_count >= min_cluster_size) {
            relabel[m.left] = next_label++;
            rows.push_back({label, relabel[m.left], lambda, left_count});
            relabel[m.right] = next_label++;
            rows.push_back({label, relabel[m.right], lambda, right_count});
        } else if (left_count < min_cluster_size && right_count < min_cluster_size) {
            drop_points(m.left, label, lambda);
            drop_points(m.right, label, lambda);
        } else if (left_count < min_cluster_size) {
            relabel[m.right] = label;
            drop_points(m.left, label, lambda);
        } else {
            relabel[m.left] = label;
            drop_points(m.right, label, lambda);
        }
    }
    return rows;
}

}  // namespace

std::vector<int> hdbscan(std::span<const Vec2> points, const HdbscanParams& params) {
    const std::size_t n = points.size();
    const std::size_t mcs = static_cast<std::size_t>(std::max(2, params.min_cluster_size));
    if (n < mcs || n < 2) return std::vector<int>(n, -1);

    const auto core = core_distances(points, params.min_samples);
    const auto merges = single_linkage(minimum_spanning_tree(points, core), n);
    const auto tree = condense(merges, n, mcs);

    // Stability of every condensed cluster (labels n .. max).
    std::size_t max_label = n;
    for (const auto& r : tree) max_label = std::max(max_label, r.parent);
    for (const auto& r : tree)
        if (r.child_size > 1) max_label = std::max(max_label, r.child);
    const std::size_t cluster_count = max_label - n + 1;
    std::vector<double> birth(cluster_count, 0.0);
    for (const auto& r : tree)
        if (r.child_size > 1) birth[r.child - n] = r.lambda;
    std::vector<double> stability(cluster_count, 0.0);
    for (const auto& r : tree) stability[r.parent - n] += (r.lambda - birth[r.parent - n]) * static_cast<double>(r.child_size);

    std::vector<std::vector<std::size_t>> children(cluster_count);
    for (const auto& r : tree)
        if (r.child_size > 1) children[r.parent - n].push_back(r.child);

    // Excess of mass, visiting clusters from the leaves up; the root is excluded.
    std::vector<bool> selected(cluster_count, false);
    for (std::size_t c = cluster_count; c-- > 1;) {
        double subtree = 0.0;
        for (std::size_t child : children[c]) subtree += stability[child - n];
        if (subtree > stability[c]) {
            stability[c] = subtree;
        } else {
            selected[c] = true;
            std::deque<std::size_t> queue(children[c].begin(), children[c].end());
            while (!queue.empty()) {
                const std::size_t d = queue.front();
                queue.pop_front();
                selected[d - n] = false;
                for (std::size_t g : children[d - n]) queue.push_back(g);
            }
        }
    }

    std::vector<int> label_of_cluster(cluster_count, -1);
    int next = 0;
    for (std::size_t c = 1; c < cluster_count; ++c)
        if (selected[c]) label_of_cluster[c] = next++;

    std::vector<std::size_t> parent_of(n + cluster_count, n);
    for (const auto& r : tree) parent_of[r.child] = r.parent;

    std::vector<int> labels(n, -1);
    for (std::size_t p = 0; p < n; ++p) {
        std::size_t node = parent_of[p];
        while (node != n && !selected[node - n]) node = parent_of[node];
        if (node != n) labels[p] = label_of_cluster[node - n];
    }
    return labels;
}

}  // namespace strata
