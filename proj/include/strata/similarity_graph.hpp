#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "strata/core.hpp"

namespace strata {

// C = ln 21.
inline double default_threshold_constant() { return std::log(21.0); }

enum class ThresholdPolicy {
    Dynamic,        // attract iff s > mu + (log N / log C) * sigma
    AllAttractive,  // every edge is a spring; used to study the pure stress objective
};

struct ThresholdState {
    double mu = 0.0;
    double sigma = 0.0;
    std::size_t n_nodes = 0;
    double c_constant = 0.0;
    double tau = 0.0;
};

// Cosine of the angle between two non-zero vectors of equal length, clamped to [-1, 1].
double cosine_similarity(std::span<const double> a, std::span<const double> b);

// Mean and population standard deviation of `similarities`, combined with the
// node count into the attraction threshold.
ThresholdState compute_threshold(std::span<const double> similarities, std::size_t n_nodes, double c_constant);

inline EdgeClass classify(double similarity, double tau) {
    return similarity > tau ? EdgeClass::Attractive : EdgeClass::Repulsive;
}

void classify_edges(std::span<SimilarityEdge> edges, double tau);

// Complete graph over every inserted embedding. Similarities are computed once
// at insertion; the threshold and the classification of all edges are refreshed
// after every extension.
//
// Storage is row-major and symmetric so that the force loop can walk one
// contiguous row per node.
class SimilarityGraph {
public:
    explicit SimilarityGraph(double c_constant = default_threshold_constant(),
                             ThresholdPolicy policy = ThresholdPolicy::Dynamic);

    void extend(std::span<const std::vector<double>> embeddings);
    void extend(std::span<const DataRecord> records);

    std::size_t node_count() const { return norms_.size(); }
    std::size_t edge_count() const { return edge_count_for(node_count()); }

    double similarity(std::size_t i, std::size_t j) const { return sim_rows_[i][j]; }
    EdgeClass classification(std::size_t i, std::size_t j) const {
        return attract_rows_[i][j] ? EdgeClass::Attractive : EdgeClass::Repulsive;
    }
    SimilarityEdge edge(std::size_t i, std::size_t j) const;
    // Canonical edge list: a < b, ordered by (b, a).
    std::vector<SimilarityEdge> edges() const;

    std::span<const double> similarity_row(std::size_t i) const { return sim_rows_[i]; }
    std::span<const std::uint8_t> attractive_row(std::size_t i) const { return attract_rows_[i]; }
    const std::vector<double>& embedding(std::size_t i) const { return embeddings_[i]; }

    ThresholdPolicy policy() const { return policy_; }
    double c_constant() const { return c_constant_; }
    // Statistics of the current edge set; empty while fewer than two nodes exist.
    const std::optional<ThresholdState>& threshold() const { return threshold_; }
    // The cutoff actually separating attraction from repulsion, if any.
    std::optional<double> effective_tau() const;

private:
    void refresh_classification();

    double c_constant_;
    ThresholdPolicy policy_;
    std::vector<std::vector<double>> embeddings_;
    std::vector<double> norms_;
    std::vector<std::vector<double>> sim_rows_;
    std::vector<std::vector<std::uint8_t>> attract_rows_;
    std::optional<ThresholdState> threshold_;
};

}  // namespace strata
