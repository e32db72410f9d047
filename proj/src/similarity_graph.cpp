#include "strata/similarity_graph.hpp"

#include <algorithm>
#include <numeric>

namespace strata {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
    return sum;
}

double cosine_from_norms(std::span<const double> a, std::span<const double> b, double norm_a, double norm_b) {
    return std::clamp(dot(a, b) / (norm_a * norm_b), -1.0, 1.0);
}

}  // namespace

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
    return cosine_from_norms(a, b, std::sqrt(dot(a, a)), std::sqrt(dot(b, b)));
}

ThresholdState compute_threshold(std::span<const double> similarities, std::size_t n_nodes, double c_constant) {
    if (n_nodes < 2) throw Error(ErrorCode::InsufficientNodes, "threshold needs at least two nodes");
    if (similarities.empty()) throw Error(ErrorCode::InsufficientNodes, "threshold needs at least one edge");
    if (!(c_constant > 1.0)) throw Error(ErrorCode::InvalidConfig, "threshold constant C must exceed 1");

    const double n = static_cast<double>(similarities.size());
    const double mu = std::accumulate(similarities.begin(), similarities.end(), 0.0) / n;
    double ss = 0.0;
    for (double s : similarities) ss += (s - mu) * (s - mu);
    const double sigma = std::sqrt(ss / n);

    ThresholdState state;
    state.mu = mu;
    state.sigma = sigma;
    state.n_nodes = n_nodes;
    state.c_constant = c_constant;
    state.tau = mu + (std::log(static_cast<double>(n_nodes)) / std::log(c_constant)) * sigma;
    return state;
}

void classify_edges(std::span<SimilarityEdge> edges, double tau) {
    for (auto& e : edges) e.classification = classify(e.similarity, tau);
}

SimilarityGraph::SimilarityGraph(double c_constant, ThresholdPolicy policy)
    : c_constant_(c_constant), policy_(policy) {
    if (!(c_constant > 1.0)) throw Error(ErrorCode::InvalidConfig, "threshold constant C must exceed 1");
}

void SimilarityGraph::extend(std::span<const DataRecord> records) {
    std::vector<std::vector<double>> embeddings;
    embeddings.reserve(records.size());
    for (const auto& r : records) embeddings.push_back(r.embedding);
    extend(embeddings);
}

void SimilarityGraph::extend(std::span<const std::vector<double>> embeddings) {
    if (embeddings.empty()) return;
    const std::size_t old_n = node_count();
    const std::size_t new_n = old_n + embeddings.size();

    const std::size_t dim = embeddings_.empty() ? embeddings.front().size() : embeddings_.front().size();
    for (const auto& e : embeddings) {
        if (e.size() != dim)
            throw Error(ErrorCode::DimensionMismatch,
                        "embedding has " + std::to_string(e.size()) + " dims, expected " + std::to_string(dim));
        if (!(dot(e, e) > 0.0)) throw Error(ErrorCode::ZeroEmbedding, "embedding has zero norm");
    }
    for (const auto& e : embeddings) {
        embeddings_.push_back(e);
        norms_.push_back(std::sqrt(dot(e, e)));
    }
    for (std::size_t i = 0; i < old_n; ++i) sim_rows_[i].resize(new_n);
    sim_rows_.resize(new_n, std::vector<double>(new_n));
    for (std::size_t j = old_n; j < new_n; ++j) {
        sim_rows_[j][j] = 1.0;
        for (std::size_t i = 0; i < j; ++i) {
            const double s = cosine_from_norms(embeddings_[i], embeddings_[j], norms_[i], norms_[j]);
            sim_rows_[i][j] = s;
            sim_rows_[j][i] = s;
        }
    }
    refresh_classification();
}

void SimilarityGraph::refresh_classification() {
    const std::size_t n = node_count();
    attract_rows_.assign(n, std::vector<std::uint8_t>(n, 0));
    if (n < 2) {
        threshold_.reset();
        return;
    }
    std::vector<double> flat;
    flat.reserve(edge_count());
    for (std::size_t b = 1; b < n; ++b)
        for (std::size_t a = 0; a < b; ++a) flat.push_back(sim_rows_[a][b]);
    threshold_ = compute_threshold(flat, n, c_constant_);

    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const bool attract = policy_ == ThresholdPolicy::AllAttractive ||
                                 classify(sim_rows_[i][j], threshold_->tau) == EdgeClass::Attractive;
            attract_rows_[i][j] = attract ? 1 : 0;
        }
}

std::optional<double> SimilarityGraph::effective_tau() const {
    if (policy_ == ThresholdPolicy::AllAttractive || !threshold_) return std::nullopt;
    return threshold_->tau;
}

SimilarityEdge SimilarityGraph::edge(std::size_t i, std::size_t j) const {
    const auto a = std::min(i, j);
    const auto b = std::max(i, j);
    return SimilarityEdge{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b), sim_rows_[a][b],
                          classification(a, b)};
}

std::vector<SimilarityEdge> SimilarityGraph::edges() const {
    std::vector<SimilarityEdge> out;
    out.reserve(edge_count());
    for (std::size_t b = 1; b < node_count(); ++b)
        for (std::size_t a = 0; a < b; ++a) out.push_back(edge(a, b));
    return out;
}

}  // namespace strata
