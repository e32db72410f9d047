#include <doctest.h>

#include <cmath>
#include <random>

#include "strata/similarity_graph.hpp"

using namespace strata;

TEST_CASE("cosine similarity of simple vectors") {
    const std::vector<double> x{1.0, 0.0};
    const std::vector<double> y{0.0, 2.0};
    const std::vector<double> d{3.0, 3.0};
    CHECK(cosine_similarity(x, x) == doctest::Approx(1.0));
    CHECK(cosine_similarity(x, y) == doctest::Approx(0.0));
    CHECK(cosine_similarity(x, d) == doctest::Approx(std::sqrt(0.5)));
    const std::vector<double> neg{-1.0, 0.0};
    CHECK(cosine_similarity(x, neg) == doctest::Approx(-1.0));
}

TEST_CASE("threshold reproduces the worked value") {
    // mean 0.5 and population standard deviation 0.1
    const std::vector<double> sims{0.4, 0.6, 0.4, 0.6};
    const auto t = compute_threshold(sims, 21, std::log(21.0));
    CHECK(t.mu == doctest::Approx(0.5));
    CHECK(t.sigma == doctest::Approx(0.1));
    CHECK(std::abs(t.tau - 0.7734574659912673) < 1e-9);
}

TEST_CASE("threshold rejects degenerate input") {
    const std::vector<double> one{0.3};
    CHECK_THROWS_AS(compute_threshold(one, 1, std::log(21.0)), Error);
    CHECK_THROWS_AS(compute_threshold({}, 5, std::log(21.0)), Error);
    CHECK_THROWS_AS(compute_threshold(one, 2, 1.0), Error);
}

TEST_CASE("classification uses a strict inequality") {
    CHECK(classify(0.77, 0.77) == EdgeClass::Repulsive);
    CHECK(classify(0.7700001, 0.77) == EdgeClass::Attractive);
    CHECK(classify(-0.2, -0.2) == EdgeClass::Repulsive);
}

TEST_CASE("graph is complete and matches direct similarities") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    std::vector<std::vector<double>> embs(12, std::vector<double>(6));
    for (auto& e : embs)
        for (auto& v : e) v = g(rng);

    SimilarityGraph graph;
    graph.extend(std::span(embs).first(5));
    graph.extend(std::span(embs).subspan(5));
    REQUIRE(graph.node_count() == 12);
    const auto edges = graph.edges();
    CHECK(edges.size() == edge_count_for(12));
    CHECK(edges.size() == graph.edge_count());

    std::vector<double> flat;
    for (const auto& e : edges) {
        CHECK(e.a < e.b);
        CHECK(e.similarity == cosine_similarity(embs[e.a], embs[e.b]));
        CHECK(graph.similarity(e.a, e.b) == graph.similarity(e.b, e.a));
        flat.push_back(e.similarity);
    }
    const auto t = compute_threshold(flat, 12, default_threshold_constant());
    REQUIRE(graph.effective_tau());
    CHECK(*graph.effective_tau() == doctest::Approx(t.tau).epsilon(1e-12));
    for (const auto& e : edges) CHECK(e.classification == classify(e.similarity, *graph.effective_tau()));
}

TEST_CASE("incremental and one-shot construction agree") {
    std::vector<std::vector<double>> embs{{1, 0, 0}, {0.9, 0.1, 0}, {0, 1, 0}, {0, 0.8, 0.3}, {0.2, 0.2, 0.9}};
    SimilarityGraph once;
    once.extend(embs);
    SimilarityGraph stepwise;
    for (const auto& e : embs) stepwise.extend(std::span(&e, 1));
    const auto a = once.edges();
    const auto b = stepwise.edges();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].similarity == b[i].similarity);
        CHECK(a[i].classification == b[i].classification);
    }
}

TEST_CASE("all-attractive policy has no cutoff") {
    std::vector<std::vector<double>> embs{{1, 0}, {0, 1}, {-1, 0.1}};
    SimilarityGraph graph(default_threshold_constant(), ThresholdPolicy::AllAttractive);
    graph.extend(embs);
    CHECK_FALSE(graph.effective_tau());
    for (const auto& e : graph.edges()) CHECK(e.classification == EdgeClass::Attractive);
}

TEST_CASE("graph rejects inconsistent embeddings") {
    SimilarityGraph graph;
    std::vector<std::vector<double>> first{{1, 0, 0}};
    graph.extend(first);
    std::vector<std::vector<double>> wrong{{1, 0}};
    CHECK_THROWS_AS(graph.extend(wrong), Error);
    std::vector<std::vector<double>> zero{{0, 0, 0}};
    CHECK_THROWS_AS(graph.extend(zero), Error);
    CHECK(graph.node_count() == 1);
    CHECK_FALSE(graph.effective_tau());
}
