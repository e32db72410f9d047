#include <doctest.h>

#include "strata/clustering.hpp"

using namespace strata;

namespace {

TimestepSnapshot previous_snapshot() {
    TimestepSnapshot prev;
    prev.batch_index = 0;
    ClusterRecord a;
    a.cluster_id = 10;
    a.member_ids = {"a1", "a2", "a3", "a4"};
    ClusterRecord b;
    b.cluster_id = 11;
    b.member_ids = {"b1", "b2", "b3"};
    prev.clusters = {a, b};
    prev.misc_ids = {"m1", "m2", "m3"};
    return prev;
}

}  // namespace

TEST_CASE("identical clustering parents each cluster to its predecessor") {
    const auto prev = previous_snapshot();
    const std::vector<std::vector<std::string>> curr{{"a1", "a2", "a3", "a4"}, {"b1", "b2", "b3"}};
    const auto parents = assign_parents(prev, curr);
    CHECK(parents[0] == 10);
    CHECK(parents[1] == 11);
}

TEST_CASE("a split yields two children of one parent") {
    const auto prev = previous_snapshot();
    const std::vector<std::vector<std::string>> curr{{"a1", "a2", "n1", "n2"}, {"a3", "a4", "n3"}};
    const auto parents = assign_parents(prev, curr);
    CHECK(parents[0] == 10);
    CHECK(parents[1] == 10);
}

TEST_CASE("a cluster of new records has no parent") {
    const auto prev = previous_snapshot();
    const std::vector<std::vector<std::string>> curr{{"n1", "n2", "n3", "n4", "n5"}};
    CHECK_FALSE(assign_parents(prev, curr)[0]);
}

TEST_CASE("a noise plurality yields no parent") {
    const auto prev = previous_snapshot();
    const std::vector<std::vector<std::string>> more_noise{{"m1", "m2", "a1", "n1"}};
    CHECK_FALSE(assign_parents(prev, more_noise)[0]);
    const std::vector<std::vector<std::string>> tie{{"m1", "a1", "n1"}};
    CHECK(assign_parents(prev, tie)[0] == 10);
}

TEST_CASE("ties between clusters go to the lower id") {
    const auto prev = previous_snapshot();
    const std::vector<std::vector<std::string>> curr{{"b1", "b2", "a1", "a2"}};
    CHECK(assign_parents(prev, curr)[0] == 10);
}

TEST_CASE("minimum shared members") {
    const auto prev = previous_snapshot();
    ClusteringConfig cfg;
    cfg.min_shared_members = 2;
    const std::vector<std::vector<std::string>> curr{{"a1", "n1", "n2", "n3"}, {"b1", "b2", "n4"}};
    const auto parents = assign_parents(prev, curr, cfg);
    CHECK_FALSE(parents[0]);
    CHECK(parents[1] == 11);
}
