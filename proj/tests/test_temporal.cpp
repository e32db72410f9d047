#include <doctest.h>

#include "helpers.hpp"
#include "strata/temporal.hpp"

using namespace strata;
using strata::testing::text_record;

namespace {

Instant at(const char* text) { return *parse_iso8601(text); }

TimestepSpec quarterly() {
    TimestepSpec spec = parse_timestep("3 mo");
    spec.origin = at("2025-01-01T00:00:00Z");
    return spec;
}

}  // namespace

TEST_CASE("timestep grammar") {
    const auto spec = parse_timestep("3 mo");
    CHECK(spec.count == 3);
    CHECK(spec.unit == TimeUnit::Months);
    CHECK(parse_timestep("6 min").unit == TimeUnit::Minutes);
    CHECK(parse_timestep("45s").unit == TimeUnit::Seconds);
    CHECK(parse_timestep("2 h").unit == TimeUnit::Hours);
    CHECK(parse_timestep(" 10 d ").count == 10);
    CHECK(parse_timestep("1 y").unit == TimeUnit::Years);
    CHECK(format_timestep(parse_timestep("6 min")) == "6 min");
    CHECK_THROWS_AS(parse_timestep("3 weeks"), Error);
    CHECK_THROWS_AS(parse_timestep("mo"), Error);
    CHECK_THROWS_AS(parse_timestep("0 d"), Error);
}

TEST_CASE("quarterly batches") {
    const auto spec = quarterly();
    CHECK(assign_batch(at("2025-02-20T00:00:00Z"), spec) == 0);
    CHECK(assign_batch(at("2025-01-01T00:00:00Z"), spec) == 0);
    CHECK(assign_batch(at("2025-03-31T23:59:59.999Z"), spec) == 0);
    CHECK(assign_batch(at("2025-04-01T00:00:00Z"), spec) == 1);
    CHECK(assign_batch(at("2026-01-15T00:00:00Z"), spec) == 4);
    CHECK(batch_start(1, spec) == at("2025-04-01T00:00:00Z"));
    CHECK_THROWS_AS(assign_batch(at("2024-12-31T23:59:59Z"), spec), Error);
}

TEST_CASE("month arithmetic clamps to the last day") {
    TimestepSpec spec = parse_timestep("1 mo");
    spec.origin = at("2025-01-31T12:00:00Z");
    CHECK(batch_start(1, spec) == at("2025-02-28T12:00:00Z"));
    CHECK(batch_start(2, spec) == at("2025-03-31T12:00:00Z"));
    CHECK(assign_batch(at("2025-02-28T11:59:59Z"), spec) == 0);
    CHECK(assign_batch(at("2025-02-28T12:00:00Z"), spec) == 1);
    spec.origin = at("2024-02-29T00:00:00Z");
    spec.unit = TimeUnit::Years;
    CHECK(batch_start(1, spec) == at("2025-02-28T00:00:00Z"));
    CHECK(batch_start(4, spec) == at("2028-02-29T00:00:00Z"));
}

TEST_CASE("fixed-width units") {
    TimestepSpec spec = parse_timestep("6 min");
    spec.origin = at("2025-01-01T00:00:00Z");
    CHECK(assign_batch(at("2025-01-01T00:05:59.999Z"), spec) == 0);
    CHECK(assign_batch(at("2025-01-01T00:06:00Z"), spec) == 1);
    CHECK(assign_batch(at("2025-01-01T01:00:00Z"), spec) == 10);
}

TEST_CASE("assignment is monotone") {
    const auto spec = quarterly();
    Instant t = *spec.origin;
    int last = 0;
    for (int i = 0; i < 2000; ++i) {
        t += std::chrono::hours{7 * 24 + 13};
        const int b = assign_batch(t, spec);
        CHECK(b >= last);
        CHECK(batch_start(b, spec) <= t);
        CHECK(t < batch_start(b + 1, spec));
        last = b;
    }
}

TEST_CASE("z coordinates") {
    CHECK(z_coordinate(0) == 0.0);
    CHECK(z_coordinate(5) == 5.0);
    CHECK(z_coordinate(3, 0.5) == 1.5);
}

TEST_CASE("grouping keeps empty batches and sorts within each") {
    std::vector<DataRecord> records{
        text_record("c", "2025-08-01T00:00:00Z", {1, 0}),
        text_record("b", "2025-01-05T00:00:00Z", {1, 0}),
        text_record("a", "2025-01-05T00:00:00Z", {1, 0}),
        text_record("d", "2025-01-02T00:00:00Z", {1, 0}),
    };
    TimestepSpec spec = parse_timestep("3 mo");
    spec = resolve_origin(spec, records);
    CHECK(*spec.origin == at("2025-01-02T00:00:00Z"));
    const auto batches = group_into_batches(records, spec);
    REQUIRE(batches.size() == 3);
    REQUIRE(batches[0].size() == 3);
    CHECK(batches[0][0].id == "d");
    CHECK(batches[0][1].id == "a");
    CHECK(batches[0][2].id == "b");
    CHECK(batches[1].empty());
    CHECK(batches[2][0].id == "c");
}
