#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "strata/core.hpp"

namespace strata {

enum class TimeUnit { Seconds, Minutes, Hours, Days, Months, Years };

// Width T of one batch. Months and years step by calendar month; an origin on
// the 29th-31st lands on the last day of shorter months.
struct TimestepSpec {
    std::optional<Instant> origin;  // defaults to the earliest timestamp in the dataset
    TimeUnit unit = TimeUnit::Months;
    int count = 3;

    void validate() const;
};

// Grammar: `<count> <unit>` with unit one of s|min|h|d|mo|y (whitespace optional).
TimestepSpec parse_timestep(std::string_view text);
std::string format_timestep(const TimestepSpec& spec);

// Start of the half-open interval [start(i), start(i+1)).
Instant batch_start(int index, const TimestepSpec& spec);
int assign_batch(Instant t, const TimestepSpec& spec);

inline double z_coordinate(int batch_index, double z_spacing = 1.0) {
    return static_cast<double>(batch_index) * z_spacing;
}

// Returns `spec` with the origin filled from the earliest record when unset.
TimestepSpec resolve_origin(TimestepSpec spec, std::span<const DataRecord> records);

// Buckets records by batch index; the result has one entry per batch from 0 to
// the last occupied one, empty batches included. Each bucket is sorted by
// (timestamp, id). `spec.origin` must be set.
std::vector<std::vector<DataRecord>> group_into_batches(std::span<const DataRecord> records,
                                                        const TimestepSpec& spec);

}  // namespace strata
