#include "strata/temporal.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace strata {

namespace {

using namespace std::chrono;

milliseconds fixed_width(const TimestepSpec& spec) {
    switch (spec.unit) {
        case TimeUnit::Seconds: return seconds{spec.count};
        case TimeUnit::Minutes: return minutes{spec.count};
        case TimeUnit::Hours: return hours{spec.count};
        case TimeUnit::Days: return days{spec.count};
        default: return milliseconds{0};
    }
}

bool calendar_unit(TimeUnit unit) { return unit == TimeUnit::Months || unit == TimeUnit::Years; }

int months_per_batch(const TimestepSpec& spec) {
    return spec.unit == TimeUnit::Years ? spec.count * 12 : spec.count;
}

Instant add_months(Instant origin, long long months_to_add) {
    const auto day_point = floor<days>(origin);
    const auto time_of_day = origin - day_point;
    const year_month_day ymd{day_point};
    const long long total = static_cast<long long>(static_cast<int>(ymd.year())) * 12 +
                            (static_cast<unsigned>(ymd.month()) - 1) + months_to_add;
    const long long y = total >= 0 ? total / 12 : (total - 11) / 12;
    const unsigned m = static_cast<unsigned>(total - y * 12) + 1;
    const year_month_day_last last{year{static_cast<int>(y)}, month_day_last{month{m}}};
    const day d = std::min(ymd.day(), last.day());
    return time_point_cast<milliseconds>(sys_days{year_month_day{year{static_cast<int>(y)}, month{m}, d}}) +
           time_of_day;
}

long long floor_div(long long a, long long b) {
    long long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

}  // namespace

void TimestepSpec::validate() const {
    if (count < 1) throw Error(ErrorCode::InvalidConfig, "timestep count must be at least 1");
}

TimestepSpec parse_timestep(std::string_view text) {
    std::size_t pos = 0;
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    int count = 0;
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), count);
    if (ec != std::errc{}) throw Error(ErrorCode::InvalidConfig, "timestep '" + std::string(text) + "' lacks a count");
    std::string unit(ptr, text.data() + text.size());
    unit.erase(std::remove_if(unit.begin(), unit.end(), [](unsigned char c) { return std::isspace(c); }),
               unit.end());

    TimestepSpec spec;
    spec.count = count;
    if (unit == "s") spec.unit = TimeUnit::Seconds;
    else if (unit == "min") spec.unit = TimeUnit::Minutes;
    else if (unit == "h") spec.unit = TimeUnit::Hours;
    else if (unit == "d") spec.unit = TimeUnit::Days;
    else if (unit == "mo") spec.unit = TimeUnit::Months;
    else if (unit == "y") spec.unit = TimeUnit::Years;
    else throw Error(ErrorCode::InvalidConfig, "unknown timestep unit '" + unit + "'");
    spec.validate();
    return spec;
}

std::string format_timestep(const TimestepSpec& spec) {
    const char* unit = "mo";
    switch (spec.unit) {
        case TimeUnit::Seconds: unit = "s"; break;
        case TimeUnit::Minutes: unit = "min"; break;
        case TimeUnit::Hours: unit = "h"; break;
        case TimeUnit::Days: unit = "d"; break;
        case TimeUnit::Months: unit = "mo"; break;
        case TimeUnit::Years: unit = "y"; break;
    }
    return std::to_string(spec.count) + " " + unit;
}

Instant batch_start(int index, const TimestepSpec& spec) {
    if (!spec.origin) throw Error(ErrorCode::InvalidConfig, "timestep origin is not set");
    if (calendar_unit(spec.unit))
        return add_months(*spec.origin, static_cast<long long>(index) * months_per_batch(spec));
    return *spec.origin + fixed_width(spec) * index;
}

int assign_batch(Instant t, const TimestepSpec& spec) {
    if (!spec.origin) throw Error(ErrorCode::InvalidConfig, "timestep origin is not set");
    spec.validate();
    if (t < *spec.origin) throw Error(ErrorCode::BeforeOrigin, format_iso8601(t));

    if (!calendar_unit(spec.unit)) {
        const auto elapsed = (t - *spec.origin).count();
        return static_cast<int>(elapsed / fixed_width(spec).count());
    }

    const year_month_day from{floor<days>(*spec.origin)};
    const year_month_day to{floor<days>(t)};
    const long long month_gap = (static_cast<int>(to.year()) - static_cast<int>(from.year())) * 12LL +
                                static_cast<int>(static_cast<unsigned>(to.month())) -
                                static_cast<int>(static_cast<unsigned>(from.month()));
    int index = static_cast<int>(std::max(0LL, floor_div(month_gap, months_per_batch(spec))));
    while (batch_start(index + 1, spec) <= t) ++index;
    while (index > 0 && batch_start(index, spec) > t) --index;
    return index;
}

TimestepSpec resolve_origin(TimestepSpec spec, std::span<const DataRecord> records) {
    if (spec.origin || records.empty()) return spec;
    spec.origin = std::min_element(records.begin(), records.end(), [](const auto& a, const auto& b) {
                      return a.timestamp < b.timestamp;
                  })->timestamp;
    return spec;
}

std::vector<std::vector<DataRecord>> group_into_batches(std::span<const DataRecord> records,
                                                        const TimestepSpec& spec) {
    std::vector<std::vector<DataRecord>> batches;
    for (const auto& r : records) {
        const int b = assign_batch(r.timestamp, spec);
        if (static_cast<std::size_t>(b) >= batches.size()) batches.resize(static_cast<std::size_t>(b) + 1);
        batches[static_cast<std::size_t>(b)].push_back(r);
    }
    for (auto& batch : batches)
        std::stable_sort(batch.begin(), batch.end(), [](const DataRecord& a, const DataRecord& b) {
            return a.timestamp != b.timestamp ? a.timestamp < b.timestamp : a.id < b.id;
        });
    return batches;
}

}  // namespace strata
