#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace pdm {

/// Calendar date-time with one-second resolution, as it appears in raw CSV
/// files before hour rounding. Timezone-naive.
struct RawDateTime {
    std::int64_t seconds_since_epoch = 0;

    friend auto operator<=>(const RawDateTime&, const RawDateTime&) = default;
};

enum class Weekday : std::uint8_t { Mon = 0, Tue, Wed, Thu, Fri, Sat, Sun };

inline constexpr int kDaysPerWeek = 7;

std::string_view weekday_name(Weekday d);
std::optional<Weekday> parse_weekday(std::string_view s);

/// A point on the hourly grid, stored as whole hours since 1970-01-01 00:00.
/// Minutes and seconds are zero by construction.
class Timestamp {
public:
    constexpr Timestamp() = default;
    static constexpr Timestamp from_hours(std::int64_t h) { return Timestamp(h); }

    /// Builds a timestamp from calendar fields; returns nullopt for invalid
    /// dates or if minute/second are not zero.
    static std::optional<Timestamp> from_civil(int year, unsigned month, unsigned day,
                                               unsigned hour);

    constexpr std::int64_t hours() const { return hours_; }

    constexpr Timestamp plus_hours(std::int64_t h) const { return Timestamp(hours_ + h); }
    constexpr std::int64_t hours_until(Timestamp later) const { return later.hours_ - hours_; }

    Weekday weekday() const;

    /// `YYYY-MM-DD HH:00:00`
    std::string to_string() const;

    friend constexpr auto operator<=>(const Timestamp&, const Timestamp&) = default;

private:
    constexpr explicit Timestamp(std::int64_t h) : hours_(h) {}
    std::int64_t hours_ = 0;
};

/// Parses `YYYY-MM-DD HH:MM:SS`. Returns nullopt on any malformed or
/// out-of-range field.
std::optional<RawDateTime> parse_datetime(std::string_view text);

std::string format_datetime(RawDateTime t);

/// Nearest whole hour; exactly half past (mm:ss = 30:00) rounds up.
Timestamp round_to_hour(RawDateTime raw);

inline RawDateTime to_raw(Timestamp t) { return RawDateTime{t.hours() * 3600}; }

}  // namespace pdm
