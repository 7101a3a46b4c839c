#include "pdm/timestamp.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <cstdio>

namespace pdm {

namespace {

constexpr std::array<std::string_view, kDaysPerWeek> kWeekdayNames = {
    "Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"};

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

template <typename T>
bool parse_fixed(std::string_view s, std::size_t pos, std::size_t len, T& out) {
    if (pos + len > s.size()) return false;
    for (std::size_t i = pos; i < pos + len; ++i)
        if (s[i] < '0' || s[i] > '9') return false;
    auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, out);
    return ec == std::errc() && ptr == s.data() + pos + len;
}

}  // namespace

std::string_view weekday_name(Weekday d) { return kWeekdayNames[static_cast<std::size_t>(d)]; }

std::optional<Weekday> parse_weekday(std::string_view s) {
    for (std::size_t i = 0; i < kWeekdayNames.size(); ++i)
        if (kWeekdayNames[i] == s) return static_cast<Weekday>(i);
    return std::nullopt;
}

std::optional<Timestamp> Timestamp::from_civil(int year, unsigned month, unsigned day,
                                               unsigned hour) {
    using namespace std::chrono;
    const year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                             std::chrono::day{day}};
    if (!ymd.ok() || hour > 23) return std::nullopt;
    const auto days = sys_days{ymd}.time_since_epoch().count();
    return Timestamp(static_cast<std::int64_t>(days) * 24 + hour);
}

Weekday Timestamp::weekday() const {
    using namespace std::chrono;
    const sys_days d{days{floor_div(hours_, 24)}};
    // c_encoding: Sunday = 0.
    const unsigned c = std::chrono::weekday{d}.c_encoding();
    return static_cast<Weekday>((c + 6) % 7);
}

std::string Timestamp::to_string() const { return format_datetime(to_raw(*this)); }

std::optional<RawDateTime> parse_datetime(std::string_view text) {
    // YYYY-MM-DD HH:MM:SS
    if (text.size() != 19 || text[4] != '-' || text[7] != '-' || text[10] != ' ' ||
        text[13] != ':' || text[16] != ':')
        return std::nullopt;
    int year = 0;
    unsigned month = 0, day = 0, hour = 0, minute = 0, second = 0;
    if (!parse_fixed(text, 0, 4, year) || !parse_fixed(text, 5, 2, month) ||
        !parse_fixed(text, 8, 2, day) || !parse_fixed(text, 11, 2, hour) ||
        !parse_fixed(text, 14, 2, minute) || !parse_fixed(text, 17, 2, second))
        return std::nullopt;
    if (minute > 59 || second > 59) return std::nullopt;
    const auto base = Timestamp::from_civil(year, month, day, hour);
    if (!base) return std::nullopt;
    return RawDateTime{base->hours() * 3600 + minute * 60 + second};
}

std::string format_datetime(RawDateTime t) {
    using namespace std::chrono;
    const std::int64_t day_index = floor_div(t.seconds_since_epoch, 86400);
    const std::int64_t sod = t.seconds_since_epoch - day_index * 86400;
    const year_month_day ymd{sys_days{days{day_index}}};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u %02d:%02d:%02d", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(sod / 3600), static_cast<int>(sod / 60 % 60),
                  static_cast<int>(sod % 60));
    return buf;
}

Timestamp round_to_hour(RawDateTime raw) {
    return Timestamp::from_hours(floor_div(raw.seconds_since_epoch + 1800, 3600));
}

}  // namespace pdm
