#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "hfmargin/types.hpp"

namespace hfmargin {

/// Contract delivery month, e.g. 2000-03.
struct DeliveryMonth {
    int year = 0;
    unsigned month = 0;

    auto operator<=>(const DeliveryMonth&) const = default;
};

[[nodiscard]] DeliveryMonth parse_delivery_month(std::string_view text);
[[nodiscard]] std::string format_delivery_month(DeliveryMonth m);

struct Tick {
    Timestamp timestamp;
    double price = 0.0;  ///< index points, > 0
    std::int64_t volume = 0;
    DeliveryMonth delivery;
};

struct TickSeries {
    std::vector<Tick> ticks;
    std::size_t rows_read = 0;
    std::vector<std::string> warnings;

    [[nodiscard]] std::size_t size() const noexcept { return ticks.size(); }
    [[nodiscard]] bool empty() const noexcept { return ticks.empty(); }
};

/// Holidays, half days and the session window. Ticks on either kind of
/// special day are dropped entirely.
struct TradingCalendar {
    std::set<Date> full_holidays;
    std::set<Date> half_days;
    TimeOfDay session_open = std::chrono::hours{8};
    TimeOfDay session_close = std::chrono::hours{17} + std::chrono::minutes{25};

    /// Throws ConfigError when open >= close or the two date sets overlap.
    void validate() const;
};

/// Parses the declarative calendar file:
///
///     session_open  = 08:00
///     session_close = 17:25
///     holidays      = 2000-12-25, 2000-12-26
///     half_days     = 2000-12-29
///
/// Keys may repeat; list values accumulate. `#` starts a comment.
[[nodiscard]] TradingCalendar parse_calendar(std::istream& in);
[[nodiscard]] TradingCalendar load_calendar(const std::string& path);

/// Reads tick CSV rows `timestamp,price,volume,delivery_month`. Lines
/// starting with `#` are comments; a first row that does not start with a
/// digit is a header.
[[nodiscard]] TickSeries parse_ticks(std::istream& in);
[[nodiscard]] TickSeries load_ticks(const std::string& path);
void write_ticks(std::ostream& out, const TickSeries& series);

[[nodiscard]] TickSeries filter_calendar(const TickSeries& ticks, const TradingCalendar& cal);

/// Stitches several delivery months into one series by daily volume
/// crossover: the next month becomes active the day after its summed daily
/// volume first exceeds the active month's.
[[nodiscard]] TickSeries roll_contracts(const TickSeries& ticks);

/// Day-over-day returns measured at a fixed time of day, using the last
/// trade at or before `anchor` on each trading day.
[[nodiscard]] ReturnSeries resample_anchored_daily(const TickSeries& ticks, TimeOfDay anchor);

/// Returns on the per-day grid open, open+interval, ... <= close.
[[nodiscard]] ReturnSeries resample_intraday(const TickSeries& ticks,
                                             std::chrono::seconds interval,
                                             const TradingCalendar& cal);

[[nodiscard]] std::chrono::seconds interval_of(Frequency freq);

/// Number of grid intervals in a complete session day.
[[nodiscard]] std::size_t intervals_per_day(const TradingCalendar& cal, std::chrono::seconds interval);

/// CSV with columns day_index,boundary_time,return_pct.
void write_returns(std::ostream& out, const ReturnSeries& series);
[[nodiscard]] ReturnSeries parse_returns(std::istream& in, Frequency freq, TimeOfDay anchor = {});

}  // namespace hfmargin
