#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hfmargin {

/// Position side. A long position loses on falling prices (left tail),
/// a short position on rising prices (right tail).
enum class Side { Long, Short };

enum class Frequency { Daily, OneHour, FiveMinute };

using Timestamp = std::chrono::sys_time<std::chrono::microseconds>;
using Date = std::chrono::sys_days;
/// Offset from midnight.
using TimeOfDay = std::chrono::seconds;

[[nodiscard]] std::string_view to_string(Side side) noexcept;
[[nodiscard]] std::string_view to_string(Frequency freq) noexcept;
[[nodiscard]] Side parse_side(std::string_view text);
[[nodiscard]] Frequency parse_frequency(std::string_view text);

[[nodiscard]] Date date_of(Timestamp ts) noexcept;
[[nodiscard]] TimeOfDay time_of_day(Timestamp ts) noexcept;

/// "YYYY-MM-DD"
[[nodiscard]] std::string format_date(Date d);
[[nodiscard]] Date parse_date(std::string_view text);
/// "HH:MM", or "HH:MM:SS" when seconds are non-zero.
[[nodiscard]] std::string format_time(TimeOfDay t);
/// Accepts "HH:MM" and "HH:MM:SS".
[[nodiscard]] TimeOfDay parse_time(std::string_view text);
/// "YYYY-MM-DDTHH:MM:SS[.ffffff]"
[[nodiscard]] std::string format_timestamp(Timestamp ts);

/// Log-returns in percent (100 x log-difference) at one sampling frequency.
///
/// Daily series carry a single anchor time; intraday series carry the
/// boundary time each value ends at. `day_index[i]` indexes `dates`.
struct ReturnSeries {
    Frequency frequency = Frequency::Daily;
    TimeOfDay anchor{0};
    std::vector<double> values;
    std::vector<std::size_t> day_index;
    std::vector<TimeOfDay> boundary;
    std::vector<Date> dates;
    std::vector<std::string> warnings;

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
    [[nodiscard]] bool empty() const noexcept { return values.empty(); }
    /// "daily@09:00", "1h", "5m"
    [[nodiscard]] std::string label() const;
};

/// Wraps a bare vector of values as a daily series (no calendar metadata).
[[nodiscard]] ReturnSeries make_series(std::vector<double> values,
                                       Frequency freq = Frequency::Daily);

}  // namespace hfmargin
