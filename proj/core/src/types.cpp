#include "hfmargin/types.hpp"

#include <charconv>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

#include "hfmargin/error.hpp"

namespace hfmargin {

namespace {

int parse_int(std::string_view text, std::string_view what) {
    int v = 0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end || text.empty()) {
        throw std::invalid_argument(fmt::format("invalid {} '{}'", what, text));
    }
    return v;
}

}  // namespace

std::string_view to_string(Side side) noexcept { return side == Side::Long ? "long" : "short"; }

std::string_view to_string(Frequency freq) noexcept {
    switch (freq) {
        case Frequency::Daily: return "1d";
        case Frequency::OneHour: return "1h";
        case Frequency::FiveMinute: return "5m";
    }
    return "?";
}

Side parse_side(std::string_view text) {
    if (text == "long") return Side::Long;
    if (text == "short") return Side::Short;
    throw std::invalid_argument(fmt::format("unknown side '{}'", text));
}

Frequency parse_frequency(std::string_view text) {
    if (text == "1d" || text == "daily") return Frequency::Daily;
    if (text == "1h" || text == "1-hour" || text == "hourly") return Frequency::OneHour;
    if (text == "5m" || text == "5-minute") return Frequency::FiveMinute;
    throw std::invalid_argument(fmt::format("unknown frequency '{}'", text));
}

Date date_of(Timestamp ts) noexcept { return std::chrono::floor<std::chrono::days>(ts); }

TimeOfDay time_of_day(Timestamp ts) noexcept {
    return std::chrono::floor<std::chrono::seconds>(ts - date_of(ts));
}

std::string format_date(Date d) {
    const std::chrono::year_month_day ymd{d};
    return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(ymd.year()),
                       static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
}

Date parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        throw std::invalid_argument(fmt::format("invalid date '{}'", text));
    }
    const int y = parse_int(text.substr(0, 4), "year");
    const int m = parse_int(text.substr(5, 2), "month");
    const int d = parse_int(text.substr(8, 2), "day");
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                          std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) throw std::invalid_argument(fmt::format("invalid date '{}'", text));
    return std::chrono::sys_days{ymd};
}

std::string format_time(TimeOfDay t) {
    const auto total = t.count();
    const auto h = total / 3600;
    const auto m = (total / 60) % 60;
    const auto s = total % 60;
    if (s != 0) return fmt::format("{:02d}:{:02d}:{:02d}", h, m, s);
    return fmt::format("{:02d}:{:02d}", h, m);
}

TimeOfDay parse_time(std::string_view text) {
    if (text.size() != 5 && text.size() != 8) {
        throw std::invalid_argument(fmt::format("invalid time '{}'", text));
    }
    if (text[2] != ':' || (text.size() == 8 && text[5] != ':')) {
        throw std::invalid_argument(fmt::format("invalid time '{}'", text));
    }
    const int h = parse_int(text.substr(0, 2), "hour");
    const int m = parse_int(text.substr(3, 2), "minute");
    const int s = text.size() == 8 ? parse_int(text.substr(6, 2), "second") : 0;
    if (h > 24 || m > 59 || s > 59 || (h == 24 && (m != 0 || s != 0))) {
        throw std::invalid_argument(fmt::format("invalid time '{}'", text));
    }
    return std::chrono::hours{h} + std::chrono::minutes{m} + std::chrono::seconds{s};
}

std::string format_timestamp(Timestamp ts) {
    const auto day = date_of(ts);
    const auto since = ts - day;
    const auto secs = std::chrono::floor<std::chrono::seconds>(since);
    const auto micros = (since - secs).count();
    const auto total = secs.count();
    auto out = fmt::format("{}T{:02d}:{:02d}:{:02d}", format_date(day), total / 3600, (total / 60) % 60,
                           total % 60);
    if (micros != 0) out += fmt::format(".{:06d}", micros);
    return out;
}

std::string ReturnSeries::label() const {
    if (frequency == Frequency::Daily) return "daily@" + format_time(anchor);
    return std::string(to_string(frequency));
}

ReturnSeries make_series(std::vector<double> values, Frequency freq) {
    ReturnSeries s;
    s.frequency = freq;
    s.day_index.resize(values.size());
    s.boundary.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) s.day_index[i] = i;
    s.values = std::move(values);
    return s;
}

}  // namespace hfmargin
