#include "hfmargin/marketdata.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <utility>

#include <fmt/format.h>

#include "hfmargin/error.hpp"
#include "kv.hpp"

namespace hfmargin {

namespace {

using detail::trim;

template <typename T>
std::optional<T> parse_number(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    T v{};
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end) return std::nullopt;
    return v;
}

std::optional<Timestamp> parse_timestamp(std::string_view s) {
    s = trim(s);
    if (s.size() < 19 || (s[10] != 'T' && s[10] != ' ')) return std::nullopt;
    try {
        const Date day = parse_date(s.substr(0, 10));
        const TimeOfDay tod = parse_time(s.substr(11, 8));
        std::chrono::microseconds frac{0};
        if (s.size() > 19) {
            if (s[19] != '.' || s.size() == 20 || s.size() > 26) return std::nullopt;
            auto digits = s.substr(20);
            auto v = parse_number<long>(digits);
            if (!v || *v < 0) return std::nullopt;
            long scale = 1;
            for (std::size_t i = digits.size(); i < 6; ++i) scale *= 10;
            frac = std::chrono::microseconds{*v * scale};
        }
        return Timestamp{day} + tod + frac;
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

/// Ticks grouped by calendar day, each group in timestamp order.
std::map<Date, std::vector<const Tick*>> group_by_day(const TickSeries& ticks) {
    std::map<Date, std::vector<const Tick*>> days;
    for (const auto& t : ticks.ticks) days[date_of(t.timestamp)].push_back(&t);
    for (auto& [day, group] : days) {
        std::stable_sort(group.begin(), group.end(),
                         [](const Tick* a, const Tick* b) { return a->timestamp < b->timestamp; });
    }
    return days;
}

/// Last trade at or before `when` in a time-ordered day.
std::optional<double> price_at_or_before(const std::vector<const Tick*>& day, TimeOfDay when) {
    auto it = std::upper_bound(day.begin(), day.end(), when,
                               [](TimeOfDay w, const Tick* t) { return w < time_of_day(t->timestamp); });
    // time_of_day floors to seconds; a tick at 10:00:00.5 is after a 10:00 boundary.
    while (it != day.begin()) {
        const Tick* cand = *std::prev(it);
        const auto since_midnight = cand->timestamp - date_of(cand->timestamp);
        if (since_midnight <= when) return cand->price;
        --it;
    }
    return std::nullopt;
}

}  // namespace

DeliveryMonth parse_delivery_month(std::string_view text) {
    text = trim(text);
    if (text.size() != 7 || text[4] != '-') {
        throw std::invalid_argument(fmt::format("invalid delivery month '{}'", text));
    }
    auto y = parse_number<int>(text.substr(0, 4));
    auto m = parse_number<unsigned>(text.substr(5, 2));
    if (!y || !m || *m < 1 || *m > 12) {
        throw std::invalid_argument(fmt::format("invalid delivery month '{}'", text));
    }
    return {*y, *m};
}

std::string format_delivery_month(DeliveryMonth m) { return fmt::format("{:04d}-{:02d}", m.year, m.month); }

void TradingCalendar::validate() const {
    if (session_open >= session_close) {
        throw ConfigError(fmt::format("session_open {} must precede session_close {}", format_time(session_open),
                                      format_time(session_close)));
    }
    if (session_close > std::chrono::hours{24}) throw ConfigError("session_close past midnight");
    for (const auto& d : half_days) {
        if (full_holidays.contains(d)) {
            throw ConfigError(fmt::format("{} is both a holiday and a half day", format_date(d)));
        }
    }
}

TradingCalendar parse_calendar(std::istream& in) {
    TradingCalendar cal;
    for (const auto& kv : detail::parse_key_values(in)) {
        try {
            if (kv.key == "session_open") {
                cal.session_open = parse_time(kv.value);
            } else if (kv.key == "session_close") {
                cal.session_close = parse_time(kv.value);
            } else if (kv.key == "holidays" || kv.key == "full_holidays" || kv.key == "holiday") {
                for (const auto& d : detail::split_list(kv.value)) cal.full_holidays.insert(parse_date(d));
            } else if (kv.key == "half_days" || kv.key == "half_day") {
                for (const auto& d : detail::split_list(kv.value)) cal.half_days.insert(parse_date(d));
            } else {
                throw ConfigError(fmt::format("line {}: unknown calendar key '{}'", kv.line, kv.key));
            }
        } catch (const std::invalid_argument& e) {
            throw ConfigError(fmt::format("line {}: {}", kv.line, e.what()));
        }
    }
    cal.validate();
    return cal;
}

TradingCalendar load_calendar(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open calendar '" + path + "'");
    return parse_calendar(in);
}

TickSeries parse_ticks(std::istream& in) {
    TickSeries out;
    std::map<DeliveryMonth, Timestamp> last_seen;
    std::string line;
    std::size_t lineno = 0;
    bool first_row = true;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string_view view = trim(line);
        if (view.empty() || view.front() == '#') continue;
        if (std::exchange(first_row, false) && !std::isdigit(static_cast<unsigned char>(view.front()))) {
            continue;  // header
        }

        const auto fields = split_csv(view);
        if (fields.size() != 4) {
            throw ParseError(lineno, fmt::format("expected 4 fields, found {}", fields.size()));
        }
        Tick tick;
        const auto ts = parse_timestamp(fields[0]);
        if (!ts) throw ParseError(lineno, fmt::format("malformed timestamp '{}'", trim(fields[0])));
        tick.timestamp = *ts;
        const auto price = parse_number<double>(fields[1]);
        if (!price || !std::isfinite(*price) || *price <= 0.0) {
            throw ParseError(lineno, fmt::format("malformed price '{}'", trim(fields[1])));
        }
        tick.price = *price;
        const auto volume = parse_number<std::int64_t>(fields[2]);
        if (!volume || *volume < 0) {
            throw ParseError(lineno, fmt::format("malformed volume '{}'", trim(fields[2])));
        }
        tick.volume = *volume;
        try {
            tick.delivery = parse_delivery_month(fields[3]);
        } catch (const std::invalid_argument& e) {
            throw ParseError(lineno, e.what());
        }
        auto [it, inserted] = last_seen.try_emplace(tick.delivery, tick.timestamp);
        if (!inserted) {
            if (tick.timestamp < it->second) {
                throw ParseError(lineno, fmt::format("timestamp goes backwards within delivery month {}",
                                                     format_delivery_month(tick.delivery)));
            }
            it->second = tick.timestamp;
        }
        out.ticks.push_back(tick);
        ++out.rows_read;
    }
    return out;
}

TickSeries load_ticks(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open tick file '" + path + "'");
    return parse_ticks(in);
}

void write_ticks(std::ostream& out, const TickSeries& series) {
    out << "timestamp,price,volume,delivery_month\n";
    for (const auto& t : series.ticks) {
        out << fmt::format("{},{:.4f},{},{}\n", format_timestamp(t.timestamp), t.price, t.volume,
                           format_delivery_month(t.delivery));
    }
}

TickSeries filter_calendar(const TickSeries& ticks, const TradingCalendar& cal) {
    TickSeries out;
    out.rows_read = ticks.rows_read;
    out.warnings = ticks.warnings;
    const auto open = std::chrono::duration_cast<std::chrono::microseconds>(cal.session_open);
    const auto close = std::chrono::duration_cast<std::chrono::microseconds>(cal.session_close);
    for (const auto& t : ticks.ticks) {
        const Date day = date_of(t.timestamp);
        if (cal.full_holidays.contains(day) || cal.half_days.contains(day)) continue;
        const auto since = t.timestamp - day;
        if (since < open || since > close) continue;
        out.ticks.push_back(t);
    }
    return out;
}

TickSeries roll_contracts(const TickSeries& ticks) {
    TickSeries out;
    out.rows_read = ticks.rows_read;
    out.warnings = ticks.warnings;
    if (ticks.empty()) return out;

    std::map<Date, std::map<DeliveryMonth, std::int64_t>> volume;
    std::map<DeliveryMonth, Date> last_day;
    for (const auto& t : ticks.ticks) {
        const Date d = date_of(t.timestamp);
        volume[d][t.delivery] += t.volume;
        auto [it, inserted] = last_day.try_emplace(t.delivery, d);
        if (!inserted && it->second < d) it->second = d;
    }
    if (last_day.size() == 1) {
        out.ticks = ticks.ticks;
        return out;
    }

    auto next_month = [&](DeliveryMonth m) -> std::optional<DeliveryMonth> {
        auto it = last_day.upper_bound(m);
        if (it == last_day.end()) return std::nullopt;
        return it->first;
    };

    std::map<Date, DeliveryMonth> active_on;
    DeliveryMonth active = volume.begin()->second.begin()->first;
    for (const auto& [day, by_month] : volume) {
        if (!by_month.contains(active)) {
            if (last_day.at(active) < day) {
                // Contract expired without a crossover: move to the next month trading today.
                auto it = by_month.upper_bound(active);
                if (it == by_month.end()) {
                    out.warnings.push_back(fmt::format("{}: no later delivery month trades; day skipped",
                                                       format_date(day)));
                    continue;
                }
                out.warnings.push_back(fmt::format("{}: {} expired without volume crossover; rolled to {}",
                                                   format_date(day), format_delivery_month(active),
                                                   format_delivery_month(it->first)));
                active = it->first;
            } else {
                out.warnings.push_back(fmt::format("{}: no ticks in active month {}; day skipped",
                                                   format_date(day), format_delivery_month(active)));
                continue;
            }
        }
        active_on.emplace(day, active);
        if (const auto next = next_month(active)) {
            const auto vol_next = by_month.contains(*next) ? by_month.at(*next) : 0;
            if (vol_next > by_month.at(active)) active = *next;
        }
    }

    for (const auto& t : ticks.ticks) {
        const auto it = active_on.find(date_of(t.timestamp));
        if (it != active_on.end() && it->second == t.delivery) out.ticks.push_back(t);
    }
    std::stable_sort(out.ticks.begin(), out.ticks.end(),
                     [](const Tick& a, const Tick& b) { return a.timestamp < b.timestamp; });
    return out;
}

ReturnSeries resample_anchored_daily(const TickSeries& ticks, TimeOfDay anchor) {
    ReturnSeries out;
    out.frequency = Frequency::Daily;
    out.anchor = anchor;
    const auto days = group_by_day(ticks);
    if (days.size() < 2) {
        throw InsufficientDataError(
            fmt::format("anchored daily returns need at least 2 trading days, found {}", days.size()));
    }
    std::vector<std::optional<double>> prices;
    prices.reserve(days.size());
    for (const auto& [day, group] : days) {
        out.dates.push_back(day);
        prices.push_back(price_at_or_before(group, anchor));
    }
    for (std::size_t t = 1; t < prices.size(); ++t) {
        if (!prices[t] || !prices[t - 1]) {
            out.warnings.push_back(fmt::format("{}: no trade at or before {} on {}; pair omitted",
                                               format_date(out.dates[t]), format_time(anchor),
                                               format_date(out.dates[prices[t] ? t - 1 : t])));
            continue;
        }
        out.values.push_back(100.0 * (std::log(*prices[t]) - std::log(*prices[t - 1])));
        out.day_index.push_back(t);
        out.boundary.push_back(anchor);
    }
    return out;
}

std::chrono::seconds interval_of(Frequency freq) {
    switch (freq) {
        case Frequency::FiveMinute: return std::chrono::minutes{5};
        case Frequency::OneHour: return std::chrono::hours{1};
        case Frequency::Daily: break;
    }
    throw std::invalid_argument("daily frequency has no intraday interval");
}

std::size_t intervals_per_day(const TradingCalendar& cal, std::chrono::seconds interval) {
    if (interval.count() <= 0) throw std::invalid_argument("interval must be positive");
    return static_cast<std::size_t>((cal.session_close - cal.session_open) / interval);
}

ReturnSeries resample_intraday(const TickSeries& ticks, std::chrono::seconds interval, const TradingCalendar& cal) {
    cal.validate();
    if (interval.count() <= 0 || std::chrono::seconds{std::chrono::days{1}}.count() % interval.count() != 0) {
        throw std::invalid_argument("interval must be a positive divisor of one day");
    }
    const std::size_t per_day = intervals_per_day(cal, interval);
    if (per_day == 0) throw std::invalid_argument("interval longer than the trading session");

    ReturnSeries out;
    out.frequency = interval == std::chrono::minutes{5}  ? Frequency::FiveMinute
                    : interval == std::chrono::hours{1} ? Frequency::OneHour
                                                        : Frequency::Daily;
    const auto days = group_by_day(ticks);
    std::size_t day_idx = 0;
    for (const auto& [day, group] : days) {
        out.dates.push_back(day);
        std::vector<std::optional<double>> grid(per_day + 1);
        for (std::size_t k = 0; k <= per_day; ++k) {
            grid[k] = price_at_or_before(group, cal.session_open + static_cast<long>(k) * interval);
        }
        std::size_t dropped = 0;
        for (std::size_t k = 1; k <= per_day; ++k) {
            if (!grid[k] || !grid[k - 1]) {
                ++dropped;
                continue;
            }
            out.values.push_back(100.0 * (std::log(*grid[k]) - std::log(*grid[k - 1])));
            out.day_index.push_back(day_idx);
            out.boundary.push_back(cal.session_open + static_cast<long>(k) * interval);
        }
        if (dropped == per_day) {
            out.warnings.push_back(fmt::format("{}: no ticks on the session grid; day skipped", format_date(day)));
        } else if (dropped > 0) {
            out.warnings.push_back(
                fmt::format("{}: {} interval(s) without a prior trade dropped", format_date(day), dropped));
        }
        ++day_idx;
    }
    return out;
}

void write_returns(std::ostream& out, const ReturnSeries& series) {
    out << "day_index,boundary_time,return_pct\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        out << fmt::format("{},{},{:.10f}\n", series.day_index[i], format_time(series.boundary[i]),
                           series.values[i]);
    }
}

ReturnSeries parse_returns(std::istream& in, Frequency freq, TimeOfDay anchor) {
    ReturnSeries out;
    out.frequency = freq;
    out.anchor = anchor;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string_view view = trim(line);
        if (view.empty() || view.front() == '#') continue;
        if (!std::isdigit(static_cast<unsigned char>(view.front()))) continue;
        const auto fields = split_csv(view);
        if (fields.size() != 3) throw ParseError(lineno, "expected day_index,boundary_time,return_pct");
        const auto idx = parse_number<std::size_t>(fields[0]);
        const auto value = parse_number<double>(fields[2]);
        if (!idx || !value || !std::isfinite(*value)) throw ParseError(lineno, "malformed return row");
        try {
            out.boundary.push_back(parse_time(trim(fields[1])));
        } catch (const std::invalid_argument& e) {
            throw ParseError(lineno, e.what());
        }
        out.day_index.push_back(*idx);
        out.values.push_back(*value);
    }
    return out;
}

}  // namespace hfmargin
