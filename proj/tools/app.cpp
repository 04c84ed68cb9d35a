#include "app.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "hfmargin/descstats.hpp"
#include "hfmargin/error.hpp"
#include "hfmargin/garch.hpp"
#include "hfmargin/marketdata.hpp"
#include "hfmargin/report.hpp"
#include "hfmargin/tails.hpp"

namespace hfmargin::cli {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

constexpr const char* kCommands[] = {"ingest", "stats", "tails", "garch", "margins", "compare", "monitor", "synth"};

/// Option values as typed on the command line or in the config file.
struct RawOptions {
    std::string input;
    std::string calendar;
    std::string out = ".";
    std::vector<std::string> anchors{"09:00", "10:00", "11:00", "12:00", "13:00",
                                     "14:00", "15:00", "16:00", "17:00"};
    std::vector<std::string> frequencies{"5m", "1h", "1d"};
    std::vector<std::string> coverage{"0.95", "0.99", "0.996", "0.998"};
    std::vector<std::string> models{"gaussian", "evt", "historical", "garch"};
    std::string scaling = "calendar";
    std::uint64_t seed = 20000101;
    std::size_t ks_reps = kDefaultKsReps;
    std::size_t lb_lags = 20;
    std::size_t eta = 0;
    std::size_t garch_iters = 500;
    double threshold = kDefaultCallThreshold;
    double margin_long = 0.0;
    double margin_short = 0.0;

    std::string synth_kind = "tick_walk";
    std::size_t synth_length = 1000;
    double synth_mu = 0.0;
    double synth_sigma = 1.0;
    double synth_dof = 0.0;
    double synth_alpha = 3.0;
    double synth_scale = 1.0;
    double synth_alpha0 = 0.01;
    double synth_alpha1 = 0.01;
    double synth_beta1 = 0.96;
    std::size_t synth_burn_in = 1000;
    std::size_t synth_days = 250;
    std::string synth_start_date = "2000-01-04";
    double synth_start_price = 6500.0;
    double synth_sigma_step = 0.11;
    std::size_t synth_roll_day = 50;
    long synth_step = 300;
};

struct Flags {
    CLI::Option* margin_long = nullptr;
    CLI::Option* margin_short = nullptr;
    CLI::Option* synth_dof = nullptr;
};

/// Registers `--name` plus an underscore alias so config files can use
/// `key_name = value`.
template <typename T>
CLI::Option* add(CLI::App& app, const std::string& name, T& var, const std::string& help) {
    std::string names = "--" + name;
    std::string under = name;
    std::replace(under.begin(), under.end(), '-', '_');
    if (under != name) names += ",--" + under;
    auto* opt = app.add_option(names, var, help);
    if constexpr (!std::is_same_v<T, std::vector<std::string>>) opt->capture_default_str();
    return opt;
}

template <typename T>
CLI::Option* add_list(CLI::App& app, const std::string& name, T& var, const std::string& help) {
    return add(app, name, var, help)->delimiter(',');
}

void build_app(CLI::App& app, RawOptions& raw, Flags& flags) {
    app.set_config("--config", "", "Flat key = value config file; flags override it");
    app.allow_config_extras(false);
    app.require_subcommand(1, 1);

    add(app, "input", raw.input, "Tick CSV (timestamp,price,volume,delivery_month)");
    add(app, "calendar", raw.calendar, "Trading calendar file");
    add(app, "out", raw.out, "Output directory");
    add_list(app, "anchors", raw.anchors, "Daily anchor times HH:MM");
    add_list(app, "frequencies", raw.frequencies, "Series frequencies: 5m, 1h, 1d");
    add_list(app, "coverage", raw.coverage, "Coverage levels, strictly increasing in (0.5, 1)");
    add_list(app, "models", raw.models, "Margin models: gaussian, evt, historical, garch");
    add(app, "scaling", raw.scaling, "Intraday scaling preset: session or calendar");
    add(app, "seed", raw.seed, "Seed for Monte Carlo tests and generators");
    add(app, "ks-reps", raw.ks_reps, "Monte Carlo replications for the KS null");
    add(app, "lb-lags", raw.lb_lags, "Ljung-Box lags");
    add(app, "eta", raw.eta, "Hill regression length (0: default)");
    add(app, "garch-iters", raw.garch_iters, "GARCH optimizer iteration budget");
    add(app, "threshold", raw.threshold, "Intraday call threshold as a fraction of the daily margin");
    flags.margin_long = add(app, "margin-long", raw.margin_long, "Daily long margin for monitor (percent)");
    flags.margin_short = add(app, "margin-short", raw.margin_short, "Daily short margin for monitor (percent)");

    add(app, "synth-kind", raw.synth_kind, "gaussian_iid, student_t, pareto, garch11, tick_walk");
    add(app, "synth-length", raw.synth_length, "Generated returns");
    add(app, "synth-mu", raw.synth_mu, "gaussian_iid mean");
    add(app, "synth-sigma", raw.synth_sigma, "gaussian_iid standard deviation");
    flags.synth_dof = add(app, "synth-dof", raw.synth_dof, "student_t dof (default 3); tick_walk step dof (0: Gaussian)");
    add(app, "synth-alpha", raw.synth_alpha, "pareto tail index");
    add(app, "synth-scale", raw.synth_scale, "student_t and pareto scale");
    add(app, "synth-alpha0", raw.synth_alpha0, "garch11 alpha0");
    add(app, "synth-alpha1", raw.synth_alpha1, "garch11 alpha1");
    add(app, "synth-beta1", raw.synth_beta1, "garch11 beta1");
    add(app, "synth-burn-in", raw.synth_burn_in, "garch11 burn-in");
    add(app, "synth-days", raw.synth_days, "tick_walk weekdays");
    add(app, "synth-start-date", raw.synth_start_date, "tick_walk first date");
    add(app, "synth-start-price", raw.synth_start_price, "tick_walk first price");
    add(app, "synth-sigma-step", raw.synth_sigma_step, "tick_walk percent volatility per step");
    add(app, "synth-roll-day", raw.synth_roll_day, "tick_walk volume crossover day (0: one month)");
    add(app, "synth-step", raw.synth_step, "tick_walk grid step in seconds");

    for (const char* name : kCommands) app.add_subcommand(name)->fallthrough();
    app.fallthrough();
}

std::vector<std::string> flatten(const std::vector<std::string>& items) {
    std::vector<std::string> out;
    for (const auto& item : items) {
        std::istringstream ss(item);
        std::string word;
        while (ss >> word) out.push_back(word);
    }
    return out;
}

template <typename F>
auto as_config(F&& f) {
    try {
        return f();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

RunConfig to_config(const CLI::App& app, const RawOptions& raw, const Flags& flags) {
    RunConfig cfg;
    for (const auto* sub : app.get_subcommands()) cfg.command = sub->get_name();
    cfg.input = raw.input;
    cfg.calendar = raw.calendar;
    cfg.out = raw.out;
    as_config([&] {
        for (const auto& a : flatten(raw.anchors)) cfg.anchors.push_back(parse_time(a));
        for (const auto& f : flatten(raw.frequencies)) cfg.frequencies.push_back(parse_frequency(f));
        for (const auto& c : flatten(raw.coverage)) {
            double v = 0.0;
            const auto [end, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
            if (ec != std::errc{} || end != c.data() + c.size()) throw std::invalid_argument(fmt::format("invalid coverage '{}'", c));
            cfg.coverage.push_back(v);
        }
        for (const auto& m : flatten(raw.models)) cfg.models.push_back(parse_model(m));
        cfg.scaling = parse_scaling_preset(raw.scaling);
        return 0;
    });
    cfg.seed = raw.seed;
    cfg.ks_reps = raw.ks_reps;
    cfg.lb_lags = raw.lb_lags;
    cfg.eta = raw.eta;
    cfg.garch_iters = raw.garch_iters;
    cfg.threshold = raw.threshold;
    if (flags.margin_long->count() > 0) cfg.margin_long = raw.margin_long;
    if (flags.margin_short->count() > 0) cfg.margin_short = raw.margin_short;

    GeneratorSpec& g = cfg.synth;
    g.kind = as_config([&] { return parse_generator_kind(raw.synth_kind); });
    g.length = raw.synth_length;
    g.seed = raw.seed;
    const bool dof_given = flags.synth_dof->count() > 0;
    switch (g.kind) {
        case GeneratorKind::GaussianIid: g.params = GaussianParams{raw.synth_mu, raw.synth_sigma}; break;
        case GeneratorKind::StudentT:
            g.params = StudentTParams{dof_given ? raw.synth_dof : 3.0, raw.synth_scale};
            break;
        case GeneratorKind::Pareto: g.params = ParetoParams{raw.synth_alpha, raw.synth_scale}; break;
        case GeneratorKind::Garch11:
            g.params = Garch11Params{{raw.synth_alpha0, raw.synth_alpha1, raw.synth_beta1, raw.synth_mu},
                                     raw.synth_burn_in};
            break;
        case GeneratorKind::TickWalk: {
            TickWalkParams p;
            p.start_date = as_config([&] { return parse_date(raw.synth_start_date); });
            p.days = raw.synth_days;
            p.step = std::chrono::seconds{raw.synth_step};
            p.start_price = raw.synth_start_price;
            p.sigma_step = raw.synth_sigma_step;
            p.dof = dof_given ? raw.synth_dof : 0.0;
            p.roll_day = raw.synth_roll_day;
            g.params = p;
            break;
        }
    }
    return cfg;
}

void ensure_session(RunConfig& cfg) {
    // tick_walk follows the calendar's session window when one is given.
    auto* p = std::get_if<TickWalkParams>(&cfg.synth.params);
    if (!p || cfg.calendar.empty()) return;
    const auto cal = load_calendar(cfg.calendar);
    p->session_open = cal.session_open;
    p->session_close = cal.session_close;
}

// ---------------------------------------------------------------------------
// Output staging: every file is rendered in memory first, then committed.

class Outputs {
public:
    std::ostringstream& open(const std::string& name) {
        files_.emplace_back(name, std::make_unique<std::ostringstream>());
        return *files_.back().second;
    }

    void commit(const fs::path& dir) const {
        fs::create_directories(dir);
        std::vector<fs::path> staged;
        try {
            for (const auto& [name, body] : files_) {
                const fs::path tmp = dir / (name + ".partial");
                std::ofstream f(tmp, std::ios::binary);
                f << body->str();
                f.close();
                staged.push_back(tmp);
                if (!f) throw Error("cannot write " + tmp.string());
            }
            for (std::size_t i = 0; i < files_.size(); ++i) fs::rename(staged[i], dir / files_[i].first);
        } catch (...) {
            std::error_code ec;
            for (const auto& p : staged) fs::remove(p, ec);
            throw;
        }
    }

    [[nodiscard]] std::vector<std::string> names() const {
        std::vector<std::string> out;
        for (const auto& f : files_) out.push_back(f.first);
        return out;
    }

private:
    std::vector<std::pair<std::string, std::unique_ptr<std::ostringstream>>> files_;
};

// ---------------------------------------------------------------------------
// Market data pipeline shared by the analysis commands.

struct Market {
    TradingCalendar calendar;
    TickSeries raw;
    TickSeries clean;  // calendar-filtered and rolled
    std::vector<ReturnSeries> anchored;
    std::map<Frequency, ReturnSeries> by_frequency;
    std::vector<std::string> warnings;
};

std::string file_tag(TimeOfDay t) {
    auto s = format_time(t);
    s.erase(std::remove(s.begin(), s.end(), ':'), s.end());
    return s;
}

Market load_market(const RunConfig& cfg, std::set<Frequency> needed) {
    if (cfg.input.empty()) throw ConfigError("--input is required for '" + cfg.command + "'");
    Market m;
    if (!cfg.calendar.empty()) m.calendar = load_calendar(cfg.calendar);
    m.calendar.validate();
    m.raw = load_ticks(cfg.input);
    const auto filtered = filter_calendar(m.raw, m.calendar);
    m.clean = roll_contracts(filtered);
    // Each stage carries its input's warnings forward.
    m.warnings = std::move(m.clean.warnings);
    m.clean.warnings.clear();
    for (const TimeOfDay a : cfg.anchors) m.anchored.push_back(resample_anchored_daily(m.clean, a));
    needed.insert(cfg.frequencies.begin(), cfg.frequencies.end());
    for (const Frequency f : needed) {
        m.by_frequency[f] = f == Frequency::Daily ? resample_anchored_daily(m.clean, m.calendar.session_close)
                                                  : resample_intraday(m.clean, interval_of(f), m.calendar);
    }
    for (const auto& s : m.anchored) m.warnings.insert(m.warnings.end(), s.warnings.begin(), s.warnings.end());
    for (const auto& [f, s] : m.by_frequency) {
        m.warnings.insert(m.warnings.end(), s.warnings.begin(), s.warnings.end());
    }
    return m;
}

/// (label, values) for the configured frequencies in configured order.
std::vector<std::pair<std::string, const ReturnSeries*>> frequency_series(const RunConfig& cfg, const Market& m) {
    std::vector<std::pair<std::string, const ReturnSeries*>> out;
    for (const Frequency f : cfg.frequencies) out.emplace_back(std::string(to_string(f)), &m.by_frequency.at(f));
    return out;
}

std::vector<std::pair<std::string, const ReturnSeries*>> anchor_series(const Market& m) {
    std::vector<std::pair<std::string, const ReturnSeries*>> out;
    for (const auto& s : m.anchored) out.emplace_back(s.label(), &s);
    return out;
}

ModelOptions model_options(const RunConfig& cfg) {
    ModelOptions o;
    o.eta = cfg.eta;
    o.garch.max_iterations = cfg.garch_iters;
    return o;
}

Json series_json(const std::string& label, const ReturnSeries& s, const std::string& file) {
    Json j;
    j["series"] = label;
    j["n"] = s.size();
    j["file"] = file;
    return j;
}

// ---------------------------------------------------------------------------
// Commands. Each renders into `files`; nothing touches disk until commit.

void cmd_ingest(const RunConfig& cfg, const ReportHeader& h, Outputs& files, std::ostream&) {
    const Market m = load_market(cfg, {});
    auto& ticks = files.open("ticks_clean.csv");
    write_header(ticks, h);
    write_ticks(ticks, m.clean);

    Json series = Json::array();
    for (const auto& s : m.anchored) {
        const std::string name = "returns_daily_" + file_tag(s.anchor) + ".csv";
        auto& f = files.open(name);
        write_header(f, h);
        write_returns(f, s);
        series.push_back(series_json(s.label(), s, name));
    }
    for (const Frequency fq : cfg.frequencies) {
        const auto& s = m.by_frequency.at(fq);
        const std::string name = fmt::format("returns_{}.csv", to_string(fq));
        auto& f = files.open(name);
        write_header(f, h);
        write_returns(f, s);
        series.push_back(series_json(std::string(to_string(fq)), s, name));
    }

    Json summary;
    summary["config_hash"] = h.config_hash;
    summary["scaling"] = h.scaling;
    summary["rows_read"] = m.raw.rows_read;
    summary["ticks_parsed"] = m.raw.ticks.size();
    summary["ticks_clean"] = m.clean.ticks.size();
    summary["session_open"] = format_time(m.calendar.session_open);
    summary["session_close"] = format_time(m.calendar.session_close);
    summary["series"] = std::move(series);
    summary["warnings"] = m.warnings;
    files.open("ingest_summary.json") << summary.dump(2) << '\n';
}

class KsCache {
public:
    KsCache(std::size_t reps, std::uint64_t seed) : reps_(reps), seed_(seed) {}

    std::optional<TestResult> test(std::span<const double> values) {
        if (values.size() < 8) return std::nullopt;
        auto it = nulls_.find(values.size());
        if (it == nulls_.end()) it = nulls_.emplace(values.size(), KsNullDistribution(values.size(), reps_, seed_)).first;
        try {
            return ks_normality(values, it->second);
        } catch (const ZeroVarianceError&) {
            return std::nullopt;
        }
    }

private:
    std::size_t reps_;
    std::uint64_t seed_;
    std::map<std::size_t, KsNullDistribution> nulls_;
};

std::vector<StatsRow> stats_rows(const std::vector<std::pair<std::string, const ReturnSeries*>>& series,
                                 const RunConfig& cfg, KsCache& ks) {
    std::vector<StatsRow> rows;
    for (const bool squared : {false, true}) {
        for (const auto& [label, s] : series) {
            std::vector<double> v = s->values;
            if (squared) {
                for (double& x : v) x *= x;
            }
            StatsRow r;
            r.panel = squared ? "squared_price_changes" : "price_changes";
            r.series = label;
            try {
                r.moments = moment_summary(v);
            } catch (const Error& e) {
                throw InsufficientDataError(fmt::format("series {}: {}", label, e.what()));
            }
            r.ks = ks.test(v);
            if (v.size() > cfg.lb_lags + 1) r.ljung_box = ljung_box(v, cfg.lb_lags);
            rows.push_back(std::move(r));
        }
    }
    return rows;
}

void cmd_stats(const RunConfig& cfg, const ReportHeader& h, Outputs& files, std::ostream&) {
    const Market m = load_market(cfg, {});
    KsCache ks(cfg.ks_reps, cfg.seed);
    const auto anchors = stats_rows(anchor_series(m), cfg, ks);
    const auto freqs = stats_rows(frequency_series(cfg, m), cfg, ks);
    write_stats_csv(files.open("stats_anchors.csv"), h, anchors);
    write_stats_json(files.open("stats_anchors.json"), h, anchors);
    write_stats_csv(files.open("stats_frequencies.csv"), h, freqs);
    write_stats_json(files.open("stats_frequencies.json"), h, freqs);
}

std::vector<TailRow> tail_rows(const std::vector<std::pair<std::string, const ReturnSeries*>>& series,
                               const RunConfig& cfg, std::ostream& err) {
    std::vector<TailRow> rows;
    for (const Side side : {Side::Long, Side::Short}) {
        for (const auto& [label, s] : series) {
            TailRow r;
            r.series = label;
            try {
                r.estimate = estimate_tail(s->values, side, cfg.eta);
            } catch (const Error& e) {
                fmt::print(err, "warning: {} {} tail: {}\n", label, to_string(side), e.what());
                constexpr double nan = std::numeric_limits<double>::quiet_NaN();
                r.estimate = TailEstimate{nan, nan, nan, nan, nan, side, 0, nan, s->size()};
            }
            rows.push_back(std::move(r));
        }
    }
    return rows;
}

void cmd_tails(const RunConfig& cfg, const ReportHeader& h, Outputs& files, std::ostream& err) {
    const Market m = load_market(cfg, {});
    const auto anchors = tail_rows(anchor_series(m), cfg, err);
    const auto freqs = tail_rows(frequency_series(cfg, m), cfg, err);
    write_tails_csv(files.open("tails_anchors.csv"), h, anchors);
    write_tails_json(files.open("tails_anchors.json"), h, anchors);
    write_tails_csv(files.open("tails_frequencies.csv"), h, freqs);
    write_tails_json(files.open("tails_frequencies.json"), h, freqs);
}

void cmd_garch(const RunConfig& cfg, const ReportHeader& h, Outputs& files, std::ostream& err) {
    const Market m = load_market(cfg, {});
    std::vector<GarchRow> rows;
    auto all = anchor_series(m);
    const auto freqs = frequency_series(cfg, m);
    all.insert(all.end(), freqs.begin(), freqs.end());
    for (const auto& [label, s] : all) {
        try {
            rows.push_back({label, fit_garch11(s->values, GarchOptions{cfg.garch_iters})});
        } catch (const Error& e) {
            fmt::print(err, "warning: {} GARCH: {}\n", label, e.what());
            constexpr double nan = std::numeric_limits<double>::quiet_NaN();
            GarchRow r{label, {}};
            r.fit.params = {nan, nan, nan, nan};
            r.fit.log_likelihood = r.fit.initial_log_likelihood = nan;
            rows.push_back(std::move(r));
        }
    }
    write_garch_csv(files.open("garch_fits.csv"), h, rows);
    write_garch_json(files.open("garch_fits.json"), h, rows);
}

ComparisonReport comparison(const RunConfig& cfg, const Market& m) {
    std::vector<std::vector<double>> anchored;
    for (const auto& s : m.anchored) anchored.push_back(s.values);
    return compare_scaled_vs_daily(m.by_frequency.at(Frequency::FiveMinute).values,
                                   m.by_frequency.at(Frequency::OneHour).values, anchored, cfg.coverage, cfg.models,
                                   cfg.scaling, model_options(cfg));
}

void cmd_margins(const RunConfig& cfg, const ReportHeader& h, Outputs& files, std::ostream&) {
    const Market m = load_market(cfg, {Frequency::FiveMinute, Frequency::OneHour});
    std::vector<LabelledSeries> data;
    for (const auto& s : m.anchored) data.push_back({s.label(), s.values});
    const auto specs = full_grid(cfg.coverage, cfg.models);
    const auto daily = margin_table(data, specs, model_options(cfg), cfg.scaling);
    const auto scaled = comparison(cfg, m);
    write_margins_csv(files.open("margins_daily.csv"), h, daily);
    write_margins_json(files.open("margins_daily.json"), h, daily);
    write_scaled_margins_csv(files.open("margins_scaled.csv"), h, scaled);
    write_scaled_margins_json(files.open("margins_scaled.json"), h, scaled);
}

void cmd_compare(const RunConfig& cfg, const ReportHeader& h, Outputs& files, std::ostream&) {
    const Market m = load_market(cfg, {Frequency::FiveMinute, Frequency::OneHour});
    const auto report = comparison(cfg, m);
    write_comparison_csv(files.open("comparison.csv"), h, report);
    write_comparison_json(files.open("comparison.json"), h, report);
}

void cmd_monitor(const RunConfig& cfg, const ReportHeader& h, Outputs& files, std::ostream&) {
    const Market m = load_market(cfg, {});
    double ml_long = 0.0;
    double ml_short = 0.0;
    if (cfg.margin_long && cfg.margin_short) {
        ml_long = *cfg.margin_long;
        ml_short = *cfg.margin_short;
    } else {
        // Gaussian daily margin at the first coverage level, last anchor.
        const auto& s = m.anchored.back().values;
        const auto mo = moment_summary(s);
        ml_long = cfg.margin_long.value_or(gaussian_margin(mo.mean, mo.std_dev, cfg.coverage.front(), 1.0, Side::Long));
        ml_short =
            cfg.margin_short.value_or(gaussian_margin(mo.mean, mo.std_dev, cfg.coverage.front(), 1.0, Side::Short));
    }

    auto& out = files.open("margin_calls.csv");
    write_header(out, h);
    out << "date,side,time,move_pct,trigger_pct,daily_margin\n";
    const auto& ticks = m.clean.ticks;
    for (std::size_t i = 0; i < ticks.size();) {
        const Date day = date_of(ticks[i].timestamp);
        std::vector<PricePoint> path;
        for (; i < ticks.size() && date_of(ticks[i].timestamp) == day; ++i) {
            path.push_back({time_of_day(ticks[i].timestamp), ticks[i].price});
        }
        for (const auto& call : intraday_call_monitor(path, ml_long, ml_short, cfg.threshold)) {
            fmt::print(out, "{},{},{},{},{},{}\n", format_date(day), to_string(call.side), format_time(call.time),
                       fmt_num(call.move_pct, 4), fmt_num(call.trigger_pct, 4),
                       fmt_num(call.side == Side::Long ? ml_long : ml_short, 4));
        }
    }
}

void cmd_synth(const RunConfig& cfg, const ReportHeader& h, Outputs& files, std::ostream&) {
    const auto result = generate(cfg.synth);
    if (const auto* ticks = std::get_if<TickSeries>(&result)) {
        auto& f = files.open("synth_ticks.csv");
        write_header(f, h);
        write_ticks(f, *ticks);
    } else {
        auto& f = files.open("synth_returns.csv");
        write_header(f, h);
        write_returns(f, std::get<ReturnSeries>(result));
    }
}

void dispatch(const RunConfig& cfg, const ReportHeader& h, Outputs& files, std::ostream& err) {
    using Fn = void (*)(const RunConfig&, const ReportHeader&, Outputs&, std::ostream&);
    static const std::map<std::string, Fn> table{
        {"ingest", cmd_ingest},   {"stats", cmd_stats},     {"tails", cmd_tails},     {"garch", cmd_garch},
        {"margins", cmd_margins}, {"compare", cmd_compare}, {"monitor", cmd_monitor}, {"synth", cmd_synth},
    };
    const auto it = table.find(cfg.command);
    if (it == table.end()) throw ConfigError("unknown command '" + cfg.command + "'");
    it->second(cfg, h, files, err);
}

std::vector<const char*> argv_of(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"hfmargin"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return argv;
}

}  // namespace

void RunConfig::validate() const {
    if (anchors.empty()) throw ConfigError("anchors must not be empty");
    for (std::size_t i = 1; i < anchors.size(); ++i) {
        if (!(anchors[i - 1] < anchors[i])) throw ConfigError("anchors must be strictly increasing");
    }
    if (coverage.empty()) throw ConfigError("coverage must not be empty");
    for (std::size_t i = 0; i < coverage.size(); ++i) {
        if (!(coverage[i] > 0.5 && coverage[i] < 1.0)) {
            throw ConfigError(fmt::format("coverage {} outside (0.5, 1)", coverage[i]));
        }
        if (i > 0 && !(coverage[i - 1] < coverage[i])) throw ConfigError("coverage must be strictly increasing");
    }
    if (models.empty()) throw ConfigError("models must not be empty");
    if (ks_reps == 0) throw ConfigError("ks_reps must be >= 1");
    if (lb_lags == 0) throw ConfigError("lb_lags must be >= 1");
    if (eta != 0 && eta < 4) throw ConfigError("eta must be 0 or >= 4");
    if (garch_iters == 0) throw ConfigError("garch_iters must be >= 1");
    if (!(threshold > 0.0 && threshold <= 1.0)) throw ConfigError("threshold must lie in (0, 1]");
    for (const auto& m : {margin_long, margin_short}) {
        if (m && !(*m > 0.0)) throw ConfigError("monitor margins must be positive");
    }
    as_config([&] {
        synth.validate();
        return 0;
    });
}

std::string RunConfig::canonical() const {
    std::string s;
    auto line = [&](std::string_view key, const auto& value) { s += fmt::format("{}={}\n", key, value); };
    auto join = [](const auto& items, auto&& show) {
        std::string out;
        for (const auto& x : items) out += (out.empty() ? "" : ",") + show(x);
        return out;
    };
    line("input", input);
    line("calendar", calendar);
    line("anchors", join(anchors, [](TimeOfDay t) { return format_time(t); }));
    line("frequencies", join(frequencies, [](Frequency f) { return std::string(to_string(f)); }));
    line("coverage", join(coverage, [](double c) { return fmt::format("{}", c); }));
    line("models", join(models, [](Model m) { return std::string(to_string(m)); }));
    line("scaling", to_string(scaling));
    line("seed", seed);
    line("ks_reps", ks_reps);
    line("lb_lags", lb_lags);
    line("eta", eta);
    line("garch_iters", garch_iters);
    line("threshold", threshold);
    line("margin_long", margin_long ? fmt::format("{}", *margin_long) : "auto");
    line("margin_short", margin_short ? fmt::format("{}", *margin_short) : "auto");
    line("synth_kind", to_string(synth.kind));
    line("synth_length", synth.length);
    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, GaussianParams>) {
                line("synth_mu", p.mu);
                line("synth_sigma", p.sigma);
            } else if constexpr (std::is_same_v<P, StudentTParams>) {
                line("synth_dof", p.dof);
                line("synth_scale", p.scale);
            } else if constexpr (std::is_same_v<P, ParetoParams>) {
                line("synth_alpha", p.alpha);
                line("synth_scale", p.scale);
            } else if constexpr (std::is_same_v<P, Garch11Params>) {
                line("synth_alpha0", p.params.alpha0);
                line("synth_alpha1", p.params.alpha1);
                line("synth_beta1", p.params.beta1);
                line("synth_mu", p.params.mu);
                line("synth_burn_in", p.burn_in);
            } else {
                line("synth_start_date", format_date(p.start_date));
                line("synth_days", p.days);
                line("synth_session", format_time(p.session_open) + "-" + format_time(p.session_close));
                line("synth_step", p.step.count());
                line("synth_start_price", p.start_price);
                line("synth_sigma_step", p.sigma_step);
                line("synth_dof", p.dof);
                line("synth_roll_day", p.roll_day);
            }
        },
        synth.params);
    return s;
}

RunConfig parse_args(const std::vector<std::string>& args) {
    CLI::App app{"hfmargin"};
    RawOptions raw;
    Flags flags;
    build_app(app, raw, flags);
    auto argv = argv_of(args);
    app.parse(static_cast<int>(argv.size()), argv.data());
    RunConfig cfg = to_config(app, raw, flags);
    ensure_session(cfg);
    cfg.validate();
    return cfg;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Futures margin estimation from high-frequency returns", "hfmargin"};
    RawOptions raw;
    Flags flags;
    build_app(app, raw, flags);
    auto argv = argv_of(args);
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    RunConfig cfg;
    try {
        cfg = to_config(app, raw, flags);
        ensure_session(cfg);
        cfg.validate();
    } catch (const Error& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kUsage;
    }

    const ReportHeader header{fnv1a_hex(cfg.canonical()), std::string(to_string(cfg.scaling))};
    Outputs files;
    try {
        dispatch(cfg, header, files, err);
    } catch (const ConfigError& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kUsage;
    } catch (const std::exception& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kData;
    }
    try {
        files.commit(cfg.out);
    } catch (const std::exception& e) {
        fmt::print(err, "error: writing outputs: {}\n", e.what());
        return kData;
    }
    for (const auto& name : files.names()) fmt::print(out, "{}\n", (fs::path(cfg.out) / name).string());
    return kOk;
}

}  // namespace hfmargin::cli
