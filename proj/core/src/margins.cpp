#include "hfmargin/margins.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include "hfmargin/descstats.hpp"
#include "hfmargin/error.hpp"

namespace hfmargin {

namespace {

void require_coverage(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument(fmt::format("coverage {} outside (0, 1)", p));
}

bool uses(std::span<const Model> models, Model m) { return std::find(models.begin(), models.end(), m) != models.end(); }

template <typename F>
void capture(F&& f, std::string& error) {
    try {
        f();
    } catch (const Error& e) {
        error = e.what();
    } catch (const std::invalid_argument& e) {
        error = e.what();
    }
}

}  // namespace

std::string_view to_string(Model m) noexcept {
    switch (m) {
        case Model::Gaussian: return "gaussian";
        case Model::ExtremeValue: return "evt";
        case Model::Historical: return "historical";
        case Model::Garch: return "garch";
    }
    return "?";
}

Model parse_model(std::string_view text) {
    if (text == "gaussian") return Model::Gaussian;
    if (text == "evt" || text == "extreme_value") return Model::ExtremeValue;
    if (text == "historical") return Model::Historical;
    if (text == "garch") return Model::Garch;
    throw std::invalid_argument(fmt::format("unknown model '{}'", text));
}

std::string_view to_string(ScalingPreset s) noexcept { return s == ScalingPreset::Session ? "session" : "calendar"; }

ScalingPreset parse_scaling_preset(std::string_view text) {
    if (text == "session") return ScalingPreset::Session;
    if (text == "calendar") return ScalingPreset::Calendar;
    throw std::invalid_argument(fmt::format("unknown scaling preset '{}'", text));
}

double horizon_for(ScalingPreset preset, Frequency freq) {
    switch (freq) {
        case Frequency::Daily: return 1.0;
        case Frequency::FiveMinute: return preset == ScalingPreset::Session ? 113.0 : 288.0;
        case Frequency::OneHour: return preset == ScalingPreset::Session ? 9.0 : 24.0;
    }
    return 1.0;
}

void MarginSpec::validate() const {
    if (!(coverage > 0.5 && coverage < 1.0)) {
        throw std::invalid_argument(fmt::format("coverage {} outside (0.5, 1)", coverage));
    }
    if (!(horizon >= 1.0)) throw std::invalid_argument(fmt::format("horizon {} below 1", horizon));
}

double gaussian_margin(double mu, double sigma, double p, double horizon, Side side) {
    if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
    require_coverage(p);
    if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
    const double z = normal_quantile(side == Side::Short ? p : 1.0 - p);
    return std::abs(mu * horizon + z * sigma * std::sqrt(horizon));
}

double sqrt_scale(double ml_1, double horizon) {
    if (!(horizon >= 1.0)) throw std::invalid_argument("horizon must be >= 1");
    return std::sqrt(horizon) * ml_1;
}

double historical_margin(std::span<const double> values, double p, Side side) {
    require_coverage(p);
    if (values.empty()) throw InsufficientDataError("historical margin of an empty series");
    const double n = static_cast<double>(values.size());
    if (n * (1.0 - p) < 1.0 - 1e-9) {
        throw UnavailableError(fmt::format("coverage {} needs at least {:.0f} observations, have {}", p,
                                           std::ceil(1.0 / (1.0 - p) - 1e-9), values.size()));
    }
    std::vector<double> losses(values.begin(), values.end());
    if (side == Side::Long) {
        for (double& x : losses) x = -x;
    }
    std::sort(losses.begin(), losses.end());
    return std::abs(sorted_quantile(losses, p));
}

double waiting_period(double p) {
    require_coverage(p);
    return 1.0 / (1.0 - p);
}

long waiting_days(double p) { return std::lround(waiting_period(p)); }

double coverage_for_waiting_period(double days) {
    if (!(days > 1.0)) throw std::invalid_argument("waiting period must exceed one day");
    return 1.0 - 1.0 / days;
}

ModelInputs prepare_inputs(std::span<const double> values, const ModelOptions& options) {
    ModelInputs in;
    in.values.assign(values.begin(), values.end());
    capture(
        [&] {
            const auto m = moment_summary(values);
            in.mean = m.mean;
            in.std_dev = m.std_dev;
        },
        in.moments_error);
    capture([&] { in.left_tail = estimate_tail(values, Side::Long, options.eta); }, in.left_tail_error);
    capture([&] { in.right_tail = estimate_tail(values, Side::Short, options.eta); }, in.right_tail_error);
    if (options.fit_garch) {
        capture([&] { in.garch = fit_garch11(values, options.garch); }, in.garch_error);
    } else {
        in.garch_error = "GARCH not fitted";
    }
    return in;
}

CellResult model_margin(const ModelInputs& inputs, const MarginSpec& spec) {
    CellResult out;
    try {
        spec.validate();
        switch (spec.model) {
            case Model::Gaussian:
                if (!inputs.mean || !inputs.std_dev) {
                    out.reason = inputs.moments_error;
                    return out;
                }
                out.margin = sqrt_scale(gaussian_margin(*inputs.mean, *inputs.std_dev, spec.coverage, 1.0, spec.side),
                                        spec.horizon);
                break;
            case Model::ExtremeValue: {
                const auto& tail = spec.side == Side::Long ? inputs.left_tail : inputs.right_tail;
                if (!tail) {
                    out.reason = spec.side == Side::Long ? inputs.left_tail_error : inputs.right_tail_error;
                    return out;
                }
                out.margin = feller_scale(evt_margin(*tail, 1.0 - spec.coverage), spec.horizon, tail->alpha);
                break;
            }
            case Model::Historical:
                if (spec.horizon != 1.0) {
                    out.reason = "historical quantiles have no scaling law";
                    return out;
                }
                out.margin = historical_margin(inputs.values, spec.coverage, spec.side);
                break;
            case Model::Garch:
                if (!inputs.garch) {
                    out.reason = inputs.garch_error;
                    return out;
                }
                out.margin = garch_margin(*inputs.garch, spec.coverage, spec.horizon, spec.side);
                break;
        }
    } catch (const Error& e) {
        out.margin.reset();
        out.reason = e.what();
    } catch (const std::invalid_argument& e) {
        out.margin.reset();
        out.reason = e.what();
    }
    return out;
}

const MarginCell* MarginReport::find(std::string_view series, Model model, double coverage, Side side) const {
    for (const auto& c : cells) {
        if (c.series == series && c.model == model && std::abs(c.coverage - coverage) < 1e-12 && c.side == side) {
            return &c;
        }
    }
    return nullptr;
}

MarginReport margin_table(std::span<const LabelledSeries> data, std::span<const MarginSpec> specs,
                          const ModelOptions& options, ScalingPreset preset) {
    MarginReport report;
    report.preset = preset;
    ModelOptions opts = options;
    opts.fit_garch = options.fit_garch &&
                     std::any_of(specs.begin(), specs.end(), [](const MarginSpec& s) { return s.model == Model::Garch; });
    for (const auto& series : data) {
        const ModelInputs inputs = prepare_inputs(series.values, opts);
        for (const auto& spec : specs) {
            const CellResult r = model_margin(inputs, spec);
            report.cells.push_back(
                {series.label, spec.model, spec.coverage, spec.side, spec.horizon, r.margin, r.reason});
        }
    }
    return report;
}

std::vector<MarginSpec> full_grid(std::span<const double> coverages, std::span<const Model> models) {
    std::vector<MarginSpec> specs;
    for (const Side side : {Side::Long, Side::Short}) {
        for (const double p : coverages) {
            for (const Model m : models) specs.push_back({p, 1.0, side, m});
        }
    }
    return specs;
}

TTest one_sample_t_test(std::span<const double> sample, double reference) {
    if (sample.size() < 2) throw InsufficientDataError("t-test needs at least 2 observations");
    const double n = static_cast<double>(sample.size());
    const double mean = std::accumulate(sample.begin(), sample.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : sample) ss += (x - mean) * (x - mean);
    const double se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    TTest out;
    out.dof = sample.size() - 1;
    if (se == 0.0) {
        out.t = mean == reference ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), mean - reference);
        out.p_value = mean == reference ? 1.0 : 0.0;
        return out;
    }
    out.t = (mean - reference) / se;
    const boost::math::students_t_distribution<double> dist(n - 1.0);
    out.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(out.t)));
    return out;
}

const ComparisonRow* ComparisonReport::find(Model model, double coverage, Side side) const {
    for (const auto& r : rows) {
        if (r.model == model && std::abs(r.coverage - coverage) < 1e-12 && r.side == side) return &r;
    }
    return nullptr;
}

ComparisonReport compare_prepared(const ModelInputs& five_minute, const ModelInputs& one_hour,
                                  std::span<const ModelInputs> anchored, std::span<const double> coverages,
                                  std::span<const Model> models, double horizon_5m, double horizon_1h) {
    ComparisonReport report;
    report.horizon_5m = horizon_5m;
    report.horizon_1h = horizon_1h;
    for (const Side side : {Side::Long, Side::Short}) {
        for (const double p : coverages) {
            for (const Model model : models) {
                ComparisonRow row;
                row.model = model;
                row.coverage = p;
                row.side = side;
                std::vector<std::string> reasons;

                bool daily_ok = !anchored.empty();
                if (anchored.empty()) reasons.emplace_back("no anchored daily series");
                for (const auto& in : anchored) {
                    const auto r = model_margin(in, {p, 1.0, side, model});
                    if (!r.margin) {
                        daily_ok = false;
                        reasons.push_back("daily: " + r.reason);
                        break;
                    }
                    row.daily_margins.push_back(*r.margin);
                }
                if (daily_ok) {
                    row.daily_mean = std::accumulate(row.daily_margins.begin(), row.daily_margins.end(), 0.0) /
                                     static_cast<double>(row.daily_margins.size());
                } else {
                    row.daily_margins.clear();
                }

                const auto r5 = model_margin(five_minute, {p, horizon_5m, side, model});
                const auto r1 = model_margin(one_hour, {p, horizon_1h, side, model});
                row.scaled_5m = r5.margin;
                row.scaled_1h = r1.margin;
                if (!r5.margin) reasons.push_back("5m: " + r5.reason);
                if (!r1.margin) reasons.push_back("1h: " + r1.reason);

                if (daily_ok && row.daily_margins.size() >= 2) {
                    if (row.scaled_5m) row.test_5m = one_sample_t_test(row.daily_margins, *row.scaled_5m);
                    if (row.scaled_1h) row.test_1h = one_sample_t_test(row.daily_margins, *row.scaled_1h);
                }
                for (std::size_t i = 0; i < reasons.size(); ++i) {
                    row.reason += (i ? "; " : "") + reasons[i];
                }
                report.rows.push_back(std::move(row));
            }
        }
    }
    return report;
}

ComparisonReport compare_scaled_vs_daily(std::span<const double> five_minute, std::span<const double> one_hour,
                                         std::span<const std::vector<double>> anchored,
                                         std::span<const double> coverages, std::span<const Model> models,
                                         double horizon_5m, double horizon_1h, const ModelOptions& options) {
    ModelOptions opts = options;
    opts.fit_garch = options.fit_garch && uses(models, Model::Garch);
    const auto in5 = prepare_inputs(five_minute, opts);
    const auto in1 = prepare_inputs(one_hour, opts);
    std::vector<ModelInputs> daily;
    daily.reserve(anchored.size());
    for (const auto& a : anchored) daily.push_back(prepare_inputs(a, opts));
    return compare_prepared(in5, in1, daily, coverages, models, horizon_5m, horizon_1h);
}

ComparisonReport compare_scaled_vs_daily(std::span<const double> five_minute, std::span<const double> one_hour,
                                         std::span<const std::vector<double>> anchored,
                                         std::span<const double> coverages, std::span<const Model> models,
                                         ScalingPreset preset, const ModelOptions& options) {
    auto report = compare_scaled_vs_daily(five_minute, one_hour, anchored, coverages, models,
                                          horizon_for(preset, Frequency::FiveMinute),
                                          horizon_for(preset, Frequency::OneHour), options);
    report.preset = preset;
    return report;
}

std::vector<MarginCall> intraday_call_monitor(std::span<const PricePoint> path, double daily_margin_long,
                                              double daily_margin_short, double threshold) {
    if (!(daily_margin_long > 0.0) || !(daily_margin_short > 0.0)) {
        throw std::invalid_argument("daily margins must be positive");
    }
    if (!(threshold > 0.0)) throw std::invalid_argument("call threshold must be positive");
    std::vector<MarginCall> calls;
    if (path.empty()) return calls;
    const double open = path.front().price;
    if (!(open > 0.0)) throw std::invalid_argument("prices must be positive");
    const double long_trigger = -threshold * daily_margin_long;
    const double short_trigger = threshold * daily_margin_short;
    bool long_called = false;
    bool short_called = false;
    for (const auto& pt : path) {
        if (!(pt.price > 0.0)) throw std::invalid_argument("prices must be positive");
        const double move = 100.0 * (std::log(pt.price) - std::log(open));
        if (!long_called && move <= long_trigger) {
            calls.push_back({Side::Long, pt.time, move, long_trigger});
            long_called = true;
        }
        if (!short_called && move >= short_trigger) {
            calls.push_back({Side::Short, pt.time, move, short_trigger});
            short_called = true;
        }
        if (long_called && short_called) break;
    }
    return calls;
}

}  // namespace hfmargin
