#include "hfmargin/report.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

namespace hfmargin {

namespace {

using Json = nlohmann::ordered_json;

constexpr double kMomentOrders[] = {2.0, 4.0};

Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

template <typename T>
Json num(const std::optional<T>& v) {
    return v ? num(static_cast<double>(*v)) : Json(nullptr);
}

std::string opt_num(const std::optional<double>& v, int precision = 6) {
    return v ? fmt_num(*v, precision) : std::string("na");
}

std::string csv_quote(std::string_view text) {
    std::string s = "\"";
    for (char c : text) {
        if (c == '"') s += '"';
        s += c == '\n' ? ' ' : c;
    }
    return s + '"';
}

const char* flag(bool b) { return b ? "true" : "false"; }

Json json_root(const ReportHeader& h) {
    Json root;
    root["config_hash"] = h.config_hash;
    root["scaling"] = h.scaling;
    return root;
}

void dump(std::ostream& out, const Json& j) { out << j.dump(2) << '\n'; }

struct MomentTests {
    TestResult at[2];
};

std::optional<MomentTests> moment_tests(const TailEstimate& e) {
    if (!(e.se_alpha > 0.0)) return std::nullopt;
    return MomentTests{{moment_existence_test(e, kMomentOrders[0]), moment_existence_test(e, kMomentOrders[1])}};
}

// A placeholder fit for a failed series has no residuals to forecast from.
double forecast_or_nan(const GarchFit& f) {
    return f.residuals.empty() ? std::numeric_limits<double>::quiet_NaN() : forecast_sigma2(f);
}

}  // namespace

void write_header(std::ostream& out, const ReportHeader& header) {
    fmt::print(out, "# hfmargin config_hash={} scaling={}\n", header.config_hash, header.scaling);
}

std::string fnv1a_hex(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return fmt::format("{:016x}", h);
}

std::string fmt_num(double v, int precision) {
    if (std::isnan(v)) return "na";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::string s = fmt::format("{:.{}f}", v, precision);
    // Rounded negative zero prints as "-0.000"; drop the sign.
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
}

void write_stats_csv(std::ostream& out, const ReportHeader& h, std::span<const StatsRow> rows) {
    write_header(out, h);
    out << "panel,series,n,mean,std_dev,skewness,excess_kurtosis,min,q25,median,q75,max,ks_d,ks_p,lb_q,lb_p\n";
    for (const auto& r : rows) {
        const auto& m = r.moments;
        fmt::print(out, "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.panel, r.series, m.n, fmt_num(m.mean),
                   fmt_num(m.std_dev), fmt_num(m.skewness), opt_num(m.excess_kurtosis), fmt_num(m.min),
                   fmt_num(m.q25), fmt_num(m.median), fmt_num(m.q75), fmt_num(m.max),
                   r.ks ? fmt_num(r.ks->statistic) : "na", r.ks ? fmt_num(r.ks->p_value) : "na",
                   r.ljung_box ? fmt_num(r.ljung_box->statistic) : "na",
                   r.ljung_box ? fmt_num(r.ljung_box->p_value) : "na");
    }
}

void write_stats_json(std::ostream& out, const ReportHeader& h, std::span<const StatsRow> rows) {
    Json root = json_root(h);
    Json arr = Json::array();
    for (const auto& r : rows) {
        const auto& m = r.moments;
        Json j;
        j["panel"] = r.panel;
        j["series"] = r.series;
        j["n"] = m.n;
        j["mean"] = num(m.mean);
        j["std_dev"] = num(m.std_dev);
        j["skewness"] = num(m.skewness);
        j["excess_kurtosis"] = num(m.excess_kurtosis);
        j["min"] = num(m.min);
        j["q25"] = num(m.q25);
        j["median"] = num(m.median);
        j["q75"] = num(m.q75);
        j["max"] = num(m.max);
        j["ks_d"] = r.ks ? num(r.ks->statistic) : Json(nullptr);
        j["ks_p"] = r.ks ? num(r.ks->p_value) : Json(nullptr);
        j["lb_q"] = r.ljung_box ? num(r.ljung_box->statistic) : Json(nullptr);
        j["lb_p"] = r.ljung_box ? num(r.ljung_box->p_value) : Json(nullptr);
        arr.push_back(std::move(j));
    }
    root["rows"] = std::move(arr);
    dump(out, root);
}

void write_tails_csv(std::ostream& out, const ReportHeader& h, std::span<const TailRow> rows) {
    write_header(out, h);
    out << "series,side,alpha,se_alpha,inv_alpha,se_inv_alpha,n_tail,threshold,sample_size,"
           "z_k2,p_k2,table_p_k2,z_k4,p_k4,table_p_k4\n";
    for (const auto& r : rows) {
        const auto& e = r.estimate;
        fmt::print(out, "{},{},{},{},{},{},{},{},{}", r.series, to_string(e.side), fmt_num(e.alpha),
                   fmt_num(e.se_alpha), fmt_num(e.inv_alpha), fmt_num(e.se_inv_alpha), e.n_tail,
                   fmt_num(e.threshold), e.sample_size);
        const auto tests = moment_tests(e);
        for (std::size_t k = 0; k < 2; ++k) {
            if (tests) {
                const auto& t = tests->at[k];
                fmt::print(out, ",{},{},{}", fmt_num(t.statistic), fmt_num(t.p_value),
                           fmt_num(t.parameters.at("table_p")));
            } else {
                out << ",na,na,na";
            }
        }
        out << '\n';
    }
}

void write_tails_json(std::ostream& out, const ReportHeader& h, std::span<const TailRow> rows) {
    Json root = json_root(h);
    Json arr = Json::array();
    for (const auto& r : rows) {
        const auto& e = r.estimate;
        Json j;
        j["series"] = r.series;
        j["side"] = to_string(e.side);
        j["alpha"] = num(e.alpha);
        j["se_alpha"] = num(e.se_alpha);
        j["inv_alpha"] = num(e.inv_alpha);
        j["se_inv_alpha"] = num(e.se_inv_alpha);
        j["n_tail"] = e.n_tail;
        j["threshold"] = num(e.threshold);
        j["sample_size"] = e.sample_size;
        Json tests = Json::array();
        if (const auto t = moment_tests(e)) {
            for (std::size_t k = 0; k < 2; ++k) {
                Json tj;
                tj["k"] = kMomentOrders[k];
                tj["z"] = num(t->at[k].statistic);
                tj["p_value"] = num(t->at[k].p_value);
                tj["table_p"] = num(t->at[k].parameters.at("table_p"));
                tests.push_back(std::move(tj));
            }
        }
        j["moment_tests"] = std::move(tests);
        arr.push_back(std::move(j));
    }
    root["rows"] = std::move(arr);
    dump(out, root);
}

void write_garch_csv(std::ostream& out, const ReportHeader& h, std::span<const GarchRow> rows) {
    write_header(out, h);
    out << "series,alpha0,alpha1,beta1,mu,log_likelihood,initial_log_likelihood,converged,iterations,"
           "forecast_sigma2\n";
    for (const auto& r : rows) {
        const auto& f = r.fit;
        fmt::print(out, "{},{},{},{},{},{},{},{},{},{}\n", r.series, fmt_num(f.params.alpha0, 8),
                   fmt_num(f.params.alpha1, 8), fmt_num(f.params.beta1, 8), fmt_num(f.params.mu, 8),
                   fmt_num(f.log_likelihood), fmt_num(f.initial_log_likelihood), flag(f.converged), f.iterations,
                   fmt_num(forecast_or_nan(f), 8));
    }
}

void write_garch_json(std::ostream& out, const ReportHeader& h, std::span<const GarchRow> rows) {
    Json root = json_root(h);
    Json arr = Json::array();
    for (const auto& r : rows) {
        const auto& f = r.fit;
        Json j;
        j["series"] = r.series;
        j["alpha0"] = num(f.params.alpha0);
        j["alpha1"] = num(f.params.alpha1);
        j["beta1"] = num(f.params.beta1);
        j["mu"] = num(f.params.mu);
        j["log_likelihood"] = num(f.log_likelihood);
        j["initial_log_likelihood"] = num(f.initial_log_likelihood);
        j["converged"] = f.converged;
        j["iterations"] = f.iterations;
        j["forecast_sigma2"] = num(forecast_or_nan(f));
        arr.push_back(std::move(j));
    }
    root["rows"] = std::move(arr);
    dump(out, root);
}

void write_margins_csv(std::ostream& out, const ReportHeader& h, const MarginReport& report) {
    write_header(out, h);
    out << "series,model,coverage,waiting_days,side,margin,available,scaling_preset\n";
    const auto preset = to_string(report.preset);
    for (const auto& c : report.cells) {
        fmt::print(out, "{},{},{},{},{},{},{},{}\n", c.series, to_string(c.model), fmt_num(c.coverage, 4),
                   waiting_days(c.coverage), to_string(c.side), opt_num(c.margin, 4), flag(c.margin.has_value()),
                   preset);
    }
}

void write_margins_json(std::ostream& out, const ReportHeader& h, const MarginReport& report) {
    Json root = json_root(h);
    Json arr = Json::array();
    for (const auto& c : report.cells) {
        Json j;
        j["series"] = c.series;
        j["model"] = to_string(c.model);
        j["coverage"] = c.coverage;
        j["waiting_days"] = waiting_days(c.coverage);
        j["side"] = to_string(c.side);
        j["margin"] = num(c.margin);
        j["available"] = c.margin.has_value();
        j["scaling_preset"] = to_string(report.preset);
        j["horizon"] = c.horizon;
        if (!c.margin) j["reason"] = c.reason;
        arr.push_back(std::move(j));
    }
    root["rows"] = std::move(arr);
    dump(out, root);
}

void write_scaled_margins_csv(std::ostream& out, const ReportHeader& h, const ComparisonReport& report) {
    write_header(out, h);
    out << "series,model,coverage,waiting_days,side,margin,available,scaling_preset\n";
    const auto preset = to_string(report.preset);
    for (const char* series : {"5m", "1h", "1d"}) {
        for (const auto& r : report.rows) {
            const auto& v = series[1] == 'm' ? r.scaled_5m : series[1] == 'h' ? r.scaled_1h : r.daily_mean;
            fmt::print(out, "{},{},{},{},{},{},{},{}\n", series, to_string(r.model), fmt_num(r.coverage, 4),
                       waiting_days(r.coverage), to_string(r.side), opt_num(v, 4), flag(v.has_value()), preset);
        }
    }
}

void write_scaled_margins_json(std::ostream& out, const ReportHeader& h, const ComparisonReport& report) {
    Json root = json_root(h);
    root["horizon_5m"] = report.horizon_5m;
    root["horizon_1h"] = report.horizon_1h;
    Json arr = Json::array();
    for (const char* series : {"5m", "1h", "1d"}) {
        for (const auto& r : report.rows) {
            const auto& v = series[1] == 'm' ? r.scaled_5m : series[1] == 'h' ? r.scaled_1h : r.daily_mean;
            Json j;
            j["series"] = series;
            j["model"] = to_string(r.model);
            j["coverage"] = r.coverage;
            j["waiting_days"] = waiting_days(r.coverage);
            j["side"] = to_string(r.side);
            j["margin"] = num(v);
            j["available"] = v.has_value();
            j["scaling_preset"] = to_string(report.preset);
            arr.push_back(std::move(j));
        }
    }
    root["rows"] = std::move(arr);
    dump(out, root);
}

void write_comparison_csv(std::ostream& out, const ReportHeader& h, const ComparisonReport& report) {
    write_header(out, h);
    out << "model,coverage,waiting_days,side,scaled_5m,scaled_1h,daily_mean,t_5m,p_5m,t_1h,p_1h,available,"
           "scaling_preset,reason\n";
    const auto preset = to_string(report.preset);
    for (const auto& r : report.rows) {
        auto t = [](const std::optional<TTest>& x) { return x ? fmt_num(x->t, 4) : std::string("na"); };
        auto p = [](const std::optional<TTest>& x) { return x ? fmt_num(x->p_value, 4) : std::string("na"); };
        fmt::print(out, "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", to_string(r.model), fmt_num(r.coverage, 4),
                   waiting_days(r.coverage), to_string(r.side), opt_num(r.scaled_5m, 4), opt_num(r.scaled_1h, 4),
                   opt_num(r.daily_mean, 4), t(r.test_5m), p(r.test_5m), t(r.test_1h), p(r.test_1h),
                   flag(r.available()), preset, csv_quote(r.reason));
    }
}

void write_comparison_json(std::ostream& out, const ReportHeader& h, const ComparisonReport& report) {
    Json root = json_root(h);
    root["horizon_5m"] = report.horizon_5m;
    root["horizon_1h"] = report.horizon_1h;
    Json arr = Json::array();
    for (const auto& r : report.rows) {
        Json j;
        j["model"] = to_string(r.model);
        j["coverage"] = r.coverage;
        j["waiting_days"] = waiting_days(r.coverage);
        j["side"] = to_string(r.side);
        j["scaled_5m"] = num(r.scaled_5m);
        j["scaled_1h"] = num(r.scaled_1h);
        j["daily_mean"] = num(r.daily_mean);
        Json daily = Json::array();
        for (double m : r.daily_margins) daily.push_back(num(m));
        j["daily_margins"] = std::move(daily);
        auto test = [](const std::optional<TTest>& x) {
            if (!x) return Json(nullptr);
            Json tj;
            tj["t"] = num(x->t);
            tj["p_value"] = num(x->p_value);
            tj["dof"] = x->dof;
            return tj;
        };
        j["test_5m"] = test(r.test_5m);
        j["test_1h"] = test(r.test_1h);
        j["available"] = r.available();
        j["scaling_preset"] = to_string(report.preset);
        if (!r.reason.empty()) j["reason"] = r.reason;
        arr.push_back(std::move(j));
    }
    root["rows"] = std::move(arr);
    dump(out, root);
}

}  // namespace hfmargin
