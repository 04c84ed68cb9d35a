// Acceptance checks. Each criterion prints one PASS/FAIL line; the process
// exits non-zero if any selected criterion fails.
//
//   hfmargin_acceptance                 all criteria
//   hfmargin_acceptance --criterion 4   one criterion

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <fmt/format.h>
#include <unistd.h>

#include "app.hpp"
#include "hfmargin/descstats.hpp"
#include "hfmargin/error.hpp"
#include "hfmargin/garch.hpp"
#include "hfmargin/margins.hpp"
#include "hfmargin/marketdata.hpp"
#include "hfmargin/normal.hpp"
#include "hfmargin/rng.hpp"
#include "hfmargin/synth.hpp"
#include "hfmargin/tails.hpp"
#include "published_tables.hpp"

using namespace hfmargin;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    const char* title;
    double budget_seconds;
    std::function<Outcome()> check;
};

Side side_of(int i) { return i == 0 ? Side::Long : Side::Short; }

// 1. Gaussian formula against the published Gaussian rows.
Outcome gaussian_table() {
    constexpr double tol = 0.02;
    double worst = 0.0;
    int cells = 0;
    int misses = 0;
    std::string first_miss;
    for (int s = 0; s < 2; ++s) {
        for (int c = 0; c < 4; ++c) {
            if (s == published::kInconsistentSide && c == published::kInconsistentCoverage) continue;
            for (int a = 0; a < published::kAnchors; ++a) {
                const double got =
                    gaussian_margin(published::kMean[a], published::kStd[a], published::kCoverage[c], 1.0, side_of(s));
                const double diff = std::abs(got - published::kGaussian[s][c][a]);
                worst = std::max(worst, diff);
                ++cells;
                if (diff > tol) {
                    if (misses++ == 0) {
                        first_miss = fmt::format(" first miss {} p={} anchor {}: {:.4f} vs {:.2f}",
                                                 to_string(side_of(s)), published::kCoverage[c], a, got,
                                                 published::kGaussian[s][c][a]);
                    }
                }
            }
        }
    }
    const double example = gaussian_margin(-0.03, 1.30, 0.95, 1.0, Side::Long);
    const bool example_ok = std::abs(example - 2.17) <= tol;
    return {misses == 0 && example_ok,
            fmt::format("{} cells, max |diff| {:.4f} (tol {}), example (-0.03, 1.30, 0.95, long) -> {:.4f}{}", cells,
                        worst, tol, example, first_miss)};
}

// 2. Row means of the 9-anchor table against the one-day column.
Outcome averaging() {
    constexpr double tol = 0.01 + 1e-9;
    double worst = 0.0;
    int misses = 0;
    for (int s = 0; s < 2; ++s) {
        for (int c = 0; c < 4; ++c) {
            const auto mean = [](const published::Row& r) { return std::accumulate(r.begin(), r.end(), 0.0) / r.size(); };
            const double dg = std::abs(mean(published::kGaussian[s][c]) - published::kDailyGaussian[s][c]);
            const double de = std::abs(mean(published::kExtremeValue[s][c]) - published::kDailyExtremeValue[s][c]);
            worst = std::max({worst, dg, de});
            misses += (dg > tol) + (de > tol);
        }
    }
    return {misses == 0, fmt::format("16 rows, max |mean - one-day cell| {:.4f} (tol 0.01), {} misses", worst, misses)};
}

// 3. Square-root scaling of the 5-minute Gaussian margin with T = 288.
Outcome calendar_scaling() {
    constexpr double tol = 0.15;
    double worst = 0.0;
    std::string got;
    for (int c = 0; c < 4; ++c) {
        for (int s = 0; s < 2; ++s) {
            const double ml1 = gaussian_margin(0.0, published::kSigma5m, published::kCoverage[c], 1.0, side_of(s));
            const double scaled = sqrt_scale(ml1, published::kCalendarT5m);
            worst = std::max(worst, std::abs(scaled - published::kScaled5mGaussian[c]));
            if (s == 0) got += fmt::format("{}{:.4f}", c ? ", " : "", scaled);
        }
    }
    return {worst <= tol, fmt::format("scaled [{}] vs [3.07, 4.34, 4.95, 5.37], max |diff| {:.4f} (tol {})", got,
                                      worst, tol)};
}

// 4. Moment tests recomputed from the published alpha and se.
Outcome moment_tests() {
    constexpr double z_tol = 0.03;
    constexpr double p_tol = 0.01;
    int z_misses = 0;
    int p_misses = 0;
    int rows = 0;
    std::string misses;
    for (const auto& cell : published::kTailCells) {
        TailEstimate est;
        est.alpha = cell.alpha;
        est.se_alpha = cell.se;
        for (const auto& [k, z_pub, p_pub] : {std::tuple{2.0, cell.z2, cell.p2}, std::tuple{4.0, cell.z4, cell.p4}}) {
            const auto t = moment_existence_test(est, k);
            const double table_p = t.parameters.at("table_p");
            ++rows;
            if (std::abs(t.statistic - z_pub) > z_tol) {
                ++z_misses;
                misses += fmt::format("; {} {} k={}: z {:.2f} vs {:.2f}", cell.series, cell.side, k, t.statistic,
                                      z_pub);
            }
            if (std::abs(table_p - p_pub) > p_tol) {
                ++p_misses;
                misses += fmt::format("; {} {} k={}: p {:.3f} vs {:.2f}", cell.series, cell.side, k, table_p, p_pub);
            }
        }
    }
    constexpr std::size_t cells = std::size(published::kTailCells);
    return {z_misses == 0 && p_misses == 0,
            fmt::format("{} cells, {} test rows: {} z mismatches (tol {}), {} parenthetical mismatches (tol {}){}",
                        cells, rows, z_misses, z_tol, p_misses, p_tol, misses)};
}

// 5. Waiting periods.
Outcome waiting_periods() {
    const long expected[] = {20, 100, 250, 500};
    std::string got;
    bool ok = true;
    for (int c = 0; c < 4; ++c) {
        const long d = waiting_days(published::kCoverage[c]);
        ok = ok && d == expected[c];
        got += fmt::format("{}{}", c ? ", " : "", d);
    }
    return {ok, fmt::format("[{}] vs [20, 100, 250, 500]", got)};
}

// 6. Huisman estimator on Pareto and Student-t samples.
Outcome hill_oracles() {
    bool ok = true;
    std::string detail;
    for (const double alpha : {2.0, 3.0, 4.0}) {
        int covered = 0;
        constexpr int reps = 200;
        for (int r = 0; r < reps; ++r) {
            GeneratorSpec spec{GeneratorKind::Pareto, ParetoParams{alpha, 1.0}, 100000,
                               static_cast<std::uint64_t>(6000 + 1000 * alpha + r)};
            const auto est = estimate_tail(generate_returns(spec), Side::Short);
            covered += std::abs(est.alpha - alpha) <= 3.0 * est.se_alpha;
        }
        const double rate = static_cast<double>(covered) / reps;
        ok = ok && rate >= 0.95;
        detail += fmt::format("pareto({}) 3se coverage {:.3f}; ", alpha, rate);
    }

    constexpr int reps = 500;
    double wls_sum = 0.0;
    double hill_sum = 0.0;
    int used = 0;
    for (int r = 0; r < reps; ++r) {
        GeneratorSpec spec{GeneratorKind::StudentT, StudentTParams{3.0, 1.0}, 250, static_cast<std::uint64_t>(66000 + r)};
        const auto asc = tail_sample(generate_returns(spec), Side::Short);
        const std::size_t eta = default_eta(asc);
        try {
            const auto est = huisman_estimate(asc, eta, Side::Short);
            const double hill = 1.0 / hill_inverse_alpha(asc, eta / 2);
            wls_sum += est.alpha;
            hill_sum += hill;
            ++used;
        } catch (const EstimationError&) {
            // non-positive intercept: no finite alpha to average
        }
    }
    const double wls_bias = std::abs(wls_sum / used - 3.0);
    const double hill_bias = std::abs(hill_sum / used - 3.0);
    ok = ok && wls_bias < hill_bias;
    detail += fmt::format("t(3) n=250: |bias| wls {:.4f} vs hill(eta/2) {:.4f} over {} of {} replications", wls_bias,
                          hill_bias, used, reps);
    return {ok, detail};
}

// 7. GARCH(1,1) parameter recovery.
Outcome garch_oracles() {
    const GarchParams truth{0.01, 0.01, 0.96, 0.0};
    const Garch11Params sim_params{truth, 1000};
    constexpr int reps = 50;
    std::vector<double> a0;
    std::vector<double> a1;
    std::vector<double> b1;
    double var_sum = 0.0;
    int converged = 0;
    for (int r = 0; r < reps; ++r) {
        Rng rng(77000 + static_cast<std::uint64_t>(r));
        const auto sim = simulate_garch11(sim_params, 50000, rng);
        const auto fit = fit_garch11(sim.returns);
        a0.push_back(fit.params.alpha0);
        a1.push_back(fit.params.alpha1);
        b1.push_back(fit.params.beta1);
        converged += fit.converged;
        const double m = std::accumulate(sim.returns.begin(), sim.returns.end(), 0.0) / sim.returns.size();
        double ss = 0.0;
        for (double x : sim.returns) ss += (x - m) * (x - m);
        var_sum += ss / sim.returns.size();
    }
    bool ok = true;
    std::string detail;
    const std::pair<const char*, std::pair<std::vector<double>*, double>> params[] = {
        {"alpha0", {&a0, truth.alpha0}}, {"alpha1", {&a1, truth.alpha1}}, {"beta1", {&b1, truth.beta1}}};
    for (const auto& [name, data] : params) {
        auto& v = *data.first;
        std::sort(v.begin(), v.end());
        const double lo = sorted_quantile(v, 0.025);
        const double hi = sorted_quantile(v, 0.975);
        const bool in = lo <= data.second && data.second <= hi;
        ok = ok && in;
        detail += fmt::format("{} {} in [{:.5f}, {:.5f}]; ", name, data.second, lo, hi);
    }
    const double target = truth.unconditional_variance();
    const double simulated = var_sum / reps;
    const double rel = std::abs(simulated / target - 1.0);
    ok = ok && rel <= 0.02;
    detail += fmt::format("long-run variance {:.5f} vs {:.5f} ({:.2f}%, tol 2%); {}/{} fits converged", simulated,
                          target, 100.0 * rel, converged, reps);
    return {ok, detail};
}

// 8. Historical quantile against a sort-and-scan oracle in exact integer
// arithmetic (coverage in basis points).
Outcome historical_exactness() {
    Rng rng(8080);
    int mismatches = 0;
    int compared = 0;
    int unavailable = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 10 + static_cast<std::size_t>(rng.uniform() * 991.0);
        std::vector<double> x(n);
        for (double& v : x) v = rng.student_t(4.0);
        for (const long bp : {9000L, 9500L, 9900L}) {
            const double p = bp / 10000.0;
            for (const Side side : {Side::Long, Side::Short}) {
                std::vector<double> losses = x;
                if (side == Side::Long) {
                    for (double& v : losses) v = -v;
                }
                std::sort(losses.begin(), losses.end());
                const long big_n = static_cast<long>(n);
                const bool resolvable = big_n * (10000 - bp) >= 10000;
                std::optional<double> oracle;
                if (resolvable) {
                    for (long k = 1; k <= big_n; ++k) {
                        if (k * 10000 >= bp * big_n) {
                            oracle = std::abs(losses[k - 1]);
                            break;
                        }
                    }
                }
                std::optional<double> got;
                try {
                    got = historical_margin(x, p, side);
                } catch (const UnavailableError&) {
                }
                ++compared;
                unavailable += !oracle.has_value();
                if (got.has_value() != oracle.has_value() || (got && *got != *oracle)) ++mismatches;
            }
        }
    }
    return {mismatches == 0, fmt::format("{} comparisons ({} unavailable), {} mismatches", compared, unavailable,
                                         mismatches)};
}

// 9. Size of the KS test and uniformity of Ljung-Box p-values under iid
// Gaussian data.
Outcome test_calibration() {
    constexpr std::size_t n = 247;
    constexpr int series = 1000;
    const KsNullDistribution null(n, kDefaultKsReps, kDefaultKsSeed);
    Rng rng(909);
    int rejections = 0;
    std::vector<double> lb_p;
    std::vector<double> x(n);
    for (int s = 0; s < series; ++s) {
        for (double& v : x) v = rng.normal();
        rejections += ks_normality(x, null).p_value <= 0.05;
        lb_p.push_back(ljung_box(x, 20).p_value);
    }
    std::sort(lb_p.begin(), lb_p.end());
    double d = 0.0;
    for (std::size_t i = 0; i < lb_p.size(); ++i) {
        const double m = static_cast<double>(lb_p.size());
        d = std::max({d, (i + 1) / m - lb_p[i], lb_p[i] - i / m});
    }
    const double rate = static_cast<double>(rejections) / series;
    const double p = chi_square_upper_tail(published::kLjungBoxQ, 20.0);
    const bool ok = rate >= 0.03 && rate <= 0.07 && d < 0.05 && std::abs(p - 0.157) <= 0.001;
    return {ok, fmt::format("KS rejection rate {:.3f} (in [0.03, 0.07]); LB p-value uniformity D {:.4f} (< 0.05); "
                            "Q=26.29 df=20 -> p {:.4f} (0.157 +/- 0.001)",
                            rate, d, p)};
}

std::map<std::string, std::string> read_dir(const std::filesystem::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        std::ifstream in(e.path(), std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        files[e.path().filename().string()] = ss.str();
    }
    return files;
}

// 10. Structural invariants.
Outcome structural() {
    std::string detail;
    bool ok = true;

    // Telescoping: 5-minute returns of a day sum to the open-to-close change.
    {
        GeneratorSpec spec;
        spec.kind = GeneratorKind::TickWalk;
        TickWalkParams p;
        p.days = 30;
        p.roll_day = 10;
        spec.params = p;
        spec.seed = 10;
        const TradingCalendar cal;
        const auto clean = roll_contracts(filter_calendar(generate_ticks(spec), cal));
        const auto r5 = resample_intraday(clean, std::chrono::minutes{5}, cal);
        std::map<Date, std::pair<double, double>> first_last;
        for (const auto& t : clean.ticks) {
            auto [it, fresh] = first_last.try_emplace(date_of(t.timestamp), t.price, t.price);
            it->second.second = t.price;
        }
        std::map<std::size_t, double> sums;
        for (std::size_t i = 0; i < r5.size(); ++i) sums[r5.day_index[i]] += r5.values[i];
        double worst = 0.0;
        std::size_t day = 0;
        for (const auto& [date, fl] : first_last) {
            worst = std::max(worst, std::abs(sums[day++] - 100.0 * std::log(fl.second / fl.first)));
        }
        ok = ok && worst <= 1e-9 && sums.size() == first_last.size();
        detail += fmt::format("telescoping max err {:.2e}; ", worst);
    }

    // Scale equivariance and monotonicity in p.
    {
        Rng rng(1010);
        std::vector<double> x(2000);
        for (double& v : x) v = rng.student_t(4.0);
        const double coverages[] = {0.95, 0.99, 0.996, 0.998};
        const Model models[] = {Model::Gaussian, Model::ExtremeValue, Model::Historical};
        ModelOptions opts;
        opts.fit_garch = false;
        const auto base = prepare_inputs(x, opts);
        double worst_rel = 0.0;
        int monotone_violations = 0;
        for (const double c : {0.5, 3.0}) {
            std::vector<double> y = x;
            for (double& v : y) v *= c;
            const auto scaled = prepare_inputs(y, opts);
            for (const Model m : models) {
                for (const Side side : {Side::Long, Side::Short}) {
                    for (const double p : coverages) {
                        const auto a = model_margin(base, {p, 1.0, side, m});
                        const auto b = model_margin(scaled, {p, 1.0, side, m});
                        if (a.margin.has_value() != b.margin.has_value()) {
                            worst_rel = INFINITY;
                        } else if (a.margin) {
                            worst_rel = std::max(worst_rel, std::abs(*b.margin / (c * *a.margin) - 1.0));
                        }
                    }
                }
            }
        }
        for (const Model m : models) {
            for (const Side side : {Side::Long, Side::Short}) {
                double prev = 0.0;
                for (const double p : coverages) {
                    const auto r = model_margin(base, {p, 1.0, side, m});
                    if (!r.margin) continue;
                    monotone_violations += *r.margin < prev;
                    prev = *r.margin;
                }
            }
        }
        ok = ok && worst_rel <= 1e-9 && monotone_violations == 0;
        detail += fmt::format("scale equivariance max rel err {:.2e}; monotonicity violations {}; ", worst_rel,
                              monotone_violations);
    }

    // Feller scaling at alpha = 2 equals square-root scaling.
    {
        double worst = 0.0;
        for (const double m : {0.5, 1.0, 2.17, 3.9}) {
            for (const double t : {1.0, 9.0, 24.0, 113.0, 288.0}) {
                worst = std::max(worst, std::abs(feller_scale(m, t, 2.0) - sqrt_scale(m, t)));
            }
        }
        ok = ok && worst <= 1e-12;
        detail += fmt::format("feller/sqrt max diff {:.2e}; ", worst);
    }

    // Byte-identical reports on repeated runs.
    {
        namespace fs = std::filesystem;
        const fs::path root = fs::temp_directory_path() / fmt::format("hfmargin_accept_{}", ::getpid());
        std::ostringstream sink;
        bool same = true;
        std::vector<std::map<std::string, std::string>> runs;
        // Same paths both times: they are part of the hashed configuration.
        const auto dir = root.string();
        const auto ticks = (root / "synth_ticks.csv").string();
        for (int pass = 0; pass < 2; ++pass) {
            std::error_code ec;
            fs::remove_all(root, ec);
            int rc = cli::run({"synth", "--out", dir, "--synth-days", "40", "--seed", "5"}, sink, sink);
            for (const char* cmd : {"stats", "tails", "margins", "compare"}) {
                rc |= cli::run({cmd, "--input", ticks, "--out", dir, "--ks-reps", "200"}, sink, sink);
            }
            same = same && rc == 0;
            runs.push_back(read_dir(dir));
        }
        same = same && runs[0] == runs[1] && runs[0].size() > 1;
        std::error_code ec;
        fs::remove_all(root, ec);
        ok = ok && same;
        detail += fmt::format("repeated CLI runs byte-identical: {} ({} files)", same ? "yes" : "no", runs[0].size());
    }
    return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria{
        {1, "gaussian table reproduction", 1.0, gaussian_table},
        {2, "averaging reproduction", 1.0, averaging},
        {3, "calendar scaling reproduction", 1.0, calendar_scaling},
        {4, "moment test reproduction", 1.0, moment_tests},
        {5, "waiting periods", 1.0, waiting_periods},
        {6, "hill/huisman oracle suite", 300.0, hill_oracles},
        {7, "garch oracle suite", 600.0, garch_oracles},
        {8, "historical quantile exactness", 60.0, historical_exactness},
        {9, "test calibration", 60.0, test_calibration},
        {10, "structural invariants", 120.0, structural},
    };

    int only = 0;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--criterion" && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else {
            std::cerr << "usage: hfmargin_acceptance [--criterion N]\n";
            return 2;
        }
    }

    int failures = 0;
    int ran = 0;
    for (const auto& c : criteria) {
        if (only != 0 && c.id != only) continue;
        ++ran;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {false, fmt::format("exception: {}", e.what())};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs <= c.budget_seconds;
        const bool pass = o.pass && in_time;
        failures += !pass;
        fmt::print("{} criterion {:>2} {}: {} [{:.2f} s, budget {} s{}]\n", pass ? "PASS" : "FAIL", c.id, c.title,
                   o.detail, secs, c.budget_seconds, in_time ? "" : ", over budget");
    }
    if (ran == 0) {
        std::cerr << "no such criterion\n";
        return 2;
    }
    return failures == 0 ? 0 : 1;
}
