#include "hfmargin/descstats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <fmt/format.h>

#include "hfmargin/error.hpp"
#include "hfmargin/normal.hpp"
#include "hfmargin/rng.hpp"

namespace hfmargin {

namespace {

double mean_of(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

bool is_constant(std::span<const double> v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *lo == *hi;
}

void require_finite(std::span<const double> v) {
    for (double x : v) {
        if (!std::isfinite(x)) throw std::invalid_argument("series contains non-finite values");
    }
}

/// D on an ascending sample given fitted mean and sd.
double ks_sorted(std::span<const double> sorted, double mean, double sd) {
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = normal_cdf((sorted[i] - mean) / sd);
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    return d;
}

double sample_sd(std::span<const double> v, double mean) {
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / (v.size() - 1));
}

}  // namespace

MomentSummary moment_summary(std::span<const double> values) {
    if (values.size() < 2) {
        throw InsufficientDataError(fmt::format("moments need at least 2 observations, got {}", values.size()));
    }
    require_finite(values);
    if (is_constant(values)) throw ZeroVarianceError("constant series: skewness and kurtosis undefined");

    MomentSummary s;
    s.n = values.size();
    const double n = static_cast<double>(s.n);
    s.mean = mean_of(values);
    double m2 = 0.0;
    double m3 = 0.0;
    double m4 = 0.0;
    for (double x : values) {
        const double d = x - s.mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    s.std_dev = std::sqrt(m2 / (n - 1.0));
    m2 /= n;
    m3 /= n;
    m4 /= n;
    s.skewness = m3 / std::pow(m2, 1.5);
    if (s.n >= 4) s.excess_kurtosis = m4 / (m2 * m2) - 3.0;

    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    s.min = sorted.front();
    s.max = sorted.back();
    s.q25 = sorted_quantile(sorted, 0.25);
    s.median = sorted_quantile(sorted, 0.5);
    s.q75 = sorted_quantile(sorted, 0.75);
    return s;
}

MomentSummary moment_summary(const ReturnSeries& series) { return moment_summary(series.values); }

double sorted_quantile(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw InsufficientDataError("quantile of an empty series");
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile probability outside [0, 1]");
    if (q == 0.0) return sorted.front();
    const double n = static_cast<double>(sorted.size());
    // q*n that is an integer up to rounding must not step to the next rank.
    auto rank = static_cast<std::size_t>(std::ceil(q * n - 1e-9 * n));
    rank = std::clamp<std::size_t>(rank, 1, sorted.size());
    return sorted[rank - 1];
}

double empirical_quantile(std::span<const double> values, double q) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    return sorted_quantile(sorted, q);
}

double empirical_quantile(const ReturnSeries& series, double q) { return empirical_quantile(series.values, q); }

double ks_statistic_estimated(std::span<const double> values) {
    if (values.size() < 2) throw InsufficientDataError("KS statistic needs at least 2 observations");
    require_finite(values);
    if (is_constant(values)) throw ZeroVarianceError("KS normality test on a constant series");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double mean = mean_of(sorted);
    return ks_sorted(sorted, mean, sample_sd(sorted, mean));
}

KsNullDistribution::KsNullDistribution(std::size_t n, std::size_t reps, std::uint64_t seed) : n_(n) {
    if (n < 8) throw InsufficientDataError("KS normality test needs at least 8 observations");
    if (reps == 0) throw std::invalid_argument("KS Monte Carlo needs at least one replication");
    Rng rng(seed);
    std::vector<double> sample(n);
    sorted_.reserve(reps);
    for (std::size_t r = 0; r < reps; ++r) {
        for (double& x : sample) x = rng.normal();
        std::sort(sample.begin(), sample.end());
        const double mean = mean_of(sample);
        sorted_.push_back(ks_sorted(sample, mean, sample_sd(sample, mean)));
    }
    std::sort(sorted_.begin(), sorted_.end());
}

double KsNullDistribution::p_value(double d) const {
    const auto at_least = static_cast<double>(sorted_.end() - std::lower_bound(sorted_.begin(), sorted_.end(), d));
    return (1.0 + at_least) / (1.0 + static_cast<double>(sorted_.size()));
}

TestResult ks_normality(std::span<const double> values, const KsNullDistribution& null) {
    if (values.size() < 8) throw InsufficientDataError("KS normality test needs at least 8 observations");
    if (values.size() != null.sample_size()) {
        throw std::invalid_argument("KS null distribution was built for a different sample size");
    }
    TestResult r;
    r.test_name = "kolmogorov_smirnov_normal";
    r.statistic = ks_statistic_estimated(values);
    r.p_value = null.p_value(r.statistic);
    r.parameters["mc_reps"] = static_cast<double>(null.reps());
    r.parameters["n"] = static_cast<double>(values.size());
    return r;
}

TestResult ks_normality(std::span<const double> values, std::size_t mc_reps, std::uint64_t seed) {
    if (values.size() < 8) throw InsufficientDataError("KS normality test needs at least 8 observations");
    require_finite(values);
    if (is_constant(values)) throw ZeroVarianceError("KS normality test on a constant series");
    const KsNullDistribution null(values.size(), mc_reps, seed);
    return ks_normality(values, null);
}

std::vector<double> autocorrelations(std::span<const double> values, std::size_t max_lag) {
    if (values.size() <= max_lag) throw InsufficientDataError("series shorter than requested lag");
    require_finite(values);
    if (is_constant(values)) throw ZeroVarianceError("autocorrelations of a constant series are undefined");
    const double mean = mean_of(values);
    double denom = 0.0;
    for (double x : values) denom += (x - mean) * (x - mean);
    std::vector<double> rho(max_lag);
    for (std::size_t k = 1; k <= max_lag; ++k) {
        double num = 0.0;
        for (std::size_t t = k; t < values.size(); ++t) num += (values[t] - mean) * (values[t - k] - mean);
        rho[k - 1] = num / denom;
    }
    return rho;
}

double chi_square_upper_tail(double q, double dof) {
    if (q <= 0.0) return 1.0;
    const boost::math::chi_squared_distribution<double> chi2(dof);
    return boost::math::cdf(boost::math::complement(chi2, q));
}

TestResult ljung_box(std::span<const double> values, std::size_t lags) {
    if (lags == 0) throw std::invalid_argument("Ljung-Box needs at least one lag");
    if (values.size() <= lags + 1) {
        throw InsufficientDataError(
            fmt::format("Ljung-Box with {} lags needs more than {} observations", lags, lags + 1));
    }
    const auto rho = autocorrelations(values, lags);
    const double n = static_cast<double>(values.size());
    double q = 0.0;
    for (std::size_t k = 1; k <= lags; ++k) q += rho[k - 1] * rho[k - 1] / (n - static_cast<double>(k));
    q *= n * (n + 2.0);
    TestResult r;
    r.test_name = "ljung_box";
    r.statistic = q;
    r.p_value = chi_square_upper_tail(q, static_cast<double>(lags));
    r.parameters["lags"] = static_cast<double>(lags);
    return r;
}

}  // namespace hfmargin
