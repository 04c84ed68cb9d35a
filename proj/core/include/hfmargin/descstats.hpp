#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hfmargin/types.hpp"

namespace hfmargin {

struct MomentSummary {
    std::size_t n = 0;
    double mean = 0.0;
    double std_dev = 0.0;  ///< n-1 denominator
    double skewness = 0.0;
    /// m4/m2^2 - 3. Absent below four observations.
    std::optional<double> excess_kurtosis;
    double min = 0.0;
    double q25 = 0.0;
    double median = 0.0;
    double q75 = 0.0;
    double max = 0.0;
};

struct TestResult {
    std::string test_name;
    double statistic = 0.0;
    double p_value = 1.0;
    std::map<std::string, double> parameters;
};

/// Throws InsufficientDataError for n < 2 and ZeroVarianceError for a
/// constant sample.
[[nodiscard]] MomentSummary moment_summary(std::span<const double> values);
[[nodiscard]] MomentSummary moment_summary(const ReturnSeries& series);

/// Nearest-rank order statistic: q = 0 gives the minimum, otherwise the
/// ceil(q n)-th smallest value.
[[nodiscard]] double empirical_quantile(std::span<const double> values, double q);
[[nodiscard]] double empirical_quantile(const ReturnSeries& series, double q);
/// Same rule on data the caller already sorted ascending.
[[nodiscard]] double sorted_quantile(std::span<const double> sorted, double q);

/// sup_x |F_n(x) - Phi((x - mean) / sd)| with mean and sd estimated from the sample.
[[nodiscard]] double ks_statistic_estimated(std::span<const double> values);

/// Null distribution of the estimated-parameter KS statistic for one sample
/// size, built by simulation. Reusable across many samples of that size.
class KsNullDistribution {
public:
    KsNullDistribution(std::size_t n, std::size_t reps, std::uint64_t seed);

    [[nodiscard]] std::size_t sample_size() const noexcept { return n_; }
    [[nodiscard]] std::size_t reps() const noexcept { return sorted_.size(); }
    /// (1 + #{simulated D >= d}) / (1 + reps)
    [[nodiscard]] double p_value(double d) const;

private:
    std::size_t n_;
    std::vector<double> sorted_;
};

inline constexpr std::size_t kDefaultKsReps = 10'000;
inline constexpr std::uint64_t kDefaultKsSeed = 20000101;

/// Kolmogorov-Smirnov normality test with Monte Carlo p-value under the
/// estimated-parameter null. Requires n >= 8.
[[nodiscard]] TestResult ks_normality(std::span<const double> values,
                                      std::size_t mc_reps = kDefaultKsReps,
                                      std::uint64_t seed = kDefaultKsSeed);
[[nodiscard]] TestResult ks_normality(std::span<const double> values, const KsNullDistribution& null);

/// Sample autocorrelations at lags 1..max_lag.
[[nodiscard]] std::vector<double> autocorrelations(std::span<const double> values, std::size_t max_lag);

/// Q = n(n+2) sum_k rho_k^2 / (n - k), chi-square(lags) p-value. Requires n > lags + 1.
[[nodiscard]] TestResult ljung_box(std::span<const double> values, std::size_t lags = 20);

[[nodiscard]] double chi_square_upper_tail(double q, double dof);

}  // namespace hfmargin
