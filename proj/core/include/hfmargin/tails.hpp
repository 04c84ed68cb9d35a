#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hfmargin/descstats.hpp"
#include "hfmargin/types.hpp"

namespace hfmargin {

/// Tail-index estimate for one side of a return distribution.
///
/// Left-tail estimates are computed on the negated series, so `threshold`
/// is always a positive magnitude.
struct TailEstimate {
    double alpha = 0.0;
    double se_alpha = 0.0;
    double inv_alpha = 0.0;
    double se_inv_alpha = 0.0;
    /// WLS slope of the Hill curve.
    double slope = 0.0;
    Side side = Side::Short;
    std::size_t n_tail = 0;
    double threshold = 0.0;
    std::size_t sample_size = 0;
};

/// Hill estimates of 1/alpha for n = 1..eta.
struct HillCurve {
    std::vector<double> inv_alpha;  ///< inv_alpha[n - 1]

    [[nodiscard]] std::size_t eta() const noexcept { return inv_alpha.size(); }
    [[nodiscard]] double at(std::size_t n) const { return inv_alpha.at(n - 1); }
};

/// Maximum-likelihood Hill estimate of 1/alpha from the n largest values
/// of an ascending sample: mean of ln r_(N+1-i) - ln r_(N-n), i = 1..n.
[[nodiscard]] double hill_inverse_alpha(std::span<const double> ascending, std::size_t n);

/// Standard error of 1/alpha for the plain Hill estimator: (1/alpha)/sqrt(n).
[[nodiscard]] double hill_se_inverse_alpha(double inv_alpha, std::size_t n) noexcept;

[[nodiscard]] HillCurve hill_curve(std::span<const double> ascending, std::size_t eta);

/// Negates the series for the left tail and sorts ascending.
[[nodiscard]] std::vector<double> tail_sample(std::span<const double> values, Side side);

/// Default regression length: floor(N/2), capped at 1000 and at half the
/// number of positive values in the side-transformed sample.
[[nodiscard]] std::size_t default_eta(std::span<const double> ascending);

/// Bias-corrected tail index by weighted least squares of the Hill curve
/// on (1, n), n = 1..eta, with weights sqrt(n). The intercept is the
/// corrected 1/alpha. Its standard error uses the exact covariance of Hill
/// estimates under a Pareto tail, Cov(n, m) = (1/alpha)^2 / max(n, m).
///
/// `ascending` is the side-transformed, sorted sample. eta = 0 selects
/// default_eta().
[[nodiscard]] TailEstimate huisman_estimate(std::span<const double> ascending, std::size_t eta,
                                            Side side = Side::Short);

/// Convenience: side transform, sort, default eta.
[[nodiscard]] TailEstimate estimate_tail(std::span<const double> values, Side side, std::size_t eta = 0);

/// Test of alpha against moment order k with z = (alpha - k) / se_alpha.
///
/// `p_value` is the upper tail P(Z > z). `parameters["table_p"]` holds
/// max(Phi(z) - 0.5, 0), the convention in the published tail tables.
[[nodiscard]] TestResult moment_existence_test(const TailEstimate& est, double k);

[[nodiscard]] double moment_table_p(double z);

/// Tail quantile r_th * (n_tail / (N * p_exc))^(1/alpha). `p_exc` is the
/// exceedance probability, 1 - coverage. Throws UnavailableError when
/// p_exc > n_tail / N.
[[nodiscard]] double evt_margin(const TailEstimate& est, double p_exc);

/// T^(1/alpha) * ml_1
[[nodiscard]] double feller_scale(double ml_1, double horizon, double alpha);

}  // namespace hfmargin
