#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hfmargin/types.hpp"

namespace hfmargin {

/// sigma2_t = alpha0 + alpha1 * eps2_{t-1} + beta1 * sigma2_{t-1}, eps_t = r_t - mu.
struct GarchParams {
    double alpha0 = 0.0;  ///< percent^2
    double alpha1 = 0.0;
    double beta1 = 0.0;
    double mu = 0.0;  ///< percent

    [[nodiscard]] bool feasible() const noexcept;
    /// alpha0 / (1 - alpha1 - beta1); infinite when alpha1 + beta1 >= 1.
    [[nodiscard]] double unconditional_variance() const noexcept;
};

struct GarchFit {
    GarchParams params;
    std::vector<double> sigma2_path;
    std::vector<double> residuals;
    double log_likelihood = 0.0;
    double initial_log_likelihood = 0.0;
    bool converged = false;
    std::size_t iterations = 0;

    [[nodiscard]] double last_eps2() const;
    [[nodiscard]] double last_sigma2() const;
};

struct GarchOptions {
    std::size_t max_iterations = 500;
    /// Simplex stops once the spread of log-likelihood values falls below this.
    double tolerance = 1e-9;
};

/// Gaussian log-likelihood of the variance recursion started at the sample
/// variance. Fills `sigma2` when non-null.
[[nodiscard]] double garch_log_likelihood(std::span<const double> returns, const GarchParams& params,
                                          std::vector<double>* sigma2 = nullptr);

/// Maximum-likelihood GARCH(1,1). `mu` is fixed at the sample mean. Requires
/// n >= 100 and a non-constant series. Deterministic for given input.
[[nodiscard]] GarchFit fit_garch11(std::span<const double> returns, const GarchOptions& options = {});
[[nodiscard]] GarchFit fit_garch11(const ReturnSeries& series, const GarchOptions& options = {});

[[nodiscard]] double forecast_sigma2(const GarchParams& params, double last_eps2, double last_sigma2);
/// One-step forecast from the end of the fitted sample.
[[nodiscard]] double forecast_sigma2(const GarchFit& fit);

/// |mu T + q sigma_{t+1} sqrt(T)| with q the normal quantile at p (short)
/// or 1 - p (long).
[[nodiscard]] double garch_margin(const GarchFit& fit, double p, double horizon, Side side);

}  // namespace hfmargin
