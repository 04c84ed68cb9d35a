#include "hfmargin/garch.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

#include "hfmargin/error.hpp"
#include "hfmargin/normal.hpp"

namespace hfmargin {

namespace {

constexpr std::size_t kMinObservations = 100;
using Point = std::array<double, 3>;

/// Unconstrained (log alpha0, logit-like a1, b1) -> feasible parameters.
/// alpha1 = e^u / (1 + e^u + e^v), beta1 = e^v / (1 + e^u + e^v), so both are
/// positive and alpha1 + beta1 < 1 for every finite point.
GarchParams decode(const Point& x, double mu) {
    const double m = std::max({0.0, x[1], x[2]});
    const double e0 = std::exp(-m);
    const double e1 = std::exp(x[1] - m);
    const double e2 = std::exp(x[2] - m);
    const double denom = e0 + e1 + e2;
    return {std::exp(x[0]), e1 / denom, e2 / denom, mu};
}

Point encode(const GarchParams& p) {
    const double rest = 1.0 - p.alpha1 - p.beta1;
    return {std::log(p.alpha0), std::log(p.alpha1 / rest), std::log(p.beta1 / rest)};
}

struct Simplex {
    std::array<Point, 4> vertex;
    std::array<double, 4> value;  // negative log-likelihood
};

/// Nelder-Mead minimization with standard coefficients. Returns the number of
/// iterations used and whether the spread criterion was met.
template <typename F>
std::pair<std::size_t, bool> nelder_mead(F&& f, Simplex& s, std::size_t budget, double tol) {
    std::array<std::size_t, 4> order{0, 1, 2, 3};
    for (std::size_t it = 0; it < budget; ++it) {
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return s.value[a] < s.value[b]; });
        const std::size_t best = order[0];
        const std::size_t worst = order[3];
        const std::size_t second = order[2];
        if (std::abs(s.value[worst] - s.value[best]) <= tol * (1.0 + std::abs(s.value[best]))) {
            return {it, true};
        }
        Point centroid{0.0, 0.0, 0.0};
        for (std::size_t k = 0; k < 3; ++k) {
            for (std::size_t d = 0; d < 3; ++d) centroid[d] += s.vertex[order[k]][d] / 3.0;
        }
        auto along = [&](double t) {
            Point p;
            for (std::size_t d = 0; d < 3; ++d) p[d] = centroid[d] + t * (s.vertex[worst][d] - centroid[d]);
            return p;
        };
        const Point reflected = along(-1.0);
        const double fr = f(reflected);
        if (fr < s.value[best]) {
            const Point expanded = along(-2.0);
            const double fe = f(expanded);
            if (fe < fr) {
                s.vertex[worst] = expanded;
                s.value[worst] = fe;
            } else {
                s.vertex[worst] = reflected;
                s.value[worst] = fr;
            }
            continue;
        }
        if (fr < s.value[second]) {
            s.vertex[worst] = reflected;
            s.value[worst] = fr;
            continue;
        }
        const bool outside = fr < s.value[worst];
        const Point contracted = along(outside ? -0.5 : 0.5);
        const double fc = f(contracted);
        if (fc < (outside ? fr : s.value[worst])) {
            s.vertex[worst] = contracted;
            s.value[worst] = fc;
            continue;
        }
        for (std::size_t k = 1; k < 4; ++k) {
            const std::size_t idx = order[k];
            for (std::size_t d = 0; d < 3; ++d) {
                s.vertex[idx][d] = s.vertex[best][d] + 0.5 * (s.vertex[idx][d] - s.vertex[best][d]);
            }
            s.value[idx] = f(s.vertex[idx]);
        }
    }
    return {budget, false};
}

Simplex simplex_around(const Point& x, double step, const auto& f) {
    Simplex s;
    s.vertex[0] = x;
    for (std::size_t d = 0; d < 3; ++d) {
        s.vertex[d + 1] = x;
        s.vertex[d + 1][d] += step;
    }
    for (std::size_t k = 0; k < 4; ++k) s.value[k] = f(s.vertex[k]);
    return s;
}

}  // namespace

bool GarchParams::feasible() const noexcept {
    return alpha0 > 0.0 && alpha1 >= 0.0 && beta1 >= 0.0 && alpha1 + beta1 <= 1.0 && std::isfinite(mu);
}

double GarchParams::unconditional_variance() const noexcept {
    const double persistence = alpha1 + beta1;
    if (persistence >= 1.0) return std::numeric_limits<double>::infinity();
    return alpha0 / (1.0 - persistence);
}

double GarchFit::last_eps2() const {
    if (residuals.empty()) throw std::logic_error("empty GARCH fit");
    return residuals.back() * residuals.back();
}

double GarchFit::last_sigma2() const {
    if (sigma2_path.empty()) throw std::logic_error("empty GARCH fit");
    return sigma2_path.back();
}

double garch_log_likelihood(std::span<const double> returns, const GarchParams& params, std::vector<double>* sigma2) {
    const std::size_t n = returns.size();
    if (n == 0) return 0.0;
    double var0 = 0.0;
    for (double r : returns) var0 += (r - params.mu) * (r - params.mu);
    var0 /= static_cast<double>(n);

    if (sigma2) sigma2->resize(n);
    const double log_2pi = std::log(2.0 * std::numbers::pi);
    double ll = 0.0;
    double s2 = var0;
    double prev_eps2 = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        if (t > 0) s2 = params.alpha0 + params.alpha1 * prev_eps2 + params.beta1 * s2;
        const double eps = returns[t] - params.mu;
        prev_eps2 = eps * eps;
        ll -= 0.5 * (log_2pi + std::log(s2) + prev_eps2 / s2);
        if (sigma2) (*sigma2)[t] = s2;
    }
    return ll;
}

GarchFit fit_garch11(std::span<const double> returns, const GarchOptions& options) {
    if (returns.size() < kMinObservations) {
        throw InsufficientDataError(
            fmt::format("GARCH(1,1) needs at least {} observations, got {}", kMinObservations, returns.size()));
    }
    for (double r : returns) {
        if (!std::isfinite(r)) throw std::invalid_argument("GARCH input contains non-finite values");
    }
    const double mu = std::accumulate(returns.begin(), returns.end(), 0.0) / static_cast<double>(returns.size());
    double var = 0.0;
    for (double r : returns) var += (r - mu) * (r - mu);
    var /= static_cast<double>(returns.size());
    if (!(var > 0.0)) throw ZeroVarianceError("GARCH fit on a constant series");

    const GarchParams init{0.05 * var, 0.05, 0.90, mu};
    auto objective = [&](const Point& x) {
        const double ll = garch_log_likelihood(returns, decode(x, mu));
        return std::isfinite(ll) ? -ll : std::numeric_limits<double>::max();
    };

    GarchFit fit;
    fit.initial_log_likelihood = garch_log_likelihood(returns, init);

    Point best = encode(init);
    double best_value = objective(best);
    std::size_t used = 0;
    bool converged = false;
    // Restart from the best vertex until a fresh simplex no longer improves.
    double step = 0.5;
    while (used < options.max_iterations) {
        Simplex s = simplex_around(best, step, objective);
        const auto [iters, met] = nelder_mead(objective, s, options.max_iterations - used, options.tolerance);
        used += iters;
        const auto arg = static_cast<std::size_t>(std::min_element(s.value.begin(), s.value.end()) - s.value.begin());
        const double improvement = best_value - s.value[arg];
        if (s.value[arg] < best_value) {
            best = s.vertex[arg];
            best_value = s.value[arg];
        }
        if (!met) break;
        if (improvement <= options.tolerance * (1.0 + std::abs(best_value))) {
            converged = true;
            break;
        }
        step = 0.1;
        ++used;  // count each restart against the budget
    }

    fit.params = decode(best, mu);
    fit.log_likelihood = garch_log_likelihood(returns, fit.params, &fit.sigma2_path);
    fit.residuals.resize(returns.size());
    for (std::size_t t = 0; t < returns.size(); ++t) fit.residuals[t] = returns[t] - mu;
    fit.converged = converged;
    fit.iterations = used;
    return fit;
}

GarchFit fit_garch11(const ReturnSeries& series, const GarchOptions& options) {
    return fit_garch11(series.values, options);
}

double forecast_sigma2(const GarchParams& params, double last_eps2, double last_sigma2) {
    if (last_eps2 < 0.0 || last_sigma2 < 0.0) throw std::invalid_argument("variance inputs must be non-negative");
    return params.alpha0 + params.alpha1 * last_eps2 + params.beta1 * last_sigma2;
}

double forecast_sigma2(const GarchFit& fit) { return forecast_sigma2(fit.params, fit.last_eps2(), fit.last_sigma2()); }

double garch_margin(const GarchFit& fit, double p, double horizon, Side side) {
    if (!(p > 0.5 && p < 1.0)) throw std::invalid_argument("coverage must lie in (0.5, 1)");
    if (!(horizon >= 1.0)) throw std::invalid_argument("horizon must be >= 1");
    const double sigma = std::sqrt(forecast_sigma2(fit));
    const double q = normal_quantile(side == Side::Short ? p : 1.0 - p);
    return std::abs(fit.params.mu * horizon + q * sigma * std::sqrt(horizon));
}

}  // namespace hfmargin
