#include "hfmargin/tails.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "hfmargin/error.hpp"
#include "hfmargin/normal.hpp"

namespace hfmargin {

namespace {

constexpr std::size_t kEtaCap = 1000;
constexpr std::size_t kMinEta = 4;

void require_ascending(std::span<const double> v) {
    if (!std::is_sorted(v.begin(), v.end())) throw std::invalid_argument("tail sample must be sorted ascending");
}

double threshold_at(std::span<const double> asc, std::size_t n) {
    const double r = asc[asc.size() - n - 1];
    if (!(r > 0.0)) {
        throw EstimationError(
            fmt::format("tail threshold at n = {} is non-positive ({}); tail values must be > 0", n, r));
    }
    return r;
}

/// sum_{j,k} a_j b_k / max(j, k), indices 1-based, in O(len).
double max_kernel_form(std::span<const double> a, std::span<const double> b) {
    double total = 0.0;
    double prefix_a = 0.0;  // a_1..a_{m-1}
    double prefix_b = 0.0;  // b_1..b_m
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double m = static_cast<double>(i + 1);
        prefix_b += b[i];
        total += (a[i] * prefix_b + b[i] * prefix_a) / m;
        prefix_a += a[i];
    }
    return total;
}

}  // namespace

double hill_inverse_alpha(std::span<const double> ascending, std::size_t n) {
    const std::size_t total = ascending.size();
    if (n < 1 || n + 1 > total) {
        throw std::invalid_argument(fmt::format("Hill tail count {} outside [1, {}]", n, total == 0 ? 0 : total - 1));
    }
    require_ascending(ascending);
    const double log_threshold = std::log(threshold_at(ascending, n));
    double sum = 0.0;
    for (std::size_t i = 1; i <= n; ++i) sum += std::log(ascending[total - i]) - log_threshold;
    return sum / static_cast<double>(n);
}

double hill_se_inverse_alpha(double inv_alpha, std::size_t n) noexcept {
    return inv_alpha / std::sqrt(static_cast<double>(n));
}

HillCurve hill_curve(std::span<const double> ascending, std::size_t eta) {
    const std::size_t total = ascending.size();
    if (eta < 1 || eta + 1 > total) {
        throw std::invalid_argument(fmt::format("Hill curve length {} outside [1, {}]", eta, total == 0 ? 0 : total - 1));
    }
    require_ascending(ascending);
    threshold_at(ascending, eta);
    HillCurve curve;
    curve.inv_alpha.reserve(eta);
    double log_sum = 0.0;
    for (std::size_t n = 1; n <= eta; ++n) {
        log_sum += std::log(ascending[total - n]);
        curve.inv_alpha.push_back(log_sum / static_cast<double>(n) - std::log(ascending[total - n - 1]));
    }
    return curve;
}

std::vector<double> tail_sample(std::span<const double> values, Side side) {
    std::vector<double> out(values.begin(), values.end());
    if (side == Side::Long) {
        for (double& x : out) x = -x;
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::size_t default_eta(std::span<const double> ascending) {
    const auto positive = static_cast<std::size_t>(
        std::count_if(ascending.begin(), ascending.end(), [](double x) { return x > 0.0; }));
    return std::min({ascending.size() / 2, kEtaCap, positive / 2});
}

TailEstimate huisman_estimate(std::span<const double> ascending, std::size_t eta, Side side) {
    if (eta == 0) eta = default_eta(ascending);
    if (eta < kMinEta) {
        throw std::invalid_argument(fmt::format("tail regression needs eta >= {}, got {}", kMinEta, eta));
    }
    const HillCurve curve = hill_curve(ascending, eta);

    // Weighted normal equations for y_n = b0 + b1 n with weights sqrt(n).
    std::vector<double> w(eta);
    std::vector<double> wn(eta);
    double s0 = 0.0;
    double s1 = 0.0;
    double s2 = 0.0;
    double sy = 0.0;
    double sny = 0.0;
    for (std::size_t i = 0; i < eta; ++i) {
        const double n = static_cast<double>(i + 1);
        const double y = curve.inv_alpha[i];
        w[i] = std::sqrt(n);
        wn[i] = w[i] * n;
        s0 += w[i];
        s1 += wn[i];
        s2 += wn[i] * n;
        sy += w[i] * y;
        sny += wn[i] * y;
    }
    const double det = s0 * s2 - s1 * s1;
    const double b0 = (s2 * sy - s1 * sny) / det;
    const double b1 = (s0 * sny - s1 * sy) / det;
    if (!(b0 > 0.0) || !std::isfinite(b0)) {
        throw EstimationError(fmt::format("WLS intercept {} is not positive at eta = {}; tail not fat at this depth",
                                          b0, eta));
    }

    // Sandwich covariance A^-1 (X'W S W X) A^-1 with S_jk = b0^2 / max(j, k).
    const double m00 = max_kernel_form(w, w);
    const double m01 = max_kernel_form(w, wn);
    const double m11 = max_kernel_form(wn, wn);
    // First row of A^-1.
    const double i00 = s2 / det;
    const double i01 = -s1 / det;
    const double var_b0 = b0 * b0 * (i00 * i00 * m00 + 2.0 * i00 * i01 * m01 + i01 * i01 * m11);

    TailEstimate est;
    est.inv_alpha = b0;
    est.se_inv_alpha = std::sqrt(std::max(var_b0, 0.0));
    est.alpha = 1.0 / b0;
    est.se_alpha = est.alpha * est.alpha * est.se_inv_alpha;
    est.slope = b1;
    est.side = side;
    est.n_tail = eta;
    est.threshold = ascending[ascending.size() - eta - 1];
    est.sample_size = ascending.size();
    return est;
}

TailEstimate estimate_tail(std::span<const double> values, Side side, std::size_t eta) {
    const auto sample = tail_sample(values, side);
    return huisman_estimate(sample, eta, side);
}

double moment_table_p(double z) { return std::max(normal_cdf(z) - 0.5, 0.0); }

TestResult moment_existence_test(const TailEstimate& est, double k) {
    if (!(est.se_alpha > 0.0)) throw std::invalid_argument("moment test needs a positive standard error");
    const double z = (est.alpha - k) / est.se_alpha;
    TestResult r;
    r.test_name = fmt::format("alpha_gt_{}", k);
    r.statistic = z;
    r.p_value = 1.0 - normal_cdf(z);
    r.parameters["k"] = k;
    r.parameters["table_p"] = moment_table_p(z);
    return r;
}

double evt_margin(const TailEstimate& est, double p_exc) {
    if (!(p_exc > 0.0)) throw std::invalid_argument("exceedance probability must be positive");
    if (!(est.alpha > 0.0) || est.sample_size == 0) throw std::invalid_argument("invalid tail estimate");
    const double tail_fraction = static_cast<double>(est.n_tail) / static_cast<double>(est.sample_size);
    if (p_exc > tail_fraction * (1.0 + 1e-12)) {
        throw UnavailableError(fmt::format("exceedance probability {} lies inside the tail threshold (n/N = {})",
                                           p_exc, tail_fraction));
    }
    return est.threshold * std::pow(tail_fraction / p_exc, 1.0 / est.alpha);
}

double feller_scale(double ml_1, double horizon, double alpha) {
    if (!(horizon >= 1.0)) throw std::invalid_argument("horizon must be >= 1");
    if (!(alpha > 0.0)) throw std::invalid_argument("tail index must be positive");
    return std::pow(horizon, 1.0 / alpha) * ml_1;
}

}  // namespace hfmargin
