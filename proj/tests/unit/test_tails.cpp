#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "hfmargin/error.hpp"
#include "hfmargin/normal.hpp"
#include "hfmargin/rng.hpp"
#include "hfmargin/tails.hpp"

using namespace hfmargin;

namespace {

std::vector<double> pareto_sample(double alpha, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = rng.pareto(alpha);
    return v;
}

// Exact Pareto quantiles at (i - 0.5)/n: no sampling noise.
std::vector<double> exact_pareto(double alpha, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = std::pow(1.0 - (i + 0.5) / n, -1.0 / alpha);
    std::sort(v.begin(), v.end());
    return v;
}

TailEstimate made_up(double alpha, double se) {
    TailEstimate e;
    e.alpha = alpha;
    e.se_alpha = se;
    e.inv_alpha = 1.0 / alpha;
    e.n_tail = 10;
    e.sample_size = 1000;
    e.threshold = 2.0;
    return e;
}

}  // namespace

TEST(Hill, FiveValuesOneTail) {
    const std::vector<double> v{1, 2, 3, 4, 8};
    EXPECT_NEAR(hill_inverse_alpha(v, 1), std::numbers::ln2, 1e-15);
    EXPECT_NEAR(1.0 / hill_inverse_alpha(v, 1), 1.4427, 5e-5);
    // n = 2: mean of ln 8 and ln 4 over ln 3.
    EXPECT_NEAR(hill_inverse_alpha(v, 2), 0.5 * (std::log(8.0 / 3.0) + std::log(4.0 / 3.0)), 1e-15);
}

TEST(Hill, OutOfRangeRejected) {
    const std::vector<double> v{1, 2, 3, 4, 8};
    EXPECT_THROW((void)hill_inverse_alpha(v, 0), std::invalid_argument);
    EXPECT_THROW((void)hill_inverse_alpha(v, 5), std::invalid_argument);
}

TEST(Hill, NonPositiveTailRejected) {
    const std::vector<double> v{-3, -2, -1, 0, 1};
    EXPECT_THROW((void)hill_inverse_alpha(v, 2), EstimationError);
}

TEST(Hill, ScaleInvariant) {
    auto v = pareto_sample(3.0, 2000, 31);
    std::sort(v.begin(), v.end());
    auto w = v;
    for (auto& x : w) x *= 7.5;
    for (std::size_t n : {1U, 10U, 100U, 999U}) EXPECT_NEAR(hill_inverse_alpha(v, n), hill_inverse_alpha(w, n), 1e-12);
    const auto a = huisman_estimate(v, 500);
    const auto b = huisman_estimate(w, 500);
    EXPECT_NEAR(a.alpha, b.alpha, 1e-9);
    EXPECT_NEAR(a.se_alpha, b.se_alpha, 1e-9);
    EXPECT_NEAR(b.threshold, 7.5 * a.threshold, 1e-9);
}

TEST(Hill, ParetoThreeWithinThreeSe) {
    auto v = pareto_sample(3.0, 100'000, 3003);
    std::sort(v.begin(), v.end());
    const double inv = hill_inverse_alpha(v, 1000);
    EXPECT_LT(std::abs(inv - 1.0 / 3.0), 3.0 * hill_se_inverse_alpha(inv, 1000));
}

TEST(HillCurve, MatchesPointwise) {
    auto v = pareto_sample(2.0, 300, 4);
    std::sort(v.begin(), v.end());
    const auto curve = hill_curve(v, 100);
    ASSERT_EQ(curve.eta(), 100U);
    for (std::size_t n = 1; n <= 100; ++n) EXPECT_NEAR(curve.inv_alpha[n - 1], hill_inverse_alpha(v, n), 1e-12);
}

TEST(Huisman, ExactParetoTwo) {
    const auto v = exact_pareto(2.0, 10'000);
    const auto est = huisman_estimate(v, 5000);
    EXPECT_LT(std::abs(est.alpha - 2.0), 3.0 * est.se_alpha);
    EXPECT_NEAR(est.slope, 0.0, 1e-5);
    EXPECT_EQ(est.n_tail, 5000U);
    EXPECT_EQ(est.sample_size, 10'000U);
    EXPECT_EQ(est.threshold, v[10'000 - 5000 - 1]);
}

TEST(Huisman, EtaTooSmallRejected) {
    const auto v = exact_pareto(2.0, 100);
    EXPECT_THROW((void)huisman_estimate(v, 1), std::invalid_argument);
}

TEST(Huisman, UnsortedRejected) {
    const std::vector<double> v{3, 1, 2, 4, 5, 6, 7, 8, 9, 10};
    EXPECT_THROW((void)huisman_estimate(v, 4), std::invalid_argument);
}

TEST(Huisman, DefaultEtaCapped) {
    const auto v = exact_pareto(3.0, 5000);
    EXPECT_EQ(default_eta(v), 1000U);
    const auto small = exact_pareto(3.0, 247);
    EXPECT_EQ(default_eta(small), 123U);
}

TEST(Tails, LeftEqualsRightOfNegated) {
    Rng rng(77);
    std::vector<double> x(1500);
    for (auto& v : x) v = rng.student_t(3.0);
    std::vector<double> neg(x.size());
    std::transform(x.begin(), x.end(), neg.begin(), [](double v) { return -v; });
    const auto left = estimate_tail(x, Side::Long);
    const auto right = estimate_tail(neg, Side::Short);
    EXPECT_EQ(left.alpha, right.alpha);
    EXPECT_EQ(left.se_alpha, right.se_alpha);
    EXPECT_EQ(left.threshold, right.threshold);
    EXPECT_EQ(left.n_tail, right.n_tail);
    EXPECT_GT(left.threshold, 0.0);
}

TEST(Tails, StudentTBracketsDof) {
    Rng rng(4040);
    std::vector<double> x(200'000);
    for (auto& v : x) v = rng.student_t(4.0);
    const auto est = estimate_tail(x, Side::Short);
    EXPECT_LT(std::abs(est.alpha - 4.0), 3.0 * est.se_alpha);
}

TEST(MomentTest, OpenAnchorLeftTail) {
    const auto e = made_up(3.06, 0.65);
    const auto k2 = moment_existence_test(e, 2.0);
    const auto k4 = moment_existence_test(e, 4.0);
    EXPECT_NEAR(k2.statistic, 1.63, 0.005);
    EXPECT_NEAR(k4.statistic, -1.446, 0.0005);
    EXPECT_NEAR(k2.p_value, 1.0 - normal_cdf(k2.statistic), 1e-15);
    EXPECT_NEAR(k2.parameters.at("table_p"), 0.448, 0.001);
    EXPECT_EQ(k4.parameters.at("table_p"), 0.0);
}

TEST(MomentTest, HalfShiftedConvention) {
    EXPECT_NEAR(moment_table_p(1.63), 0.448, 0.001);
    EXPECT_EQ(moment_table_p(-0.5), 0.0);
    EXPECT_EQ(moment_table_p(0.0), 0.0);
}

TEST(MomentTest, AlphaEqualsK) {
    EXPECT_EQ(moment_existence_test(made_up(2.0, 0.3), 2.0).statistic, 0.0);
}

TEST(MomentTest, Antisymmetric) {
    const double a = moment_existence_test(made_up(3.3, 0.4), 2.0).statistic;
    const double b = moment_existence_test(made_up(2.0, 0.4), 3.3).statistic;
    EXPECT_NEAR(a, -b, 1e-15);
}

TEST(MomentTest, ZeroSeRejected) {
    EXPECT_THROW((void)moment_existence_test(made_up(3.0, 0.0), 2.0), std::invalid_argument);
}

TEST(EvtMargin, ArithmeticOracle) {
    auto e = made_up(3.0, 0.5);
    EXPECT_NEAR(evt_margin(e, 0.002), 2.0 * std::cbrt(5.0), 1e-12);
    EXPECT_NEAR(evt_margin(e, 0.002), 3.4200, 5e-5);
}

TEST(EvtMargin, UnitBaseGivesThreshold) {
    auto e = made_up(3.0, 0.5);
    EXPECT_DOUBLE_EQ(evt_margin(e, 0.01), e.threshold);
}

TEST(EvtMargin, InsideThresholdUnavailable) {
    auto e = made_up(3.0, 0.5);
    EXPECT_THROW((void)evt_margin(e, 0.05), UnavailableError);
}

TEST(EvtMargin, MonotoneInAlphaAndExceedance) {
    double prev = evt_margin(made_up(2.0, 0.5), 0.002);
    for (double a = 2.5; a <= 6.0; a += 0.5) {
        const double cur = evt_margin(made_up(a, 0.5), 0.002);
        EXPECT_LT(cur, prev);
        prev = cur;
    }
    const auto e = made_up(3.0, 0.5);
    EXPECT_GT(evt_margin(e, 0.001), evt_margin(e, 0.002));
}

TEST(FellerScale, Values) {
    EXPECT_DOUBLE_EQ(feller_scale(1.7, 1.0, 3.0), 1.7);
    EXPECT_NEAR(feller_scale(1.0, 16.0, 4.0), 2.0, 1e-15);
    EXPECT_NEAR(feller_scale(1.0, 113.0, 2.77), 5.51, 0.005);
}

TEST(FellerScale, Composes) {
    for (double alpha : {1.5, 2.77, 4.2}) {
        const double twice = feller_scale(feller_scale(0.3, 12.0, alpha), 24.0, alpha);
        EXPECT_NEAR(twice, feller_scale(0.3, 288.0, alpha), 1e-12);
    }
}
