#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hfmargin/garch.hpp"
#include "hfmargin/marketdata.hpp"
#include "hfmargin/normal.hpp"
#include "hfmargin/tails.hpp"
#include "hfmargin/types.hpp"

namespace hfmargin {

enum class Model { Gaussian, ExtremeValue, Historical, Garch };

[[nodiscard]] std::string_view to_string(Model m) noexcept;
[[nodiscard]] Model parse_model(std::string_view text);
inline constexpr Model kAllModels[] = {Model::Gaussian, Model::ExtremeValue, Model::Historical,
                                       Model::Garch};

/// Intervals per day used to scale intraday margins to one day.
enum class ScalingPreset {
    Session,   ///< 113 five-minute, 9 hourly intervals
    Calendar,  ///< 288 five-minute, 24 hourly intervals
};

[[nodiscard]] std::string_view to_string(ScalingPreset s) noexcept;
[[nodiscard]] ScalingPreset parse_scaling_preset(std::string_view text);
[[nodiscard]] double horizon_for(ScalingPreset preset, Frequency freq);

struct MarginSpec {
    double coverage = 0.95;
    double horizon = 1.0;
    Side side = Side::Long;
    Model model = Model::Gaussian;

    void validate() const;
};

/// Long: |mu T + z_{1-p} sigma sqrt(T)|, short: |mu T + z_p sigma sqrt(T)|.
[[nodiscard]] double gaussian_margin(double mu, double sigma, double p, double horizon, Side side);

[[nodiscard]] double sqrt_scale(double ml_1, double horizon);

/// Smallest side-loss order statistic whose rank fraction reaches p.
/// Throws UnavailableError unless N (1 - p) >= 1.
[[nodiscard]] double historical_margin(std::span<const double> values, double p, Side side);

/// 1 / (1 - p) trading days.
[[nodiscard]] double waiting_period(double p);
[[nodiscard]] long waiting_days(double p);
[[nodiscard]] double coverage_for_waiting_period(double days);

/// Inputs each model needs for one series, computed once and shared by
/// every cell of that series. Failures are kept as messages.
struct ModelInputs {
    std::optional<double> mean;
    std::optional<double> std_dev;
    std::optional<TailEstimate> left_tail;
    std::optional<TailEstimate> right_tail;
    std::optional<GarchFit> garch;
    std::vector<double> values;
    std::string moments_error;
    std::string left_tail_error;
    std::string right_tail_error;
    std::string garch_error;
};

struct ModelOptions {
    std::size_t eta = 0;  ///< 0: default_eta
    GarchOptions garch;
    bool fit_garch = true;
};

[[nodiscard]] ModelInputs prepare_inputs(std::span<const double> values, const ModelOptions& options = {});

struct CellResult {
    std::optional<double> margin;
    std::string reason;  ///< set when unavailable
};

/// One margin for `spec` from precomputed inputs. Gaussian and GARCH scale
/// by sqrt(T), EVT by T^(1/alpha); historical is unavailable for T > 1.
[[nodiscard]] CellResult model_margin(const ModelInputs& inputs, const MarginSpec& spec);

struct MarginCell {
    std::string series;
    Model model = Model::Gaussian;
    double coverage = 0.0;
    Side side = Side::Long;
    double horizon = 1.0;
    std::optional<double> margin;
    std::string reason;
};

struct MarginReport {
    ScalingPreset preset = ScalingPreset::Calendar;
    std::vector<MarginCell> cells;

    [[nodiscard]] const MarginCell* find(std::string_view series, Model model, double coverage,
                                         Side side) const;
};

struct LabelledSeries {
    std::string label;
    std::span<const double> values;
};

/// Grid over series x specs, in input order. Per-cell failures are recorded
/// as unavailable cells.
[[nodiscard]] MarginReport margin_table(std::span<const LabelledSeries> data, std::span<const MarginSpec> specs,
                                        const ModelOptions& options = {},
                                        ScalingPreset preset = ScalingPreset::Calendar);

/// Standard grid: every model x coverage x side at horizon 1.
[[nodiscard]] std::vector<MarginSpec> full_grid(std::span<const double> coverages,
                                                std::span<const Model> models);

struct TTest {
    double t = 0.0;
    double p_value = 1.0;
    std::size_t dof = 0;
};

/// One-sample two-sided t-test of mean(sample) against `reference`.
[[nodiscard]] TTest one_sample_t_test(std::span<const double> sample, double reference);

struct ComparisonRow {
    Model model = Model::Gaussian;
    double coverage = 0.0;
    Side side = Side::Long;
    std::optional<double> scaled_5m;
    std::optional<double> scaled_1h;
    std::optional<double> daily_mean;
    std::vector<double> daily_margins;
    std::optional<TTest> test_5m;
    std::optional<TTest> test_1h;
    std::string reason;

    [[nodiscard]] bool available() const noexcept {
        return daily_mean.has_value() && scaled_5m.has_value() && scaled_1h.has_value();
    }
};

struct ComparisonReport {
    ScalingPreset preset = ScalingPreset::Calendar;
    double horizon_5m = 0.0;
    double horizon_1h = 0.0;
    std::vector<ComparisonRow> rows;

    [[nodiscard]] const ComparisonRow* find(Model model, double coverage, Side side) const;
};

/// Scaled intraday margins vs the mean of anchored daily margins.
[[nodiscard]] ComparisonReport compare_scaled_vs_daily(std::span<const double> five_minute,
                                                       std::span<const double> one_hour,
                                                       std::span<const std::vector<double>> anchored,
                                                       std::span<const double> coverages,
                                                       std::span<const Model> models, double horizon_5m,
                                                       double horizon_1h, const ModelOptions& options = {});
[[nodiscard]] ComparisonReport compare_scaled_vs_daily(std::span<const double> five_minute,
                                                       std::span<const double> one_hour,
                                                       std::span<const std::vector<double>> anchored,
                                                       std::span<const double> coverages,
                                                       std::span<const Model> models, ScalingPreset preset,
                                                       const ModelOptions& options = {});
/// Same comparison from inputs already prepared by prepare_inputs.
[[nodiscard]] ComparisonReport compare_prepared(const ModelInputs& five_minute, const ModelInputs& one_hour,
                                                std::span<const ModelInputs> anchored,
                                                std::span<const double> coverages,
                                                std::span<const Model> models, double horizon_5m,
                                                double horizon_1h);

struct PricePoint {
    TimeOfDay time{0};
    double price = 0.0;
};

struct MarginCall {
    Side side = Side::Long;
    TimeOfDay time{0};
    double move_pct = 0.0;
    double trigger_pct = 0.0;
};

inline constexpr double kDefaultCallThreshold = 0.65;

/// Watches the cumulative percent log-change from the first price of the
/// day. At most one call per side.
[[nodiscard]] std::vector<MarginCall> intraday_call_monitor(std::span<const PricePoint> path,
                                                            double daily_margin_long,
                                                            double daily_margin_short,
                                                            double threshold = kDefaultCallThreshold);

}  // namespace hfmargin
