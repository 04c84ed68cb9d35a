#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "hfmargin/descstats.hpp"
#include "hfmargin/garch.hpp"
#include "hfmargin/margins.hpp"
#include "hfmargin/tails.hpp"

namespace hfmargin {

/// First line of every exported file: `# hfmargin config_hash=<hex> scaling=<preset>`.
struct ReportHeader {
    std::string config_hash;
    std::string scaling;
};

void write_header(std::ostream& out, const ReportHeader& header);

/// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
[[nodiscard]] std::string fnv1a_hex(std::string_view text);

/// Fixed-point, locale-independent. NaN renders as "na".
[[nodiscard]] std::string fmt_num(double v, int precision = 6);

struct StatsRow {
    std::string panel;  ///< "price_changes" | "squared_price_changes"
    std::string series;
    MomentSummary moments;
    std::optional<TestResult> ks;
    std::optional<TestResult> ljung_box;
};

void write_stats_csv(std::ostream& out, const ReportHeader& h, std::span<const StatsRow> rows);
void write_stats_json(std::ostream& out, const ReportHeader& h, std::span<const StatsRow> rows);

struct TailRow {
    std::string series;
    TailEstimate estimate;
};

void write_tails_csv(std::ostream& out, const ReportHeader& h, std::span<const TailRow> rows);
void write_tails_json(std::ostream& out, const ReportHeader& h, std::span<const TailRow> rows);

struct GarchRow {
    std::string series;
    GarchFit fit;
};

void write_garch_csv(std::ostream& out, const ReportHeader& h, std::span<const GarchRow> rows);
void write_garch_json(std::ostream& out, const ReportHeader& h, std::span<const GarchRow> rows);

/// Columns: series,model,coverage,waiting_days,side,margin,available,scaling_preset
void write_margins_csv(std::ostream& out, const ReportHeader& h, const MarginReport& report);
void write_margins_json(std::ostream& out, const ReportHeader& h, const MarginReport& report);

/// Scaled daily margins in the margin column order: one row per (frequency, model,
/// coverage, side) with series 5m, 1h and 1d (the anchored mean).
void write_scaled_margins_csv(std::ostream& out, const ReportHeader& h, const ComparisonReport& report);
void write_scaled_margins_json(std::ostream& out, const ReportHeader& h, const ComparisonReport& report);

void write_comparison_csv(std::ostream& out, const ReportHeader& h, const ComparisonReport& report);
void write_comparison_json(std::ostream& out, const ReportHeader& h, const ComparisonReport& report);

}  // namespace hfmargin
