#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hfmargin/margins.hpp"
#include "hfmargin/synth.hpp"
#include "hfmargin/types.hpp"

namespace hfmargin::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2 };

struct RunConfig {
    std::string command;
    std::string input;
    std::string calendar;
    std::string out = ".";
    std::vector<TimeOfDay> anchors;
    std::vector<Frequency> frequencies;
    std::vector<double> coverage;
    std::vector<Model> models;
    ScalingPreset scaling = ScalingPreset::Calendar;
    std::uint64_t seed = 20000101;
    std::size_t ks_reps = 10000;
    std::size_t lb_lags = 20;
    std::size_t eta = 0;
    std::size_t garch_iters = 500;
    double threshold = kDefaultCallThreshold;
    std::optional<double> margin_long;
    std::optional<double> margin_short;
    GeneratorSpec synth;

    /// Throws ConfigError.
    void validate() const;
    /// Every setting that influences outputs, one `key=value` per line.
    [[nodiscard]] std::string canonical() const;
};

/// Parses arguments (program name excluded) into a validated config.
/// Throws CLI11 parse errors or ConfigError.
[[nodiscard]] RunConfig parse_args(const std::vector<std::string>& args);

/// Runs one command; returns the process exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hfmargin::cli
