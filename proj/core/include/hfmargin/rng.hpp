#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace hfmargin {

/// Portable random stream: std::mt19937_64 (bit-exact across standard
/// libraries) with distribution transforms implemented here, so a seed
/// reproduces the same draws on every platform.
class Rng {
public:
    static constexpr std::string_view kName = "mt19937_64/polar-normal/v1";

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on (0, 1), 53-bit resolution.
    double uniform();
    double normal();
    double normal(double mean, double sd) { return mean + sd * normal(); }
    /// Marsaglia-Tsang, shape > 0, unit scale.
    double gamma(double shape);
    double student_t(double dof);
    /// Pareto with minimum 1: U^(-1/alpha).
    double pareto(double alpha);

    std::uint64_t next_u64() { return engine_(); }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace hfmargin
