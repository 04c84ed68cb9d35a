#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>

#include "hfmargin/garch.hpp"
#include "hfmargin/marketdata.hpp"
#include "hfmargin/rng.hpp"
#include "hfmargin/types.hpp"

namespace hfmargin {

enum class GeneratorKind { GaussianIid, StudentT, Pareto, Garch11, TickWalk };

[[nodiscard]] std::string_view to_string(GeneratorKind k) noexcept;
[[nodiscard]] GeneratorKind parse_generator_kind(std::string_view text);

struct GaussianParams {
    double mu = 0.0;
    double sigma = 1.0;
};

struct StudentTParams {
    double dof = 3.0;
    double scale = 1.0;
};

struct ParetoParams {
    double alpha = 3.0;
    double scale = 1.0;
};

struct Garch11Params {
    GarchParams params{0.01, 0.01, 0.96, 0.0};
    std::size_t burn_in = 1000;
};

/// Exponentiated random walk sampled on the session grid. Two delivery
/// months trade side by side; the back month's daily volume overtakes the
/// front month's on `roll_day`.
struct TickWalkParams {
    Date start_date = std::chrono::sys_days{std::chrono::year{2000} / 1 / 4};
    std::size_t days = 250;  ///< weekdays generated
    TimeOfDay session_open = std::chrono::hours{8};
    TimeOfDay session_close = std::chrono::hours{17} + std::chrono::minutes{25};
    std::chrono::seconds step{300};
    double start_price = 6500.0;
    double sigma_step = 0.11;  ///< percent per step
    double dof = 0.0;          ///< 0: Gaussian steps, else Student-t scaled to sigma_step
    DeliveryMonth front{2000, 3};
    DeliveryMonth back{2000, 6};
    std::size_t roll_day = 50;  ///< 0 disables the second month
    std::int64_t front_volume = 20;
    std::int64_t back_volume = 5;
};

struct GeneratorSpec {
    GeneratorKind kind = GeneratorKind::GaussianIid;
    std::variant<GaussianParams, StudentTParams, ParetoParams, Garch11Params, TickWalkParams> params;
    std::size_t length = 1000;
    std::uint64_t seed = 1;

    void validate() const;
};

[[nodiscard]] std::vector<double> generate_returns(const GeneratorSpec& spec);
[[nodiscard]] TickSeries generate_ticks(const GeneratorSpec& spec);

/// Returns a ReturnSeries for return kinds and a TickSeries for tick_walk.
[[nodiscard]] std::variant<ReturnSeries, TickSeries> generate(const GeneratorSpec& spec);

/// Simulated GARCH(1,1) returns, including the conditional variance path.
struct GarchSimulation {
    std::vector<double> returns;
    std::vector<double> sigma2;
};
[[nodiscard]] GarchSimulation simulate_garch11(const Garch11Params& p, std::size_t length, Rng& rng);

}  // namespace hfmargin
