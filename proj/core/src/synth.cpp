#include "hfmargin/synth.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "hfmargin/error.hpp"

namespace hfmargin {

namespace {

template <typename T>
const T& params_as(const GeneratorSpec& spec) {
    const T* p = std::get_if<T>(&spec.params);
    if (!p) throw std::invalid_argument(fmt::format("parameters do not match generator kind {}", to_string(spec.kind)));
    return *p;
}

bool is_weekday(Date d) {
    const std::chrono::weekday wd{d};
    return wd != std::chrono::Saturday && wd != std::chrono::Sunday;
}

}  // namespace

std::string_view to_string(GeneratorKind k) noexcept {
    switch (k) {
        case GeneratorKind::GaussianIid: return "gaussian_iid";
        case GeneratorKind::StudentT: return "student_t";
        case GeneratorKind::Pareto: return "pareto";
        case GeneratorKind::Garch11: return "garch11";
        case GeneratorKind::TickWalk: return "tick_walk";
    }
    return "?";
}

GeneratorKind parse_generator_kind(std::string_view text) {
    for (const auto k : {GeneratorKind::GaussianIid, GeneratorKind::StudentT, GeneratorKind::Pareto,
                         GeneratorKind::Garch11, GeneratorKind::TickWalk}) {
        if (text == to_string(k)) return k;
    }
    throw std::invalid_argument(fmt::format("unknown generator kind '{}'", text));
}

void GeneratorSpec::validate() const {
    if (length < 1) throw std::invalid_argument("generator length must be >= 1");
    switch (kind) {
        case GeneratorKind::GaussianIid: {
            const auto& p = params_as<GaussianParams>(*this);
            if (!(p.sigma > 0.0) || !std::isfinite(p.mu)) throw std::invalid_argument("gaussian needs sigma > 0");
            break;
        }
        case GeneratorKind::StudentT: {
            const auto& p = params_as<StudentTParams>(*this);
            if (!(p.dof > 0.0) || !(p.scale > 0.0)) throw std::invalid_argument("student_t needs dof > 0, scale > 0");
            break;
        }
        case GeneratorKind::Pareto: {
            const auto& p = params_as<ParetoParams>(*this);
            if (!(p.alpha > 0.0) || !(p.scale > 0.0)) throw std::invalid_argument("pareto needs alpha > 0, scale > 0");
            break;
        }
        case GeneratorKind::Garch11: {
            const auto& p = params_as<Garch11Params>(*this);
            if (!p.params.feasible()) {
                throw std::invalid_argument("garch11 needs alpha0 > 0, alpha1, beta1 >= 0, alpha1 + beta1 <= 1");
            }
            break;
        }
        case GeneratorKind::TickWalk: {
            const auto& p = params_as<TickWalkParams>(*this);
            if (p.days < 2) throw std::invalid_argument("tick_walk needs at least 2 days");
            if (p.step.count() <= 0) throw std::invalid_argument("tick_walk step must be positive");
            if (p.session_open >= p.session_close) throw std::invalid_argument("tick_walk session is empty");
            if (!(p.start_price > 0.0) || !(p.sigma_step >= 0.0)) {
                throw std::invalid_argument("tick_walk needs start_price > 0 and sigma_step >= 0");
            }
            if (p.dof != 0.0 && !(p.dof > 2.0)) throw std::invalid_argument("tick_walk dof must be 0 or > 2");
            if (p.roll_day > 0 && !(p.front < p.back)) {
                throw std::invalid_argument("tick_walk back month must follow the front month");
            }
            if (p.front_volume < 0 || p.back_volume < 0) throw std::invalid_argument("volumes must be >= 0");
            break;
        }
    }
}

GarchSimulation simulate_garch11(const Garch11Params& p, std::size_t length, Rng& rng) {
    const auto& g = p.params;
    double s2 = g.alpha1 + g.beta1 < 1.0 ? g.unconditional_variance() : g.alpha0;
    double eps = 0.0;
    GarchSimulation out;
    out.returns.reserve(length);
    out.sigma2.reserve(length);
    for (std::size_t t = 0; t < p.burn_in + length; ++t) {
        if (t > 0) s2 = g.alpha0 + g.alpha1 * eps * eps + g.beta1 * s2;
        eps = std::sqrt(s2) * rng.normal();
        if (t >= p.burn_in) {
            out.returns.push_back(g.mu + eps);
            out.sigma2.push_back(s2);
        }
    }
    return out;
}

std::vector<double> generate_returns(const GeneratorSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    std::vector<double> out;
    out.reserve(spec.length);
    switch (spec.kind) {
        case GeneratorKind::GaussianIid: {
            const auto& p = params_as<GaussianParams>(spec);
            for (std::size_t i = 0; i < spec.length; ++i) out.push_back(rng.normal(p.mu, p.sigma));
            break;
        }
        case GeneratorKind::StudentT: {
            const auto& p = params_as<StudentTParams>(spec);
            for (std::size_t i = 0; i < spec.length; ++i) out.push_back(p.scale * rng.student_t(p.dof));
            break;
        }
        case GeneratorKind::Pareto: {
            const auto& p = params_as<ParetoParams>(spec);
            for (std::size_t i = 0; i < spec.length; ++i) out.push_back(p.scale * rng.pareto(p.alpha));
            break;
        }
        case GeneratorKind::Garch11:
            out = simulate_garch11(params_as<Garch11Params>(spec), spec.length, rng).returns;
            break;
        case GeneratorKind::TickWalk:
            throw std::invalid_argument("tick_walk produces ticks, not returns");
    }
    return out;
}

TickSeries generate_ticks(const GeneratorSpec& spec) {
    spec.validate();
    if (spec.kind != GeneratorKind::TickWalk) throw std::invalid_argument("only tick_walk produces ticks");
    const auto& p = params_as<TickWalkParams>(spec);
    Rng rng(spec.seed);
    const double t_scale = p.dof > 0.0 ? std::sqrt((p.dof - 2.0) / p.dof) : 1.0;
    auto innovation = [&] { return p.dof > 0.0 ? t_scale * rng.student_t(p.dof) : rng.normal(); };

    TickSeries out;
    double log_price = std::log(p.start_price);
    bool first = true;
    Date day = p.start_date;
    for (std::size_t d = 0; d < p.days; ++day) {
        if (!is_weekday(day)) continue;
        const bool rolled = p.roll_day > 0 && d >= p.roll_day;
        const std::int64_t front_vol = rolled ? p.back_volume : p.front_volume;
        const std::int64_t back_vol = rolled ? p.front_volume : p.back_volume;
        for (TimeOfDay t = p.session_open; t <= p.session_close; t += p.step) {
            if (!first) log_price += p.sigma_step / 100.0 * innovation();
            first = false;
            const Timestamp ts = Timestamp{day} + t;
            const double price = std::exp(log_price);
            out.ticks.push_back({ts, price, front_vol, p.front});
            if (p.roll_day > 0) out.ticks.push_back({ts, price, back_vol, p.back});
        }
        ++d;
    }
    out.rows_read = out.ticks.size();
    return out;
}

std::variant<ReturnSeries, TickSeries> generate(const GeneratorSpec& spec) {
    if (spec.kind == GeneratorKind::TickWalk) return generate_ticks(spec);
    return make_series(generate_returns(spec));
}

}  // namespace hfmargin
