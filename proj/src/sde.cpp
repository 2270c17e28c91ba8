#include "epiwarn/sde.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "epiwarn/errors.hpp"
#include "epiwarn/parallel.hpp"

namespace epiwarn {

std::string_view to_string(NoiseKind kind) {
    switch (kind) {
        case NoiseKind::White: return "white";
        case NoiseKind::Environmental: return "environmental";
        case NoiseKind::Demographic: return "demographic";
    }
    return "unknown";
}

NoiseKind parse_noise_kind(std::string_view text) {
    if (text == "white" || text == "W" || text == "w") return NoiseKind::White;
    if (text == "environmental" || text == "env" || text == "E" || text == "e") return NoiseKind::Environmental;
    if (text == "demographic" || text == "dem" || text == "D" || text == "d") return NoiseKind::Demographic;
    throw ValidationError("unknown noise kind '" + std::string(text) + "'");
}

char noise_code(NoiseKind kind) {
    switch (kind) {
        case NoiseKind::White: return 'W';
        case NoiseKind::Environmental: return 'E';
        case NoiseKind::Demographic: return 'D';
    }
    return '?';
}

void SirParams::validate() const {
    auto require = [](bool ok, const char* field) {
        if (!ok) throw ValidationError(std::string("invalid SirParams.") + field);
    };
    require(lambda > 0 && std::isfinite(lambda), "lambda");
    require(mu > 0 && std::isfinite(mu), "mu");
    require(alpha > 0 && std::isfinite(alpha), "alpha");
    require(beta0 >= 0 && std::isfinite(beta0), "beta0");
    require(std::isfinite(beta1), "beta1");
    require(sigma1 >= 0 && std::isfinite(sigma1), "sigma1");
    require(sigma2 >= 0 && std::isfinite(sigma2), "sigma2");
    require(s0 > 0 && std::isfinite(s0), "s0");
    require(i0 >= 0 && std::isfinite(i0), "i0");
}

SirParams nominal_params(NoiseKind kind) {
    SirParams p;
    p.noise_kind = kind;
    p.s0 = p.lambda / p.mu;
    switch (kind) {
        case NoiseKind::White:
            // Susceptible noise strong enough that fluctuations in beta*S reach
            // the infected dynamics; with small sigma1 the infected process is a
            // clamped linear OU whose shape statistics barely change before T.
            p.sigma1 = 0.5;
            p.sigma2 = 0.005;
            break;
        case NoiseKind::Environmental:
            p.sigma1 = 0.05;
            p.sigma2 = 0.05;
            break;
        case NoiseKind::Demographic:
            // Noise is fully state-determined; intensities unused.
            p.sigma1 = 0.0;
            p.sigma2 = 0.0;
            break;
    }
    return p;
}

void SimulationConfig::validate() const {
    if (horizon < 1) throw ValidationError("invalid SimulationConfig.horizon");
    if (!(dt > 0.0 && dt <= 1.0)) throw ValidationError("invalid SimulationConfig.dt");
    const double steps = std::round(1.0 / dt);
    if (std::abs(steps * dt - 1.0) > 1e-9) throw ValidationError("SimulationConfig.dt must divide 1");
    if (!(state_floor >= 0.0) || !std::isfinite(state_floor)) throw ValidationError("invalid SimulationConfig.state_floor");
}

int SimulationConfig::steps_per_unit() const { return static_cast<int>(std::lround(1.0 / dt)); }

SimulationConfig nominal_config(NoiseKind kind, std::uint64_t seed) {
    SimulationConfig c;
    c.seed = seed;
    // With a zero floor the demographic model is absorbed at I = 0 within a few
    // dozen time units of any subcritical start; a small floor keeps the
    // infective class fluctuating so windows are informative.
    if (kind == NoiseKind::Demographic) c.state_floor = 0.01;
    return c;
}

double r0_at(const SirParams& params, double t) { return params.k_factor() * params.beta_at(t); }

std::optional<int> detect_transition(const SirParams& params, int horizon) {
    const double k = params.k_factor();
    if (params.beta1 == 0.0) {
        if (horizon >= 1 && k * params.beta0 >= 1.0) return 1;
        return std::nullopt;
    }
    if (params.beta1 < 0.0) {
        // Decreasing schedule: only t = 1 can be supercritical first.
        if (horizon >= 1 && r0_at(params, 1.0) >= 1.0) return 1;
        return std::nullopt;
    }
    // Analytic crossing, then fix up rounding on the integer grid.
    const double crossing = (1.0 / k - params.beta0) / params.beta1;
    long t = std::max<long>(1, static_cast<long>(std::ceil(crossing)));
    while (t > 1 && r0_at(params, static_cast<double>(t - 1)) >= 1.0) --t;
    while (t <= horizon && r0_at(params, static_cast<double>(t)) < 1.0) ++t;
    if (t > horizon) return std::nullopt;
    return static_cast<int>(t);
}

ScheduleCalibration ScheduleCalibration::scaled(double factor) const {
    ScheduleCalibration c = *this;
    auto scale = [factor](Triangular& tri) {
        tri.min *= factor;
        tri.mode *= factor;
        tri.max *= factor;
    };
    scale(c.beta0);
    scale(c.trans_beta1);
    c.null_beta1_mode *= factor;
    return c;
}

ScheduleCalibration calibration_for(const SirParams& params) {
    return ScheduleCalibration{}.scaled(10.0 / params.k_factor());
}

BetaSchedule sample_beta_schedule(CounterRng& rng, Regime regime, const ScheduleCalibration& calib,
                                  const SirParams& base) {
    SirParams p = base;
    const double k = base.k_factor();
    for (int attempt = 0; attempt < calib.max_attempts; ++attempt) {
        p.beta0 = rng.triangular(calib.beta0.min, calib.beta0.mode, calib.beta0.max);
        if (regime == Regime::Transcritical) {
            p.beta1 = rng.triangular(calib.trans_beta1.min, calib.trans_beta1.mode, calib.trans_beta1.max);
            const auto t = detect_transition(p, calib.horizon);
            if (t && *t >= calib.min_transition && *t <= calib.horizon) return {p.beta0, p.beta1};
        } else {
            const double headroom = 1.0 / k - p.beta0;
            if (headroom <= 0.0) continue;
            const double hi = calib.null_beta1_max_fraction * headroom / calib.horizon;
            const double mode = std::min(calib.null_beta1_mode, hi);
            p.beta1 = rng.triangular(0.0, mode, hi);
            if (r0_at(p, calib.horizon) < 1.0) return {p.beta0, p.beta1};
        }
    }
    throw CalibrationInfeasibleError("beta schedule rejection sampling exceeded " +
                                     std::to_string(calib.max_attempts) + " attempts");
}

Diffusion diffusion_at(const SirParams& params, double t, double s, double i) {
    switch (params.noise_kind) {
        case NoiseKind::White:
            return {params.sigma1, 0.0, 0.0, params.sigma2};
        case NoiseKind::Environmental:
            return {params.sigma1 * s, 0.0, 0.0, params.sigma2 * i};
        case NoiseKind::Demographic: {
            const double infection = params.beta_at(t) * s * i;
            const double a = params.lambda + infection + params.mu * s;
            const double b = -infection;
            const double c = infection + (params.alpha + params.mu) * i;
            const double d = std::sqrt(std::max(0.0, a * c - b * b));
            const double e = std::sqrt(a + c + 2.0 * d);
            return {(a + d) / e, b / e, b / e, (c + d) / e};
        }
    }
    return {0, 0, 0, 0};
}

Trajectory simulate(const SirParams& params, const SimulationConfig& config) {
    params.validate();
    config.validate();

    CounterRng rng(config.seed, 1);
    const int per_unit = config.steps_per_unit();
    const double dt = config.dt;
    const double sqrt_dt = std::sqrt(dt);
    const double floor = config.state_floor;
    const double removal = params.alpha + params.mu;

    Trajectory traj;
    traj.params = params;
    traj.seed = config.seed;
    traj.incidence.reserve(static_cast<std::size_t>(config.horizon));

    double s = params.s0;
    double i = params.i0;
    long step = 0;
    for (int unit = 1; unit <= config.horizon; ++unit) {
        for (int k = 0; k < per_unit; ++k, ++step) {
            const double t = static_cast<double>(step) * dt;
            const double infection = params.beta_at(t) * s * i;
            const double drift_s = params.lambda - infection - params.mu * s;
            const double drift_i = infection - removal * i;
            const auto [z1, z2] = rng.normal_pair();
            const double dw1 = sqrt_dt * z1;
            const double dw2 = sqrt_dt * z2;
            const Diffusion g = diffusion_at(params, t, s, i);
            double s_next = s + drift_s * dt + (g.g11 * dw1 + g.g12 * dw2);
            double i_next = i + drift_i * dt + (g.g21 * dw1 + g.g22 * dw2);
            if (!std::isfinite(s_next) || !std::isfinite(i_next)) {
                std::ostringstream msg;
                msg << "non-finite state at t=" << (t + dt);
                throw IntegrationError(msg.str(), t + dt);
            }
            s = std::max(s_next, floor);
            i = std::max(i_next, floor);
        }
        traj.incidence.push_back(i);
    }
    traj.transition_time = detect_transition(params, config.horizon);
    return traj;
}

namespace {

std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t index) {
    CounterRng rng(seed, index);
    return rng.split(0x5eedULL).next_u64();
}

}  // namespace

std::vector<Trajectory> generate_dataset(const DatasetRequest& request) {
    if (request.n_trans < 1) throw ValidationError("n_trans must be >= 1");
    if (request.n_null < 1) throw ValidationError("n_null must be >= 1");

    const SirParams base = request.base_params.value_or(nominal_params(request.noise_kind));
    SirParams checked = base;
    checked.noise_kind = request.noise_kind;
    checked.validate();
    const ScheduleCalibration calib = request.calib.value_or(calibration_for(checked));
    SimulationConfig sim = request.sim.value_or(nominal_config(request.noise_kind, request.seed));
    sim.horizon = calib.horizon;
    sim.validate();

    const std::size_t total = static_cast<std::size_t>(request.n_trans) + static_cast<std::size_t>(request.n_null);
    std::vector<Trajectory> out(total);
    parallel_for(total, [&](std::size_t idx) {
        const Regime regime = idx < static_cast<std::size_t>(request.n_trans) ? Regime::Transcritical : Regime::Null;
        try {
            CounterRng rng(request.seed, idx);
            const BetaSchedule schedule = sample_beta_schedule(rng, regime, calib, checked);
            SirParams p = checked;
            p.beta0 = schedule.beta0;
            p.beta1 = schedule.beta1;
            SimulationConfig cfg = sim;
            cfg.seed = replicate_seed(request.seed, idx);
            out[idx] = simulate(p, cfg);
        } catch (const IntegrationError& e) {
            throw IntegrationError("replicate " + std::to_string(idx) + ": " + e.what(), e.failure_time());
        } catch (const CalibrationInfeasibleError& e) {
            throw CalibrationInfeasibleError("replicate " + std::to_string(idx) + ": " + e.what());
        }
    });
    return out;
}

}  // namespace epiwarn
