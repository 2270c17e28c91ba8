#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "epiwarn/rng.hpp"

namespace epiwarn {

enum class NoiseKind { White, Environmental, Demographic };

std::string_view to_string(NoiseKind kind);
NoiseKind parse_noise_kind(std::string_view text);
/// Single-letter dataset code used in classifier names (W, E, D).
char noise_code(NoiseKind kind);

struct SirParams {
    double lambda = 1.0;  // recruitment
    double mu = 0.2;      // death
    double alpha = 0.3;   // recovery
    double beta0 = 0.05;
    double beta1 = 0.0;
    double sigma1 = 0.05;
    double sigma2 = 0.05;
    NoiseKind noise_kind = NoiseKind::White;
    double s0 = 5.0;
    double i0 = 1.0;

    /// K = lambda / (mu (alpha + mu)); R0(t) = K beta(t).
    double k_factor() const { return lambda / (mu * (alpha + mu)); }
    double beta_at(double t) const { return beta0 + beta1 * t; }
    void validate() const;
};

/// Nominal parameter set for each noise model (s0 at the disease-free equilibrium).
SirParams nominal_params(NoiseKind kind);

struct SimulationConfig {
    int horizon = 1500;
    double dt = 0.01;
    std::uint64_t seed = 0;
    double state_floor = 0.0;

    void validate() const;
    /// Integration steps per recorded unit of time.
    int steps_per_unit() const;
};

/// Nominal integration settings for a noise model.
SimulationConfig nominal_config(NoiseKind kind, std::uint64_t seed);

struct Trajectory {
    std::vector<double> incidence;  // I[1..horizon], stored 0-based
    std::optional<int> transition_time;
    SirParams params;
    std::uint64_t seed = 0;

    /// 1-based access mirroring I[t].
    double at(int t) const { return incidence.at(static_cast<std::size_t>(t - 1)); }
};

double r0_at(const SirParams& params, double t);

/// Smallest integer t in [1, horizon] with R0(t) >= 1.
std::optional<int> detect_transition(const SirParams& params, int horizon);

enum class Regime { Transcritical, Null };

struct Triangular {
    double min = 0.0;
    double mode = 0.0;
    double max = 0.0;
};

/// Triangular priors for the transmission schedule beta(t) = beta0 + beta1 t.
/// The null-regime slope upper bound is relative: max = null_beta1_max_fraction
/// * (1/K - beta0) / horizon, and mode is capped at that max.
struct ScheduleCalibration {
    Triangular beta0{0.02, 0.05, 0.08};
    Triangular trans_beta1{2e-5, 6e-5, 1e-4};
    double null_beta1_mode = 5e-6;
    double null_beta1_max_fraction = 0.9;
    int horizon = 1500;
    int min_transition = 401;
    int max_attempts = 10000;

    /// Scales all beta quantities by `factor` (for parameter sets with K != 10).
    ScheduleCalibration scaled(double factor) const;
};

/// Default calibration rescaled to the K of `params`.
ScheduleCalibration calibration_for(const SirParams& params);

struct BetaSchedule {
    double beta0;
    double beta1;
};

/// Rejection-samples (beta0, beta1) so that the regime contract holds for `base`.
BetaSchedule sample_beta_schedule(CounterRng& rng, Regime regime, const ScheduleCalibration& calib,
                                  const SirParams& base);

/// Euler-Maruyama integration of the (S, I) subsystem; records I at t = 1..horizon.
Trajectory simulate(const SirParams& params, const SimulationConfig& config);

/// Per-step diffusion matrix G (rows: dS, dI; columns: dW1, dW2) at a state.
struct Diffusion {
    double g11, g12, g21, g22;
};
Diffusion diffusion_at(const SirParams& params, double t, double s, double i);

struct DatasetRequest {
    NoiseKind noise_kind = NoiseKind::White;
    int n_trans = 1;
    int n_null = 1;
    std::uint64_t seed = 0;
    std::optional<SirParams> base_params;  // nominal when absent
    std::optional<SimulationConfig> sim;   // nominal when absent (seed overridden)
    std::optional<ScheduleCalibration> calib;
};

/// Transcritical replicates first (indices 0..n_trans-1), then null replicates.
/// Replicate i uses stream (seed, i) for both its schedule draw and its noise.
std::vector<Trajectory> generate_dataset(const DatasetRequest& request);

}  // namespace epiwarn
