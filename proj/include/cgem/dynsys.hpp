#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "cgem/matrix.hpp"

namespace cgem::dynsys {

enum class SystemTag : std::uint8_t { ks = 0, brusselator = 1, l96 = 2 };

std::string to_string(SystemTag tag);
SystemTag system_tag_from_string(const std::string& name);

/// Kuramoto-Sivashinsky on [0, L] with periodic boundaries,
/// u_t = -nu u_xxxx - u_xx - u u_x.
struct KsSpec {
    double nu = 1.0;
    double length = 22.0;
    std::size_t grid_points = 100;
    double dt_solver = 0.00005;
    double subsample_dt = 0.002;
    std::size_t spinup_steps = 10000;  // discarded subsampled states

    std::size_t state_dim() const { return grid_points; }
    double dx() const { return length / static_cast<double>(grid_points); }
    void validate() const;
};

/// Two-species Brusselator reaction-diffusion system on a periodic unit grid,
/// u_t = D0 lap(u) + a - (1+b) u + v u^2,  v_t = D1 lap(v) + b u - v u^2.
struct BrusselatorSpec {
    double d0 = 1.0;
    double d1 = 0.1;
    double a = 1.0;
    double b = 3.0;
    std::size_t side = 64;  // square domain, unit spacing
    double dt_solver = 0.0002;
    double subsample_dt = 0.002;
    std::size_t spinup_steps = 10000;

    std::size_t cells() const { return side * side; }
    std::size_t state_dim() const { return 2 * cells(); }
    void validate() const;
};

/// Two-tier Lorenz 96: K slow variables each coupled to J fast variables.
struct L96Spec {
    std::size_t slow_count = 8;   // K
    std::size_t fast_per_slow = 32;  // J
    double coupling_h = 1.0;
    double scale_b = 10.0;
    double timescale_c = 10.0;
    double forcing_f = 20.0;
    double dt_solver = 0.001;
    double subsample_dt = 0.005;
    std::size_t spinup_steps = 10000;

    std::size_t fast_count() const { return slow_count * fast_per_slow; }
    std::size_t state_dim() const { return slow_count + fast_count(); }
    void validate() const;
};

using SystemSpec = std::variant<KsSpec, BrusselatorSpec, L96Spec>;

SystemTag tag_of(const SystemSpec& spec);
std::size_t state_dim_of(const SystemSpec& spec);

/// High-resolution state sequence after spin-up discard and subsampling.
/// Layouts: KS grid scalars; Brusselator [u-field, v-field] row-major;
/// L96 slow block then fast block grouped by parent slow index.
struct FineTrajectory {
    Matrix states;  // [n_samples x state_dim]
    double dt = 0.0;  // inter-sample interval (= subsample_dt)
    SystemTag system = SystemTag::ks;
};

void derivative_ks(const double* state, double* tendency, const KsSpec& spec);
void derivative_brusselator(const double* state, double* tendency, const BrusselatorSpec& spec);
void derivative_l96(const double* state, double* tendency, const L96Spec& spec);

std::vector<double> derivative_ks(const std::vector<double>& state, const KsSpec& spec);
std::vector<double> derivative_brusselator(const std::vector<double>& state,
                                           const BrusselatorSpec& spec);
std::vector<double> derivative_l96(const std::vector<double>& state, const L96Spec& spec);

using TendencyFn = std::function<void(const double*, double*)>;

/// Classical fourth-order Runge-Kutta update, in place.
void step_rk4(const TendencyFn& deriv, std::vector<double>& state, double dt);

/// Explicit Euler update, in place.
void step_euler(const TendencyFn& deriv, std::vector<double>& state, double dt);

enum class Integrator { euler, rk4 };

Integrator default_integrator(SystemTag tag);  // euler for the PDEs, rk4 for L96

/// Integrates from the seeded initial condition, subsamples every
/// subsample_dt / dt_solver solver steps (the initial state is sample 0),
/// discards the first spinup_steps subsampled states and returns exactly
/// n_samples states. Pure function of (spec, seed, n_samples).
/// Throws on blow-up (|value| > 1e6), reporting the solver step index.
/// init_override, when given, replaces the seeded initial condition.
FineTrajectory generate_trajectory(const SystemSpec& spec, std::uint64_t seed,
                                   std::size_t n_samples);
FineTrajectory generate_trajectory(const SystemSpec& spec, std::uint64_t seed,
                                   std::size_t n_samples, Integrator method,
                                   const std::vector<double>* init_override = nullptr);

std::vector<double> initial_condition(const SystemSpec& spec, std::uint64_t seed);

}  // namespace cgem::dynsys
