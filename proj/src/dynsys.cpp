#include "cgem/dynsys.hpp"

#include <cmath>
#include <stdexcept>

#include "cgem/rng.hpp"

namespace cgem::dynsys {

namespace {

constexpr double k_blowup_threshold = 1e6;

bool divides(double big, double small) {
    double ratio = big / small;
    return std::abs(ratio - std::round(ratio)) < 1e-9 * ratio;
}

std::size_t subsample_stride(double subsample_dt, double dt_solver) {
    return static_cast<std::size_t>(std::llround(subsample_dt / dt_solver));
}

void check_finite_input(const double* state, std::size_t n, const char* op) {
    if (!all_finite(state, n))
        throw std::invalid_argument(std::string(op) + ": non-finite input state");
}

}  // namespace

std::string to_string(SystemTag tag) {
    switch (tag) {
        case SystemTag::ks: return "ks";
        case SystemTag::brusselator: return "brusselator";
        case SystemTag::l96: return "l96";
    }
    throw std::invalid_argument("unknown system tag");
}

SystemTag system_tag_from_string(const std::string& name) {
    if (name == "ks") return SystemTag::ks;
    if (name == "brusselator") return SystemTag::brusselator;
    if (name == "l96") return SystemTag::l96;
    throw std::invalid_argument("unknown system name: " + name);
}

void KsSpec::validate() const {
    require(grid_points >= 4, "KsSpec: grid_points must be >= 4");
    require(dt_solver > 0, "KsSpec: dt_solver must be positive");
    require(length > 0, "KsSpec: length must be positive");
    require(divides(subsample_dt, dt_solver),
            "KsSpec: subsample_dt must be an integer multiple of dt_solver");
}

void BrusselatorSpec::validate() const {
    require(d0 > 0 && d1 > 0, "BrusselatorSpec: diffusivities must be positive");
    require(side >= 2, "BrusselatorSpec: domain side must be >= 2");
    require(dt_solver > 0, "BrusselatorSpec: dt_solver must be positive");
    require(divides(subsample_dt, dt_solver),
            "BrusselatorSpec: subsample_dt must be an integer multiple of dt_solver");
}

void L96Spec::validate() const {
    require(slow_count >= 4, "L96Spec: slow_count must be >= 4 (stencil width)");
    require(fast_per_slow >= 3, "L96Spec: fast_per_slow must be >= 3");
    require(dt_solver > 0, "L96Spec: dt_solver must be positive");
    require(divides(subsample_dt, dt_solver),
            "L96Spec: subsample_dt must be an integer multiple of dt_solver");
}

SystemTag tag_of(const SystemSpec& spec) {
    if (std::holds_alternative<KsSpec>(spec)) return SystemTag::ks;
    if (std::holds_alternative<BrusselatorSpec>(spec)) return SystemTag::brusselator;
    return SystemTag::l96;
}

std::size_t state_dim_of(const SystemSpec& spec) {
    return std::visit([](const auto& s) { return s.state_dim(); }, spec);
}

void derivative_ks(const double* u, double* tendency, const KsSpec& spec) {
    const std::size_t n = spec.grid_points;
    check_finite_input(u, n, "derivative_ks");
    const double dx = spec.dx();
    const double inv_dx2 = 1.0 / (dx * dx);
    const double inv_dx4 = inv_dx2 * inv_dx2;
    const double inv_2dx = 0.5 / dx;
    for (std::size_t i = 0; i < n; ++i) {
        const double um2 = u[(i + n - 2) % n];
        const double um1 = u[(i + n - 1) % n];
        const double u0 = u[i];
        const double up1 = u[(i + 1) % n];
        const double up2 = u[(i + 2) % n];
        const double d2 = (up1 - 2.0 * u0 + um1) * inv_dx2;
        const double d4 = (up2 - 4.0 * up1 + 6.0 * u0 - 4.0 * um1 + um2) * inv_dx4;
        const double d1 = (up1 - um1) * inv_2dx;
        tendency[i] = -spec.nu * d4 - d2 - u0 * d1;
    }
}

void derivative_brusselator(const double* state, double* tendency, const BrusselatorSpec& spec) {
    const std::size_t n = spec.side;
    const std::size_t cells = spec.cells();
    check_finite_input(state, 2 * cells, "derivative_brusselator");
    const double* u = state;
    const double* v = state + cells;
    double* du = tendency;
    double* dv = tendency + cells;
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t rm = (r + n - 1) % n;
        const std::size_t rp = (r + 1) % n;
        for (std::size_t c = 0; c < n; ++c) {
            const std::size_t cm = (c + n - 1) % n;
            const std::size_t cp = (c + 1) % n;
            const std::size_t idx = r * n + c;
            const double lap_u = u[rm * n + c] + u[rp * n + c] + u[r * n + cm] + u[r * n + cp] -
                                 4.0 * u[idx];
            const double lap_v = v[rm * n + c] + v[rp * n + c] + v[r * n + cm] + v[r * n + cp] -
                                 4.0 * v[idx];
            const double uu = u[idx];
            const double vv = v[idx];
            const double react = vv * uu * uu;
            du[idx] = spec.d0 * lap_u + spec.a - (1.0 + spec.b) * uu + react;
            dv[idx] = spec.d1 * lap_v + spec.b * uu - react;
        }
    }
}

void derivative_l96(const double* state, double* tendency, const L96Spec& spec) {
    const std::size_t k_count = spec.slow_count;
    const std::size_t j_per = spec.fast_per_slow;
    const std::size_t fast_total = spec.fast_count();
    check_finite_input(state, spec.state_dim(), "derivative_l96");
    const double* x = state;
    const double* y = state + k_count;
    double* dx = tendency;
    double* dy = tendency + k_count;
    const double hc_over_b = spec.coupling_h * spec.timescale_c / spec.scale_b;
    const double cb = spec.timescale_c * spec.scale_b;
    for (std::size_t k = 0; k < k_count; ++k) {
        double fast_sum = 0.0;
        for (std::size_t j = 0; j < j_per; ++j) fast_sum += y[k * j_per + j];
        const double xm1 = x[(k + k_count - 1) % k_count];
        const double xm2 = x[(k + k_count - 2) % k_count];
        const double xp1 = x[(k + 1) % k_count];
        dx[k] = -xm1 * (xm2 - xp1) - x[k] + spec.forcing_f - hc_over_b * fast_sum;
    }
    for (std::size_t g = 0; g < fast_total; ++g) {
        const double yp1 = y[(g + 1) % fast_total];
        const double yp2 = y[(g + 2) % fast_total];
        const double ym1 = y[(g + fast_total - 1) % fast_total];
        dy[g] = -cb * yp1 * (yp2 - ym1) - spec.timescale_c * y[g] - hc_over_b * x[g / j_per];
    }
}

std::vector<double> derivative_ks(const std::vector<double>& state, const KsSpec& spec) {
    require(state.size() == spec.state_dim(), "derivative_ks: state length mismatch");
    std::vector<double> out(state.size());
    derivative_ks(state.data(), out.data(), spec);
    return out;
}

std::vector<double> derivative_brusselator(const std::vector<double>& state,
                                           const BrusselatorSpec& spec) {
    require(state.size() == spec.state_dim(), "derivative_brusselator: state length mismatch");
    std::vector<double> out(state.size());
    derivative_brusselator(state.data(), out.data(), spec);
    return out;
}

std::vector<double> derivative_l96(const std::vector<double>& state, const L96Spec& spec) {
    require(state.size() == spec.state_dim(), "derivative_l96: state length mismatch");
    std::vector<double> out(state.size());
    derivative_l96(state.data(), out.data(), spec);
    return out;
}

void step_rk4(const TendencyFn& deriv, std::vector<double>& state, double dt) {
    require(dt > 0, "step_rk4: dt must be positive");
    const std::size_t n = state.size();
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
    deriv(state.data(), k1.data());
    if (!all_finite(k1)) throw std::runtime_error("step_rk4: non-finite tendency at stage 1");
    for (std::size_t i = 0; i < n; ++i) tmp[i] = state[i] + 0.5 * dt * k1[i];
    deriv(tmp.data(), k2.data());
    if (!all_finite(k2)) throw std::runtime_error("step_rk4: non-finite tendency at stage 2");
    for (std::size_t i = 0; i < n; ++i) tmp[i] = state[i] + 0.5 * dt * k2[i];
    deriv(tmp.data(), k3.data());
    if (!all_finite(k3)) throw std::runtime_error("step_rk4: non-finite tendency at stage 3");
    for (std::size_t i = 0; i < n; ++i) tmp[i] = state[i] + dt * k3[i];
    deriv(tmp.data(), k4.data());
    if (!all_finite(k4)) throw std::runtime_error("step_rk4: non-finite tendency at stage 4");
    for (std::size_t i = 0; i < n; ++i)
        state[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

void step_euler(const TendencyFn& deriv, std::vector<double>& state, double dt) {
    require(dt > 0, "step_euler: dt must be positive");
    const std::size_t n = state.size();
    std::vector<double> k(n);
    deriv(state.data(), k.data());
    if (!all_finite(k)) throw std::runtime_error("step_euler: non-finite tendency");
    for (std::size_t i = 0; i < n; ++i) state[i] += dt * k[i];
}

Integrator default_integrator(SystemTag tag) {
    return tag == SystemTag::l96 ? Integrator::rk4 : Integrator::euler;
}

std::vector<double> initial_condition(const SystemSpec& spec, std::uint64_t seed) {
    RngStream rng(mix_seed({seed, 0x1c0de5ULL}));
    std::vector<double> state(state_dim_of(spec));
    if (const auto* ks = std::get_if<KsSpec>(&spec)) {
        (void)ks;
        for (double& v : state) v = rng.uniform(-0.5, 0.5);
    } else if (const auto* br = std::get_if<BrusselatorSpec>(&spec)) {
        const std::size_t cells = br->cells();
        for (std::size_t i = 0; i < cells; ++i) state[i] = br->a + rng.uniform(-0.1, 0.1);
        const double v0 = br->b / br->a;
        for (std::size_t i = 0; i < cells; ++i) state[cells + i] = v0 + rng.uniform(-0.1, 0.1);
    } else {
        const auto& l96 = std::get<L96Spec>(spec);
        for (std::size_t k = 0; k < l96.slow_count; ++k)
            state[k] = l96.forcing_f + rng.uniform(-1.0, 1.0);
        for (std::size_t g = 0; g < l96.fast_count(); ++g)
            state[l96.slow_count + g] = rng.uniform(-0.1, 0.1);
    }
    return state;
}

FineTrajectory generate_trajectory(const SystemSpec& spec, std::uint64_t seed,
                                   std::size_t n_samples) {
    return generate_trajectory(spec, seed, n_samples, default_integrator(tag_of(spec)));
}

FineTrajectory generate_trajectory(const SystemSpec& spec, std::uint64_t seed,
                                   std::size_t n_samples, Integrator method,
                                   const std::vector<double>* init_override) {
    require(n_samples >= 1, "generate_trajectory: n_samples must be >= 1");
    std::visit([](const auto& s) { s.validate(); }, spec);

    const SystemTag tag = tag_of(spec);
    TendencyFn deriv;
    double dt = 0.0;
    double subsample_dt = 0.0;
    std::size_t spinup = 0;
    std::visit(
        [&](const auto& s) {
            dt = s.dt_solver;
            subsample_dt = s.subsample_dt;
            spinup = s.spinup_steps;
        },
        spec);
    if (tag == SystemTag::ks) {
        const auto s = std::get<KsSpec>(spec);
        deriv = [s](const double* in, double* out) { derivative_ks(in, out, s); };
    } else if (tag == SystemTag::brusselator) {
        const auto s = std::get<BrusselatorSpec>(spec);
        deriv = [s](const double* in, double* out) { derivative_brusselator(in, out, s); };
    } else {
        const auto s = std::get<L96Spec>(spec);
        deriv = [s](const double* in, double* out) { derivative_l96(in, out, s); };
    }

    const std::size_t stride = subsample_stride(subsample_dt, dt);
    std::vector<double> state = init_override ? *init_override : initial_condition(spec, seed);
    require(state.size() == state_dim_of(spec), "generate_trajectory: initial state size mismatch");

    FineTrajectory out;
    out.dt = subsample_dt;
    out.system = tag;
    out.states = Matrix(n_samples, state.size());

    std::size_t solver_step = 0;
    auto advance_one_sample = [&](bool first) {
        if (first) return;  // the initial state is subsample 0
        for (std::size_t s = 0; s < stride; ++s) {
            if (method == Integrator::rk4)
                step_rk4(deriv, state, dt);
            else
                step_euler(deriv, state, dt);
            ++solver_step;
            for (double v : state) {
                if (!(std::abs(v) <= k_blowup_threshold))
                    throw std::runtime_error("generate_trajectory: blow-up at solver step " +
                                             std::to_string(solver_step));
            }
        }
    };

    const std::size_t total_samples = spinup + n_samples;
    std::size_t stored = 0;
    for (std::size_t sample = 0; sample < total_samples; ++sample) {
        advance_one_sample(sample == 0);
        if (sample >= spinup) {
            double* dst = out.states.row(stored++);
            std::copy(state.begin(), state.end(), dst);
        }
    }
    return out;
}

}  // namespace cgem::dynsys
