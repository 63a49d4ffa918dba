#include "rds/solver.hpp"

#include <cmath>
#include <limits>

namespace rds {

namespace {

void check_solver_inputs(const SpectralState& u0, double horizon,
                         const GeneratorFamily& gen, const SolverParams& params) {
    if (!u0.finite())
        throw std::invalid_argument("solver: initial state has NaN/Inf coefficients");
    if (u0.modes() != gen.modes())
        throw std::invalid_argument("solver: state mode count differs from generator");
    if (horizon < 0.0) throw std::invalid_argument("solver: negative horizon");
    const double grid_dt = gen.path().grid.dt;
    if (std::fabs(params.dt - grid_dt) > 1e-12 * std::max(1.0, grid_dt))
        throw std::invalid_argument(
            "solver: dt must equal the noise grid step (refine the path to subdivide)");
    if (params.picard_tol <= 0.0)
        throw std::invalid_argument("solver: picard_tol must be positive");
}

struct StepGrid {
    std::size_t i0 = 0;
    std::size_t steps = 0;
};

StepGrid locate(const GeneratorFamily& gen, double horizon) {
    const NoiseGrid& g = gen.path().grid;
    StepGrid sg;
    sg.i0 = g.node_index(0.0);
    const double raw = horizon / g.dt;
    sg.steps = static_cast<std::size_t>(std::llround(raw));
    if (std::fabs(raw - static_cast<double>(sg.steps)) > 1e-9 * std::max(1.0, raw))
        throw std::invalid_argument("solver: horizon must be a multiple of dt");
    if (sg.i0 + sg.steps >= g.n_points)
        throw CoverageError("solver: horizon exceeds stored path coverage");
    if (sg.i0 < gen.first_valid_node())
        throw CoverageError("solver: OU truncation history missing at t = 0");
    return sg;
}

void maybe_store(Trajectory& traj, const SpectralState& u, double t,
                 std::size_t n, std::size_t steps, std::size_t stride) {
    if (n == steps || n % stride == 0) {
        traj.times.push_back(t);
        traj.states.push_back(u);
    }
}

} // namespace

Trajectory pathwise_mild_solve(const SpectralState& u0, double horizon,
                               const GeneratorFamily& gen, const Nonlinearity& F,
                               double sigma, const SolverParams& params) {
    check_solver_inputs(u0, horizon, gen, params);
    const StepGrid sg = locate(gen, horizon);
    const NoisePath& path = gen.path();
    const NoiseGrid& g = path.grid;
    const std::size_t K = gen.modes();
    const double dt = g.dt;
    const std::size_t stride = std::max<std::size_t>(1, params.store_stride);

    Trajectory traj;
    traj.fiber = {path.seed, path.origin_shift};
    traj.params = params;
    traj.times.reserve(sg.steps / stride + 2);
    traj.states.reserve(sg.steps / stride + 2);

    SpectralState u = u0;
    maybe_store(traj, u, 0.0, 0, sg.steps, stride);

    // linear + noiseless + zero start collapses to the zero trajectory
    bool all_zero = true;
    for (double c : u0.coeffs) all_zero = all_zero && c == 0.0;
    if (all_zero && sigma == 0.0 && F.is_zero()) {
        for (std::size_t n = 1; n <= sg.steps; ++n)
            maybe_store(traj, u, static_cast<double>(n) * dt, n, sg.steps, stride);
        return traj;
    }

    std::vector<double> emu(K);
    for (std::size_t k = 0; k < K; ++k)
        emu[k] = std::exp(-mode_eigenvalue(k + 1) * dt);

    SpectralState base(K), g_prev(K), v(K), v_new(K);
    const bool has_f = !F.is_zero();
    if (has_f) g_prev = F(u);

    for (std::size_t n = 0; n < sg.steps; ++n) {
        const std::size_t i = sg.i0 + n;
        const double dA = gen.prefix_integral_node(i + 1) - gen.prefix_integral_node(i);
        const double ea = std::exp(dA);
        const double abar = dA / dt;
        for (std::size_t k = 0; k < K; ++k) {
            const double m = emu[k] * ea;
            double nk = 0.0;
            if (sigma != 0.0) {
                const double w0 = path.value(i, k);
                const double w1 = path.value(i + 1, k);
                const double b = mode_eigenvalue(k + 1) - abar;
                const double I0 = (1.0 - m) / b;
                const double I1 = (I0 - dt * m) / b;
                // sigma (omega(t+dt) - m omega(t)) plus the closed-form cell
                // integral of U(t+dt,s) A(theta_s omega) omega(s)
                nk = sigma * ((w1 - m * w0) - b * (w1 * I0 - (w1 - w0) / dt * I1));
            }
            base[k] = m * u[k] + nk;
        }
        if (!has_f) {
            u = base;
        } else if (params.quadrature == FQuadrature::left) {
            for (std::size_t k = 0; k < K; ++k)
                u[k] = base[k] + dt * emu[k] * ea * g_prev[k];
            g_prev = F(u);
        } else {
            // trapezoid convolution is implicit in the right endpoint
            const double ea_m = ea;
            for (std::size_t k = 0; k < K; ++k)
                v[k] = base[k] + 0.5 * dt * (emu[k] * ea_m * g_prev[k] + g_prev[k]);
            int it = 0;
            for (;; ++it) {
                if (it >= params.picard_max_iter)
                    throw PicardDivergence(
                        "pathwise_mild_solve: Picard iteration exceeded max_iter "
                        "(dt too large relative to C_F)");
                const SpectralState gv = F(v);
                double diff2 = 0.0;
                for (std::size_t k = 0; k < K; ++k) {
                    v_new[k] = base[k] + 0.5 * dt * (emu[k] * ea_m * g_prev[k] + gv[k]);
                    const double d = v_new[k] - v[k];
                    diff2 += d * d;
                }
                std::swap(v, v_new);
                if (std::sqrt(kBasisWeight * diff2) <= params.picard_tol) {
                    g_prev = F(v);
                    break;
                }
            }
            u = v;
        }
        maybe_store(traj, u, static_cast<double>(n + 1) * dt, n + 1, sg.steps, stride);
    }
    return traj;
}

Trajectory reference_emaruyama_solve(const SpectralState& u0, double horizon,
                                     const GeneratorFamily& gen, const Nonlinearity& F,
                                     double sigma, const SolverParams& params) {
    check_solver_inputs(u0, horizon, gen, params);
    const StepGrid sg = locate(gen, horizon);
    const NoisePath& path = gen.path();
    const double dt = path.grid.dt;
    const std::size_t K = gen.modes();
    const std::size_t stride = std::max<std::size_t>(1, params.store_stride);

    Trajectory traj;
    traj.fiber = {path.seed, path.origin_shift};
    traj.params = params;
    SpectralState u = u0;
    maybe_store(traj, u, 0.0, 0, sg.steps, stride);
    for (std::size_t n = 0; n < sg.steps; ++n) {
        const std::size_t i = sg.i0 + n;
        const double a = gen.potential_node(i);
        const SpectralState fu = F(u);
        for (std::size_t k = 0; k < K; ++k) {
            const double rhs = u[k] + dt * fu[k] +
                               sigma * (path.value(i + 1, k) - path.value(i, k));
            u[k] = rhs / (1.0 + dt * (mode_eigenvalue(k + 1) - a));
        }
        maybe_store(traj, u, static_cast<double>(n + 1) * dt, n + 1, sg.steps, stride);
    }
    return traj;
}

GeneratorFamily shifted_generator(const GeneratorFamily& gen, double s) {
    auto shifted = std::make_shared<NoisePath>(gen.path().shift(s));
    return GeneratorFamily(shifted, gen.modes(), gen.a0(), gen.eps(), gen.ou());
}

double cocycle_defect(const SpectralState& u0, double t, double s,
                      const GeneratorFamily& gen, const Nonlinearity& F,
                      double sigma, const SolverParams& params) {
    if (t < 0.0 || s < 0.0)
        throw std::invalid_argument("cocycle_defect: need t, s >= 0");
    SolverParams p = params;
    p.store_stride = std::numeric_limits<std::size_t>::max() / 2;

    const Trajectory whole = pathwise_mild_solve(u0, t + s, gen, F, sigma, p);
    const Trajectory first = pathwise_mild_solve(u0, s, gen, F, sigma, p);
    const GeneratorFamily gen_s = shifted_generator(gen, s);
    const Trajectory second =
        pathwise_mild_solve(first.terminal(), t, gen_s, F, sigma, p);
    return x_distance(whole.terminal(), second.terminal());
}

LipschitzProbe lipschitz_probe(const GeneratorFamily& gen, const Nonlinearity& F,
                               double sigma, const SolverParams& params,
                               const std::vector<std::pair<SpectralState, SpectralState>>& pairs,
                               double t) {
    SolverParams p = params;
    p.store_stride = std::numeric_limits<std::size_t>::max() / 2;
    LipschitzProbe probe;
    probe.bound = std::exp(F.lipschitz() / gen.lambda());
    for (const auto& [u0, v0] : pairs) {
        const double d0 = x_distance(u0, v0);
        if (d0 == 0.0)
            throw std::invalid_argument("lipschitz_probe: identical pair members");
        const Trajectory tu = pathwise_mild_solve(u0, t, gen, F, sigma, p);
        const Trajectory tv = pathwise_mild_solve(v0, t, gen, F, sigma, p);
        probe.l_hat = std::max(probe.l_hat, x_distance(tu.terminal(), tv.terminal()) / d0);
        ++probe.pairs;
    }
    probe.within_bound = probe.l_hat <= probe.bound * 1.05;
    return probe;
}

} // namespace rds
