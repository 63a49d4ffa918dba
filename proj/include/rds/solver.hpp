#ifndef RDS_SOLVER_HPP
#define RDS_SOLVER_HPP

#include <cstdint>
#include <memory>
#include <vector>

#include "rds/nonlinearity.hpp"
#include "rds/operator.hpp"

namespace rds {

struct PicardDivergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class FQuadrature { left, trapezoid };

struct SolverParams {
    double dt = 1e-3;                 // must match the noise grid step
    double picard_tol = 1e-10;
    int picard_max_iter = 50;
    FQuadrature quadrature = FQuadrature::trapezoid;
    int singular_refine = 8;          // graded subintervals for singular kernels
    std::size_t store_stride = 1;     // state storage stride along the grid
};

// records which noise fiber produced a trajectory
struct FiberDescriptor {
    std::uint64_t seed = 0;
    double shift = 0.0;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<SpectralState> states;
    FiberDescriptor fiber;
    SolverParams params;

    const SpectralState& terminal() const { return states.back(); }
    std::size_t size() const { return times.size(); }
};

// Pathwise mild solution of du = A(theta_t omega) u dt + F(u) dt + sigma domega
// on [0, horizon] along the fiber of gen's noise path. Steps on the noise grid;
// per cell the linear part, the additive noise and its generator correction are
// integrated in closed form against the piecewise-linear path, and the F
// convolution uses the configured quadrature (trapezoid is implicit, resolved
// by Picard iteration with warm start).
Trajectory pathwise_mild_solve(const SpectralState& u0, double horizon,
                               const GeneratorFamily& gen, const Nonlinearity& F,
                               double sigma, const SolverParams& params);

// Semi-implicit Euler-Maruyama reference in spectral coordinates:
// (I - dt A(theta_{t_j} omega)) u_{j+1} = u_j + dt F(u_j) + sigma dW_j.
Trajectory reference_emaruyama_solve(const SpectralState& u0, double horizon,
                                     const GeneratorFamily& gen, const Nonlinearity& F,
                                     double sigma, const SolverParams& params);

// || phi(t+s, omega, u0) - phi(t, theta_s omega, phi(s, omega, u0)) ||_X
double cocycle_defect(const SpectralState& u0, double t, double s,
                      const GeneratorFamily& gen, const Nonlinearity& F,
                      double sigma, const SolverParams& params);

struct LipschitzProbe {
    double l_hat = 0.0;          // max over pairs of the difference ratio
    double bound = 0.0;          // c e^{c C_F / lambda}
    std::size_t pairs = 0;
    bool within_bound = false;   // l_hat <= bound * 1.05
};

LipschitzProbe lipschitz_probe(const GeneratorFamily& gen, const Nonlinearity& F,
                               double sigma, const SolverParams& params,
                               const std::vector<std::pair<SpectralState, SpectralState>>& pairs,
                               double t);

// rebuilds the generator on the fiber theta_s omega (same instance parameters)
GeneratorFamily shifted_generator(const GeneratorFamily& gen, double s);

} // namespace rds

#endif
