#ifndef RDS_ATTRACTOR_HPP
#define RDS_ATTRACTOR_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "rds/solver.hpp"

namespace rds {

struct InstanceParams {
    std::size_t K = 64;
    double a0 = 0.3;
    double eps = 0.2;
    OUParams ou{1.0, 10.0};
};

inline GeneratorFamily make_generator(std::shared_ptr<const NoisePath> path,
                                      const InstanceParams& inst) {
    return GeneratorFamily(std::move(path), inst.K, inst.a0, inst.eps, inst.ou);
}

// Absorbing radius rho(omega) split into its three contributions:
//   drift         c Cbar_F / (lambda - c C_F)
//   ou_conv       c C_F sigma c_hat   int_{-inf}^0 e^{c C_F s} ||omega(s)||_beta ds
//   singular_conv sigma C~_{1-beta} lambda / (lambda - c C_F)
//                 int_{-inf}^0 e^{lambda s} (-s)^{beta-1} ||omega(s)||_beta ds
// The improper integrals are truncated at t_min with the recorded tail bound.
struct AbsorbingSpec {
    double rho = 0.0;
    double delta = 0.0;
    double drift_term = 0.0;
    double ou_conv_term = 0.0;
    double singular_conv_term = 0.0;
    double tail_bound = 0.0;  // estimate of the mass dropped beyond t_min
    FiberDescriptor fiber;
};

AbsorbingSpec absorbing_radius(const NoisePath& omega, const EstimateConstants& constants,
                               int refine = 1, double tail_rel_tol = 1e-6);

// initial-data sampling law for clouds and rate fits: centered ball,
// Gaussian directions over the leading active modes
struct EnsembleSpec {
    double radius = 1.0;
    std::size_t count = 256;
    std::size_t active_modes = 16;
    std::uint64_t seed = 7;

    std::string describe() const;
};

std::vector<SpectralState> sample_ensemble(const EnsembleSpec& spec, std::size_t K);

struct AttractorCloud {
    std::vector<SpectralState> points;
    double pullback_time = 0.0;
    FiberDescriptor fiber;
    std::string ensemble;

    double diameter() const;
    double max_x_norm() const;
};

// phi(T, theta_{-T} omega, u0) over the sampled ensemble; asserts that every
// terminal state lies inside the absorbing ball of radius rho(omega) + delta
AttractorCloud pullback_cloud(const EnsembleSpec& ensemble, double T,
                              std::shared_ptr<const NoisePath> omega,
                              const InstanceParams& inst, const Nonlinearity& F,
                              double sigma, const SolverParams& params,
                              const EstimateConstants& constants);

// smoothing constant of the X -> X_eta difference bound after time t_tilde;
// kappa_proof carries the 1/t~^eta factor, kappa_theorem the stated variant
struct SmoothingConstant {
    double kappa = 0.0;          // proof formula (the one used downstream)
    double kappa_theorem = 0.0;  // statement variant without 1/t~^eta
    double integral = 0.0;       // int_0^t~ e^{-lambda s} s^{-eta} ds
    double quad_error = 0.0;
};

SmoothingConstant smoothing_constant(const EstimateConstants& constants, double t_tilde,
                                     double eta);

// Upper bound on the number of eps-balls in X covering the unit ball of
// X_eta at truncation K: per-axis gridding over the modes with semi-axis
// mu_k^{-eta} > eps/2 (finer modes fold into one slab), intersected with a
// volumetric count of the occupied grid boxes.
struct CoveringBound {
    double log2_grid = 0.0;
    double log2_volumetric = 0.0;
    double log2_upper = 0.0;       // min of the two
    double log2_centers_in_set = 0.0;  // same construction at eps/2, centers inside the ball
    std::size_t active_modes = 0;

    double count_saturated() const;  // 2^log2_upper clamped to ~1e18
};

CoveringBound covering_number(double eta, double eps, std::size_t K);

// brute-force companions for small K: greedy lattice cover (estimate) and
// 2eps-separated greedy packing (rigorous lower bound for any eps-cover)
struct BruteForceCover {
    std::size_t greedy_cover = 0;
    std::size_t packing_lower = 0;
    std::size_t lattice_points = 0;
};

BruteForceCover covering_bruteforce(double eta, double eps, std::size_t K,
                                    double lattice_step_factor = 0.2);

struct DimensionReport {
    double nu = 0.25;
    double eta = 0.5;
    double kappa = 1.0;
    double covering_log2 = 0.0;
    double bound = 0.0;                 // log_{1/(2 nu)} N_{nu/kappa}
    double bound_centers_in_set = 0.0;
    std::vector<std::pair<double, double>> nu_sweep;  // (nu, bound)
    double best_nu = 0.0;
    double best_bound = 0.0;            // infimum over the nu grid
    double empirical_dim = 0.0;
    double empirical_ci95 = 0.0;
    bool empirical_valid = false;
};

DimensionReport dimension_bound(double nu, double eta, double kappa, std::size_t K);
DimensionReport dimension_bound_sweep(const std::vector<double>& nu_grid, double eta,
                                      double kappa, std::size_t K);

struct BoxCountFit {
    double dimension = 0.0;
    double ci95 = 0.0;
    bool degenerate = false;           // all points identical
    std::size_t modes_used_max = 0;
    std::vector<double> eps;           // scaling window actually fitted
    std::vector<std::size_t> counts;
};

BoxCountFit box_counting(const AttractorCloud& cloud, double eps_lo, double eps_hi,
                         int eps_count);

// Hausdorff semidistance sup_a inf_b ||a-b||_X
double hausdorff_semidistance(const std::vector<SpectralState>& from,
                              const std::vector<SpectralState>& to);

struct RateFit {
    double alpha_hat = 0.0;
    double ci95 = 0.0;
    std::vector<double> s_values;
    std::vector<double> distances;
};

// exponential pullback attraction rate: fits e^{alpha s} d(phi(s, theta_{-s}
// omega, D), M) -> 0 by log-linear regression of the semidistances
RateFit attraction_rate(const EnsembleSpec& D, const AttractorCloud& proxy,
                        const std::vector<double>& s_grid,
                        std::shared_ptr<const NoisePath> omega,
                        const InstanceParams& inst, const Nonlinearity& F,
                        double sigma, const SolverParams& params);

} // namespace rds

#endif
