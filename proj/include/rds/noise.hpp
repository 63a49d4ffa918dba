#ifndef RDS_NOISE_HPP
#define RDS_NOISE_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "rds/spectral.hpp"

namespace rds {

// thrown when an evaluation would leave the stored two-sided time window
struct CoverageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Uniform two-sided time axis containing 0 exactly.
struct NoiseGrid {
    double t_min = 0.0;
    double t_max = 0.0;
    double dt = 0.0;
    std::size_t n_points = 0;
    std::size_t zero_index = 0;

    NoiseGrid() = default;
    NoiseGrid(double tmin, double tmax, double step);

    double time_of(std::size_t i) const {
        return (static_cast<double>(i) - static_cast<double>(zero_index)) * dt;
    }
    // snaps to the nearest node; throws if t is not within rounding of a node
    // inside [t_min, t_max]
    std::size_t node_index(double t) const;
    bool covers(double t) const { return t >= t_min - 0.5 * dt && t <= t_max + 0.5 * dt; }
};

// Parameters of the stationary Ornstein-Uhlenbeck potential driver.
// The improper integral over (-inf, t] is truncated at horizon T; the
// invariant T >= 10/mu keeps the dropped tail mass e^{-mu T} below 5e-5.
struct OUParams {
    double mu = 1.0;
    double truncation_horizon = 10.0;

    OUParams() = default;
    OUParams(double mu_, double horizon);
};

// Two-sided piecewise-linear sample path of the X_beta-valued Wiener
// process in spectral coordinates, plus the scalar driving path for the
// OU potential. Immutable after construction; safe to share across threads.
class NoisePath {
  public:
    NoiseGrid grid;
    std::vector<double> modal_scales;   // q_k, k = 1..K
    std::uint64_t seed = 0;
    double beta = 0.5;                  // regularity exponent of X_beta
    double gamma = 1.0;                 // extra decay, q_k = cq * mu_k^{-beta-gamma/2}
    double cq = 1.0;
    double origin_shift = 0.0;          // accumulated Wiener-shift offset from the seeded sample

    std::size_t modes() const { return modal_scales.size(); }

    // stored node value of mode k (0-based) at node i
    double value(std::size_t i, std::size_t k) const {
        return values_[i * modes() + k];
    }
    double scalar_value(std::size_t i) const { return scalar_[i]; }

    // linear interpolation between nodes; exact at nodes
    SpectralState evaluate(double t) const;
    double scalar_at(double t) const;

    // modal increment over cell j (node j -> j+1), derived from node values
    double increment(std::size_t j, std::size_t k) const {
        return value(j + 1, k) - value(j, k);
    }
    double scalar_increment(std::size_t j) const {
        return scalar_[j + 1] - scalar_[j];
    }

    double x_norm_at(double t) const { return evaluate(t).x_norm(); }
    // ||omega(t)||_{X_beta}, weights mu_k^beta on the coefficients
    double xbeta_norm_at(double t) const { return evaluate(t).x_eta_norm(beta); }
    double xbeta_norm_node(std::size_t i) const;

    // Wiener shift theta_s: (theta_s omega)(r) = omega(s+r) - omega(s).
    // s must be a grid node; the result lives on the shifted window.
    NoisePath shift(double s) const;

    // restriction to every m-th node (same sample seen at coarser resolution)
    NoisePath coarsen(std::size_t m) const;
    // exact piecewise-linear subdivision into m sub-cells per cell
    NoisePath refine(std::size_t m) const;

    friend NoisePath sample_path(std::uint64_t seed, const NoiseGrid& grid,
                                 std::size_t K, double beta, double gamma,
                                 double cq);
    friend class PathIO;

  private:
    std::vector<double> values_;  // row-major n_points x K, zero row at zero_index
    std::vector<double> scalar_;  // driving Brownian path, zero at zero_index
};

NoisePath sample_path(std::uint64_t seed, const NoiseGrid& grid, std::size_t K,
                      double beta, double gamma, double cq = 1.0);

// Truncated stochastic integral int_{t-T}^{t} e^{-mu(t-s)} dW(s) by
// left-point Riemann-Stieltjes sums over the scalar path increments.
double ou_potential(const NoisePath& path, const OUParams& params, double t);

// growth diagnostics for the subexponential-growth (temperedness) test
struct TemperedReport {
    std::vector<double> epsilons;
    std::vector<double> maxima;     // max over grid of e^{-eps|t|} ||omega(t)||_{X_beta}
    std::vector<double> argmax_t;
    bool decay_suspect = false;     // max attained on the window boundary
};

TemperedReport check_tempered(const NoisePath& path);

} // namespace rds

#endif
