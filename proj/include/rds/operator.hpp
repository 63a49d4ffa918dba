#ifndef RDS_OPERATOR_HPP
#define RDS_OPERATOR_HPP

#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "rds/noise.hpp"
#include "rds/spectral.hpp"

namespace rds {

// Constants entering the decay, absorbing and smoothing estimates.
// c and c_hat are exact for this self-adjoint diagonal instance; the
// C-tilde values are fitted by verify_decay_estimates (with headroom)
// or supplied directly.
struct EstimateConstants {
    double c = 1.0;          // stability prefactor in ||U|| <= c e^{-lambda tau}
    double lambda = 0.5;     // decay rate, 1 - a0 - |eps|
    double c_hat = 1.0;      // prefactor for X_beta-valued initial noise
    double ct_eta = 1.0;             // C~_alpha at alpha = eta
    double ct_one_minus_beta = 1.0;  // C~_alpha at alpha = 1 - beta
    double ct_compact = 1.0;         // C~_alpha at alpha = 1 - (beta - eta)
    double C_F = 0.25;       // Lipschitz constant of F
    double Cbar_F = 0.5;     // growth constant of F
    double sigma = 0.1;      // noise intensity
    double beta = 1.0;       // noise regularity
    double eta = 0.5;        // target smoothing exponent
    double nu_holder = 0.5;  // Hoelder exponent of t -> A(theta_t omega)
    double delta = 0.1;      // absorbing-set margin

    double gap() const { return lambda - c * C_F; }
    // throws std::invalid_argument naming the violated condition
    void validate() const;
};

// The random nonautonomous generator A(theta_t omega) = Laplace + a(theta_t omega)
// with the clipped Ornstein-Uhlenbeck potential a = a0 + eps tanh(z).
// Immutable after construction; evolution multipliers are pure functions.
class GeneratorFamily {
  public:
    GeneratorFamily(std::shared_ptr<const NoisePath> path, std::size_t K,
                    double a0, double eps, OUParams ou);

    std::size_t modes() const { return K_; }
    double a0() const { return a0_; }
    double eps() const { return eps_; }
    const OUParams& ou() const { return ou_; }
    const NoisePath& path() const { return *path_; }
    std::shared_ptr<const NoisePath> path_ptr() const { return path_; }

    // uniform exponential stability margin, lambda = 1 - a0 - |eps| under (U)
    double lambda() const { return 1.0 - a0_ - std::fabs(eps_); }
    double potential_bound() const { return a0_ + std::fabs(eps_); }

    // a(theta_t omega); t snapped to the noise grid
    double potential(double t) const;
    // OU driver z(theta_t omega) at a grid node (cached recursion)
    double ou_value(double t) const;

    // mode-wise (-mu_k + a(theta_t omega)) coeffs_k
    SpectralState apply(const SpectralState& u, double t) const;
    // frozen-base fractional power: mode-wise mu_k^alpha coeffs_k.
    // The time argument is accepted for interface symmetry and ignored.
    SpectralState fractional_power(const SpectralState& u, double alpha,
                                   double t = 0.0) const;

    // m_k(t,s) = exp(-mu_k (t-s) + int_s^t a), trapezoid integral on the
    // noise grid; additive over subintervals, so the cocycle identity is
    // exact on grid nodes
    std::vector<double> evolution_multipliers(double t, double s) const;

    // trapezoid prefix integral of a between two grid times
    double potential_integral(double s, double t) const;

    // earliest time with full OU truncation history
    double first_valid_time() const { return path_->grid.time_of(first_valid_); }
    // node index helpers shared with the solver
    std::size_t node_index(double t) const { return path_->grid.node_index(t); }
    double potential_node(std::size_t i) const;
    double prefix_integral_node(std::size_t i) const;
    std::size_t first_valid_node() const { return first_valid_; }

  private:
    std::shared_ptr<const NoisePath> path_;
    std::size_t K_;
    double a0_, eps_;
    OUParams ou_;
    std::size_t first_valid_;
    std::vector<double> z_;        // OU values per node, index offset first_valid_
    std::vector<double> a_;        // clipped potential per node
    std::vector<double> prefix_;   // trapezoid prefix integral of a_
};

// Hoelder diagnostics for t -> A(theta_t omega); the operator difference is
// (a(t)-a(s)) Id so the L(D_A,X) norm is |a(t)-a(s)|.
struct HolderFit {
    double nu_hat = 0.0;
    double c_hat = 0.0;
    bool exact_constancy = false;
    int pairs_used = 0;
};

HolderFit check_holder(const GeneratorFamily& gen,
                       const std::vector<std::pair<double, double>>& sample_pairs);

struct DecaySample {
    double s = 0.0;
    double t = 0.0;
    double alpha = 0.5;
    SpectralState x;
};

std::vector<DecaySample> make_decay_samples(const GeneratorFamily& gen,
                                            std::uint64_t seed, int count,
                                            double tau_min, double tau_max,
                                            const std::vector<double>& alphas,
                                            double s_anchor = 0.0);

struct DecayEstimateRow {
    std::string estimate_id;  // E1, E2, E3
    double alpha = 0.0;
    double fitted_constant = 0.0;
    double max_ratio = 0.0;
    int sample_count = 0;
    bool smalltime_blowup = false;  // doubling test toward t-s -> 0
};

struct DecayReport {
    std::vector<DecayEstimateRow> rows;
};

// Empirical ratios for the three evolution-system decay estimates:
//   E1  ||(-A)^a U(t,s) x||      <= C e^{-l(t-s)} (t-s)^{-a}     ||x||
//   E2  ||U(t,s) (-A)^a x||      <= C e^{-l(t-s)} (t-s)^{-a}     ||x||
//   E3  ||(-A)^{-a} U(t,s) (-A)^eta x|| <= C e^{-l(t-s)} (t-s)^{a-eta} ||x||
DecayReport verify_decay_estimates(const GeneratorFamily& gen,
                                   const EstimateConstants& constants,
                                   const std::vector<DecaySample>& samples);

} // namespace rds

#endif
