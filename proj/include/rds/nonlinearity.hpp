#ifndef RDS_NONLINEARITY_HPP
#define RDS_NONLINEARITY_HPP

#include <string>
#include <vector>

#include "rds/spectral.hpp"

namespace rds {

// Globally Lipschitz drift term F with computable Lipschitz constant C_F and
// growth bound ||F(x)|| <= Cbar_F + C_F ||x||.
class Nonlinearity {
  public:
    enum class Kind { zero, linear, scaled_tanh, fisher_kpp_clipped };

    static Nonlinearity zero();
    // F(u) = rho u
    static Nonlinearity linear(double rho);
    // mode-wise F(u)_k = C_F alpha_k tanh(u_k / alpha_k) with alpha_k ~ mu_k^{-1}
    // scaled so that sup ||F|| = Cbar_F; Lipschitz constant exactly C_F
    static Nonlinearity scaled_tanh(double c_f, double cbar_f, std::size_t K);
    // F(u)(x) = -a clip(u(x))^2 pointwise with |clip| <= R; Lipschitz 2 a R.
    // Evaluated on a sine collocation grid of M = 2K points.
    static Nonlinearity fisher_kpp_clipped(double a, double clip_radius, std::size_t K);

    Kind kind() const { return kind_; }
    bool is_zero() const { return kind_ == Kind::zero; }
    double lipschitz() const { return c_f_; }
    double growth() const { return cbar_f_; }
    std::string describe() const;

    SpectralState operator()(const SpectralState& u) const;

  private:
    Nonlinearity() = default;
    Kind kind_ = Kind::zero;
    double c_f_ = 0.0;
    double cbar_f_ = 0.0;
    double rho_ = 0.0;
    double fisher_a_ = 0.0;
    double clip_radius_ = 0.0;
    std::vector<double> alpha_;     // scaled_tanh mode scales
    std::size_t collocation_ = 0;   // fisher grid size M
    std::vector<double> sine_;      // sin(k pi m / M), row-major m x k
};

} // namespace rds

#endif
