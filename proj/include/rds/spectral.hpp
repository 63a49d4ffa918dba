#ifndef RDS_SPECTRAL_HPP
#define RDS_SPECTRAL_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace rds {

// Eigenvalues of the negative Dirichlet Laplacian on (0,pi): mu_k = k^2,
// eigenfunctions e_k(x) = sin(kx) with ||e_k||_{L^2}^2 = pi/2.
inline double mode_eigenvalue(std::size_t k1based) {
    return static_cast<double>(k1based) * static_cast<double>(k1based);
}

// basis normalization constant pi/2 shared by all spectral norms
inline constexpr double kBasisWeight = 1.5707963267948966192313216916398;

// Coefficient vector of a function in the sine eigenbasis. The state u(t)
// and every operator action live in these coordinates.
struct SpectralState {
    std::vector<double> coeffs;

    SpectralState() = default;
    explicit SpectralState(std::size_t K) : coeffs(K, 0.0) {}
    explicit SpectralState(std::vector<double> c) : coeffs(std::move(c)) {}

    std::size_t modes() const { return coeffs.size(); }
    double& operator[](std::size_t i) { return coeffs[i]; }
    double operator[](std::size_t i) const { return coeffs[i]; }

    bool finite() const {
        for (double c : coeffs)
            if (!std::isfinite(c)) return false;
        return true;
    }

    // ||u||_X^2 = (pi/2) sum coeffs_k^2
    double x_norm() const {
        double s = 0.0;
        for (double c : coeffs) s += c * c;
        return std::sqrt(kBasisWeight * s);
    }

    // ||u||_{X_eta}^2 = (pi/2) sum mu_k^{2 eta} coeffs_k^2, frozen base -Laplace
    double x_eta_norm(double eta) const {
        double s = 0.0;
        for (std::size_t k = 0; k < coeffs.size(); ++k) {
            const double w = std::pow(mode_eigenvalue(k + 1), eta);
            s += w * w * coeffs[k] * coeffs[k];
        }
        return std::sqrt(kBasisWeight * s);
    }

    SpectralState& operator+=(const SpectralState& o) {
        check_same_size(o);
        for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] += o.coeffs[i];
        return *this;
    }
    SpectralState& operator-=(const SpectralState& o) {
        check_same_size(o);
        for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] -= o.coeffs[i];
        return *this;
    }
    SpectralState& operator*=(double a) {
        for (double& c : coeffs) c *= a;
        return *this;
    }

  private:
    void check_same_size(const SpectralState& o) const {
        if (o.coeffs.size() != coeffs.size())
            throw std::invalid_argument("SpectralState: mode count mismatch");
    }
};

inline SpectralState operator+(SpectralState a, const SpectralState& b) { return a += b; }
inline SpectralState operator-(SpectralState a, const SpectralState& b) { return a -= b; }
inline SpectralState operator*(double s, SpectralState a) { return a *= s; }

inline double x_distance(const SpectralState& a, const SpectralState& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.coeffs.size(); ++i) {
        const double d = a.coeffs[i] - b.coeffs[i];
        s += d * d;
    }
    return std::sqrt(kBasisWeight * s);
}

} // namespace rds

#endif
