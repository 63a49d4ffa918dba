#include "rds/nonlinearity.hpp"

#include <cmath>
#include <stdexcept>

namespace rds {

Nonlinearity Nonlinearity::zero() {
    Nonlinearity f;
    f.kind_ = Kind::zero;
    return f;
}

Nonlinearity Nonlinearity::linear(double rho) {
    Nonlinearity f;
    f.kind_ = Kind::linear;
    f.rho_ = rho;
    f.c_f_ = std::fabs(rho);
    f.cbar_f_ = 0.0;
    return f;
}

Nonlinearity Nonlinearity::scaled_tanh(double c_f, double cbar_f, std::size_t K) {
    if (c_f < 0.0 || cbar_f < 0.0)
        throw std::invalid_argument("scaled_tanh: constants must be nonnegative");
    if (K == 0) throw std::invalid_argument("scaled_tanh: K must be >= 1");
    Nonlinearity f;
    if (c_f == 0.0) {
        f.kind_ = Kind::zero;
        return f;
    }
    f.kind_ = Kind::scaled_tanh;
    f.c_f_ = c_f;
    f.cbar_f_ = cbar_f;
    // || C_F alpha tanh ||_X <= C_F sqrt(pi/2 sum alpha_k^2) = Cbar_F
    double s = 0.0;
    for (std::size_t k = 1; k <= K; ++k) s += 1.0 / (mode_eigenvalue(k) * mode_eigenvalue(k));
    const double scale = cbar_f / (c_f * std::sqrt(kBasisWeight * s));
    f.alpha_.resize(K);
    for (std::size_t k = 1; k <= K; ++k) f.alpha_[k - 1] = scale / mode_eigenvalue(k);
    return f;
}

Nonlinearity Nonlinearity::fisher_kpp_clipped(double a, double clip_radius, std::size_t K) {
    if (a <= 0.0 || clip_radius <= 0.0)
        throw std::invalid_argument("fisher_kpp_clipped: a and clip radius must be positive");
    if (K == 0) throw std::invalid_argument("fisher_kpp_clipped: K must be >= 1");
    Nonlinearity f;
    f.kind_ = Kind::fisher_kpp_clipped;
    f.fisher_a_ = a;
    f.clip_radius_ = clip_radius;
    f.c_f_ = 2.0 * a * clip_radius;
    f.cbar_f_ = a * clip_radius * clip_radius * std::sqrt(3.1415926535897932384626433832795);
    f.collocation_ = 2 * K;
    const std::size_t M = f.collocation_;
    f.sine_.resize((M - 1) * K);
    for (std::size_t m = 1; m < M; ++m)
        for (std::size_t k = 1; k <= K; ++k)
            f.sine_[(m - 1) * K + (k - 1)] =
                std::sin(3.1415926535897932384626433832795 * static_cast<double>(k) *
                         static_cast<double>(m) / static_cast<double>(M));
    return f;
}

std::string Nonlinearity::describe() const {
    switch (kind_) {
        case Kind::zero: return "zero";
        case Kind::linear: return "linear(rho=" + std::to_string(rho_) + ")";
        case Kind::scaled_tanh: return "scaled_tanh";
        case Kind::fisher_kpp_clipped: return "fisher_kpp_clipped";
    }
    return "?";
}

SpectralState Nonlinearity::operator()(const SpectralState& u) const {
    const std::size_t K = u.modes();
    switch (kind_) {
        case Kind::zero:
            return SpectralState(K);
        case Kind::linear: {
            SpectralState out(K);
            for (std::size_t k = 0; k < K; ++k) out[k] = rho_ * u[k];
            return out;
        }
        case Kind::scaled_tanh: {
            if (alpha_.size() != K)
                throw std::invalid_argument("scaled_tanh: state size differs from configured K");
            SpectralState out(K);
            for (std::size_t k = 0; k < K; ++k)
                out[k] = c_f_ * alpha_[k] * std::tanh(u[k] / alpha_[k]);
            return out;
        }
        case Kind::fisher_kpp_clipped: {
            if (collocation_ != 2 * K)
                throw std::invalid_argument("fisher_kpp_clipped: state size differs from configured K");
            const std::size_t M = collocation_;
            SpectralState out(K);
            std::vector<double> fv(M - 1);
            for (std::size_t m = 0; m + 1 < M; ++m) {
                double val = 0.0;
                const double* row = &sine_[m * K];
                for (std::size_t k = 0; k < K; ++k) val += u[k] * row[k];
                const double cl =
                    std::max(-clip_radius_, std::min(clip_radius_, val));
                fv[m] = -fisher_a_ * cl * cl;
            }
            // discrete sine orthogonality: sum_m sin(k.) sin(l.) = (M/2) delta_kl
            for (std::size_t k = 0; k < K; ++k) {
                double c = 0.0;
                for (std::size_t m = 0; m + 1 < M; ++m) c += fv[m] * sine_[m * K + k];
                out[k] = 2.0 * c / static_cast<double>(M);
            }
            return out;
        }
    }
    return SpectralState(K);
}

} // namespace rds
