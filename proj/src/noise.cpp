#include "rds/noise.hpp"

#include <cmath>

#include "rds/rng.hpp"

namespace rds {

namespace {

constexpr double kSnapTol = 1e-9;

std::size_t checked_steps(double span, double dt, const char* what) {
    const double raw = span / dt;
    const double rounded = std::round(raw);
    if (rounded < 0.0 || std::fabs(raw - rounded) > kSnapTol * std::max(1.0, raw))
        throw std::invalid_argument(std::string("NoiseGrid: dt does not divide ") + what);
    return static_cast<std::size_t>(rounded);
}

} // namespace

NoiseGrid::NoiseGrid(double tmin, double tmax, double step) {
    if (step <= 0.0) throw std::invalid_argument("NoiseGrid: dt must be positive");
    if (!(tmin < 0.0 && 0.0 < tmax))
        throw std::invalid_argument("NoiseGrid: need t_min < 0 < t_max so the grid contains 0");
    const std::size_t n_neg = checked_steps(-tmin, step, "|t_min|");
    const std::size_t n_pos = checked_steps(tmax, step, "t_max");
    dt = step;
    zero_index = n_neg;
    n_points = n_neg + n_pos + 1;
    t_min = -static_cast<double>(n_neg) * dt;
    t_max = static_cast<double>(n_pos) * dt;
}

std::size_t NoiseGrid::node_index(double t) const {
    const double raw = (t - t_min) / dt;
    const double rounded = std::round(raw);
    if (std::fabs(raw - rounded) > kSnapTol * std::max(1.0, std::fabs(raw)))
        throw std::invalid_argument("NoiseGrid: time is not a grid node");
    if (rounded < -0.5 || rounded > static_cast<double>(n_points - 1) + 0.5)
        throw CoverageError("NoiseGrid: time outside stored window");
    return static_cast<std::size_t>(rounded);
}

OUParams::OUParams(double mu_, double horizon) : mu(mu_), truncation_horizon(horizon) {
    if (mu <= 0.0) throw std::invalid_argument("OUParams: mu must be positive");
    if (truncation_horizon < 10.0 / mu)
        throw std::invalid_argument("OUParams: truncation horizon below 10/mu");
}

NoisePath sample_path(std::uint64_t seed, const NoiseGrid& grid, std::size_t K,
                      double beta, double gamma, double cq) {
    if (K == 0) throw std::invalid_argument("sample_path: K must be >= 1");
    if (grid.n_points == 0) throw std::invalid_argument("sample_path: empty grid");
    if (!(beta > 0.0 && beta <= 1.0))
        throw std::invalid_argument("sample_path: beta must lie in (0,1]");
    if (!(gamma > 0.5))
        throw std::invalid_argument("sample_path: gamma must exceed 1/2 so the path is X_beta-valued");

    NoisePath p;
    p.grid = grid;
    p.seed = seed;
    p.beta = beta;
    p.gamma = gamma;
    p.cq = cq;
    p.modal_scales.resize(K);
    for (std::size_t k = 0; k < K; ++k)
        p.modal_scales[k] = cq * std::pow(mode_eigenvalue(k + 1), -beta - 0.5 * gamma);

    const std::size_t n = grid.n_points;
    const std::size_t z = grid.zero_index;
    const double sdt = std::sqrt(grid.dt);
    p.values_.assign(n * K, 0.0);
    p.scalar_.assign(n, 0.0);

    // Per-mode substreams keep the first K modes of a K'-mode path (K' > K)
    // bit-identical; forward and backward halves are independent so the glued
    // process is a two-sided Wiener path that is zero at zero.
    for (std::size_t k = 0; k < K; ++k) {
        const double amp = p.modal_scales[k] * sdt;
        Rng fwd(derive_seed(seed, 2 * (k + 1)));
        for (std::size_t i = z; i + 1 < n; ++i)
            p.values_[(i + 1) * K + k] = p.values_[i * K + k] + amp * fwd.next_gaussian();
        Rng bwd(derive_seed(seed, 2 * (k + 1) + 1));
        for (std::size_t i = z; i > 0; --i)
            p.values_[(i - 1) * K + k] = p.values_[i * K + k] + amp * bwd.next_gaussian();
    }
    {
        Rng fwd(derive_seed(seed, 0));
        for (std::size_t i = z; i + 1 < n; ++i)
            p.scalar_[i + 1] = p.scalar_[i] + sdt * fwd.next_gaussian();
        Rng bwd(derive_seed(seed, 1));
        for (std::size_t i = z; i > 0; --i)
            p.scalar_[i - 1] = p.scalar_[i] + sdt * bwd.next_gaussian();
    }
    return p;
}

SpectralState NoisePath::evaluate(double t) const {
    if (t < grid.t_min - kSnapTol || t > grid.t_max + kSnapTol)
        throw CoverageError("NoisePath::evaluate: time outside stored window");
    const double pos = (t - grid.t_min) / grid.dt;
    std::size_t j = static_cast<std::size_t>(std::floor(pos));
    if (j >= grid.n_points - 1) j = grid.n_points - 2;
    double w = pos - static_cast<double>(j);
    if (w < 0.0) w = 0.0;
    if (w > 1.0) w = 1.0;
    const std::size_t K = modes();
    SpectralState u(K);
    if (std::fabs(pos - std::round(pos)) <= kSnapTol * std::max(1.0, pos)) {
        const std::size_t i = static_cast<std::size_t>(std::llround(pos));
        for (std::size_t k = 0; k < K; ++k) u[k] = value(i, k);
        return u;
    }
    for (std::size_t k = 0; k < K; ++k)
        u[k] = (1.0 - w) * value(j, k) + w * value(j + 1, k);
    return u;
}

double NoisePath::scalar_at(double t) const {
    if (t < grid.t_min - kSnapTol || t > grid.t_max + kSnapTol)
        throw CoverageError("NoisePath::scalar_at: time outside stored window");
    const double pos = (t - grid.t_min) / grid.dt;
    if (std::fabs(pos - std::round(pos)) <= kSnapTol * std::max(1.0, pos))
        return scalar_[static_cast<std::size_t>(std::llround(pos))];
    std::size_t j = static_cast<std::size_t>(std::floor(pos));
    if (j >= grid.n_points - 1) j = grid.n_points - 2;
    const double w = pos - static_cast<double>(j);
    return (1.0 - w) * scalar_[j] + w * scalar_[j + 1];
}

double NoisePath::xbeta_norm_node(std::size_t i) const {
    double s = 0.0;
    const std::size_t K = modes();
    for (std::size_t k = 0; k < K; ++k) {
        const double w = std::pow(mode_eigenvalue(k + 1), beta);
        const double v = w * value(i, k);
        s += v * v;
    }
    return std::sqrt(kBasisWeight * s);
}

NoisePath NoisePath::shift(double s) const {
    const std::size_t is = grid.node_index(s);
    NoisePath out;
    out.grid.dt = grid.dt;
    out.grid.n_points = grid.n_points;
    out.grid.zero_index = is;
    out.grid.t_min = grid.t_min - grid.time_of(is);
    out.grid.t_max = grid.t_max - grid.time_of(is);
    out.modal_scales = modal_scales;
    out.seed = seed;
    out.beta = beta;
    out.gamma = gamma;
    out.cq = cq;
    out.origin_shift = origin_shift + grid.time_of(is);
    const std::size_t K = modes();
    out.values_.resize(values_.size());
    out.scalar_.resize(scalar_.size());
    for (std::size_t i = 0; i < grid.n_points; ++i) {
        for (std::size_t k = 0; k < K; ++k)
            out.values_[i * K + k] = values_[i * K + k] - values_[is * K + k];
        out.scalar_[i] = scalar_[i] - scalar_[is];
    }
    return out;
}

NoisePath NoisePath::coarsen(std::size_t m) const {
    if (m == 0) throw std::invalid_argument("NoisePath::coarsen: m must be >= 1");
    if (m == 1) return *this;
    if (grid.zero_index % m != 0 || (grid.n_points - 1 - grid.zero_index) % m != 0)
        throw std::invalid_argument("NoisePath::coarsen: m must divide both half-windows");
    NoisePath out;
    out.grid.dt = grid.dt * static_cast<double>(m);
    out.grid.zero_index = grid.zero_index / m;
    out.grid.n_points = (grid.n_points - 1) / m + 1;
    out.grid.t_min = grid.t_min;
    out.grid.t_max = grid.t_max;
    out.modal_scales = modal_scales;
    out.seed = seed;
    out.beta = beta;
    out.gamma = gamma;
    out.cq = cq;
    out.origin_shift = origin_shift;
    const std::size_t K = modes();
    out.values_.resize(out.grid.n_points * K);
    out.scalar_.resize(out.grid.n_points);
    for (std::size_t i = 0; i < out.grid.n_points; ++i) {
        for (std::size_t k = 0; k < K; ++k)
            out.values_[i * K + k] = values_[i * m * K + k];
        out.scalar_[i] = scalar_[i * m];
    }
    return out;
}

NoisePath NoisePath::refine(std::size_t m) const {
    if (m == 0) throw std::invalid_argument("NoisePath::refine: m must be >= 1");
    if (m == 1) return *this;
    NoisePath out;
    out.grid.dt = grid.dt / static_cast<double>(m);
    out.grid.zero_index = grid.zero_index * m;
    out.grid.n_points = (grid.n_points - 1) * m + 1;
    out.grid.t_min = grid.t_min;
    out.grid.t_max = grid.t_max;
    out.modal_scales = modal_scales;
    out.seed = seed;
    out.beta = beta;
    out.gamma = gamma;
    out.cq = cq;
    out.origin_shift = origin_shift;
    const std::size_t K = modes();
    out.values_.resize(out.grid.n_points * K);
    out.scalar_.resize(out.grid.n_points);
    for (std::size_t j = 0; j + 1 < grid.n_points; ++j) {
        for (std::size_t r = 0; r < m; ++r) {
            const double w = static_cast<double>(r) / static_cast<double>(m);
            const std::size_t i = j * m + r;
            for (std::size_t k = 0; k < K; ++k)
                out.values_[i * K + k] =
                    (1.0 - w) * values_[j * K + k] + w * values_[(j + 1) * K + k];
            out.scalar_[i] = (1.0 - w) * scalar_[j] + w * scalar_[j + 1];
        }
    }
    const std::size_t last = out.grid.n_points - 1;
    for (std::size_t k = 0; k < K; ++k)
        out.values_[last * K + k] = values_[(grid.n_points - 1) * K + k];
    out.scalar_[last] = scalar_[grid.n_points - 1];
    return out;
}

double ou_potential(const NoisePath& path, const OUParams& params, double t) {
    const NoiseGrid& g = path.grid;
    const double t0 = t - params.truncation_horizon;
    if (t0 < g.t_min - 1e-9 || t > g.t_max + 1e-9)
        throw CoverageError("ou_potential: stored history shorter than the truncation horizon");
    const std::size_t it = g.node_index(t);
    const std::size_t i0 = g.node_index(t0 < g.t_min ? g.t_min : t0);
    double z = 0.0;
    for (std::size_t j = i0; j < it; ++j)
        z += std::exp(-params.mu * (g.time_of(it) - g.time_of(j))) * path.scalar_increment(j);
    return z;
}

TemperedReport check_tempered(const NoisePath& path) {
    TemperedReport rep;
    rep.epsilons = {0.01, 0.1, 1.0};
    const NoiseGrid& g = path.grid;
    std::vector<double> norms(g.n_points);
    for (std::size_t i = 0; i < g.n_points; ++i) norms[i] = path.xbeta_norm_node(i);
    for (double eps : rep.epsilons) {
        double best = 0.0, arg = 0.0;
        for (std::size_t i = 0; i < g.n_points; ++i) {
            const double t = g.time_of(i);
            const double v = std::exp(-eps * std::fabs(t)) * norms[i];
            if (v > best) {
                best = v;
                arg = t;
            }
        }
        rep.maxima.push_back(best);
        rep.argmax_t.push_back(arg);
        if (best > 0.0 &&
            (std::fabs(arg - g.t_min) < 0.5 * g.dt || std::fabs(arg - g.t_max) < 0.5 * g.dt))
            rep.decay_suspect = true;
    }
    return rep;
}

} // namespace rds
