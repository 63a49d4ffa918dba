#include "rds/operator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rds/numeric.hpp"
#include "rds/rng.hpp"

namespace rds {

void EstimateConstants::validate() const {
    if (!(lambda > 0.0) || !(c > 0.0) || !(c_hat > 0.0))
        throw std::invalid_argument("EstimateConstants: c, c_hat, lambda must be positive");
    if (!(gap() > 0.0))
        throw std::invalid_argument(
            "EstimateConstants violates (Drift): lambda - c*C_F must be positive");
    if (!(eta > 0.0 && eta < 1.0))
        throw std::invalid_argument("EstimateConstants: eta must lie in (0,1)");
    if (!(beta > 0.0 && beta <= 1.0))
        throw std::invalid_argument("EstimateConstants violates (Noise): beta must lie in (0,1]");
    if (C_F < 0.0 || Cbar_F < 0.0 || sigma < 0.0 || delta <= 0.0)
        throw std::invalid_argument("EstimateConstants: nonnegative C_F, Cbar_F, sigma; delta > 0");
}

GeneratorFamily::GeneratorFamily(std::shared_ptr<const NoisePath> path,
                                 std::size_t K, double a0, double eps, OUParams ou)
    : path_(std::move(path)), K_(K), a0_(a0), eps_(eps), ou_(ou) {
    if (!path_) throw std::invalid_argument("GeneratorFamily: null noise path");
    if (K_ == 0) throw std::invalid_argument("GeneratorFamily: K must be >= 1");
    if (!(a0_ + std::fabs(eps_) < 1.0))
        throw std::invalid_argument(
            "GeneratorFamily violates (U): a0 + |eps| must stay below mu_1 = 1");

    const NoiseGrid& g = path_->grid;
    const double raw_w = ou_.truncation_horizon / g.dt;
    const std::size_t W = static_cast<std::size_t>(std::llround(raw_w));
    if (std::fabs(raw_w - static_cast<double>(W)) > 1e-6 * std::max(1.0, raw_w))
        throw std::invalid_argument(
            "GeneratorFamily: OU truncation horizon must be a multiple of the grid step");
    if (W >= g.n_points)
        throw CoverageError("GeneratorFamily: grid shorter than the OU truncation horizon");

    first_valid_ = W;
    const std::size_t n_valid = g.n_points - W;
    z_.resize(n_valid);
    a_.resize(n_valid);
    prefix_.resize(n_valid);

    // left-point window sum at the first eligible node, then the sliding
    // recursion S_{i+1} = e^{-mu dt}(S_i - e^{-mu T} dW_{i-W} + dW_i)
    const double decay_dt = std::exp(-ou_.mu * g.dt);
    const double decay_T = std::exp(-ou_.mu * ou_.truncation_horizon);
    double s = 0.0;
    for (std::size_t j = 0; j < W; ++j)
        s += std::exp(-ou_.mu * (g.time_of(W) - g.time_of(j))) * path_->scalar_increment(j);
    z_[0] = s;
    for (std::size_t i = W; i + 1 < g.n_points; ++i) {
        s = decay_dt * (s - decay_T * path_->scalar_increment(i - W) + path_->scalar_increment(i));
        z_[i + 1 - W] = s;
    }
    for (std::size_t i = 0; i < n_valid; ++i)
        a_[i] = a0_ + eps_ * std::tanh(z_[i]);
    prefix_[0] = 0.0;
    for (std::size_t i = 0; i + 1 < n_valid; ++i)
        prefix_[i + 1] = prefix_[i] + 0.5 * g.dt * (a_[i] + a_[i + 1]);
}

double GeneratorFamily::potential_node(std::size_t i) const {
    if (i < first_valid_ || i >= path_->grid.n_points)
        throw CoverageError("GeneratorFamily: node lacks OU truncation history");
    return a_[i - first_valid_];
}

double GeneratorFamily::prefix_integral_node(std::size_t i) const {
    if (i < first_valid_ || i >= path_->grid.n_points)
        throw CoverageError("GeneratorFamily: node lacks OU truncation history");
    return prefix_[i - first_valid_];
}

double GeneratorFamily::potential(double t) const {
    return potential_node(path_->grid.node_index(t));
}

double GeneratorFamily::ou_value(double t) const {
    const std::size_t i = path_->grid.node_index(t);
    if (i < first_valid_)
        throw CoverageError("GeneratorFamily: node lacks OU truncation history");
    return z_[i - first_valid_];
}

SpectralState GeneratorFamily::apply(const SpectralState& u, double t) const {
    if (!u.finite())
        throw std::invalid_argument("GeneratorFamily::apply: state has NaN/Inf coefficients");
    const double a = potential(t);
    SpectralState out(u.modes());
    for (std::size_t k = 0; k < u.modes(); ++k)
        out[k] = (-mode_eigenvalue(k + 1) + a) * u[k];
    return out;
}

SpectralState GeneratorFamily::fractional_power(const SpectralState& u, double alpha,
                                                double /*t*/) const {
    if (!(alpha > -1.0 && alpha <= 1.0))
        throw std::invalid_argument("fractional_power: alpha must lie in (-1,1]");
    SpectralState out(u.modes());
    for (std::size_t k = 0; k < u.modes(); ++k)
        out[k] = std::pow(mode_eigenvalue(k + 1), alpha) * u[k];
    return out;
}

double GeneratorFamily::potential_integral(double s, double t) const {
    if (s > t) throw std::invalid_argument("potential_integral: need s <= t");
    const std::size_t is = node_index(s);
    const std::size_t it = node_index(t);
    return prefix_integral_node(it) - prefix_integral_node(is);
}

std::vector<double> GeneratorFamily::evolution_multipliers(double t, double s) const {
    if (s > t) throw std::invalid_argument("evolution_multipliers: need s <= t");
    const double integral = potential_integral(s, t);
    const double tau = t - s;
    std::vector<double> m(K_);
    for (std::size_t k = 0; k < K_; ++k)
        m[k] = std::exp(-mode_eigenvalue(k + 1) * tau + integral);
    return m;
}

HolderFit check_holder(const GeneratorFamily& gen,
                       const std::vector<std::pair<double, double>>& sample_pairs) {
    if (sample_pairs.size() < 8)
        throw std::invalid_argument("check_holder: need at least 8 sample pairs");
    std::vector<double> log_dt, log_da;
    double max_da = 0.0;
    for (const auto& [s, t] : sample_pairs) {
        const double da = std::fabs(gen.potential(t) - gen.potential(s));
        const double dtv = std::fabs(t - s);
        max_da = std::max(max_da, da);
        if (da > 0.0 && dtv > 0.0) {
            log_dt.push_back(std::log(dtv));
            log_da.push_back(std::log(da));
        }
    }
    HolderFit fit;
    if (max_da < 1e-14 || log_dt.size() < 2) {
        fit.exact_constancy = true;
        return fit;
    }
    const LineFit lf = fit_line(log_dt, log_da);
    fit.nu_hat = lf.slope;
    fit.c_hat = std::exp(lf.intercept);
    fit.pairs_used = lf.n;
    return fit;
}

std::vector<DecaySample> make_decay_samples(const GeneratorFamily& gen,
                                            std::uint64_t seed, int count,
                                            double tau_min, double tau_max,
                                            const std::vector<double>& alphas,
                                            double s_anchor) {
    Rng rng(derive_seed(seed, 0x6465636179ULL));
    const double dt = gen.path().grid.dt;
    std::vector<DecaySample> out;
    out.reserve(static_cast<std::size_t>(count) * alphas.size());
    for (int i = 0; i < count; ++i) {
        // log-uniform separations snapped to the grid
        const double tau_raw =
            tau_min * std::pow(tau_max / tau_min, rng.next_uniform());
        double tau = std::max(dt, std::round(tau_raw / dt) * dt);
        SpectralState x(gen.modes());
        for (std::size_t k = 0; k < gen.modes(); ++k) x[k] = rng.next_gaussian();
        for (double alpha : alphas) {
            DecaySample smp;
            smp.s = s_anchor;
            smp.t = s_anchor + tau;
            smp.alpha = alpha;
            smp.x = x;
            out.push_back(std::move(smp));
        }
    }
    return out;
}

namespace {

double estimate_ratio(const GeneratorFamily& gen, const EstimateConstants& cst,
                      int which, double s, double t, double alpha,
                      const SpectralState& x) {
    const double tau = t - s;
    const auto m = gen.evolution_multipliers(t, s);
    SpectralState y(x.modes());
    double expo = 0.0;
    if (which == 1) {  // (-A)^alpha U x
        for (std::size_t k = 0; k < x.modes(); ++k)
            y[k] = std::pow(mode_eigenvalue(k + 1), alpha) * m[k] * x[k];
        expo = alpha;
    } else if (which == 2) {  // U (-A)^alpha x
        for (std::size_t k = 0; k < x.modes(); ++k)
            y[k] = m[k] * std::pow(mode_eigenvalue(k + 1), alpha) * x[k];
        expo = alpha;
    } else {  // (-A)^{-alpha} U (-A)^eta x
        for (std::size_t k = 0; k < x.modes(); ++k)
            y[k] = std::pow(mode_eigenvalue(k + 1), cst.eta - alpha) * m[k] * x[k];
        expo = cst.eta - alpha;
    }
    const double nx = x.x_norm();
    if (nx == 0.0) return 0.0;
    return std::pow(tau, expo) * std::exp(cst.lambda * tau) * y.x_norm() / nx;
}

// worst-direction ratio at separation tau (diagonal operator norm)
double opnorm_ratio(const GeneratorFamily& gen, const EstimateConstants& cst,
                    int which, double tau, double alpha) {
    const double t0 = 0.0;
    const auto m = gen.evolution_multipliers(t0 + tau, t0);
    double best = 0.0;
    const double expo = (which == 3) ? cst.eta - alpha : alpha;
    for (std::size_t k = 0; k < gen.modes(); ++k) {
        const double w = (which == 3)
                             ? std::pow(mode_eigenvalue(k + 1), cst.eta - alpha)
                             : std::pow(mode_eigenvalue(k + 1), alpha);
        best = std::max(best, w * m[k]);
    }
    return std::pow(tau, expo) * std::exp(cst.lambda * tau) * best;
}

} // namespace

DecayReport verify_decay_estimates(const GeneratorFamily& gen,
                                   const EstimateConstants& constants,
                                   const std::vector<DecaySample>& samples) {
    DecayReport rep;
    const double dt = gen.path().grid.dt;
    for (int which = 1; which <= 3; ++which) {
        // group fitted constants per alpha
        std::vector<double> alphas;
        for (const auto& smp : samples)
            if (std::find(alphas.begin(), alphas.end(), smp.alpha) == alphas.end())
                alphas.push_back(smp.alpha);
        for (double alpha : alphas) {
            DecayEstimateRow row;
            row.estimate_id = "E" + std::to_string(which);
            row.alpha = alpha;
            for (const auto& smp : samples) {
                if (smp.alpha != alpha) continue;
                const double r =
                    estimate_ratio(gen, constants, which, smp.s, smp.t, alpha, smp.x);
                row.max_ratio = std::max(row.max_ratio, r);
                ++row.sample_count;
            }
            // doubling test toward t-s -> 0 on the worst direction
            std::vector<double> refine;
            double tau = 64.0 * dt;
            while (tau >= dt - 1e-15) {
                refine.push_back(opnorm_ratio(gen, constants, which, tau, alpha));
                row.max_ratio = std::max(row.max_ratio, refine.back());
                tau *= 0.5;
            }
            double coarse_max = 0.0;
            for (std::size_t i = 0; i + 2 < refine.size(); ++i)
                coarse_max = std::max(coarse_max, refine[i]);
            const double fine_max =
                std::max(refine[refine.size() - 1], refine[refine.size() - 2]);
            row.smalltime_blowup = refine.size() >= 4 && fine_max > 1.5 * coarse_max;
            row.fitted_constant = row.max_ratio;
            rep.rows.push_back(row);
        }
    }
    return rep;
}

} // namespace rds
