#include "rds/attractor.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <set>

#include "rds/numeric.hpp"
#include "rds/parallel.hpp"
#include "rds/rng.hpp"

namespace rds {

namespace {

// exact cell integral of kernel(s) * (linear data) for kernel (-s)^{beta-1}
// on [a,b] subset (-inf, 0]; P0/P1 are the kernel moments
double singular_cell(double a, double b, double ga, double gb, double beta) {
    const double A = -a, B = -b;  // 0 <= B < A
    const double P0 = (std::pow(A, beta) - std::pow(B, beta)) / beta;
    const double P1 = (std::pow(B, beta + 1.0) - std::pow(A, beta + 1.0)) / (beta + 1.0);
    const double slope = (gb - ga) / (b - a);
    return ga * P0 + slope * (P1 - a * P0);
}

// kernel s^{-eta} on [a,b] subset [0, inf)
double singular_cell_pos(double a, double b, double ga, double gb, double eta) {
    const double P0 = (std::pow(b, 1.0 - eta) - std::pow(a, 1.0 - eta)) / (1.0 - eta);
    const double P1 = (std::pow(b, 2.0 - eta) - std::pow(a, 2.0 - eta)) / (2.0 - eta);
    const double slope = (gb - ga) / (b - a);
    return ga * P0 + slope * (P1 - a * P0);
}

template <typename Fn>
void ensemble_for_throwing(std::size_t n, Fn&& fn) {
    std::vector<std::exception_ptr> errs(n);
    ensemble_for(n, [&](std::size_t i) {
        try {
            fn(i);
        } catch (...) {
            errs[i] = std::current_exception();
        }
    });
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

} // namespace

AbsorbingSpec absorbing_radius(const NoisePath& omega, const EstimateConstants& constants,
                               int refine, double tail_rel_tol) {
    constants.validate();
    if (refine < 1) throw std::invalid_argument("absorbing_radius: refine must be >= 1");
    const NoiseGrid& g = omega.grid;
    if (!(g.t_min < 0.0))
        throw CoverageError("absorbing_radius: path stores no negative-time history");

    const double gap = constants.gap();
    AbsorbingSpec spec;
    spec.fiber = {omega.seed, omega.origin_shift};
    spec.delta = constants.delta;
    spec.drift_term = constants.c * constants.Cbar_F / gap;

    const std::size_t iz = g.zero_index;
    const double h = g.dt / static_cast<double>(refine);
    const std::size_t cells = iz * static_cast<std::size_t>(refine);

    if (constants.sigma > 0.0) {
        // sample ||omega(s)||_beta e^{...} on the (refined) mesh over [t_min, 0]
        std::vector<double> norms(cells + 1);
        for (std::size_t j = 0; j <= cells; ++j) {
            const double s = g.t_min + static_cast<double>(j) * h;
            norms[j] = (j % static_cast<std::size_t>(refine) == 0)
                           ? omega.xbeta_norm_node(j / static_cast<std::size_t>(refine))
                           : omega.evaluate(s).x_eta_norm(omega.beta);
        }

        if (constants.C_F > 0.0) {
            const double cf = constants.c * constants.C_F;
            double acc = 0.0;
            for (std::size_t j = 0; j < cells; ++j) {
                const double s0 = g.t_min + static_cast<double>(j) * h;
                const double s1 = s0 + h;
                acc += 0.5 * h * (std::exp(cf * s0) * norms[j] + std::exp(cf * s1) * norms[j + 1]);
            }
            spec.ou_conv_term = cf * constants.sigma * constants.c_hat * acc;
        }

        {
            // weakly singular kernel, exact per cell; extra graded refinement
            // of the cell touching s = 0 (the kernel moments absorb the
            // singularity, grading refines the data sampling)
            double acc = 0.0;
            for (std::size_t j = 0; j + 1 < cells; ++j) {
                const double s0 = g.t_min + static_cast<double>(j) * h;
                const double s1 = s0 + h;
                acc += singular_cell(s0, s1, std::exp(constants.lambda * s0) * norms[j],
                                     std::exp(constants.lambda * s1) * norms[j + 1],
                                     constants.beta);
            }
            const int grade = 8;
            const double a_last = -h;
            double prev_s = a_last;
            double prev_g = std::exp(constants.lambda * a_last) * norms[cells - 1];
            for (int q = 1; q <= grade; ++q) {
                const double frac = static_cast<double>(q) / grade;
                double s = a_last * (1.0 - frac * frac);  // graded toward 0
                if (q == grade) s = 0.0;
                const double gs =
                    (s == 0.0) ? 0.0
                               : std::exp(constants.lambda * s) *
                                     omega.evaluate(s).x_eta_norm(omega.beta);
                acc += singular_cell(prev_s, s, prev_g, gs, constants.beta);
                prev_s = s;
                prev_g = gs;
            }
            spec.singular_conv_term =
                constants.sigma * constants.ct_one_minus_beta * constants.lambda / gap * acc;
        }

        // truncation tails, bounded with a factor-2 growth allowance
        const double norm_end = norms[0] + 1.0;
        double tail = 0.0;
        if (constants.C_F > 0.0) {
            const double cf = constants.c * constants.C_F;
            tail += 2.0 * constants.sigma * constants.c_hat * std::exp(cf * g.t_min) * norm_end;
        }
        tail += 2.0 * constants.sigma * constants.ct_one_minus_beta / gap *
                std::exp(constants.lambda * g.t_min) *
                std::pow(-g.t_min, constants.beta - 1.0) * norm_end;
        spec.tail_bound = tail;
    }

    spec.rho = spec.drift_term + spec.ou_conv_term + spec.singular_conv_term;
    spec.delta = constants.delta;
    if (spec.tail_bound > tail_rel_tol * std::max(spec.rho, 1e-12) && spec.rho > 0.0)
        throw CoverageError(
            "absorbing_radius: t_min too shallow for the requested tail tolerance");
    return spec;
}

std::string EnsembleSpec::describe() const {
    return "ball(radius=" + format_g17(radius) + ",count=" + std::to_string(count) +
           ",modes=" + std::to_string(active_modes) + ",seed=" + std::to_string(seed) + ")";
}

std::vector<SpectralState> sample_ensemble(const EnsembleSpec& spec, std::size_t K) {
    std::vector<SpectralState> out;
    out.reserve(spec.count);
    Rng rng(derive_seed(spec.seed, 0x656e73ULL));
    const std::size_t m = std::min(spec.active_modes, K);
    for (std::size_t i = 0; i < spec.count; ++i) {
        SpectralState u(K);
        double s2 = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            u[k] = rng.next_gaussian();
            s2 += u[k] * u[k];
        }
        const double r =
            spec.radius * std::pow(rng.next_uniform(), 1.0 / static_cast<double>(m));
        const double scale =
            (s2 > 0.0) ? r / std::sqrt(kBasisWeight * s2) : 0.0;
        for (std::size_t k = 0; k < m; ++k) u[k] *= scale;
        out.push_back(std::move(u));
    }
    return out;
}

double AttractorCloud::diameter() const {
    double d = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j)
            d = std::max(d, x_distance(points[i], points[j]));
    return d;
}

double AttractorCloud::max_x_norm() const {
    double d = 0.0;
    for (const auto& p : points) d = std::max(d, p.x_norm());
    return d;
}

AttractorCloud pullback_cloud(const EnsembleSpec& ensemble, double T,
                              std::shared_ptr<const NoisePath> omega,
                              const InstanceParams& inst, const Nonlinearity& F,
                              double sigma, const SolverParams& params,
                              const EstimateConstants& constants) {
    const AbsorbingSpec abs_spec = absorbing_radius(*omega, constants);
    auto shifted = std::make_shared<NoisePath>(omega->shift(-T));
    const GeneratorFamily gen = make_generator(shifted, inst);

    SolverParams p = params;
    p.store_stride = std::numeric_limits<std::size_t>::max() / 2;

    const auto starts = sample_ensemble(ensemble, inst.K);
    // T must reach the empirical absorbing time: the decayed initial-data
    // envelope has to sit below delta before the terminal-norm assertion
    // becomes the absorbing estimate
    double r_max = 0.0;
    for (const auto& u : starts) r_max = std::max(r_max, u.x_norm());
    const double envelope =
        std::exp(-constants.gap() * T) *
        (2.0 * constants.c * r_max +
         constants.sigma * constants.c_hat * omega->xbeta_norm_at(-T));
    if (envelope >= abs_spec.delta)
        throw std::invalid_argument(
            "pullback_cloud: T is below the empirical absorbing time for this "
            "ensemble (decayed envelope " + format_g17(envelope) +
            " >= delta " + format_g17(abs_spec.delta) + ")");
    AttractorCloud cloud;
    cloud.points.resize(starts.size());
    cloud.pullback_time = T;
    cloud.fiber = {omega->seed, omega->origin_shift};
    cloud.ensemble = ensemble.describe();

    ensemble_for_throwing(starts.size(), [&](std::size_t i) {
        const Trajectory traj = pathwise_mild_solve(starts[i], T, gen, F, sigma, p);
        if (!traj.terminal().finite())
            throw std::runtime_error("pullback_cloud: trajectory left the finite range");
        cloud.points[i] = traj.terminal();
    });

    const double limit = abs_spec.rho + abs_spec.delta;
    for (const auto& pt : cloud.points)
        if (pt.x_norm() > limit)
            throw std::runtime_error(
                "pullback_cloud: terminal state escaped the absorbing ball; "
                "increase the pullback time");
    return cloud;
}

SmoothingConstant smoothing_constant(const EstimateConstants& constants, double t_tilde,
                                     double eta) {
    if (!(eta > 0.0 && eta < 1.0))
        throw std::invalid_argument("smoothing_constant: eta must lie in (0,1)");
    if (!(t_tilde > 0.0))
        throw std::invalid_argument("smoothing_constant: t_tilde must be positive");

    // graded mesh s_j = t~ (j/N)^p with kernel moments exact per cell;
    // refine until two successive levels agree
    const double lambda = constants.lambda;
    const double p = 2.0 / (1.0 - eta);
    auto integrate = [&](int n_cells) {
        double acc = 0.0;
        double prev_s = 0.0, prev_g = 1.0;  // e^{-lambda 0}
        for (int j = 1; j <= n_cells; ++j) {
            const double s =
                t_tilde * std::pow(static_cast<double>(j) / n_cells, p);
            const double gs = std::exp(-lambda * s);
            acc += singular_cell_pos(prev_s, s, prev_g, gs, eta);
            prev_s = s;
            prev_g = gs;
        }
        return acc;
    };

    SmoothingConstant out;
    int n = 64;
    double val = integrate(n), err = std::numeric_limits<double>::infinity();
    for (int level = 0; level < 12 && err > 1e-8 * std::max(1.0, std::fabs(val)); ++level) {
        n *= 2;
        const double next = integrate(n);
        err = std::fabs(next - val);
        val = next;
    }
    out.integral = val;
    out.quad_error = err;
    const double tail_term = constants.C_F * constants.ct_eta * constants.c *
                             std::exp(constants.c * constants.C_F / lambda) * val;
    out.kappa = constants.ct_eta / std::pow(t_tilde, eta) + tail_term;
    out.kappa_theorem = constants.ct_eta + tail_term;
    return out;
}

namespace {

double log2_ball_volume(std::size_t m) {
    // log2 of the m-dimensional unit-ball volume pi^{m/2} / Gamma(m/2 + 1)
    const double md = static_cast<double>(m);
    return 0.5 * md * std::log2(3.1415926535897932384626433832795) -
           std::lgamma(0.5 * md + 1.0) / std::log(2.0);
}

// gridding + volumetric covering bounds at cover radius eps; slab threshold
// and per-axis budget depend on whether centers must lie inside the set
void covering_log2_counts(double eta, double eps, std::size_t K, bool centers_in_set,
                          double* out_grid, double* out_vol, std::size_t* out_m) {
    *out_grid = 0.0;
    *out_vol = 0.0;
    *out_m = 0;
    if (eps >= 1.0) return;  // the whole set sits inside the eps-ball at 0
    const double slab = centers_in_set ? 0.25 * eps : 0.5 * eps;
    std::size_t m = 0;
    while (m < K && std::pow(mode_eigenvalue(m + 1), -eta) > slab) ++m;
    *out_m = m;
    if (m == 0) return;
    const double budget = std::sqrt(3.0) / 2.0 * eps;  // sqrt(eps^2 - slab^2) at slab = eps/2
    const double h = (centers_in_set ? 0.5 * budget : budget) / std::sqrt(static_cast<double>(m));
    double lg_grid = 0.0, lg_vol = log2_ball_volume(m);
    const double circ = h * std::sqrt(static_cast<double>(m));
    for (std::size_t k = 1; k <= m; ++k) {
        const double a = std::pow(mode_eigenvalue(k), -eta);
        lg_grid += std::log2(std::floor(a / h) + 1.0);
        lg_vol += std::log2((a + circ) / (2.0 * h));
    }
    *out_grid = std::max(0.0, lg_grid);
    *out_vol = std::max(0.0, lg_vol);
}

} // namespace

CoveringBound covering_number(double eta, double eps, std::size_t K) {
    if (!(eps > 0.0)) throw std::invalid_argument("covering_number: eps must be positive");
    if (!(eta > 0.0 && eta < 1.0))
        throw std::invalid_argument("covering_number: eta must lie in (0,1)");
    if (K == 0) throw std::invalid_argument("covering_number: K must be >= 1");
    CoveringBound b;
    covering_log2_counts(eta, eps, K, false, &b.log2_grid, &b.log2_volumetric,
                         &b.active_modes);
    b.log2_upper = std::min(b.log2_grid, b.log2_volumetric);
    double g2, v2;
    std::size_t m2;
    covering_log2_counts(eta, eps, K, true, &g2, &v2, &m2);
    b.log2_centers_in_set = std::min(g2, v2);
    return b;
}

double CoveringBound::count_saturated() const {
    if (log2_upper > 60.0) return std::pow(2.0, 60.0);
    return std::ceil(std::pow(2.0, log2_upper));
}

BruteForceCover covering_bruteforce(double eta, double eps, std::size_t K,
                                    double lattice_step_factor) {
    if (K > 4)
        throw std::invalid_argument("covering_bruteforce: exhaustive oracle limited to K <= 4");
    if (!(eps > 0.0)) throw std::invalid_argument("covering_bruteforce: eps must be positive");
    const double delta = lattice_step_factor * eps;
    std::vector<double> axes(K);
    std::vector<long> half(K);
    for (std::size_t k = 0; k < K; ++k) {
        axes[k] = std::pow(mode_eigenvalue(k + 1), -eta);
        half[k] = static_cast<long>(std::floor(axes[k] / delta)) + 1;
    }
    // lattice points inside the ellipsoid sum mu^{2 eta} x^2 <= 1
    std::vector<std::vector<double>> pts;
    std::vector<long> idx(K, 0);
    std::vector<double> x(K);
    std::function<void(std::size_t)> rec = [&](std::size_t d) {
        if (d == K) {
            double q = 0.0;
            for (std::size_t k = 0; k < K; ++k)
                q += std::pow(mode_eigenvalue(k + 1), 2.0 * eta) * x[k] * x[k];
            if (q <= 1.0) pts.push_back(x);
            return;
        }
        for (long i = -half[d]; i <= half[d]; ++i) {
            x[d] = static_cast<double>(i) * delta;
            rec(d + 1);
        }
    };
    rec(0);

    BruteForceCover out;
    out.lattice_points = pts.size();
    auto dist2 = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            const double d = a[k] - b[k];
            s += d * d;
        }
        return s;
    };
    // greedy cover of the lattice by eps-balls centered at lattice points
    {
        std::vector<char> covered(pts.size(), 0);
        const double rad2 = eps * eps;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (covered[i]) continue;
            ++out.greedy_cover;
            for (std::size_t j = i; j < pts.size(); ++j)
                if (!covered[j] && dist2(pts[i], pts[j]) <= rad2) covered[j] = 1;
        }
    }
    // greedy 2eps-separated packing: a rigorous lower bound for any eps-cover
    {
        std::vector<std::size_t> packing;
        const double sep2 = 4.0 * eps * eps;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            bool ok = true;
            for (std::size_t j : packing)
                if (dist2(pts[i], pts[j]) <= sep2) {
                    ok = false;
                    break;
                }
            if (ok) packing.push_back(i);
        }
        out.packing_lower = packing.size();
    }
    return out;
}

DimensionReport dimension_bound(double nu, double eta, double kappa, std::size_t K) {
    if (!(nu > 0.0 && nu < 0.5))
        throw std::invalid_argument("dimension_bound: nu must lie in (0, 1/2)");
    if (!(kappa > 0.0)) throw std::invalid_argument("dimension_bound: kappa must be positive");
    DimensionReport rep;
    rep.nu = nu;
    rep.eta = eta;
    rep.kappa = kappa;
    const CoveringBound cb = covering_number(eta, nu / kappa, K);
    rep.covering_log2 = cb.log2_upper;
    const double denom = std::log2(1.0 / (2.0 * nu));
    rep.bound = cb.log2_upper / denom;
    rep.bound_centers_in_set = cb.log2_centers_in_set / denom;
    return rep;
}

DimensionReport dimension_bound_sweep(const std::vector<double>& nu_grid, double eta,
                                      double kappa, std::size_t K) {
    if (nu_grid.empty()) throw std::invalid_argument("dimension_bound_sweep: empty nu grid");
    DimensionReport best;
    bool first = true;
    std::vector<std::pair<double, double>> sweep;
    for (double nu : nu_grid) {
        DimensionReport r = dimension_bound(nu, eta, kappa, K);
        sweep.emplace_back(nu, r.bound);
        if (first || r.bound < best.bound) {
            best = r;
            first = false;
        }
    }
    best.nu_sweep = std::move(sweep);
    best.best_nu = best.nu;
    best.best_bound = best.bound;
    return best;
}

BoxCountFit box_counting(const AttractorCloud& cloud, double eps_lo, double eps_hi,
                         int eps_count) {
    if (cloud.points.size() < 100)
        throw std::invalid_argument("box_counting: need at least 100 points");
    if (!(eps_lo > 0.0 && eps_hi > eps_lo))
        throw std::invalid_argument("box_counting: need 0 < eps_lo < eps_hi");
    if (eps_hi / eps_lo < 10.0)
        throw std::invalid_argument("box_counting: eps range must span at least a decade");

    const std::size_t K = cloud.points.front().modes();
    BoxCountFit fit;

    // cumulative tail energies per point, max over the cloud
    std::vector<double> max_tail(K + 1, 0.0);
    for (const auto& p : cloud.points) {
        double tail = 0.0;
        std::vector<double> tails(K + 1, 0.0);
        for (std::size_t k = K; k > 0; --k) {
            tail += kBasisWeight * p[k - 1] * p[k - 1];
            tails[k - 1] = tail;
        }
        for (std::size_t k = 0; k <= K; ++k)
            max_tail[k] = std::max(max_tail[k], tails[k]);
    }

    double diam = 0.0;
    for (const auto& p : cloud.points) diam = std::max(diam, x_distance(p, cloud.points[0]));
    if (diam == 0.0) {
        fit.degenerate = true;
        fit.dimension = 0.0;
        return fit;
    }

    std::vector<double> all_eps;
    std::vector<std::size_t> all_counts;
    const double scale = std::sqrt(kBasisWeight);
    for (int i = 0; i < eps_count; ++i) {
        const double eps = geometric_point(eps_lo, eps_hi, i, eps_count);
        std::size_t m = 0;  // leading modes so the folded tail stays below eps^2/4
        while (m < K && max_tail[m] >= 0.25 * eps * eps) ++m;
        if (m == 0) m = 1;
        fit.modes_used_max = std::max(fit.modes_used_max, m);
        std::set<std::vector<long>> boxes;
        std::vector<long> key(m);
        for (const auto& p : cloud.points) {
            for (std::size_t k = 0; k < m; ++k)
                key[k] = static_cast<long>(std::floor(scale * p[k] / eps));
            boxes.insert(key);
        }
        all_eps.push_back(eps);
        all_counts.push_back(boxes.size());
    }

    // least squares over the scaling window (counts resolved but unsaturated)
    const std::size_t n_pts = cloud.points.size();
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < all_eps.size(); ++i) {
        if (all_counts[i] >= 2 && all_counts[i] <= std::max<std::size_t>(4, n_pts / 4)) {
            lx.push_back(std::log(1.0 / all_eps[i]));
            ly.push_back(std::log(static_cast<double>(all_counts[i])));
            fit.eps.push_back(all_eps[i]);
            fit.counts.push_back(all_counts[i]);
        }
    }
    if (lx.size() < 3) {  // fall back to the whole range
        lx.clear();
        ly.clear();
        fit.eps = all_eps;
        fit.counts = all_counts;
        for (std::size_t i = 0; i < all_eps.size(); ++i) {
            lx.push_back(std::log(1.0 / all_eps[i]));
            ly.push_back(std::log(static_cast<double>(all_counts[i])));
        }
    }
    const LineFit lf = fit_line(lx, ly);
    fit.dimension = lf.slope;
    fit.ci95 = t_quantile_975(lf.n - 2) * lf.slope_stderr;
    return fit;
}

double hausdorff_semidistance(const std::vector<SpectralState>& from,
                              const std::vector<SpectralState>& to) {
    if (to.empty())
        throw std::invalid_argument("hausdorff_semidistance: target set is empty");
    double sup = 0.0;
    for (const auto& a : from) {
        double inf = std::numeric_limits<double>::infinity();
        for (const auto& b : to) inf = std::min(inf, x_distance(a, b));
        sup = std::max(sup, inf);
    }
    return sup;
}

RateFit attraction_rate(const EnsembleSpec& D, const AttractorCloud& proxy,
                        const std::vector<double>& s_grid,
                        std::shared_ptr<const NoisePath> omega,
                        const InstanceParams& inst, const Nonlinearity& F,
                        double sigma, const SolverParams& params) {
    if (proxy.points.empty())
        throw std::invalid_argument("attraction_rate: proxy cloud is empty");
    if (s_grid.size() < 2)
        throw std::invalid_argument("attraction_rate: need at least two pullback times");

    SolverParams p = params;
    p.store_stride = std::numeric_limits<std::size_t>::max() / 2;
    const auto starts = sample_ensemble(D, inst.K);

    RateFit fit;
    fit.s_values = s_grid;
    fit.distances.resize(s_grid.size());
    for (std::size_t si = 0; si < s_grid.size(); ++si) {
        const double s = s_grid[si];
        auto shifted = std::make_shared<NoisePath>(omega->shift(-s));
        const GeneratorFamily gen = make_generator(shifted, inst);
        std::vector<SpectralState> evolved(starts.size());
        ensemble_for_throwing(starts.size(), [&](std::size_t i) {
            evolved[i] = pathwise_mild_solve(starts[i], s, gen, F, sigma, p).terminal();
        });
        fit.distances[si] = hausdorff_semidistance(evolved, proxy.points);
    }

    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < s_grid.size(); ++i) {
        if (fit.distances[i] > 1e-14) {
            xs.push_back(s_grid[i]);
            ys.push_back(std::log(fit.distances[i]));
        }
    }
    if (xs.size() >= 3) {
        const LineFit lf = fit_line(xs, ys);
        fit.alpha_hat = -lf.slope;
        fit.ci95 = t_quantile_975(lf.n - 2) * lf.slope_stderr;
    } else {
        fit.alpha_hat = 0.0;
        fit.ci95 = std::numeric_limits<double>::infinity();
    }
    return fit;
}

} // namespace rds
