#ifndef RDS_CONFIG_HPP
#define RDS_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rds/attractor.hpp"

namespace rds {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flat dotted-key run configuration. Every tunable of the paper's estimates
// sits here so a manifest (config text + seed) replays a run bit-exactly.
struct RunConfig {
    // instance
    std::size_t modes = 64;
    double a0 = 0.3;
    double eps = 0.2;
    double mu = 1.0;
    double ou_horizon = 10.0;
    // noise
    double t_min = -64.0;
    double t_max = 4.0;
    double noise_dt = 1e-3;
    double beta = 1.0;
    double gamma = 1.0;
    double cq = 1.0;
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8};
    // drift
    std::string drift_kind = "scaled_tanh";  // zero | linear | scaled_tanh | fisher_kpp_clipped
    double drift_rho = 0.0;
    double drift_cf = 0.25;
    double drift_cbar = 0.5;
    double fisher_a = 1.0;
    double fisher_clip = 0.2;
    double sigma = 0.1;
    // solver
    double dt = 1e-3;
    double picard_tol = 1e-10;
    int picard_max_iter = 50;
    std::string quadrature = "trapezoid";  // left | trapezoid
    int singular_refine = 8;
    std::size_t store_stride = 1;
    // simulate
    double sim_horizon = 2.0;
    std::string sim_u0 = "random";  // zero | random | bump
    std::string sim_preset = "";    // "" | fisher_kpp
    // attractor
    std::vector<double> pullback_times = {8.0, 16.0};
    double ensemble_radius = 1.0;
    std::size_t ensemble_count = 256;
    std::size_t ensemble_modes = 16;
    std::uint64_t ensemble_seed = 7;
    double delta_factor = 0.05;  // delta = factor * rho (positive margin)
    double eta = 0.5;
    std::vector<double> nu_grid = {0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45};
    double t_tilde = 1.0;
    double eps_lo = 0.02;
    double eps_hi = 0.2;
    int eps_count = 12;
    std::vector<double> rate_times = {2, 4, 6, 8, 10, 12};
    // output
    std::string output_dir = "out";
    std::string formats = "csv";

    static RunConfig defaults() { return RunConfig(); }
    // reads the flat key=value file, then applies overrides (later wins);
    // unknown keys are rejected
    static RunConfig load(const std::string& path,
                          const std::vector<std::string>& overrides = {});
    static RunConfig from_overrides(const std::vector<std::string>& overrides);

    void apply(const std::string& key, const std::string& value);
    // named-condition gate: throws ConfigError citing (U), (Drift) or (Noise)
    void validate() const;

    std::string canonical() const;  // sorted key=value dump, 17 digits
    std::string hash() const;       // fnv1a64 of the canonical dump, hex

    double lambda() const { return 1.0 - a0 - std::abs(eps); }

    NoiseGrid make_grid() const { return NoiseGrid(t_min, t_max, dt); }
    OUParams make_ou() const { return OUParams(mu, ou_horizon); }
    InstanceParams instance() const { return {modes, a0, eps, make_ou()}; }
    Nonlinearity make_nonlinearity() const;
    SolverParams solver_params() const;
    EnsembleSpec ensemble() const {
        return {ensemble_radius, ensemble_count, ensemble_modes, ensemble_seed};
    }
    // constants with c = c_hat = 1 (exact for the diagonal self-adjoint
    // instance); the C-tilde entries default to 1 until fitted
    EstimateConstants constants() const;
};

// environment overrides: RDS_<key with '.' -> '__'>, e.g. RDS_solver__dt
std::vector<std::string> env_overrides(char** envp = nullptr);

} // namespace rds

#endif
