#include "rds/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "rds/numeric.hpp"

extern char** environ;

namespace rds {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (...) {
        throw ConfigError("config key '" + key + "': cannot parse number '" + v + "'");
    }
}

long long parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long long x = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (...) {
        throw ConfigError("config key '" + key + "': cannot parse integer '" + v + "'");
    }
}

std::vector<double> parse_double_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_double(key, item));
    }
    if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
    return out;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& key, const std::string& v) {
    std::vector<std::uint64_t> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(static_cast<std::uint64_t>(parse_int(key, item)));
    }
    if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
    return out;
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? "," : "") + format_g17(v[i]);
    return s;
}

std::string join(const std::vector<std::uint64_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

} // namespace

void RunConfig::apply(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    if (key == "instance.modes") modes = static_cast<std::size_t>(parse_int(key, v));
    else if (key == "instance.a0") a0 = parse_double(key, v);
    else if (key == "instance.eps") eps = parse_double(key, v);
    else if (key == "instance.mu") mu = parse_double(key, v);
    else if (key == "instance.ou_horizon") ou_horizon = parse_double(key, v);
    else if (key == "noise.t_min") t_min = parse_double(key, v);
    else if (key == "noise.t_max") t_max = parse_double(key, v);
    else if (key == "noise.dt") noise_dt = parse_double(key, v);
    else if (key == "noise.beta") beta = parse_double(key, v);
    else if (key == "noise.gamma") gamma = parse_double(key, v);
    else if (key == "noise.cq") cq = parse_double(key, v);
    else if (key == "noise.seeds") seeds = parse_seed_list(key, v);
    else if (key == "drift.kind") drift_kind = v;
    else if (key == "drift.rho") drift_rho = parse_double(key, v);
    else if (key == "drift.c_f") drift_cf = parse_double(key, v);
    else if (key == "drift.cbar_f") drift_cbar = parse_double(key, v);
    else if (key == "drift.fisher_a") fisher_a = parse_double(key, v);
    else if (key == "drift.fisher_clip") fisher_clip = parse_double(key, v);
    else if (key == "drift.sigma") sigma = parse_double(key, v);
    else if (key == "solver.dt") dt = parse_double(key, v);
    else if (key == "solver.picard_tol") picard_tol = parse_double(key, v);
    else if (key == "solver.picard_max_iter") picard_max_iter = static_cast<int>(parse_int(key, v));
    else if (key == "solver.quadrature") quadrature = v;
    else if (key == "solver.singular_refine") singular_refine = static_cast<int>(parse_int(key, v));
    else if (key == "solver.store_stride") store_stride = static_cast<std::size_t>(parse_int(key, v));
    else if (key == "sim.horizon") sim_horizon = parse_double(key, v);
    else if (key == "sim.u0") sim_u0 = v;
    else if (key == "sim.preset") sim_preset = v;
    else if (key == "attractor.pullback_times") pullback_times = parse_double_list(key, v);
    else if (key == "attractor.ensemble_radius") ensemble_radius = parse_double(key, v);
    else if (key == "attractor.ensemble_count") ensemble_count = static_cast<std::size_t>(parse_int(key, v));
    else if (key == "attractor.ensemble_modes") ensemble_modes = static_cast<std::size_t>(parse_int(key, v));
    else if (key == "attractor.ensemble_seed") ensemble_seed = static_cast<std::uint64_t>(parse_int(key, v));
    else if (key == "attractor.delta_factor") delta_factor = parse_double(key, v);
    else if (key == "attractor.eta") eta = parse_double(key, v);
    else if (key == "attractor.nu_grid") nu_grid = parse_double_list(key, v);
    else if (key == "attractor.t_tilde") t_tilde = parse_double(key, v);
    else if (key == "attractor.eps_lo") eps_lo = parse_double(key, v);
    else if (key == "attractor.eps_hi") eps_hi = parse_double(key, v);
    else if (key == "attractor.eps_count") eps_count = static_cast<int>(parse_int(key, v));
    else if (key == "attractor.rate_times") rate_times = parse_double_list(key, v);
    else if (key == "output.dir") output_dir = v;
    else if (key == "output.formats") formats = v;
    else throw ConfigError("unknown config key '" + key + "'");
}

RunConfig RunConfig::load(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto pos = t.find('=');
        if (pos == std::string::npos)
            throw ConfigError("config '" + path + "' line " + std::to_string(lineno) +
                              ": expected key = value");
        cfg.apply(trim(t.substr(0, pos)), trim(t.substr(pos + 1)));
    }
    for (const auto& ov : overrides) {
        const auto pos = ov.find('=');
        if (pos == std::string::npos)
            throw ConfigError("override '" + ov + "': expected key=value");
        cfg.apply(trim(ov.substr(0, pos)), trim(ov.substr(pos + 1)));
    }
    cfg.validate();
    return cfg;
}

RunConfig RunConfig::from_overrides(const std::vector<std::string>& overrides) {
    RunConfig cfg;
    for (const auto& ov : overrides) {
        const auto pos = ov.find('=');
        if (pos == std::string::npos)
            throw ConfigError("override '" + ov + "': expected key=value");
        cfg.apply(trim(ov.substr(0, pos)), trim(ov.substr(pos + 1)));
    }
    cfg.validate();
    return cfg;
}

void RunConfig::validate() const {
    if (modes == 0) throw ConfigError("instance.modes must be >= 1");
    if (!(a0 + std::abs(eps) < 1.0))
        throw ConfigError("configuration violates (U): a0 + |eps| = " +
                          format_g17(a0 + std::abs(eps)) +
                          " must stay below mu_1 = 1 for uniform exponential stability");
    if (!(mu > 0.0)) throw ConfigError("instance.mu must be positive");
    if (ou_horizon < 10.0 / mu)
        throw ConfigError("instance.ou_horizon must be at least 10/mu");
    if (!(noise_dt > 0.0) || !(dt > 0.0))
        throw ConfigError("noise.dt and solver.dt must be positive");
    {
        const double ratio = noise_dt / dt;
        if (std::fabs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio) || ratio < 1.0 - 1e-9)
            throw ConfigError("solver.dt must divide noise.dt");
    }
    if (!(t_min < 0.0 && 0.0 < t_max))
        throw ConfigError("noise window must satisfy t_min < 0 < t_max");
    if (!(beta > 0.0 && beta <= 1.0))
        throw ConfigError("configuration violates (Noise): beta must lie in (0,1]");
    if (!(gamma > 0.5))
        throw ConfigError(
            "configuration violates (Noise): gamma must exceed 1/2 so the modal "
            "amplitudes q_k = cq mu_k^{-beta-gamma/2} give an X_beta-valued path");
    if (sigma < 0.0) throw ConfigError("drift.sigma must be nonnegative");
    if (drift_kind != "zero" && drift_kind != "linear" && drift_kind != "scaled_tanh" &&
        drift_kind != "fisher_kpp_clipped")
        throw ConfigError("drift.kind must be one of zero|linear|scaled_tanh|fisher_kpp_clipped");
    {
        const double cf = make_nonlinearity().lipschitz();
        if (!(lambda() - cf > 0.0))
            throw ConfigError("configuration violates (Drift): lambda - c C_F = " +
                              format_g17(lambda() - cf) + " must be positive (lambda = " +
                              format_g17(lambda()) + ", C_F = " + format_g17(cf) + ")");
    }
    if (!(picard_tol > 0.0)) throw ConfigError("solver.picard_tol must be positive");
    if (picard_max_iter < 1) throw ConfigError("solver.picard_max_iter must be >= 1");
    if (quadrature != "left" && quadrature != "trapezoid")
        throw ConfigError("solver.quadrature must be left|trapezoid");
    if (singular_refine < 1) throw ConfigError("solver.singular_refine must be >= 1");
    if (store_stride < 1) throw ConfigError("solver.store_stride must be >= 1");
    if (!(eta > 0.0 && eta < 1.0)) throw ConfigError("attractor.eta must lie in (0,1)");
    if (nu_grid.empty()) throw ConfigError("attractor.nu_grid must be non-empty");
    for (double nu : nu_grid)
        if (!(nu > 0.0 && nu < 0.5))
            throw ConfigError("attractor.nu_grid entries must lie in (0, 1/2)");
    if (pullback_times.empty()) throw ConfigError("attractor.pullback_times must be non-empty");
    for (double T : pullback_times) {
        if (!(T > 0.0)) throw ConfigError("attractor.pullback_times must be positive");
        if (t_min > -(T + ou_horizon))
            throw ConfigError("noise.t_min must reach below -(pullback time + ou_horizon); need " +
                              format_g17(-(T + ou_horizon)) + " for T = " + format_g17(T));
    }
    if (ensemble_count == 0 || ensemble_modes == 0)
        throw ConfigError("attractor ensemble must have positive count and modes");
    if (!(delta_factor > 0.0)) throw ConfigError("attractor.delta_factor must be positive");
    if (!(t_tilde > 0.0)) throw ConfigError("attractor.t_tilde must be positive");
    if (!(eps_lo > 0.0 && eps_hi > eps_lo)) throw ConfigError("need 0 < eps_lo < eps_hi");
    if (eps_count < 4) throw ConfigError("attractor.eps_count must be >= 4");
    if (rate_times.size() < 2) throw ConfigError("attractor.rate_times needs >= 2 entries");
    if (seeds.empty()) throw ConfigError("noise.seeds must be non-empty");
    if (sim_u0 != "zero" && sim_u0 != "random" && sim_u0 != "bump")
        throw ConfigError("sim.u0 must be zero|random|bump");
    if (!sim_preset.empty() && sim_preset != "fisher_kpp")
        throw ConfigError("sim.preset must be empty or fisher_kpp");
    if (!(sim_horizon > 0.0)) throw ConfigError("sim.horizon must be positive");
    if (t_max < sim_horizon)
        throw ConfigError("noise.t_max must cover sim.horizon");
}

Nonlinearity RunConfig::make_nonlinearity() const {
    if (drift_kind == "zero") return Nonlinearity::zero();
    if (drift_kind == "linear") return Nonlinearity::linear(drift_rho);
    if (drift_kind == "scaled_tanh")
        return Nonlinearity::scaled_tanh(drift_cf, drift_cbar, modes);
    if (drift_kind == "fisher_kpp_clipped")
        return Nonlinearity::fisher_kpp_clipped(fisher_a, fisher_clip, modes);
    throw ConfigError("drift.kind must be one of zero|linear|scaled_tanh|fisher_kpp_clipped");
}

SolverParams RunConfig::solver_params() const {
    SolverParams p;
    p.dt = dt;
    p.picard_tol = picard_tol;
    p.picard_max_iter = picard_max_iter;
    p.quadrature = (quadrature == "left") ? FQuadrature::left : FQuadrature::trapezoid;
    p.singular_refine = singular_refine;
    p.store_stride = store_stride;
    return p;
}

EstimateConstants RunConfig::constants() const {
    EstimateConstants c;
    c.c = 1.0;
    c.c_hat = 1.0;
    c.lambda = lambda();
    const Nonlinearity f = make_nonlinearity();
    c.C_F = f.lipschitz();
    c.Cbar_F = f.growth();
    c.sigma = sigma;
    c.beta = beta;
    c.eta = eta;
    c.delta = delta_factor;
    return c;
}

std::string RunConfig::canonical() const {
    std::map<std::string, std::string> kv;
    kv["instance.modes"] = std::to_string(modes);
    kv["instance.a0"] = format_g17(a0);
    kv["instance.eps"] = format_g17(eps);
    kv["instance.mu"] = format_g17(mu);
    kv["instance.ou_horizon"] = format_g17(ou_horizon);
    kv["noise.t_min"] = format_g17(t_min);
    kv["noise.t_max"] = format_g17(t_max);
    kv["noise.dt"] = format_g17(noise_dt);
    kv["noise.beta"] = format_g17(beta);
    kv["noise.gamma"] = format_g17(gamma);
    kv["noise.cq"] = format_g17(cq);
    kv["noise.seeds"] = join(seeds);
    kv["drift.kind"] = drift_kind;
    kv["drift.rho"] = format_g17(drift_rho);
    kv["drift.c_f"] = format_g17(drift_cf);
    kv["drift.cbar_f"] = format_g17(drift_cbar);
    kv["drift.fisher_a"] = format_g17(fisher_a);
    kv["drift.fisher_clip"] = format_g17(fisher_clip);
    kv["drift.sigma"] = format_g17(sigma);
    kv["solver.dt"] = format_g17(dt);
    kv["solver.picard_tol"] = format_g17(picard_tol);
    kv["solver.picard_max_iter"] = std::to_string(picard_max_iter);
    kv["solver.quadrature"] = quadrature;
    kv["solver.singular_refine"] = std::to_string(singular_refine);
    kv["solver.store_stride"] = std::to_string(store_stride);
    kv["sim.horizon"] = format_g17(sim_horizon);
    kv["sim.u0"] = sim_u0;
    kv["sim.preset"] = sim_preset;
    kv["attractor.pullback_times"] = join(pullback_times);
    kv["attractor.ensemble_radius"] = format_g17(ensemble_radius);
    kv["attractor.ensemble_count"] = std::to_string(ensemble_count);
    kv["attractor.ensemble_modes"] = std::to_string(ensemble_modes);
    kv["attractor.ensemble_seed"] = std::to_string(ensemble_seed);
    kv["attractor.delta_factor"] = format_g17(delta_factor);
    kv["attractor.eta"] = format_g17(eta);
    kv["attractor.nu_grid"] = join(nu_grid);
    kv["attractor.t_tilde"] = format_g17(t_tilde);
    kv["attractor.eps_lo"] = format_g17(eps_lo);
    kv["attractor.eps_hi"] = format_g17(eps_hi);
    kv["attractor.eps_count"] = std::to_string(eps_count);
    kv["attractor.rate_times"] = join(rate_times);
    kv["output.dir"] = output_dir;
    kv["output.formats"] = formats;
    std::string out;
    for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
    return out;
}

std::string RunConfig::hash() const {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(canonical())));
    return buf;
}

std::vector<std::string> env_overrides(char** envp) {
    std::vector<std::string> out;
    char** e = envp ? envp : environ;
    for (; e && *e; ++e) {
        std::string s(*e);
        if (s.rfind("RDS_", 0) != 0) continue;
        const auto pos = s.find('=');
        if (pos == std::string::npos) continue;
        std::string key = s.substr(4, pos - 4);
        // reserved non-config controls
        if (key == "THREADS" || key == "CLI_PATH") continue;
        std::string::size_type p;
        while ((p = key.find("__")) != std::string::npos) key.replace(p, 2, ".");
        out.push_back(key + "=" + s.substr(pos + 1));
    }
    return out;
}

} // namespace rds
