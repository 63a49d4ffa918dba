#ifndef RDS_VERIFY_HPP
#define RDS_VERIFY_HPP

#include <string>
#include <vector>

#include "rds/config.hpp"

namespace rds {

enum class Suite {
    estimates,
    cocycle,
    absorbing,
    smoothing,
    lipschitz,
    compactness,
    dimension,
    all
};

Suite parse_suite(const std::string& name);  // throws ConfigError on unknown names
std::string suite_name(Suite s);

struct CheckResult {
    std::string id;
    std::string status;  // pass | fail | info
    double measured = 0.0;
    double bound = 0.0;
    double tolerance = 0.0;
    std::string note;
    std::string config_hash;
};

// fail iff measured > bound + tolerance
CheckResult make_check(const std::string& id, double measured, double bound,
                       double tolerance, const std::string& note,
                       const std::string& config_hash, bool info_only = false);

std::vector<CheckResult> run_suite(Suite suite, const RunConfig& config);

int exit_code(const std::vector<CheckResult>& results);  // 1 iff any fail
std::string results_table(const std::vector<CheckResult>& results);
std::string results_json(const std::vector<CheckResult>& results, const RunConfig& config);
std::vector<CheckResult> load_results_json(const std::string& file);

struct RegressionRow {
    std::string id;
    double baseline = 0.0;
    double current = 0.0;
    double drift = 0.0;
    bool flagged = false;       // drift beyond the stored tolerance
    bool improvement = false;   // flagged but the measured value shrank
};

struct RegressionReport {
    std::vector<RegressionRow> rows;
    std::size_t flagged = 0;
    std::size_t missing = 0;  // ids present in only one of the two runs
};

// compares freshly computed results against a stored baseline file
RegressionReport regression_baseline(const std::vector<CheckResult>& current,
                                     const std::string& baseline_file);

// rigorous fiber-independent decay-estimate constant: the clipped potential
// gives int_s^t a <= abar_max (t-s), so
//   sup_tau tau^alpha e^{(lambda + abar_max) tau} max_k mu_k^alpha e^{-mu_k tau}
// majorizes every empirical ratio on every fiber
double decay_envelope_constant(double alpha, double lambda, double abar_max,
                               std::size_t K, double tau_min, double tau_max);

// config-derived constants with the C-tilde table filled from the envelope
// (10% headroom), ranges matched to where each constant is used
EstimateConstants fitted_constants(const RunConfig& config);

// formula-based pullback absorbing time on a probe grid: first probe time t*
// with e^{-(lambda - c C_F) t} (2 c R + sigma c_hat ||omega(-t)||_beta) < delta
// for all probe t >= t*; +inf encoded as a negative value never occurs: throws
// if the horizon is too short
double absorbing_time_formula(const NoisePath& omega, const EstimateConstants& cst,
                              double radius, double delta, double probe_step,
                              double probe_max);

} // namespace rds

#endif
