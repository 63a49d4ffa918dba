#ifndef RDS_NUMERIC_HPP
#define RDS_NUMERIC_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rds {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double r2 = 0.0;
    int n = 0;
};

// ordinary least squares y = a + b x
inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_line: need >= 2 points of equal length");
    const int n = static_cast<int>(x.size());
    double sx = 0, sy = 0;
    for (int i = 0; i < n; ++i) { sx += x[i]; sy += y[i]; }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (int i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
    LineFit f;
    f.n = n;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss_res = 0;
    for (int i = 0; i < n; ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        ss_res += r * r;
    }
    f.r2 = (syy > 0) ? 1.0 - ss_res / syy : 1.0;
    if (n > 2) f.slope_stderr = std::sqrt(ss_res / (n - 2) / sxx);
    return f;
}

// two-sided 95% Student-t quantile, df clamped to the table
inline double t_quantile_975(int df) {
    static const double tab[] = {0.0,   12.706, 4.303, 3.182, 2.776, 2.571,
                                 2.447, 2.365,  2.306, 2.262, 2.228, 2.201,
                                 2.179, 2.160,  2.145, 2.131, 2.120, 2.110,
                                 2.101, 2.093,  2.086, 2.080, 2.074, 2.069,
                                 2.064, 2.060,  2.056, 2.052, 2.048, 2.045,
                                 2.042};
    if (df <= 0) return tab[1];
    if (df >= 30) return 1.96 + (2.042 - 1.96) * 30.0 / df;
    return tab[df];
}

// asymptotic two-sample Kolmogorov-Smirnov p-value
inline double ks_p_value(double d_stat, std::size_t n, std::size_t m) {
    const double ne = static_cast<double>(n) * m / (n + m);
    const double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d_stat;
    double p = 0.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = 2.0 * ((j % 2) ? 1.0 : -1.0) *
                            std::exp(-2.0 * j * j * lambda * lambda);
        p += term;
        if (std::fabs(term) < 1e-12) break;
    }
    if (p < 0.0) p = 0.0;
    if (p > 1.0) p = 1.0;
    return p;
}

inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t h = 0xcbf29ce484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t fnv1a64(const std::string& s) {
    return fnv1a64(s.data(), s.size());
}

// shortest round-trip decimal form (17 significant digits)
inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline double geometric_point(double lo, double hi, int i, int n) {
    if (n <= 1) return lo;
    return lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
}

} // namespace rds

#endif
