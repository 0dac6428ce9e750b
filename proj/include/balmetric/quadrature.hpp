#pragma once

// Deterministic quadrature over (0, inf) and (0, inf)^n, n <= 3.
//
// Every integral is pulled back to the unit cube and evaluated with a tensor
// Gauss-Legendre rule. Accuracy is certified by comparing m and 2m nodes per
// axis (per panel in one dimension); the finer value is returned.
//
// In one dimension the interval (0, 1) is cut into panels that halve towards
// both ends, so every octave of x gets the same number of nodes. Integrands
// whose features sit many decades apart stay cheap, and polynomials in t are
// still integrated exactly.
//
// Nodes are computed in long double and stored together with their
// complements 1 - t, so x = t / (1 - t) keeps full relative precision at
// both ends of the interval. The rule is symmetric under t <-> 1 - t, which
// makes the one-dimensional rule exactly symmetric under x <-> 1/x.

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "balmetric/errors.hpp"

namespace balmetric {

enum class Smoothness {
    rational,         // one agreement between m and 2m certifies
    fractional_power  // two consecutive agreements are required
};

/// How (0, inf)^n is pulled back to the unit cube.
enum class BoxChart {
    // x = y / y_0 with y on the standard simplex, y parametrised by collapsed
    // (Duffy) coordinates. Integrands that are projectively homogeneous, like
    // forms on CP^n written in an affine chart, become smooth on the cube.
    projective,
    // x_j = t_j / (1 - t_j) on each axis independently. Suits product integrands.
    per_axis,
    // projective, falling back to per_axis when it does not converge
    automatic
};

/// Graded panels on each side of t = 1/2 in the one-dimensional rule.
inline constexpr int kGradedLevels = 40;

struct QuadratureOptions {
    double rel_tol = 1e-11;
    int m_start = 64;
    int m_max = 2048;
};

/// Defaults by dimension: start/cap node counts and tolerance.
inline QuadratureOptions default_quadrature_options(int n = 1) {
    switch (n) {
    case 1: return {1e-11, 8, 512};  // nodes per panel
    case 2: return {1e-9, 64, 512};
    case 3: return {1e-7, 48, 192};
    default: throw ValidationError("quadrature: unsupported dimension " + std::to_string(n));
    }
}

struct IntegrandSpec {
    std::function<double(std::span<const double>)> f;
    Smoothness hint = Smoothness::rational;
};

/// Integrand with several components sharing the same nodes; writes one value per component.
struct VectorIntegrandSpec {
    std::function<void(std::span<const double>, std::span<double>)> f;
    std::size_t components = 1;
    Smoothness hint = Smoothness::rational;
};

struct QuadratureResult {
    double value = 0.0;
    double err_est = 0.0;
    int nodes_per_axis = 0;
};

struct VectorQuadratureResult {
    std::vector<double> values;
    std::vector<double> err_est;
    int nodes_per_axis = 0;
};

/// m-point Gauss-Legendre rule on (0, 1), nodes ascending.
struct UnitRule {
    std::vector<double> t;
    std::vector<double> one_minus_t;
    std::vector<double> w;
};

namespace detail {

inline UnitRule compute_unit_rule(int m) {
    using ld = long double;
    UnitRule rule;
    rule.t.resize(m);
    rule.one_minus_t.resize(m);
    rule.w.resize(m);
    const ld pi = std::numbers::pi_v<long double>;
    const int half = (m + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // i-th largest root of P_m, so t = (1 - xi) / 2 is the i-th smallest node.
        ld xi = std::cos(pi * (static_cast<ld>(i) + 0.75L) / (static_cast<ld>(m) + 0.5L));
        ld dp = 0.0L;
        for (int iter = 0; iter < 100; ++iter) {
            ld p0 = 1.0L;
            ld p1 = xi;
            for (int j = 2; j <= m; ++j) {
                const ld p2 = ((2 * j - 1) * xi * p1 - (j - 1) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = m * (xi * p1 - p0) / (xi * xi - 1.0L);
            const ld step = p1 / dp;
            xi -= step;
            if (std::fabs(step) <= 1e-19L) break;
        }
        {
            ld p0 = 1.0L;
            ld p1 = xi;
            for (int j = 2; j <= m; ++j) {
                const ld p2 = ((2 * j - 1) * xi * p1 - (j - 1) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = m * (xi * p1 - p0) / (xi * xi - 1.0L);
        }
        const ld lo = (1.0L - xi) / 2.0L;
        const ld hi = (1.0L + xi) / 2.0L;
        const ld weight = 1.0L / ((1.0L - xi) * (1.0L + xi) * dp * dp);
        const int j = m - 1 - i;
        rule.t[i] = static_cast<double>(lo);
        rule.one_minus_t[i] = static_cast<double>(hi);
        rule.t[j] = static_cast<double>(hi);
        rule.one_minus_t[j] = static_cast<double>(lo);
        rule.w[i] = static_cast<double>(weight);
        rule.w[j] = static_cast<double>(weight);
    }
    if (m % 2 == 1) {
        rule.t[m / 2] = 0.5;
        rule.one_minus_t[m / 2] = 0.5;
    }
    return rule;
}

// Neumaier-compensated running sum.
struct CompensatedSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double v) {
        const double s = sum + v;
        if (std::fabs(sum) >= std::fabs(v)) {
            carry += (sum - s) + v;
        } else {
            carry += (v - s) + sum;
        }
        sum = s;
    }
    double value() const { return sum + carry; }
};

} // namespace detail

/// Cached m-point rule on (0, 1). The returned reference stays valid for the
/// life of the program; safe to call from several threads.
inline const UnitRule& gauss_legendre_unit(int m) {
    if (m < 1) throw ValidationError("gauss_legendre_unit: need at least one node");
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<const UnitRule>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(m);
    if (it == cache.end()) {
        it = cache.emplace(m, std::make_unique<const UnitRule>(detail::compute_unit_rule(m))).first;
    }
    return *it->second;
}

namespace detail {

// Composite rule: [0, 2^-L], [2^-L, 2^-(L-1)], ..., [1/4, 1/2] with m nodes
// each, mirrored onto (1/2, 1).
inline UnitRule compute_graded_rule(int m, int levels) {
    using ld = long double;
    const UnitRule& base = gauss_legendre_unit(m);
    UnitRule left;
    for (int j = levels; j >= 1; --j) {
        const ld b = std::ldexp(1.0L, -j);
        const ld a = j == levels ? 0.0L : b / 2.0L;
        for (int i = 0; i < m; ++i) {
            const ld t = a + (b - a) * static_cast<ld>(base.t[i]);
            left.t.push_back(static_cast<double>(t));
            left.one_minus_t.push_back(static_cast<double>(1.0L - t));
            left.w.push_back(static_cast<double>((b - a) * static_cast<ld>(base.w[i])));
        }
    }
    UnitRule rule = left;
    for (std::size_t i = left.t.size(); i-- > 0;) {
        rule.t.push_back(left.one_minus_t[i]);
        rule.one_minus_t.push_back(left.t[i]);
        rule.w.push_back(left.w[i]);
    }
    return rule;
}

} // namespace detail

/// Cached graded composite rule with m nodes per panel.
inline const UnitRule& graded_unit_rule(int m) {
    if (m < 1) throw ValidationError("graded_unit_rule: need at least one node per panel");
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<const UnitRule>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(m);
    if (it == cache.end()) {
        it = cache.emplace(m, std::make_unique<const UnitRule>(detail::compute_graded_rule(m, kGradedLevels)))
                 .first;
    }
    return *it->second;
}

namespace detail {

inline void check_options(const QuadratureOptions& opts) {
    if (!(opts.rel_tol > 0.0 && opts.rel_tol < 1.0)) {
        throw ValidationError("quadrature: rel_tol must lie in (0, 1)");
    }
    if (opts.m_start < 1 || opts.m_max < opts.m_start) {
        throw ValidationError("quadrature: need 1 <= m_start <= m_max");
    }
}

// Tensor rule of m nodes per axis on (0, inf)^n, visited in lexicographic order.
// visit(x, weight) is called once per node. In one dimension m counts nodes per
// graded panel.
template <class Visit>
void for_each_box_node(int n, int m, BoxChart chart, Visit&& visit) {
    const UnitRule& r = n == 1 ? graded_unit_rule(m) : gauss_legendre_unit(m);
    const int count = static_cast<int>(r.t.size());
    std::array<double, 3> x{};
    std::span<const double> point(x.data(), static_cast<std::size_t>(n));
    if (n == 1 || chart == BoxChart::per_axis) {
        std::array<int, 3> idx{};
        for (;;) {
            double w = 1.0;
            for (int d = 0; d < n; ++d) {
                const double o = r.one_minus_t[idx[d]];
                x[d] = r.t[idx[d]] / o;
                w *= r.w[idx[d]] / (o * o);
            }
            visit(point, w);
            int d = n - 1;
            while (d >= 0 && ++idx[d] == count) idx[d--] = 0;
            if (d < 0) break;
        }
        return;
    }
    // Projective chart. Collapsed coordinates u on the cube give
    //   y_1 = u_1, y_j = u_j prod_{l<j} (1 - u_l), y_0 = prod_l (1 - u_l),
    // with dy = prod_{j<n} (1 - u_j)^{n-j} du; then x_j = y_j / y_0 and
    // dx = y_0^{-(n+1)} dy.
    std::array<int, 3> idx{};
    std::array<double, 3> y{};
    for (;;) {
        double tail = 1.0;  // prod_{l<j} (1 - u_l)
        double jac = 1.0;
        double w = 1.0;
        for (int d = 0; d < n; ++d) {
            const int i = idx[d];
            y[d] = r.t[i] * tail;
            w *= r.w[i];
            for (int e = d + 1; e < n; ++e) jac *= r.one_minus_t[i];
            tail *= r.one_minus_t[i];
        }
        const double y0 = tail;
        double y0_pow = 1.0;
        for (int d = 0; d <= n; ++d) y0_pow *= y0;
        for (int d = 0; d < n; ++d) x[d] = y[d] / y0;
        visit(point, w * jac / y0_pow);
        int d = n - 1;
        while (d >= 0 && ++idx[d] == m) idx[d--] = 0;
        if (d < 0) break;
    }
}

inline std::vector<double> evaluate_level(const VectorIntegrandSpec& spec, int n, int m,
                                          BoxChart chart) {
    std::vector<CompensatedSum> sums(spec.components);
    std::vector<double> values(spec.components);
    for_each_box_node(n, m, chart, [&](std::span<const double> x, double w) {
        spec.f(x, values);
        for (std::size_t c = 0; c < values.size(); ++c) {
            if (!std::isfinite(values[c])) {
                std::string where;
                for (double xi : x) where += (where.empty() ? "" : ", ") + std::to_string(xi);
                throw QuadratureError("quadrature: non-finite integrand value at x = (" + where + ")",
                                      std::nan(""), std::nan(""));
            }
            sums[c].add(values[c] * w);
        }
    });
    std::vector<double> out(spec.components);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] = sums[c].value();
    return out;
}

inline bool levels_agree(const std::vector<double>& coarse, const std::vector<double>& fine,
                         double rel_tol) {
    for (std::size_t c = 0; c < fine.size(); ++c) {
        if (std::fabs(fine[c] - coarse[c]) > rel_tol * std::fabs(fine[c])) return false;
    }
    return true;
}

} // namespace detail

/// Integral of a vector-valued integrand over (0, inf)^n, n in {1, 2, 3}.
inline VectorQuadratureResult integrate_box(const VectorIntegrandSpec& spec, int n,
                                            const QuadratureOptions& opts,
                                            BoxChart chart = BoxChart::automatic) {
    if (n < 1 || n > 3) {
        throw ValidationError("integrate_box: unsupported dimension " + std::to_string(n) +
                              " (supported: 1, 2, 3)");
    }
    if (spec.components == 0) throw ValidationError("integrate_box: no components");
    detail::check_options(opts);
    if (chart == BoxChart::automatic) {
        if (n == 1) return integrate_box(spec, n, opts, BoxChart::per_axis);
        try {
            return integrate_box(spec, n, opts, BoxChart::projective);
        } catch (const QuadratureError& first) {
            if (std::isnan(first.best_estimate())) throw;  // non-finite integrand
            try {
                return integrate_box(spec, n, opts, BoxChart::per_axis);
            } catch (const QuadratureError&) {
                throw first;
            }
        }
    }

    const int agreements_needed = spec.hint == Smoothness::fractional_power ? 2 : 1;
    int m = opts.m_start;
    std::vector<double> coarse = detail::evaluate_level(spec, n, m, chart);
    int agreements = 0;
    bool refined = false;
    std::vector<double> fine;
    std::vector<double> err(spec.components);
    while (2 * m <= opts.m_max) {
        m *= 2;
        fine = detail::evaluate_level(spec, n, m, chart);
        refined = true;
        for (std::size_t c = 0; c < err.size(); ++c) err[c] = std::fabs(fine[c] - coarse[c]);
        agreements = detail::levels_agree(coarse, fine, opts.rel_tol) ? agreements + 1 : 0;
        if (agreements >= agreements_needed) return {std::move(fine), std::move(err), m};
        coarse = std::move(fine);
    }
    if (!refined) {
        throw QuadratureError("quadrature: m_max leaves no room for a refinement check",
                              coarse.front(), std::nan(""));
    }
    std::size_t worst = 0;
    double worst_rel = 0.0;
    for (std::size_t c = 0; c < err.size(); ++c) {
        const double rel = err[c] / std::fabs(coarse[c]);
        if (!(rel <= worst_rel)) {
            worst_rel = rel;
            worst = c;
        }
    }
    throw QuadratureError("quadrature: no convergence at " + std::to_string(m) +
                              " nodes per axis (relative disagreement " +
                              std::to_string(worst_rel) + ")",
                          coarse[worst], err[worst]);
}

inline QuadratureResult integrate_box(const IntegrandSpec& spec, int n,
                                      const QuadratureOptions& opts,
                                      BoxChart chart = BoxChart::automatic) {
    VectorIntegrandSpec vec{
        [&spec](std::span<const double> x, std::span<double> out) { out[0] = spec.f(x); }, 1,
        spec.hint};
    auto r = integrate_box(vec, n, opts, chart);
    return {r.values[0], r.err_est[0], r.nodes_per_axis};
}

inline QuadratureResult integrate_box(const IntegrandSpec& spec, int n) {
    return integrate_box(spec, n, default_quadrature_options(n));
}

inline VectorQuadratureResult integrate_semi_infinite(const VectorIntegrandSpec& spec,
                                                      const QuadratureOptions& opts) {
    return integrate_box(spec, 1, opts);
}

inline QuadratureResult integrate_semi_infinite(const IntegrandSpec& spec,
                                                const QuadratureOptions& opts) {
    return integrate_box(spec, 1, opts);
}

inline QuadratureResult integrate_semi_infinite(const IntegrandSpec& spec, double rel_tol) {
    QuadratureOptions opts = default_quadrature_options(1);
    opts.rel_tol = rel_tol;
    return integrate_box(spec, 1, opts);
}

/// Single evaluation of the m-node tensor rule, without certification.
inline double integrate_fixed(const IntegrandSpec& spec, int n, int m,
                              BoxChart chart = BoxChart::projective) {
    if (chart == BoxChart::automatic) chart = BoxChart::projective;
    VectorIntegrandSpec vec{
        [&spec](std::span<const double> x, std::span<double> out) { out[0] = spec.f(x); }, 1,
        spec.hint};
    return detail::evaluate_level(vec, n, m, chart)[0];
}

} // namespace balmetric
