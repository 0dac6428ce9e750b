#pragma once

// Donaldson's T, T_nu and T_K maps on diagonal metrics over CP^1.
//
// With x = |z|^2 and P(x) = sum_i a_i x^i (so that FS(G) = 1/P), each map
// sends a_q to a ratio of integrals over (0, inf):
//
//   T    : a_q -> int rho / ((k+1) int rho x^q / P)
//   T_nu : a_q -> 1 / ((k+1) int x^q / ((1+x)^2 P))
//   T_K  : a_q -> int P^{-2/k} / ((k+1) int P^{-1-2/k} x^q)
//
// where rho = sum_{i>j} a_i a_j (i-j)^2 x^{i+j-1} / P^2 is the density of
// the curvature form of FS(G). Every map is homogeneous of degree one in the
// a_i, so the polynomial is evaluated with coefficients divided by their
// maximum and the scale is restored on output.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "balmetric/errors.hpp"
#include "balmetric/metric_space.hpp"
#include "balmetric/quadrature.hpp"

namespace balmetric {

enum class OperatorKind { T, Tnu, TK };

inline std::string_view to_string(OperatorKind kind) {
    switch (kind) {
    case OperatorKind::T: return "T";
    case OperatorKind::Tnu: return "Tnu";
    case OperatorKind::TK: return "TK";
    }
    return "?";
}

inline OperatorKind parse_operator_kind(std::string_view name) {
    if (name == "T") return OperatorKind::T;
    if (name == "Tnu" || name == "T_nu") return OperatorKind::Tnu;
    if (name == "TK" || name == "T_K") return OperatorKind::TK;
    throw ValidationError("unknown operator '" + std::string(name) + "' (expected T, Tnu or TK)");
}

/// Whether `kind` can act on H^0(CP^1, O(k)).
inline void require_applicable(OperatorKind kind, int k) {
    switch (kind) {
    case OperatorKind::T:
        if (k < 1) throw ValidationError("T: requires k >= 1 (the curvature density vanishes for k = 0)");
        break;
    case OperatorKind::Tnu:
        if (k < 0) throw ValidationError("Tnu: requires k >= 0");
        break;
    case OperatorKind::TK:
        if (k < 2 || k % 2 != 0) {
            throw ValidationError("TK: requires even k >= 2 (O(k) = K^{-k/2}), got k = " +
                                  std::to_string(k));
        }
        break;
    }
}

namespace detail {

struct ScaledPolynomial {
    std::vector<double> coeffs;  // a_i / scale
    double scale = 1.0;

    explicit ScaledPolynomial(std::span<const double> a)
        : coeffs(a.begin(), a.end()), scale(*std::max_element(a.begin(), a.end())) {
        for (double& c : coeffs) c /= scale;
    }

    double operator()(double x) const {
        double p = 0.0;
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) p = p * x + *it;
        return p;
    }
};

inline void fill_powers(double x, std::span<double> powers) {
    double p = 1.0;
    for (double& v : powers) {
        v = p;
        p *= x;
    }
}

// sum_{i>j} a_i a_j (i-j)^2 x^{i+j-1}, given powers[e] = x^e for e <= 2k-1.
inline double curvature_numerator(std::span<const double> a, std::span<const double> powers) {
    double sum = 0.0;
    const std::size_t n = a.size();
    for (std::size_t i = 1; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            const double d = static_cast<double>(i - j);
            sum += a[i] * a[j] * d * d * powers[i + j - 1];
        }
    }
    return sum;
}

inline DiagonalMetric checked_result(std::vector<double> out, std::string_view op) {
    for (double v : out) {
        if (!std::isfinite(v) || !(v > 0.0)) {
            throw NumericalError(std::string(op) + ": produced a non-positive or non-finite coefficient");
        }
    }
    return DiagonalMetric(std::move(out));
}

} // namespace detail

inline DiagonalMetric apply_T(const DiagonalMetric& g,
                              const QuadratureOptions& opts = default_quadrature_options(1)) {
    const int k = g.degree();
    require_applicable(OperatorKind::T, k);
    const detail::ScaledPolynomial poly(g.coeffs());
    const std::size_t dim = g.size();
    std::vector<double> powers(2 * dim);

    // Component 0 is the q-independent numerator, 1 + q the q-th denominator.
    VectorIntegrandSpec spec{
        [&](std::span<const double> pt, std::span<double> out) {
            const double x = pt[0];
            detail::fill_powers(x, powers);
            const double p = poly(x);
            const double rho = detail::curvature_numerator(poly.coeffs, powers) / (p * p);
            out[0] = rho;
            for (std::size_t q = 0; q < dim; ++q) out[1 + q] = rho * powers[q] / p;
        },
        dim + 1, Smoothness::rational};
    const auto r = integrate_semi_infinite(spec, opts);

    std::vector<double> out(dim);
    for (std::size_t q = 0; q < dim; ++q) {
        out[q] = poly.scale * r.values[0] / (static_cast<double>(dim) * r.values[1 + q]);
    }
    return detail::checked_result(std::move(out), "T");
}

inline DiagonalMetric apply_Tnu(const DiagonalMetric& g,
                                const QuadratureOptions& opts = default_quadrature_options(1)) {
    const detail::ScaledPolynomial poly(g.coeffs());
    const std::size_t dim = g.size();
    std::vector<double> powers(dim);

    VectorIntegrandSpec spec{
        [&](std::span<const double> pt, std::span<double> out) {
            const double x = pt[0];
            detail::fill_powers(x, powers);
            const double base = 1.0 / ((1.0 + x) * (1.0 + x) * poly(x));
            for (std::size_t q = 0; q < dim; ++q) out[q] = powers[q] * base;
        },
        dim, Smoothness::rational};
    const auto r = integrate_semi_infinite(spec, opts);

    std::vector<double> out(dim);
    for (std::size_t q = 0; q < dim; ++q) {
        out[q] = poly.scale / (static_cast<double>(dim) * r.values[q]);
    }
    return detail::checked_result(std::move(out), "Tnu");
}

inline DiagonalMetric apply_TK(const DiagonalMetric& g,
                               const QuadratureOptions& opts = default_quadrature_options(1)) {
    const int k = g.degree();
    require_applicable(OperatorKind::TK, k);
    const detail::ScaledPolynomial poly(g.coeffs());
    const std::size_t dim = g.size();
    const double expo = 2.0 / static_cast<double>(k);
    std::vector<double> powers(dim);

    VectorIntegrandSpec spec{
        [&](std::span<const double> pt, std::span<double> out) {
            const double x = pt[0];
            detail::fill_powers(x, powers);
            const double log_p = std::log(poly(x));
            out[0] = std::exp(-expo * log_p);
            const double inner = std::exp(-(1.0 + expo) * log_p);
            for (std::size_t q = 0; q < dim; ++q) out[1 + q] = inner * powers[q];
        },
        dim + 1, Smoothness::fractional_power};
    const auto r = integrate_semi_infinite(spec, opts);

    std::vector<double> out(dim);
    for (std::size_t q = 0; q < dim; ++q) {
        out[q] = poly.scale * r.values[0] / (static_cast<double>(dim) * r.values[1 + q]);
    }
    return detail::checked_result(std::move(out), "TK");
}

inline DiagonalMetric apply(OperatorKind kind, const DiagonalMetric& g,
                            const QuadratureOptions& opts = default_quadrature_options(1)) {
    switch (kind) {
    case OperatorKind::T: return apply_T(g, opts);
    case OperatorKind::Tnu: return apply_Tnu(g, opts);
    case OperatorKind::TK: return apply_TK(g, opts);
    }
    throw ValidationError("apply: unknown operator");
}

/// The map as a callable, for the iteration driver.
inline std::function<DiagonalMetric(const DiagonalMetric&)>
make_cp1_operator(OperatorKind kind, QuadratureOptions opts = default_quadrature_options(1)) {
    return [kind, opts](const DiagonalMetric& g) { return apply(kind, g, opts); };
}

struct DensitySample {
    double x = 0.0;
    double rho = 0.0;
};

/// Samples of the curvature density rho(x), x = |z|^2, of FS(G).
struct DensityProfile {
    std::vector<DensitySample> samples;
};

inline double density(const DiagonalMetric& g, double x) {
    if (!std::isfinite(x) || !(x > 0.0)) {
        throw ValidationError("density: sample point must be finite and > 0");
    }
    const detail::ScaledPolynomial poly(g.coeffs());
    std::vector<double> powers(2 * g.size());
    detail::fill_powers(x, powers);
    const double p = poly(x);
    return detail::curvature_numerator(poly.coeffs, powers) / (p * p);
}

inline DensityProfile density_profile(const DiagonalMetric& g, std::span<const double> xs) {
    DensityProfile profile;
    profile.samples.reserve(xs.size());
    for (double x : xs) profile.samples.push_back({x, density(g, x)});
    return profile;
}

/// `count` points spaced evenly in log x between x_min and x_max.
inline std::vector<double> log_grid(double x_min, double x_max, int count) {
    if (!(x_min > 0.0) || !(x_max > x_min) || count < 2) {
        throw ValidationError("log_grid: need 0 < x_min < x_max and count >= 2");
    }
    std::vector<double> xs(static_cast<std::size_t>(count));
    const double lo = std::log(x_min);
    const double step = (std::log(x_max) - lo) / (count - 1);
    for (int i = 0; i < count; ++i) xs[i] = std::exp(lo + step * i);
    xs.front() = x_min;
    xs.back() = x_max;
    return xs;
}

} // namespace balmetric
