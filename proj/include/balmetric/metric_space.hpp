#pragma once

// Diagonal Hermitian metrics on H^0(CP^1, O(k)) and the log-Euclidean
// geometry they inherit from GL(k+1,C)/U(k+1).
//
// A metric is stored by the reciprocals a_q of its diagonal entries, so the
// section z^q has squared norm 1/a_q and {sqrt(a_q) z^q} is orthonormal.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "balmetric/errors.hpp"

namespace balmetric {

namespace detail {

inline void require_positive_finite(std::span<const double> coeffs, const char* what) {
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        const double v = coeffs[i];
        if (!std::isfinite(v) || !(v > 0.0)) {
            throw ValidationError(std::string(what) + ": coefficient " + std::to_string(i) +
                                  " must be finite and > 0, got " + std::to_string(v));
        }
    }
}

} // namespace detail

/// Binomial coefficient as a double; exact for the small arguments used here.
inline double binomial(int n, int r) {
    if (r < 0 || r > n) return 0.0;
    r = std::min(r, n - r);
    double result = 1.0;
    for (int i = 1; i <= r; ++i) result = result * (n - r + i) / i;
    return std::round(result);
}

/// Log-Euclidean distance between two positive coefficient vectors of equal length.
inline double log_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw ValidationError("distance: metrics have different dimensions (" +
                              std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
    }
    detail::require_positive_finite(a, "distance");
    detail::require_positive_finite(b, "distance");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double l = std::log(b[i] / a[i]);
        sum += l * l;
    }
    return std::sqrt(sum);
}

/// S^1-invariant metric G = (a_0, ..., a_k) on sections of O(k) over CP^1.
class DiagonalMetric {
public:
    explicit DiagonalMetric(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
        if (coeffs_.empty()) throw ValidationError("DiagonalMetric: needs at least one coefficient");
        detail::require_positive_finite(coeffs_, "DiagonalMetric");
    }
    DiagonalMetric(std::initializer_list<double> coeffs)
        : DiagonalMetric(std::vector<double>(coeffs)) {}

    int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
    std::size_t size() const noexcept { return coeffs_.size(); }
    double operator[](std::size_t q) const { return coeffs_[q]; }
    std::span<const double> coeffs() const noexcept { return coeffs_; }

    // Same degree, new coefficients. Used by the generic iteration code.
    DiagonalMetric with_coeffs(std::vector<double> coeffs) const {
        if (coeffs.size() != coeffs_.size()) {
            throw ValidationError("DiagonalMetric: coefficient count changed");
        }
        return DiagonalMetric(std::move(coeffs));
    }

    friend bool operator==(const DiagonalMetric&, const DiagonalMetric&) = default;

private:
    std::vector<double> coeffs_;
};

/// The two-parameter family a_q = alpha * c^q * C(k, q), i.e. the
/// coefficients of alpha (1 + c X)^k. Fixed by T and T_K; c = 1 is the round metric.
struct BalancedFamily {
    int degree = 1;
    double alpha = 1.0;
    double c = 1.0;
};

inline double distance(const DiagonalMetric& a, const DiagonalMetric& b) {
    if (a.degree() != b.degree()) {
        throw ValidationError("distance: degree mismatch (" + std::to_string(a.degree()) + " vs " +
                              std::to_string(b.degree()) + ")");
    }
    return log_distance(a.coeffs(), b.coeffs());
}

inline DiagonalMetric scale(const DiagonalMetric& g, double lambda) {
    if (!std::isfinite(lambda) || !(lambda > 0.0)) {
        throw ValidationError("scale: factor must be finite and > 0, got " + std::to_string(lambda));
    }
    std::vector<double> out(g.coeffs().begin(), g.coeffs().end());
    for (double& v : out) v *= lambda;
    return DiagonalMetric(std::move(out));
}

/// (a_0, ..., a_k) -> (a_k, ..., a_0), the action of z -> 1/z.
inline DiagonalMetric reversed(const DiagonalMetric& g) {
    std::vector<double> out(g.coeffs().rbegin(), g.coeffs().rend());
    return DiagonalMetric(std::move(out));
}

inline constexpr double kDefaultPalindromicTol = 1e-12;

/// True iff a_i and a_{k-i} agree to relative tolerance `tol` for every i.
inline bool is_palindromic(const DiagonalMetric& g, double tol = kDefaultPalindromicTol) {
    if (tol < 0.0) throw ValidationError("is_palindromic: tolerance must be >= 0");
    const std::size_t n = g.size();
    for (std::size_t i = 0; i < n / 2; ++i) {
        const double lo = g[i];
        const double hi = g[n - 1 - i];
        if (std::abs(lo - hi) > tol * std::max(lo, hi)) return false;
    }
    return true;
}

inline DiagonalMetric balanced_coeffs(const BalancedFamily& family) {
    if (family.degree < 0) throw ValidationError("balanced_coeffs: degree must be >= 0");
    if (!(family.alpha > 0.0) || !(family.c > 0.0)) {
        throw ValidationError("balanced_coeffs: alpha and c must be > 0");
    }
    std::vector<double> out(static_cast<std::size_t>(family.degree) + 1);
    double cq = 1.0;
    for (int q = 0; q <= family.degree; ++q) {
        out[q] = family.alpha * cq * binomial(family.degree, q);
        cq *= family.c;
    }
    return DiagonalMetric(std::move(out));
}

inline DiagonalMetric round_metric(int k) { return balanced_coeffs({k, 1.0, 1.0}); }

/// For k = 2 the limit of T and T_K from G lies on the ray through
/// (a_0, 2 sqrt(a_0 a_2), a_2), i.e. c = sqrt(a_2 / a_0).
inline DiagonalMetric predict_balanced_direction_k2(const DiagonalMetric& g) {
    if (g.degree() != 2) {
        throw ValidationError("predict_balanced_direction_k2: requires k = 2, got k = " +
                              std::to_string(g.degree()));
    }
    return DiagonalMetric({g[0], 2.0 * std::sqrt(g[0] * g[2]), g[2]});
}

/// sum_i a_i / a'_i. Equals k+1 whenever g_next is T, T_nu or T_K of g.
inline double trace_relation(const DiagonalMetric& g, const DiagonalMetric& g_next) {
    if (g.degree() != g_next.degree()) {
        throw ValidationError("trace_relation: degree mismatch");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) sum += g[i] / g_next[i];
    return sum;
}

} // namespace balmetric
