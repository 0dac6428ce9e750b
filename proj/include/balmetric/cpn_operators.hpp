#pragma once

// T_nu on torus-invariant metrics over H^0(CP^n, O(k)), n <= 3.
//
// Sections are the monomials z^alpha, |alpha| <= k, in the affine chart
// z_i = Z_i / Z_0. A torus-invariant metric is diagonal in this basis and is
// stored, like the CP^1 case, by the reciprocals a_alpha of its diagonal.
// The reference volume form is the normalised Fubini-Study form, so
//
//   1 / a'_i = N n! int_{(0,inf)^n} w_i(x) / ( P(x) (1 + sum x_j)^{n+1} ) dx
//
// with w_i(x) the monomial in x_j = |z_j|^2 and P = sum_p a_p w_p.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "balmetric/errors.hpp"
#include "balmetric/metric_space.hpp"
#include "balmetric/quadrature.hpp"

namespace balmetric {

using MultiIndex = std::vector<int>;
/// A permutation pi of the homogeneous coordinates {0, ..., n}: Z_i -> Z_{pi(i)}.
using Permutation = std::vector<int>;

/// Monomials of total degree <= k in n variables, ordered first by degree and
/// then lexicographically (z_1 before z_2 before ...).
class MonomialBasis {
public:
    MonomialBasis(int n, int k) : n_(n), k_(k) {
        if (n < 1) throw ValidationError("MonomialBasis: n must be >= 1");
        if (k < 1) throw ValidationError("MonomialBasis: k must be >= 1");
        MultiIndex alpha(static_cast<std::size_t>(n), 0);
        for (int degree = 0; degree <= k; ++degree) enumerate(alpha, 0, degree);
        for (std::size_t i = 0; i < exponents_.size(); ++i) index_.emplace(exponents_[i], i);
    }

    int n() const noexcept { return n_; }
    int k() const noexcept { return k_; }
    std::size_t size() const noexcept { return exponents_.size(); }
    const MultiIndex& operator[](std::size_t i) const { return exponents_[i]; }
    const std::vector<MultiIndex>& exponents() const noexcept { return exponents_; }

    std::size_t index_of(const MultiIndex& alpha) const {
        auto it = index_.find(alpha);
        if (it == index_.end()) throw ValidationError("MonomialBasis: multi-index not in basis");
        return it->second;
    }

    /// (k - |alpha|, alpha_1, ..., alpha_n): exponents in homogeneous coordinates.
    MultiIndex homogeneous(std::size_t i) const {
        const MultiIndex& alpha = exponents_[i];
        MultiIndex beta(alpha.size() + 1);
        beta[0] = k_ - std::accumulate(alpha.begin(), alpha.end(), 0);
        std::copy(alpha.begin(), alpha.end(), beta.begin() + 1);
        return beta;
    }

private:
    // Fill positions pos.. of alpha with exponents summing to `remaining`,
    // largest leading exponent first.
    void enumerate(MultiIndex& alpha, int pos, int remaining) {
        if (pos == n_ - 1) {
            alpha[pos] = remaining;
            exponents_.push_back(alpha);
            return;
        }
        for (int e = remaining; e >= 0; --e) {
            alpha[pos] = e;
            enumerate(alpha, pos + 1, remaining - e);
        }
        alpha[pos] = 0;
    }

    int n_;
    int k_;
    std::vector<MultiIndex> exponents_;
    std::map<MultiIndex, std::size_t> index_;
};

/// Torus-invariant metric on H^0(CP^n, O(k)); coefficient i belongs to basis element i.
class MultiIndexMetric {
public:
    MultiIndexMetric(std::shared_ptr<const MonomialBasis> basis, std::vector<double> coeffs)
        : basis_(std::move(basis)), coeffs_(std::move(coeffs)) {
        if (!basis_) throw ValidationError("MultiIndexMetric: missing basis");
        if (coeffs_.size() != basis_->size()) {
            throw ValidationError("MultiIndexMetric: expected " + std::to_string(basis_->size()) +
                                  " coefficients, got " + std::to_string(coeffs_.size()));
        }
        detail::require_positive_finite(coeffs_, "MultiIndexMetric");
    }

    const MonomialBasis& basis() const noexcept { return *basis_; }
    const std::shared_ptr<const MonomialBasis>& basis_ptr() const noexcept { return basis_; }
    int degree() const noexcept { return basis_->k(); }
    std::size_t size() const noexcept { return coeffs_.size(); }
    double operator[](std::size_t i) const { return coeffs_[i]; }
    std::span<const double> coeffs() const noexcept { return coeffs_; }

    MultiIndexMetric with_coeffs(std::vector<double> coeffs) const {
        return MultiIndexMetric(basis_, std::move(coeffs));
    }

private:
    std::shared_ptr<const MonomialBasis> basis_;
    std::vector<double> coeffs_;
};

inline double distance(const MultiIndexMetric& a, const MultiIndexMetric& b) {
    if (a.basis().n() != b.basis().n() || a.basis().k() != b.basis().k()) {
        throw ValidationError("distance: metrics live on different spaces of sections");
    }
    return log_distance(a.coeffs(), b.coeffs());
}

inline void require_permutation(const Permutation& pi, int n) {
    if (pi.size() != static_cast<std::size_t>(n) + 1) {
        throw ValidationError("permutation must act on " + std::to_string(n + 1) + " symbols");
    }
    std::vector<bool> seen(pi.size(), false);
    for (int v : pi) {
        if (v < 0 || v > n || seen[v]) throw ValidationError("permutation is not a bijection");
        seen[v] = true;
    }
}

/// Index map induced on the basis by Z_j -> Z_{pi(j)}: result[i] is the
/// position of the image of basis element i.
inline std::vector<std::size_t> permutation_action(const MonomialBasis& basis,
                                                   const Permutation& pi) {
    require_permutation(pi, basis.n());
    std::vector<std::size_t> map(basis.size());
    MultiIndex image(static_cast<std::size_t>(basis.n()));
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const MultiIndex beta = basis.homogeneous(i);
        MultiIndex permuted(beta.size());
        for (std::size_t j = 0; j < beta.size(); ++j) permuted[pi[j]] = beta[j];
        std::copy(permuted.begin() + 1, permuted.end(), image.begin());
        map[i] = basis.index_of(image);
    }
    return map;
}

inline bool is_fixed_point_free(const Permutation& pi) {
    for (std::size_t j = 0; j < pi.size(); ++j) {
        if (pi[j] == static_cast<int>(j)) return false;
    }
    return true;
}

/// All (n+1)! permutations of the homogeneous coordinates, identity first.
inline std::vector<Permutation> all_permutations(int n) {
    Permutation pi(static_cast<std::size_t>(n) + 1);
    std::iota(pi.begin(), pi.end(), 0);
    std::vector<Permutation> out;
    do {
        out.push_back(pi);
    } while (std::next_permutation(pi.begin(), pi.end()));
    return out;
}

struct SymmetryClassification {
    std::vector<Permutation> invariant_under;       // includes the identity
    std::vector<std::vector<std::size_t>> orbits;   // sorted, ordered by smallest member
    bool generally_symmetric = false;
};

namespace detail {

inline std::vector<std::vector<std::size_t>>
orbits_of(std::size_t count, const std::vector<std::vector<std::size_t>>& maps) {
    std::vector<std::size_t> parent(count);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (const auto& map : maps) {
        for (std::size_t i = 0; i < count; ++i) {
            const std::size_t a = find(i);
            const std::size_t b = find(map[i]);
            if (a != b) parent[std::max(a, b)] = std::min(a, b);
        }
    }
    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < count; ++i) groups[find(i)].push_back(i);
    std::vector<std::vector<std::size_t>> out;
    for (auto& [root, members] : groups) out.push_back(std::move(members));
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace detail

/// Which coordinate permutations leave the metric unchanged (to relative tolerance).
inline SymmetryClassification classify_symmetry(const MultiIndexMetric& m,
                                                double tol = kDefaultPalindromicTol) {
    const MonomialBasis& basis = m.basis();
    SymmetryClassification result;
    std::vector<std::vector<std::size_t>> maps;
    for (const Permutation& pi : all_permutations(basis.n())) {
        const auto map = permutation_action(basis, pi);
        bool invariant = true;
        for (std::size_t i = 0; i < map.size() && invariant; ++i) {
            const double a = m[i];
            const double b = m[map[i]];
            invariant = std::abs(a - b) <= tol * std::max(a, b);
        }
        if (!invariant) continue;
        result.invariant_under.push_back(pi);
        if (is_fixed_point_free(pi)) result.generally_symmetric = true;
        maps.push_back(map);
    }
    result.orbits = detail::orbits_of(basis.size(), maps);
    return result;
}

/// Orbits of the full Sym(n+1) on the basis. For n = 3, k = 4 these are the
/// classes of 1, z_1, z_1^2, z_1 z_2, z_1 z_2 z_3.
inline std::vector<std::vector<std::size_t>> full_symmetry_orbits(const MonomialBasis& basis) {
    std::vector<std::vector<std::size_t>> maps;
    for (const Permutation& pi : all_permutations(basis.n())) {
        maps.push_back(permutation_action(basis, pi));
    }
    return detail::orbits_of(basis.size(), maps);
}

/// Fully symmetric metric from one value per Sym(n+1) orbit, orbits ordered
/// by their first basis position.
inline MultiIndexMetric metric_from_class_coeffs(std::shared_ptr<const MonomialBasis> basis,
                                                 std::span<const double> class_coeffs) {
    const auto orbits = full_symmetry_orbits(*basis);
    if (class_coeffs.size() != orbits.size()) {
        throw ValidationError("class coefficients: expected " + std::to_string(orbits.size()) +
                              " values for n = " + std::to_string(basis->n()) +
                              ", k = " + std::to_string(basis->k()) + ", got " +
                              std::to_string(class_coeffs.size()));
    }
    std::vector<double> coeffs(basis->size());
    for (std::size_t o = 0; o < orbits.size(); ++o) {
        for (std::size_t i : orbits[o]) coeffs[i] = class_coeffs[o];
    }
    return MultiIndexMetric(std::move(basis), std::move(coeffs));
}

/// One coefficient per Sym(n+1) orbit (the value at its first member).
inline std::vector<double> class_coeffs(const MultiIndexMetric& m) {
    std::vector<double> out;
    for (const auto& orbit : full_symmetry_orbits(m.basis())) out.push_back(m[orbit.front()]);
    return out;
}

/// a_beta = k! / beta!, the T_nu fixed point.
inline MultiIndexMetric fubini_study_metric(std::shared_ptr<const MonomialBasis> basis) {
    std::vector<double> coeffs(basis->size());
    for (std::size_t i = 0; i < basis->size(); ++i) {
        double c = 1.0;
        int used = 0;
        for (int e : basis->homogeneous(i)) {
            used += e;
            c *= binomial(used, e);
        }
        coeffs[i] = c;
    }
    return MultiIndexMetric(std::move(basis), std::move(coeffs));
}

inline MultiIndexMetric apply_Tnu_cpn(const MultiIndexMetric& m, const QuadratureOptions& opts,
                                      double symmetry_tol = kDefaultPalindromicTol) {
    const MonomialBasis& basis = m.basis();
    const int n = basis.n();
    const int k = basis.k();
    if (n < 1 || n > 3) {
        throw ValidationError("apply_Tnu_cpn: unsupported dimension n = " + std::to_string(n) +
                              " (supported: 1, 2, 3)");
    }
    const std::size_t dim = basis.size();

    // One integral per orbit of the metric's own symmetry group.
    const auto orbits = classify_symmetry(m, symmetry_tol).orbits;
    std::vector<std::size_t> reps;
    for (const auto& orbit : orbits) reps.push_back(orbit.front());

    const double scale = *std::max_element(m.coeffs().begin(), m.coeffs().end());
    std::vector<double> scaled(m.coeffs().begin(), m.coeffs().end());
    for (double& c : scaled) c /= scale;

    const auto stride = static_cast<std::size_t>(k) + 1;
    std::vector<double> powers(static_cast<std::size_t>(n) * stride);
    std::vector<double> monomials(dim);
    VectorIntegrandSpec spec{
        [&](std::span<const double> x, std::span<double> out) {
            double sum_x = 0.0;
            for (int d = 0; d < n; ++d) {
                double p = 1.0;
                for (std::size_t e = 0; e < stride; ++e) {
                    powers[d * stride + e] = p;
                    p *= x[d];
                }
                sum_x += x[d];
            }
            double poly = 0.0;
            for (std::size_t i = 0; i < dim; ++i) {
                const MultiIndex& alpha = basis[i];
                double w = 1.0;
                for (int d = 0; d < n; ++d) w *= powers[d * stride + alpha[d]];
                monomials[i] = w;
                poly += scaled[i] * w;
            }
            double vol = 1.0 + sum_x;
            double vol_pow = 1.0;
            for (int d = 0; d <= n; ++d) vol_pow *= vol;
            const double base = 1.0 / (poly * vol_pow);
            for (std::size_t o = 0; o < reps.size(); ++o) out[o] = monomials[reps[o]] * base;
        },
        reps.size(), Smoothness::rational};
    const auto r = integrate_box(spec, n, opts, BoxChart::projective);

    double n_factorial = 1.0;
    for (int d = 2; d <= n; ++d) n_factorial *= d;
    std::vector<double> out(dim);
    for (std::size_t o = 0; o < orbits.size(); ++o) {
        const double value = scale / (static_cast<double>(dim) * n_factorial * r.values[o]);
        if (!std::isfinite(value) || !(value > 0.0)) {
            throw NumericalError("apply_Tnu_cpn: produced a non-positive or non-finite coefficient");
        }
        for (std::size_t i : orbits[o]) out[i] = value;
    }
    return m.with_coeffs(std::move(out));
}

inline MultiIndexMetric apply_Tnu_cpn(const MultiIndexMetric& m) {
    return apply_Tnu_cpn(m, default_quadrature_options(m.basis().n()));
}

inline std::function<MultiIndexMetric(const MultiIndexMetric&)>
make_cpn_operator(QuadratureOptions opts) {
    return [opts](const MultiIndexMetric& m) { return apply_Tnu_cpn(m, opts); };
}

/// sum_i a_i / a'_i; equals N = dim H^0 after one application of T_nu.
inline double trace_relation(const MultiIndexMetric& m, const MultiIndexMetric& next) {
    if (m.size() != next.size()) throw ValidationError("trace_relation: dimension mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) sum += m[i] / next[i];
    return sum;
}

/// Conjectured asymptotic contraction ratio of T_nu on CP^n:
/// (k-1)k / ((k+n+1)(k+n+2)) for generally symmetric starts, k / (k+n+1) otherwise.
inline double sigma_predict_cpn(int n, int k, bool generally_symmetric) {
    if (n < 1 || k < 1) throw ValidationError("sigma_predict_cpn: need n >= 1 and k >= 1");
    const double kd = k;
    const double nd = n;
    if (generally_symmetric) return (kd - 1.0) * kd / ((kd + nd + 1.0) * (kd + nd + 2.0));
    return kd / (kd + nd + 1.0);
}

} // namespace balmetric
