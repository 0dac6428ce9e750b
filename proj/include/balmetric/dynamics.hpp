#pragma once

// Trajectories of F^(r)(G), distance to the balanced limit, contraction
// ratios and the conjectured bound err_r < log(1 + e^{k d} sigma^r).

#include <cmath>
#include <concepts>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "balmetric/cp1_operators.hpp"
#include "balmetric/cpn_operators.hpp"
#include "balmetric/errors.hpp"
#include "balmetric/metric_space.hpp"

namespace balmetric {

template <class M>
concept Metric = requires(const M& m, std::vector<double> v) {
    { m.coeffs() } -> std::convertible_to<std::span<const double>>;
    { m.with_coeffs(std::move(v)) } -> std::same_as<M>;
    { m.degree() } -> std::convertible_to<int>;
};

template <class F, class M>
concept MetricOperator = Metric<M> && std::invocable<const F&, const M&> &&
                         std::same_as<std::invoke_result_t<const F&, const M&>, M>;

enum class NormalizationMode {
    none,
    balanced_first_entry_one,  // one factor for everything, chosen so B starts with 1
    first_coeff_one            // each metric scaled by its own first coefficient
};

inline std::string_view to_string(NormalizationMode mode) {
    switch (mode) {
    case NormalizationMode::none: return "none";
    case NormalizationMode::balanced_first_entry_one: return "balanced";
    case NormalizationMode::first_coeff_one: return "first";
    }
    return "?";
}

inline NormalizationMode parse_normalization(std::string_view name) {
    if (name == "none") return NormalizationMode::none;
    if (name == "balanced") return NormalizationMode::balanced_first_entry_one;
    if (name == "first") return NormalizationMode::first_coeff_one;
    throw ValidationError("unknown normalization '" + std::string(name) +
                          "' (expected none, balanced or first)");
}

inline constexpr double kDefaultConvTol = 1e-13;
inline constexpr int kDefaultMaxIter = 2000;
inline constexpr double kDefaultErrFloor = 1e-11;

template <Metric M>
M rescaled(const M& m, double lambda) {
    std::vector<double> out(m.coeffs().begin(), m.coeffs().end());
    for (double& v : out) v *= lambda;
    return m.with_coeffs(std::move(out));
}

/// Distance after scaling both metrics so their first coefficient is one.
template <Metric M>
double projective_distance(const M& a, const M& b) {
    return log_distance(rescaled(a, 1.0 / a.coeffs()[0]).coeffs(),
                        rescaled(b, 1.0 / b.coeffs()[0]).coeffs());
}

/// [G, F(G), ..., F^(steps)(G)].
template <Metric M, class F>
    requires MetricOperator<F, M>
std::vector<M> iterate(const F& op, const M& g0, std::size_t steps) {
    std::vector<M> out;
    out.reserve(steps + 1);
    out.push_back(g0);
    for (std::size_t r = 1; r <= steps; ++r) {
        try {
            out.push_back(op(out.back()));
        } catch (const IterationError&) {
            throw;
        } catch (const NumericalError& e) {
            throw IterationError(e.what(), r);
        }
    }
    return out;
}

template <Metric M>
struct ConvergenceRun {
    std::vector<M> iterates;  // G_0, ..., G_R with G_R the numerical limit
    double last_step = 0.0;
};

/// Iterates until successive iterates are within conv_tol projectively.
template <Metric M, class F>
    requires MetricOperator<F, M>
ConvergenceRun<M> run_to_balance(const F& op, const M& g0, double conv_tol = kDefaultConvTol,
                                 int max_iter = kDefaultMaxIter) {
    if (!(conv_tol > 0.0)) throw ValidationError("find_balanced: conv_tol must be > 0");
    if (max_iter < 1) throw ValidationError("find_balanced: max_iter must be >= 1");
    ConvergenceRun<M> run;
    run.iterates.push_back(g0);
    for (int r = 1; r <= max_iter; ++r) {
        try {
            run.iterates.push_back(op(run.iterates.back()));
        } catch (const NumericalError& e) {
            throw IterationError(e.what(), static_cast<std::size_t>(r));
        }
        const auto& prev = run.iterates[run.iterates.size() - 2];
        run.last_step = projective_distance(prev, run.iterates.back());
        if (run.last_step < conv_tol) return run;
    }
    const auto& last = run.iterates.back().coeffs();
    throw ConvergenceError("find_balanced: no convergence after " + std::to_string(max_iter) +
                               " iterations (last step " + std::to_string(run.last_step) + ")",
                           std::vector<double>(last.begin(), last.end()), run.last_step);
}

/// The balanced limit B = F^(inf)(G), unnormalised.
template <Metric M, class F>
    requires MetricOperator<F, M>
M find_balanced(const F& op, const M& g0, double conv_tol = kDefaultConvTol,
                int max_iter = kDefaultMaxIter) {
    return run_to_balance(op, g0, conv_tol, max_iter).iterates.back();
}

/// CP^1 variant: for k = 2 under T or T_K the limit must lie on the ray
/// predicted from a_0 and a_2; a mismatch signals a numerical problem.
inline DiagonalMetric find_balanced(OperatorKind kind, const DiagonalMetric& g0,
                                    const QuadratureOptions& opts = default_quadrature_options(1),
                                    double conv_tol = kDefaultConvTol,
                                    int max_iter = kDefaultMaxIter) {
    require_applicable(kind, g0.degree());
    DiagonalMetric b = find_balanced(make_cp1_operator(kind, opts), g0, conv_tol, max_iter);
    if (g0.degree() == 2 && kind != OperatorKind::Tnu) {
        const double dev = projective_distance(b, predict_balanced_direction_k2(g0));
        if (dev > 1e-8) {
            throw NumericalError("find_balanced: k = 2 limit deviates from the predicted direction by " +
                                 std::to_string(dev));
        }
    }
    return b;
}

template <Metric M>
struct Trajectory {
    std::string op;
    NormalizationMode normalization = NormalizationMode::none;
    std::vector<M> iterates;                       // normalised
    M balanced;                                    // normalised
    std::vector<double> err;                       // err[r] = dist(G_r, B)
    std::vector<std::optional<double>> sigma_tilde;  // [r] = err[r] / err[r-1], r >= 1
    std::vector<double> bound;                     // filled by attach_bound
};

/// Normalised iterates and normalised limit.
template <Metric M>
std::pair<std::vector<M>, M> normalize(const std::vector<M>& raw, const M& raw_balanced,
                                       NormalizationMode mode) {
    std::vector<M> out;
    out.reserve(raw.size());
    switch (mode) {
    case NormalizationMode::none: return {raw, raw_balanced};
    case NormalizationMode::balanced_first_entry_one: {
        const double s = 1.0 / raw_balanced.coeffs()[0];
        for (const M& m : raw) out.push_back(rescaled(m, s));
        return {std::move(out), rescaled(raw_balanced, s)};
    }
    case NormalizationMode::first_coeff_one:
        for (const M& m : raw) out.push_back(rescaled(m, 1.0 / m.coeffs()[0]));
        return {std::move(out), rescaled(raw_balanced, 1.0 / raw_balanced.coeffs()[0])};
    }
    throw ValidationError("normalize: unknown mode");
}

/// Builds the trajectory record from raw iterates and the raw limit.
template <Metric M>
Trajectory<M> make_trajectory(std::string op, const std::vector<M>& raw, const M& raw_balanced,
                              NormalizationMode mode, double floor = kDefaultErrFloor) {
    if (raw.empty()) throw ValidationError("trajectory: no iterates");
    auto [iterates, balanced] = normalize(raw, raw_balanced, mode);
    Trajectory<M> t{std::move(op), mode, std::move(iterates), std::move(balanced), {}, {}, {}};
    t.err.reserve(t.iterates.size());
    for (const M& m : t.iterates) t.err.push_back(log_distance(m.coeffs(), t.balanced.coeffs()));
    t.sigma_tilde.assign(t.err.size(), std::nullopt);
    for (std::size_t r = 1; r < t.err.size(); ++r) {
        if (t.err[r - 1] > floor) t.sigma_tilde[r] = t.err[r] / t.err[r - 1];
    }
    return t;
}

template <Metric M>
const std::vector<double>& error_series(const Trajectory<M>& t) {
    return t.err;
}

struct SigmaEstimate {
    double sigma = 0.0;
    std::size_t step = 0;  // ratio err[step] / err[step-1]
};

/// Last ratio err[r] / err[r-1] whose numerator is above the numeric floor.
inline SigmaEstimate sigma_estimate(std::span<const double> err, double floor = kDefaultErrFloor) {
    std::size_t reliable = 0;
    while (reliable < err.size() && err[reliable] > floor) ++reliable;
    if (reliable < 3) {
        throw NumericalError("sigma_estimate: need at least 3 iterates with err above " +
                             std::to_string(floor) + ", have " + std::to_string(reliable));
    }
    const std::size_t r = reliable - 1;
    return {err[r] / err[r - 1], r};
}

template <Metric M>
SigmaEstimate sigma_estimate(const Trajectory<M>& t, double floor = kDefaultErrFloor) {
    return sigma_estimate(std::span<const double>(t.err), floor);
}

/// (a_{j,r} - b_j) / (a_{j,r-1} - b_j) for r >= 1, on the normalised iterates.
template <Metric M>
std::vector<std::optional<double>> coordinate_sigma_series(const Trajectory<M>& t, std::size_t j) {
    if (j >= t.balanced.coeffs().size()) throw ValidationError("coordinate_sigma_series: bad index");
    std::vector<std::optional<double>> out(t.iterates.size(), std::nullopt);
    const double b = t.balanced.coeffs()[j];
    for (std::size_t r = 1; r < t.iterates.size(); ++r) {
        const double prev = t.iterates[r - 1].coeffs()[j] - b;
        if (prev != 0.0) out[r] = (t.iterates[r].coeffs()[j] - b) / prev;
    }
    return out;
}

/// Asymptotic contraction ratios on CP^1.
inline double sigma_closed_form(OperatorKind kind, int k, bool palindromic) {
    if (k < 1) throw ValidationError("sigma_closed_form: need k >= 1");
    const double kd = k;
    switch (kind) {
    case OperatorKind::Tnu:
        return palindromic ? (kd - 1.0) * kd / ((kd + 2.0) * (kd + 3.0)) : kd / (kd + 2.0);
    case OperatorKind::T: return (kd - 1.0) * (kd + 6.0) / ((kd + 2.0) * (kd + 3.0));
    case OperatorKind::TK: return (kd - 1.0) / (kd + 3.0);
    }
    throw ValidationError("sigma_closed_form: unknown operator");
}

/// log(1 + e^{k d} sigma^r), evaluated without overflow.
inline double bound_value(int k, double d, double sigma, std::size_t r) {
    double z = k * d;
    if (r > 0) {
        if (!(sigma > 0.0)) return 0.0;
        z += static_cast<double>(r) * std::log(sigma);
    }
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

struct BoundRow {
    double err = 0.0;
    double bnd = 0.0;
    bool ok = false;
};

template <Metric M>
std::vector<BoundRow> bound_series(const Trajectory<M>& t, double sigma) {
    const int k = t.iterates.front().degree();
    const double d = t.err.front();
    std::vector<BoundRow> rows;
    rows.reserve(t.err.size());
    for (std::size_t r = 0; r < t.err.size(); ++r) {
        const double bnd = bound_value(k, d, sigma, r);
        rows.push_back({t.err[r], bnd, t.err[r] < bnd});
    }
    return rows;
}

template <Metric M>
void attach_bound(Trajectory<M>& t, double sigma) {
    t.bound.clear();
    for (const BoundRow& row : bound_series(t, sigma)) t.bound.push_back(row.bnd);
}

struct ContractionWitness {
    double d0 = 0.0;
    double d1 = 0.0;
    bool increased = false;  // by more than the numeric floor
};

inline ContractionWitness make_witness(double d0, double d1, double floor = kDefaultErrFloor) {
    return {d0, d1, d1 - d0 > floor};
}

/// Distances of G and F(G) to the limit, with everything scaled so B starts with 1.
inline ContractionWitness contraction_witness(OperatorKind kind, const DiagonalMetric& g,
                                              const QuadratureOptions& opts =
                                                  default_quadrature_options(1)) {
    const DiagonalMetric b = find_balanced(kind, g, opts);
    const DiagonalMetric g1 = apply(kind, g, opts);
    const double s = 1.0 / b[0];
    const double d0 = distance(scale(g, s), scale(b, s));
    const double d1 = distance(scale(g1, s), scale(b, s));
    return make_witness(d0, d1);
}

/// Full CP^1 record: R steps from G_0, limit by iteration to convergence.
inline Trajectory<DiagonalMetric>
cp1_trajectory(OperatorKind kind, const DiagonalMetric& g0, std::size_t steps,
               NormalizationMode mode, const QuadratureOptions& opts = default_quadrature_options(1),
               double conv_tol = kDefaultConvTol, int max_iter = kDefaultMaxIter) {
    require_applicable(kind, g0.degree());
    const auto op = make_cp1_operator(kind, opts);
    const DiagonalMetric b = find_balanced(kind, g0, opts, conv_tol, max_iter);
    auto t = make_trajectory(std::string(to_string(kind)), iterate(op, g0, steps), b, mode);
    attach_bound(t, sigma_closed_form(kind, g0.degree(), is_palindromic(g0)));
    return t;
}

inline Trajectory<MultiIndexMetric>
cpn_trajectory(const MultiIndexMetric& g0, std::size_t steps, NormalizationMode mode,
               const QuadratureOptions& opts, double conv_tol = kDefaultConvTol,
               int max_iter = kDefaultMaxIter) {
    const auto op = make_cpn_operator(opts);
    const MultiIndexMetric b = find_balanced(op, g0, conv_tol, max_iter);
    auto t = make_trajectory(std::string("Tnu"), iterate(op, g0, steps), b, mode);
    const bool symmetric = classify_symmetry(g0).generally_symmetric;
    attach_bound(t, sigma_predict_cpn(g0.basis().n(), g0.degree(), symmetric));
    return t;
}

} // namespace balmetric
