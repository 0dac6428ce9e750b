#pragma once

// Random starting metrics and the sigma-law experiment: iterate to the
// limit, read off the latest reliable ratio and set it against the
// predicted rate.

#include <cmath>
#include <cstddef>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "balmetric/cp1_operators.hpp"
#include "balmetric/cpn_operators.hpp"
#include "balmetric/dynamics.hpp"

namespace balmetric {

/// Coefficients exp(u) with u uniform on [-spread, spread]; symmetrised
/// under i -> k - i when palindromic.
inline DiagonalMetric random_cp1_metric(int k, bool palindromic, std::mt19937_64& rng,
                                        double spread = 1.0) {
    if (k < 0) throw ValidationError("random_cp1_metric: k must be >= 0");
    std::uniform_real_distribution<double> u(-spread, spread);
    std::vector<double> logs(static_cast<std::size_t>(k) + 1);
    for (double& v : logs) v = u(rng);
    std::vector<double> a(logs.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = std::exp(palindromic ? 0.5 * (logs[i] + logs[a.size() - 1 - i]) : logs[i]);
    }
    return DiagonalMetric(std::move(a));
}

/// The cycle 0 -> 1 -> ... -> n -> 0 on homogeneous coordinates.
inline Permutation cyclic_shift(int n) {
    Permutation pi(static_cast<std::size_t>(n) + 1);
    for (int j = 0; j <= n; ++j) pi[j] = (j + 1) % (n + 1);
    return pi;
}

/// Random metric; when symmetric it is averaged (geometrically) over the
/// powers of the coordinate cycle, which has no fixed point.
inline MultiIndexMetric random_cpn_metric(std::shared_ptr<const MonomialBasis> basis, bool symmetric,
                                          std::mt19937_64& rng, double spread = 1.0) {
    std::uniform_real_distribution<double> u(-spread, spread);
    std::vector<double> logs(basis->size());
    for (double& v : logs) v = u(rng);
    if (symmetric) {
        const auto shift = permutation_action(*basis, cyclic_shift(basis->n()));
        std::vector<double> avg(logs.size(), 0.0);
        std::vector<std::size_t> pos(logs.size());
        for (std::size_t i = 0; i < pos.size(); ++i) pos[i] = i;
        for (int p = 0; p <= basis->n(); ++p) {
            for (std::size_t i = 0; i < pos.size(); ++i) {
                avg[i] += logs[pos[i]];
                pos[i] = shift[pos[i]];
            }
        }
        for (std::size_t i = 0; i < avg.size(); ++i) logs[i] = avg[i] / (basis->n() + 1);
    }
    std::vector<double> a(logs.size());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::exp(logs[i]);
    return MultiIndexMetric(std::move(basis), std::move(a));
}

struct SigmaRun {
    double estimated = 0.0;
    double predicted = 0.0;
    std::size_t iterations = 0;  // steps taken to reach the limit
    std::size_t step = 0;        // ratio err[step] / err[step-1] used
};

namespace detail {

template <Metric M>
SigmaRun finish_sigma_run(const std::string& op, const ConvergenceRun<M>& run, double predicted,
                          double floor) {
    const auto t = make_trajectory(op, run.iterates, run.iterates.back(),
                                   NormalizationMode::balanced_first_entry_one, floor);
    const SigmaEstimate est = sigma_estimate(t, floor);
    return {est.sigma, predicted, run.iterates.size() - 1, est.step};
}

} // namespace detail

inline SigmaRun sigma_run(OperatorKind kind, const DiagonalMetric& g0,
                          const QuadratureOptions& opts = default_quadrature_options(1),
                          double conv_tol = kDefaultConvTol, int max_iter = kDefaultMaxIter,
                          double floor = kDefaultErrFloor) {
    require_applicable(kind, g0.degree());
    const auto run = run_to_balance(make_cp1_operator(kind, opts), g0, conv_tol, max_iter);
    return detail::finish_sigma_run(std::string(to_string(kind)), run,
                                    sigma_closed_form(kind, g0.degree(), is_palindromic(g0)), floor);
}

inline SigmaRun sigma_run(const MultiIndexMetric& g0, const QuadratureOptions& opts,
                          double conv_tol = kDefaultConvTol, int max_iter = kDefaultMaxIter,
                          double floor = kDefaultErrFloor) {
    const auto run = run_to_balance(make_cpn_operator(opts), g0, conv_tol, max_iter);
    const bool symmetric = classify_symmetry(g0).generally_symmetric;
    return detail::finish_sigma_run("Tnu", run,
                                    sigma_predict_cpn(g0.basis().n(), g0.degree(), symmetric), floor);
}

} // namespace balmetric
