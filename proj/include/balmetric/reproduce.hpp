#pragma once

// Regenerates a reference table and diffs it cell by cell.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "balmetric/cp1_operators.hpp"
#include "balmetric/cpn_operators.hpp"
#include "balmetric/dynamics.hpp"
#include "balmetric/golden_tables.hpp"

namespace balmetric {

struct CellFailure {
    int r = 0;
    std::string column;
    double got = 0.0;
    double expected = 0.0;
    double tol = 0.0;
};

struct ReproductionReport {
    std::string id;
    std::vector<std::string> columns;
    std::vector<int> rows;
    std::vector<std::vector<double>> computed;  // same layout as the golden table
    std::vector<double> max_abs_dev;            // per column, over non-blank cells
    std::vector<CellFailure> failures;
    std::size_t steps_checked = 0;              // trajectory length used for the bound check
    std::size_t bound_violations = 0;
    std::optional<ContractionWitness> witness;  // t-k6 only
    double seconds = 0.0;

    bool passed() const { return failures.empty() && bound_violations == 0; }
};

inline const golden::Table& golden_table(std::string_view id) {
    if (id == "tk-k2") return golden::tk_k2();
    if (id == "tnu-k3") return golden::tnu_k3();
    if (id == "t-k6") return golden::t_k6();
    if (id == "cpn-k4") return golden::cpn_k4();
    throw ValidationError("unknown table '" + std::string(id) +
                          "' (expected tk-k2, tnu-k3, t-k6 or cpn-k4)");
}

namespace detail {

template <Metric M>
std::size_t count_bound_violations(const Trajectory<M>& t) {
    std::size_t bad = 0;
    for (std::size_t r = 0; r < t.err.size(); ++r) {
        if (!(t.err[r] < t.bound[r])) ++bad;
    }
    return bad;
}

inline void compare(const golden::Table& table, ReproductionReport& report) {
    report.max_abs_dev.assign(table.columns.size(), 0.0);
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            const double expected = table.values[i][c];
            if (std::isnan(expected)) continue;
            const double got = report.computed[i][c];
            const double dev = std::fabs(got - expected);
            report.max_abs_dev[c] = std::max(report.max_abs_dev[c], std::isnan(dev) ? INFINITY : dev);
            const auto& tol = table.tolerances[c];
            const double allowed = std::max(tol.abs, tol.rel * std::fabs(expected));
            if (!(dev <= allowed)) {
                report.failures.push_back({table.rows[i], table.columns[c], got, expected, allowed});
            }
        }
    }
}

inline DiagonalMetric table_start(std::string_view id) {
    if (id == "tk-k2") return DiagonalMetric({1.0, 17.0, 36.0});
    if (id == "tnu-k3") return DiagonalMetric({1.0, 25.0, 0.07, 13.0});
    return DiagonalMetric({1.0, 6000.0, 150000.0, 2e10, 150000.0, 6000.0, 1.0});
}

} // namespace detail

/// Start metric of a CP^1 reference table (unscaled), or the figure example "figure".
inline DiagonalMetric example_metric(std::string_view id) {
    if (id == "figure") return DiagonalMetric({1.0, 300.0, 300.0, 300.0, 1.0});
    if (id == "tk-k2" || id == "tnu-k3" || id == "t-k6") return detail::table_start(id);
    throw ValidationError("unknown example '" + std::string(id) +
                          "' (expected tk-k2, tnu-k3, t-k6 or figure)");
}

inline ReproductionReport reproduce(std::string_view id) {
    const golden::Table& table = golden_table(id);
    const auto start = std::chrono::steady_clock::now();
    ReproductionReport report;
    report.id = table.id;
    report.columns = table.columns;
    report.rows = table.rows;
    const std::size_t steps = static_cast<std::size_t>(table.rows.back());

    if (id == "cpn-k4") {
        auto basis = std::make_shared<const MonomialBasis>(3, 4);
        const double start_classes[] = {1.0, 20.0, 30.0, 40.0, 50.0};
        const auto g0 = metric_from_class_coeffs(basis, start_classes);
        const auto t = cpn_trajectory(g0, steps, NormalizationMode::first_coeff_one,
                                      default_quadrature_options(3));
        const auto orbits = full_symmetry_orbits(*basis);
        const auto sigma = coordinate_sigma_series(t, orbits[1].front());
        for (int r : table.rows) {
            std::vector<double> row;
            for (std::size_t o = 1; o < orbits.size(); ++o) row.push_back(t.iterates[r][orbits[o].front()]);
            row.push_back(sigma[r].value_or(std::nan("")));
            report.computed.push_back(std::move(row));
        }
        report.steps_checked = t.err.size();
        report.bound_violations = detail::count_bound_violations(t);
    } else {
        const OperatorKind kind = id == "tk-k2"    ? OperatorKind::TK
                                  : id == "tnu-k3" ? OperatorKind::Tnu
                                                   : OperatorKind::T;
        const auto t = cp1_trajectory(kind, detail::table_start(id), steps,
                                      NormalizationMode::balanced_first_entry_one);
        const std::size_t listed = table.columns.size() - 2;  // coefficient columns
        for (int r : table.rows) {
            std::vector<double> row(t.iterates[r].coeffs().begin(),
                                    t.iterates[r].coeffs().begin() + static_cast<std::ptrdiff_t>(listed));
            row.push_back(t.err[r]);
            row.push_back(t.bound[r]);
            report.computed.push_back(std::move(row));
        }
        report.steps_checked = t.err.size();
        report.bound_violations = detail::count_bound_violations(t);
        if (id == "t-k6") report.witness = make_witness(t.err[0], t.err[1]);
    }

    detail::compare(table, report);
    report.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

} // namespace balmetric
