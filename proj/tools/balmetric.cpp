// balmetric: iterate T / T_nu / T_K on diagonal metrics, estimate rates,
// reproduce the reference tables and export density profiles.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "balmetric/balmetric.hpp"

namespace bm = balmetric;

namespace {

enum ExitCode { kOk = 0, kValidation = 1, kNumerical = 2, kMismatch = 3 };

struct MetricArgs {
    std::string op = "Tnu";
    int n = 1;
    int k = -1;
    std::string coeffs;
    std::string class_coeffs;
    std::string family;
    double c = 1.0;
};

struct RunArgs {
    std::size_t steps = 10;
    std::string normalize = "balanced";
    std::optional<double> tol;
    double conv_tol = bm::kDefaultConvTol;
    int max_iter = bm::kDefaultMaxIter;
    std::string out;
    std::string format = "csv";
};

void add_metric_options(CLI::App* cmd, MetricArgs& m) {
    cmd->add_option("--op", m.op, "Operator: T, Tnu or TK");
    cmd->add_option("--n", m.n, "Dimension of CP^n (1, 2 or 3)");
    cmd->add_option("--k", m.k, "Line bundle degree");
    cmd->add_option("--coeffs", m.coeffs, "Comma-separated coefficients a_0,...");
    cmd->add_option("--class-coeffs", m.class_coeffs, "One value per Sym(n+1) class (CP^n)");
    cmd->add_option("--family", m.family, "round, binomial, or an example: tk-k2, tnu-k3, t-k6, figure");
    cmd->add_option("--c", m.c, "Parameter of the binomial family");
}

bm::QuadratureOptions quadrature_options(int n, const std::optional<double>& tol) {
    auto opts = bm::default_quadrature_options(n);
    if (tol) opts.rel_tol = *tol;
    return opts;
}

int sources(const MetricArgs& m) {
    return !m.coeffs.empty() + !m.class_coeffs.empty() + !m.family.empty();
}

bm::DiagonalMetric cp1_metric(const MetricArgs& m) {
    if (sources(m) != 1) throw bm::ValidationError("give exactly one of --coeffs, --class-coeffs, --family");
    if (!m.class_coeffs.empty()) throw bm::ValidationError("--class-coeffs needs --n >= 2");
    std::optional<bm::DiagonalMetric> g;
    if (!m.coeffs.empty()) {
        g.emplace(bm::parse_number_list(m.coeffs));
    } else if (m.family == "round" || m.family == "binomial") {
        if (m.k < 0) throw bm::ValidationError("--family " + m.family + " needs --k");
        g = bm::balanced_coeffs({m.k, 1.0, m.family == "round" ? 1.0 : m.c});
    } else {
        g = bm::example_metric(m.family);
    }
    if (m.k >= 0 && g->degree() != m.k) {
        throw bm::ValidationError("--k " + std::to_string(m.k) + " does not match " +
                                  std::to_string(g->size()) + " coefficients");
    }
    return *g;
}

bm::MultiIndexMetric cpn_metric(const MetricArgs& m) {
    if (bm::parse_operator_kind(m.op) != bm::OperatorKind::Tnu) {
        throw bm::ValidationError("only Tnu is available for n >= 2");
    }
    if (m.n < 2 || m.n > 3) throw bm::ValidationError("--n must be 1, 2 or 3");
    if (m.k < 1) throw bm::ValidationError("--k >= 1 is required for n >= 2");
    if (sources(m) != 1) throw bm::ValidationError("give exactly one of --coeffs, --class-coeffs, --family");
    auto basis = std::make_shared<const bm::MonomialBasis>(m.n, m.k);
    if (!m.class_coeffs.empty()) {
        const auto values = bm::parse_number_list(m.class_coeffs);
        return bm::metric_from_class_coeffs(basis, values);
    }
    if (!m.coeffs.empty()) return bm::MultiIndexMetric(basis, bm::parse_number_list(m.coeffs));
    if (m.family == "round") return bm::fubini_study_metric(basis);
    throw bm::ValidationError("--family for n >= 2 must be round");
}

class OutputSink {
public:
    explicit OutputSink(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw bm::ValidationError("cannot open '" + path + "' for writing");
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

void emit(const RunArgs& run, const bm::TableMeta& meta, const std::vector<bm::TableRow>& rows) {
    if (run.format != "csv" && run.format != "json") {
        throw bm::ValidationError("--format must be csv or json");
    }
    OutputSink sink(run.out);
    if (run.format == "json") {
        bm::write_json(sink.stream(), meta, rows);
    } else {
        bm::write_csv(sink.stream(), rows);
    }
}

int cmd_iterate(const MetricArgs& m, const RunArgs& run) {
    const auto mode = bm::parse_normalization(run.normalize);
    bm::TableMeta meta;
    meta.op = m.op;
    meta.n = m.n;
    meta.normalization = std::string(bm::to_string(mode));
    meta.conv_tol = run.conv_tol;
    const auto opts = quadrature_options(m.n, run.tol);
    meta.rel_tol = opts.rel_tol;
    if (m.n == 1) {
        const auto kind = bm::parse_operator_kind(m.op);
        const auto g0 = cp1_metric(m);
        meta.op = std::string(bm::to_string(kind));
        meta.k = g0.degree();
        const auto t = bm::cp1_trajectory(kind, g0, run.steps, mode, opts, run.conv_tol, run.max_iter);
        emit(run, meta, bm::table_rows(t));
    } else {
        const auto g0 = cpn_metric(m);
        meta.op = "Tnu";
        meta.k = g0.degree();
        const auto t = bm::cpn_trajectory(g0, run.steps, mode, opts, run.conv_tol, run.max_iter);
        const auto sigma = bm::coordinate_sigma_series(t, 1);
        emit(run, meta, bm::table_rows(t, &sigma));
    }
    return kOk;
}

struct SigmaArgs {
    std::string symmetric = "false";
    std::optional<double> tol;
    std::uint64_t seed = 1;
    double conv_tol = bm::kDefaultConvTol;
    int max_iter = bm::kDefaultMaxIter;
};

bool parse_bool(const std::string& s) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw bm::ValidationError("expected true or false, got '" + s + "'");
}

int cmd_sigma(MetricArgs m, const SigmaArgs& args) {
    const bool symmetric = parse_bool(args.symmetric);
    std::mt19937_64 rng(args.seed);
    const auto opts = quadrature_options(m.n, args.tol);
    bm::SigmaRun res;
    if (m.n == 1) {
        const auto kind = bm::parse_operator_kind(m.op);
        if (sources(m) == 0) {
            if (m.k < 0) throw bm::ValidationError("--k is required without --coeffs");
            bm::require_applicable(kind, m.k);
            res = bm::sigma_run(kind, bm::random_cp1_metric(m.k, symmetric, rng), opts, args.conv_tol,
                                args.max_iter);
        } else {
            res = bm::sigma_run(kind, cp1_metric(m), opts, args.conv_tol, args.max_iter);
        }
    } else {
        if (sources(m) == 0) {
            if (bm::parse_operator_kind(m.op) != bm::OperatorKind::Tnu) {
                throw bm::ValidationError("only Tnu is available for n >= 2");
            }
            if (m.n > 3 || m.k < 1) throw bm::ValidationError("need n in {2, 3} and k >= 1");
            auto basis = std::make_shared<const bm::MonomialBasis>(m.n, m.k);
            res = bm::sigma_run(bm::random_cpn_metric(basis, symmetric, rng), opts, args.conv_tol,
                                args.max_iter);
        } else {
            res = bm::sigma_run(cpn_metric(m), opts, args.conv_tol, args.max_iter);
        }
    }
    std::cout << "sigma_estimated," << bm::format_double(res.estimated) << '\n'
              << "sigma_predicted," << bm::format_double(res.predicted) << '\n'
              << "abs_difference," << bm::format_double(std::fabs(res.estimated - res.predicted)) << '\n'
              << "iterations," << res.iterations << '\n'
              << "ratio_step," << res.step << '\n';
    return kOk;
}

int cmd_reproduce(const std::string& id) {
    const auto report = bm::reproduce(id);
    std::cout << "table " << report.id << " (" << report.rows.size() << " rows, "
              << bm::format_double(report.seconds) << " s)\n";
    for (std::size_t c = 0; c < report.columns.size(); ++c) {
        std::cout << "  max |dev| " << report.columns[c] << " = " << bm::format_double(report.max_abs_dev[c])
                  << '\n';
    }
    std::cout << "  bound holds at " << report.steps_checked - report.bound_violations << " of "
              << report.steps_checked << " steps\n";
    if (report.witness) {
        std::cout << "  contraction witness: err_0 = " << bm::format_double(report.witness->d0)
                  << ", err_1 = " << bm::format_double(report.witness->d1)
                  << (report.witness->increased ? " (increased)" : " (decreased)") << '\n';
    }
    for (const auto& f : report.failures) {
        std::cerr << "mismatch r=" << f.r << " " << f.column << ": got " << bm::format_double(f.got)
                  << ", expected " << bm::format_double(f.expected) << " (tol "
                  << bm::format_double(f.tol) << ")\n";
    }
    if (report.bound_violations > 0) std::cerr << "bound violated at " << report.bound_violations << " steps\n";
    std::cout << (report.passed() ? "PASS" : "FAIL") << '\n';
    return report.passed() ? kOk : kMismatch;
}

struct ProfileArgs {
    std::size_t steps = 4;
    double x_min = 1e-4;
    double x_max = 1e4;
    int points = 201;
    std::optional<double> tol;
    std::string out;
};

int cmd_profile(const MetricArgs& m, const ProfileArgs& args) {
    if (m.n != 1) throw bm::ValidationError("profile is available on CP^1 only");
    const auto kind = bm::parse_operator_kind(m.op);
    const auto g0 = cp1_metric(m);
    bm::require_applicable(kind, g0.degree());
    const auto xs = bm::log_grid(args.x_min, args.x_max, args.points);
    const auto iterates = bm::iterate(bm::make_cp1_operator(kind, quadrature_options(1, args.tol)), g0,
                                      args.steps);
    if (args.out.empty()) {
        std::cout << "r,x,rho\n";
        for (std::size_t r = 0; r < iterates.size(); ++r) {
            for (const auto& s : bm::density_profile(iterates[r], xs).samples) {
                std::cout << r << ',' << bm::format_double(s.x) << ',' << bm::format_double(s.rho) << '\n';
            }
        }
        return kOk;
    }
    for (std::size_t r = 0; r < iterates.size(); ++r) {
        const std::string path = args.out + "_r" + std::to_string(r) + ".csv";
        OutputSink sink(path);
        bm::write_profile_csv(sink.stream(), bm::density_profile(iterates[r], xs));
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Donaldson T-iterations on diagonal metrics over CP^n"};
    app.require_subcommand(1);

    MetricArgs iterate_metric;
    RunArgs iterate_run;
    auto* iterate = app.add_subcommand("iterate", "Iterate an operator and print the table");
    add_metric_options(iterate, iterate_metric);
    iterate->add_option("--steps", iterate_run.steps, "Number of iterations");
    iterate->add_option("--normalize", iterate_run.normalize, "none, balanced or first");
    iterate->add_option("--tol", iterate_run.tol, "Quadrature relative tolerance");
    iterate->add_option("--conv-tol", iterate_run.conv_tol, "Convergence tolerance for the limit");
    iterate->add_option("--max-iter", iterate_run.max_iter, "Iteration cap for the limit");
    iterate->add_option("--out", iterate_run.out, "Output path (default stdout)");
    iterate->add_option("--format", iterate_run.format, "csv or json");

    MetricArgs sigma_metric;
    SigmaArgs sigma_args;
    auto* sigma = app.add_subcommand("sigma", "Estimate the asymptotic ratio and compare with the prediction");
    add_metric_options(sigma, sigma_metric);
    sigma->add_option("--symmetric,--palindromic", sigma_args.symmetric,
                      "Random start is symmetric (true/false)");
    sigma->add_option("--seed", sigma_args.seed, "Seed for the random start");
    sigma->add_option("--tol", sigma_args.tol, "Quadrature relative tolerance");
    sigma->add_option("--conv-tol", sigma_args.conv_tol, "Convergence tolerance for the limit");
    sigma->add_option("--max-iter", sigma_args.max_iter, "Iteration cap");

    std::string table_id;
    auto* reproduce = app.add_subcommand("reproduce", "Regenerate a reference table and diff it");
    reproduce->add_option("table", table_id, "tk-k2, tnu-k3, t-k6 or cpn-k4")->required();

    MetricArgs profile_metric;
    ProfileArgs profile_args;
    auto* profile = app.add_subcommand("profile", "Curvature density samples of successive iterates");
    add_metric_options(profile, profile_metric);
    profile->add_option("--steps", profile_args.steps, "Number of iterations");
    profile->add_option("--x-min", profile_args.x_min, "Smallest sample of x = |z|^2");
    profile->add_option("--x-max", profile_args.x_max, "Largest sample");
    profile->add_option("--points", profile_args.points, "Number of log-spaced samples");
    profile->add_option("--tol", profile_args.tol, "Quadrature relative tolerance");
    profile->add_option("--out", profile_args.out, "Prefix; writes <prefix>_r<r>.csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kValidation;
    }

    try {
        if (*iterate) return cmd_iterate(iterate_metric, iterate_run);
        if (*sigma) return cmd_sigma(sigma_metric, sigma_args);
        if (*reproduce) return cmd_reproduce(table_id);
        if (*profile) return cmd_profile(profile_metric, profile_args);
    } catch (const bm::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const bm::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    }
    return kValidation;
}
