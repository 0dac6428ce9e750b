#include "balmetric/quadrature.hpp"

#include <cmath>
#include <span>
#include <vector>

#include <gtest/gtest.h>

#include "balmetric/metric_space.hpp"

using namespace balmetric;

namespace {

IntegrandSpec beta_integrand(int q, int k) {
    return {[q, k](std::span<const double> x) { return std::pow(x[0], q) * std::pow(1.0 + x[0], -k - 2); }};
}

double beta_value(int q, int k) { return 1.0 / ((k + 1) * binomial(k, q)); }

} // namespace

TEST(GaussLegendre, UnitRuleBasics) {
    const auto& rule = gauss_legendre_unit(64);
    ASSERT_EQ(rule.t.size(), 64u);
    double sum = 0.0, moment = 0.0;
    for (std::size_t i = 0; i < rule.t.size(); ++i) {
        sum += rule.w[i];
        moment += rule.w[i] * std::pow(rule.t[i], 9);
        EXPECT_DOUBLE_EQ(rule.t[i], rule.one_minus_t[rule.t.size() - 1 - i]);
        if (i > 0) {
            EXPECT_LT(rule.t[i - 1], rule.t[i]);
        }
    }
    EXPECT_NEAR(sum, 1.0, 1e-15);
    EXPECT_NEAR(moment, 0.1, 1e-15);
}

TEST(GaussLegendre, GradedRuleIsSymmetricAndExact) {
    const auto& rule = graded_unit_rule(8);
    ASSERT_EQ(rule.t.size(), 8u * 2 * kGradedLevels);
    double sum = 0.0, moment = 0.0;
    for (std::size_t i = 0; i < rule.t.size(); ++i) {
        sum += rule.w[i];
        moment += rule.w[i] * std::pow(rule.t[i], 15);
        EXPECT_EQ(rule.t[i], rule.one_minus_t[rule.t.size() - 1 - i]);
        EXPECT_EQ(rule.w[i], rule.w[rule.t.size() - 1 - i]);
    }
    EXPECT_NEAR(sum, 1.0, 1e-15);
    EXPECT_NEAR(moment, 1.0 / 16.0, 1e-15);
    EXPECT_LT(rule.t.front(), 1e-12);
}

TEST(SemiInfinite, FeaturesManyDecadesApart) {
    // Two bumps, near x = 1e-6 and x = 1e6, each of unit mass.
    IntegrandSpec f{[](std::span<const double> x) {
        const double a = 1e-6, b = 1e6;
        return a / ((a + x[0]) * (a + x[0])) * 0.5 + b / ((b + x[0]) * (b + x[0])) * 0.5;
    }};
    EXPECT_NEAR(integrate_semi_infinite(f, 1e-11).value, 1.0, 1e-11);
}

TEST(SemiInfinite, Examples) {
    auto r1 = integrate_semi_infinite(IntegrandSpec{[](std::span<const double> x) {
                                          return 1.0 / ((1.0 + x[0]) * (1.0 + x[0]));
                                      }},
                                      1e-12);
    EXPECT_NEAR(r1.value, 1.0, 1e-12);
    auto r2 = integrate_semi_infinite(IntegrandSpec{[](std::span<const double> x) {
                                          return x[0] / std::pow(1.0 + x[0], 3);
                                      }},
                                      1e-12);
    EXPECT_NEAR(r2.value, 0.5, 1e-12);
    EXPECT_NEAR(integrate_semi_infinite(beta_integrand(1, 3), 1e-12).value, 1.0 / 12.0, 1e-13);
    // Independent oracle: a much finer fixed rule.
    EXPECT_NEAR(integrate_fixed(beta_integrand(1, 3), 1, 1024), 1.0 / 12.0, 1e-14);
}

TEST(SemiInfinite, BetaFamilyExact) {
    for (int k = 0; k <= 10; ++k) {
        for (int q = 0; q <= k; ++q) {
            const double want = beta_value(q, k);
            const double got = integrate_semi_infinite(beta_integrand(q, k), 1e-12).value;
            EXPECT_NEAR(got, want, 1e-11 * want) << "q=" << q << " k=" << k;
        }
    }
}

TEST(SemiInfinite, Linearity) {
    const auto f = beta_integrand(2, 5);
    const auto g = beta_integrand(4, 7);
    IntegrandSpec h{[&](std::span<const double> x) { return 3.0 * f.f(x) - 0.5 * g.f(x); }};
    const double a = integrate_semi_infinite(f, 1e-12).value;
    const double b = integrate_semi_infinite(g, 1e-12).value;
    EXPECT_NEAR(integrate_semi_infinite(h, 1e-12).value, 3.0 * a - 0.5 * b, 1e-13);
}

TEST(SemiInfinite, RefinementConvergesMonotonically) {
    // Slowly decaying member of the test family, so the small rules are visibly inexact.
    const auto f = beta_integrand(9, 10);
    const double want = beta_value(9, 10);
    double prev = INFINITY;
    for (int m : {4, 8, 16, 32, 64}) {
        const double err = std::fabs(integrate_fixed(f, 1, m) - want);
        EXPECT_LE(err, std::max(prev, 1e-15)) << m;
        prev = err;
    }
    EXPECT_LT(prev, 1e-14);
}

TEST(SemiInfinite, Errors) {
    IntegrandSpec bad{[](std::span<const double>) { return NAN; }};
    EXPECT_THROW(integrate_semi_infinite(bad, 1e-10), QuadratureError);
    IntegrandSpec singular{[](std::span<const double> x) { return 1.0 / std::sqrt(x[0]) / (1.0 + x[0]); }};
    QuadratureOptions tight{1e-14, 4, 16};
    try {
        integrate_semi_infinite(singular, tight);
        FAIL() << "expected QuadratureError";
    } catch (const QuadratureError& e) {
        EXPECT_NEAR(e.best_estimate(), M_PI, 0.5);
        EXPECT_GT(e.err_est(), 0.0);
    }
    EXPECT_THROW(integrate_semi_infinite(beta_integrand(0, 0), QuadratureOptions{0.0, 8, 64}), ValidationError);
    EXPECT_THROW(integrate_semi_infinite(beta_integrand(0, 0), QuadratureOptions{1e-10, 64, 64}), QuadratureError);
}

TEST(Box, VolumeExamples) {
    IntegrandSpec v2{[](std::span<const double> x) { return 2.0 / std::pow(1.0 + x[0] + x[1], 3); }};
    IntegrandSpec v3{[](std::span<const double> x) { return 6.0 / std::pow(1.0 + x[0] + x[1] + x[2], 4); }};
    IntegrandSpec prod{[](std::span<const double> x) {
        return 1.0 / ((1.0 + x[0]) * (1.0 + x[0]) * (1.0 + x[1]) * (1.0 + x[1]));
    }};
    EXPECT_NEAR(integrate_box(v2, 2).value, 1.0, 1e-9);
    EXPECT_NEAR(integrate_box(v3, 3).value, 1.0, 1e-7);
    EXPECT_NEAR(integrate_box(prod, 2, default_quadrature_options(2), BoxChart::per_axis).value, 1.0, 1e-9);
    EXPECT_NEAR(integrate_box(prod, 2).value, 1.0, 1e-9);
}

TEST(Box, MonomialMomentsOnProjectiveChart) {
    // int x1^a x2^b / (1 + x1 + x2)^(k+3) over the quadrant = a! b! (k-a-b)! / (k+2)!
    const int k = 4;
    for (int a = 0; a <= k; ++a) {
        for (int b = 0; a + b <= k; ++b) {
            IntegrandSpec f{[=](std::span<const double> x) {
                return std::pow(x[0], a) * std::pow(x[1], b) / std::pow(1.0 + x[0] + x[1], k + 3);
            }};
            const double want = std::tgamma(a + 1) * std::tgamma(b + 1) * std::tgamma(k - a - b + 1) /
                                std::tgamma(k + 3);
            EXPECT_NEAR(integrate_box(f, 2).value, want, 1e-9 * want) << a << "," << b;
        }
    }
}

TEST(Box, UnsupportedDimension) {
    IntegrandSpec f{[](std::span<const double>) { return 1.0; }};
    EXPECT_THROW(integrate_box(f, 4, default_quadrature_options(3)), ValidationError);
    EXPECT_THROW(integrate_box(f, 0, default_quadrature_options(1)), ValidationError);
    EXPECT_THROW(default_quadrature_options(4), ValidationError);
}

TEST(Box, VectorComponentsShareNodes) {
    VectorIntegrandSpec spec{[](std::span<const double> x, std::span<double> out) {
                                 const double base = 1.0 / std::pow(1.0 + x[0] + x[1], 5);
                                 out[0] = base;
                                 out[1] = x[0] * base;
                                 out[2] = x[0] * x[1] * base;
                             },
                             3};
    const auto r = integrate_box(spec, 2, default_quadrature_options(2));
    EXPECT_NEAR(r.values[0], 2.0 / 24.0, 1e-10);
    EXPECT_NEAR(r.values[1], 2.0 / 24.0 / 2.0, 1e-10);
    EXPECT_NEAR(r.values[2], 1.0 / 24.0, 1e-10);
}
