#include "balmetric/metric_space.hpp"

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "test_helpers.hpp"

using namespace balmetric;

TEST(Distance, Examples) {
    EXPECT_DOUBLE_EQ(distance(DiagonalMetric{1, 12, 36}, DiagonalMetric{1, 12, 36}), 0.0);
    EXPECT_NEAR(distance(DiagonalMetric{0.8826, 15.0043, 31.7738}, DiagonalMetric{1, 12, 36}), 0.2848, 5e-4);
    EXPECT_NEAR(distance(DiagonalMetric{1, 1}, DiagonalMetric{std::exp(1.0), std::exp(1.0)}), std::sqrt(2.0),
                1e-15);
}

TEST(Distance, Errors) {
    EXPECT_THROW(distance(DiagonalMetric{1, 2}, DiagonalMetric{1, 2, 3}), ValidationError);
    EXPECT_THROW(DiagonalMetric({1.0, 0.0}), ValidationError);
    EXPECT_THROW(DiagonalMetric({1.0, -2.0}), ValidationError);
    EXPECT_THROW(DiagonalMetric({1.0, NAN}), ValidationError);
    EXPECT_THROW(DiagonalMetric(std::vector<double>{}), ValidationError);
}

TEST(Distance, MetricAxiomsOnRandomPoints) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    auto draw = [&](int k) {
        std::vector<double> a(k + 1);
        for (double& v : a) v = std::exp(u(rng));
        return DiagonalMetric(a);
    };
    for (int trial = 0; trial < 200; ++trial) {
        const int k = 1 + trial % 6;
        const auto a = draw(k), b = draw(k), c = draw(k);
        EXPECT_DOUBLE_EQ(distance(a, b), distance(b, a));
        EXPECT_LE(distance(a, c), distance(a, b) + distance(b, c) + 1e-12);
        const double lambda = std::exp(u(rng));
        EXPECT_NEAR(distance(scale(a, lambda), scale(b, lambda)), distance(a, b), 1e-12);
    }
}

TEST(Scale, Examples) {
    EXPECT_EQ(scale(DiagonalMetric{1, 17, 36}, 1.0), (DiagonalMetric{1, 17, 36}));
    EXPECT_TRUE(coeffs_near(scale(DiagonalMetric{1, 17, 36}, 0.8826).coeffs(),
                            std::vector<double>{0.8826, 15.0043, 31.7738}, 5e-4));
    EXPECT_EQ(scale(DiagonalMetric{2, 4}, 0.5), (DiagonalMetric{1, 2}));
    EXPECT_THROW(scale(DiagonalMetric{1, 2}, 0.0), ValidationError);
    EXPECT_THROW(scale(DiagonalMetric{1, 2}, -1.0), ValidationError);
}

TEST(Palindromic, Examples) {
    EXPECT_TRUE(is_palindromic(DiagonalMetric{1, 300, 300, 300, 1}, 0.0));
    EXPECT_FALSE(is_palindromic(DiagonalMetric{1, 17, 36}, 0.0));
    EXPECT_TRUE(is_palindromic(DiagonalMetric{5}, 0.0));
    EXPECT_TRUE(is_palindromic(DiagonalMetric{1, 2, 1 + 1e-14}));
    EXPECT_FALSE(is_palindromic(DiagonalMetric{1, 2, 1 + 1e-6}));
    EXPECT_THROW(is_palindromic(DiagonalMetric{1, 2, 1}, -1.0), ValidationError);
}

TEST(Palindromic, ReversalIsInvolution) {
    const DiagonalMetric g{1, 17, 36, 2};
    EXPECT_EQ(reversed(reversed(g)), g);
    EXPECT_EQ(reversed(g), (DiagonalMetric{2, 36, 17, 1}));
}

TEST(BalancedFamily, Examples) {
    EXPECT_EQ(balanced_coeffs({2, 1.0, 6.0}), (DiagonalMetric{1, 12, 36}));
    EXPECT_EQ(balanced_coeffs({6, 1.0, 1.0}), (DiagonalMetric{1, 6, 15, 20, 15, 6, 1}));
    EXPECT_EQ(balanced_coeffs({1, 2.0, 3.0}), (DiagonalMetric{2, 6}));
    EXPECT_EQ(round_metric(3), (DiagonalMetric{1, 3, 3, 1}));
    EXPECT_THROW(balanced_coeffs({2, 0.0, 1.0}), ValidationError);
    EXPECT_THROW(balanced_coeffs({-1, 1.0, 1.0}), ValidationError);
}

TEST(BalancedFamily, UnitParameterIsPalindromic) {
    for (int k = 0; k <= 12; ++k) EXPECT_TRUE(is_palindromic(round_metric(k), 0.0)) << k;
    EXPECT_FALSE(is_palindromic(balanced_coeffs({3, 1.0, 2.0})));
}

TEST(PredictK2, Examples) {
    EXPECT_TRUE(coeffs_near(predict_balanced_direction_k2(DiagonalMetric{1, 17, 36}).coeffs(),
                            std::vector<double>{1, 12, 36}, 1e-15));
    EXPECT_EQ(predict_balanced_direction_k2(DiagonalMetric{1, 2, 1}), (DiagonalMetric{1, 2, 1}));
    EXPECT_EQ(predict_balanced_direction_k2(DiagonalMetric{4, 100, 9}), (DiagonalMetric{4, 12, 9}));
    EXPECT_THROW(predict_balanced_direction_k2(DiagonalMetric{1, 2}), ValidationError);
}

TEST(PredictK2, Idempotent) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.1, 50.0);
    for (int i = 0; i < 50; ++i) {
        const DiagonalMetric g{u(rng), u(rng), u(rng)};
        const auto p = predict_balanced_direction_k2(g);
        EXPECT_LT(distance(predict_balanced_direction_k2(p), p), 1e-13);
    }
}

TEST(TraceRelation, Examples) {
    EXPECT_DOUBLE_EQ(trace_relation(DiagonalMetric{1, 2, 1}, DiagonalMetric{1, 2, 1}), 3.0);
    EXPECT_DOUBLE_EQ(trace_relation(DiagonalMetric{1, 1, 1, 1}, DiagonalMetric{2, 2, 2, 2}), 2.0);
    EXPECT_THROW(trace_relation(DiagonalMetric{1, 1}, DiagonalMetric{1, 1, 1}), ValidationError);
}

TEST(Binomial, SmallValues) {
    EXPECT_EQ(binomial(6, 3), 20.0);
    EXPECT_EQ(binomial(4, 0), 1.0);
    EXPECT_EQ(binomial(10, 10), 1.0);
}
