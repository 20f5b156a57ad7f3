#include "mxconf/quantile.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace mxconf;

TEST(LowerQuantile, NinthOfTenAtPointNine) {
    Eigen::VectorXd s(10);
    for (int i = 0; i < 10; ++i) s(i) = i + 1;
    EXPECT_EQ(lower_quantile(s, 0.9), 9.0);
}

TEST(LowerQuantile, BetaOneIsMaximum) {
    const Eigen::VectorXd s = (Eigen::VectorXd(5) << 3, -1, 7, 2, 7).finished();
    EXPECT_EQ(lower_quantile(s, 1.0), 7.0);
}

TEST(LowerQuantile, SingleScore) {
    const Eigen::VectorXd s = Eigen::VectorXd::Constant(1, 0.42);
    for (double beta : {0.01, 0.5, 1.0}) EXPECT_EQ(lower_quantile(s, beta), 0.42);
}

TEST(LowerQuantile, RankIsExactOnRepresentableProducts) {
    EXPECT_EQ(lower_quantile_rank(0.9, 50), 45);
    EXPECT_EQ(lower_quantile_rank(0.9, 20), 18);
    EXPECT_EQ(lower_quantile_rank(0.9, 10), 9);
    EXPECT_EQ(lower_quantile_rank(0.9, 11), 10);
    EXPECT_EQ(lower_quantile_rank(0.7, 10), 7);
    EXPECT_EQ(lower_quantile_rank(0.01, 10), 1);
}

TEST(LowerQuantile, MatchesSortOracle) {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> len(1, 40);
    std::uniform_int_distribution<int> val(0, 5);
    std::uniform_real_distribution<double> beta(0.01, 1.0);
    for (int trial = 0; trial < 2000; ++trial) {
        const int n = len(rng);
        Eigen::VectorXd s(n);
        std::vector<double> v(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = s(i) = val(rng);
        const double b = beta(rng);
        std::size_t k = 1;
        while (static_cast<double>(k) < b * n - 1e-9) ++k;
        ASSERT_EQ(lower_quantile(s, b), oracle::kth_smallest(v, k)) << "n=" << n << " beta=" << b;
    }
}

TEST(LowerQuantile, RejectsInvalidInput) {
    EXPECT_THROW(lower_quantile(Eigen::VectorXd(), 0.5), std::invalid_argument);
    EXPECT_THROW(lower_quantile(Eigen::VectorXd::Zero(3), 0.0), std::invalid_argument);
    EXPECT_THROW(lower_quantile(Eigen::VectorXd::Zero(3), 1.5), std::invalid_argument);
}
