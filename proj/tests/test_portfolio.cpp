#include <epochma/portfolio.hpp>

#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

using namespace epochma;
using testing_support::random_simplex;
using testing_support::random_universe;

namespace {

ObjectivePoint oracle_evaluate(const AssetUniverse& u, const std::vector<double>& w)
{
    long double ret = 0, var = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        ret += static_cast<long double>(w[i]) * u.mean_returns[i];
        for (std::size_t j = 0; j < w.size(); ++j) var += static_cast<long double>(w[i]) * w[j] * u.covariance(i, j);
    }
    return {static_cast<double>(std::sqrt(std::max<long double>(var, 0))), static_cast<double>(ret)};
}

AssetUniverse identity_universe(std::size_t n)
{
    AssetUniverse u;
    u.mean_returns.assign(n, 0.0);
    u.covariance = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) u.covariance(i, i) = 1.0;
    return u;
}

} // namespace

TEST(Evaluate, SingleAsset)
{
    std::mt19937_64 gen(1);
    const auto u = random_universe(5, gen);
    std::vector<double> w(5, 0.0);
    w[0] = 1.0;
    const auto p = evaluate(u, w);
    EXPECT_EQ(p.ret, u.mean_returns[0]);
    EXPECT_NEAR(p.risk, std::sqrt(u.covariance(0, 0)), 1e-15);
}

TEST(Evaluate, IdentityCovariance)
{
    const auto p = evaluate(identity_universe(2), std::vector<double>{0.5, 0.5});
    EXPECT_NEAR(p.risk * p.risk, 0.5, 1e-15);
    EXPECT_NEAR(p.risk, 0.70710678118654752, 1e-15);
}

TEST(Evaluate, DimensionMismatch)
{
    EXPECT_THROW(evaluate(identity_universe(3), std::vector<double>{0.5, 0.5}), std::invalid_argument);
}

TEST(Evaluate, MatchesDoubleSumOracle)
{
    std::mt19937_64 gen(2);
    for (int t = 0; t < 200; ++t) {
        const auto u = random_universe(5, gen);
        const auto w = random_simplex(5, gen);
        const auto a = evaluate(u, w);
        const auto b = oracle_evaluate(u, w);
        EXPECT_NEAR(a.risk, b.risk, 1e-12);
        EXPECT_NEAR(a.ret, b.ret, 1e-12);
    }
}

TEST(Evaluate, PermutationEquivariant)
{
    std::mt19937_64 gen(3);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 7;
        const auto u = random_universe(n, gen);
        const auto w = random_simplex(n, gen);
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), gen);

        AssetUniverse v = u;
        std::vector<double> pw(n);
        for (std::size_t i = 0; i < n; ++i) {
            v.mean_returns[i] = u.mean_returns[perm[i]];
            pw[i] = w[perm[i]];
            for (std::size_t j = 0; j < n; ++j) v.covariance(i, j) = u.covariance(perm[i], perm[j]);
        }
        const auto a = evaluate(u, w);
        const auto b = evaluate(v, pw);
        EXPECT_NEAR(a.risk, b.risk, 1e-12);
        EXPECT_NEAR(a.ret, b.ret, 1e-12);
    }
}

TEST(Sharpe, Arithmetic)
{
    EXPECT_DOUBLE_EQ(sharpe({0.20, 0.10}, 0.0), 0.5);
    EXPECT_EQ(sharpe({0.3, 0.01}, 0.01), 0.0);
    EXPECT_DOUBLE_EQ(sharpe({0.5, 0.03}, 0.01), 0.04);
}

TEST(Sharpe, DegenerateRisk)
{
    EXPECT_EQ(sharpe({0.0, 0.1}, 0.0), std::numeric_limits<double>::infinity());
    EXPECT_EQ(sharpe({0.0, -0.1}, 0.0), -std::numeric_limits<double>::infinity());
    EXPECT_EQ(sharpe({1e-13, 0.02}, 0.02), 0.0);
}

TEST(Dominates, Cases)
{
    EXPECT_TRUE(dominates({0.1, 0.5}, {0.2, 0.4}));
    EXPECT_FALSE(dominates({0.1, 0.5}, {0.1, 0.5}));
    EXPECT_FALSE(dominates({0.1, 0.4}, {0.2, 0.5}));
    EXPECT_FALSE(dominates({0.2, 0.5}, {0.1, 0.4}));
    EXPECT_TRUE(dominates({0.1, 0.5}, {0.1, 0.4}));
    EXPECT_TRUE(dominates({0.1, 0.5}, {0.2, 0.5}));
}

TEST(Sharpe, DominanceCoherence)
{
    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> risk(1e-3, 0.5), ret(0.0, 0.2), step(0.0, 0.1);
    for (int t = 0; t < 10000; ++t) {
        const double rf = ret(gen) * 0.1;
        ObjectivePoint b{risk(gen), rf + 1e-4 + ret(gen)};
        ObjectivePoint a{b.risk * (1.0 - step(gen)), b.ret + step(gen) * 0.1};
        if (t % 3 == 0) a.risk = b.risk; // equal risk, better return
        if (t % 3 == 1) a.ret = b.ret;   // equal return, lower risk
        if (!dominates(a, b)) continue;
        ASSERT_GT(sharpe(a, rf), sharpe(b, rf)) << t;
    }
}

TEST(Repair, Examples)
{
    const auto r = repair(std::vector<double>{0.5, 0.3, 0.2}, 2);
    EXPECT_NEAR(r[0], 0.625, 1e-15);
    EXPECT_NEAR(r[1], 0.375, 1e-15);
    EXPECT_EQ(r[2], 0.0);

    EXPECT_EQ(repair(std::vector<double>{0.4, 0.4, 0.2}, 1), (std::vector<double>{1.0, 0.0, 0.0}));

    const std::vector<double> ok{0.25, 0.0, 0.75};
    EXPECT_EQ(repair(ok, 2), ok);
}

TEST(Repair, ZeroesDoNotCount)
{
    const auto r = repair(std::vector<double>{0.0, 2.0, 0.0, 2.0}, 3);
    EXPECT_EQ(r, (std::vector<double>{0.0, 0.5, 0.0, 0.5}));
}

TEST(Repair, Errors)
{
    EXPECT_THROW(repair(std::vector<double>{0.0, 0.0}, 1), std::invalid_argument);
    EXPECT_THROW(repair(std::vector<double>{1.0, 0.0}, 0), std::invalid_argument);
    EXPECT_THROW(repair(std::vector<double>{1.0, -0.1}, 1), std::invalid_argument);
    EXPECT_THROW(repair(std::vector<double>{1.0, std::nan("")}, 1), std::invalid_argument);
}

TEST(Repair, Properties)
{
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> v(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> nd(1, 30);
    for (int t = 0; t < 10000; ++t) {
        const std::size_t n = nd(gen);
        std::uniform_int_distribution<std::size_t> kd(1, n);
        const std::size_t k = kd(gen);
        std::vector<double> w(n);
        for (auto& x : w) x = v(gen) < 0.2 ? 0.0 : v(gen);
        if (support_size(w) == 0) w[0] = 1.0;

        const auto r = repair(w, k);
        ASSERT_LE(support_size(r), k);
        ASSERT_NEAR(std::accumulate(r.begin(), r.end(), 0.0), 1.0, 1e-12);
        for (double x : r) ASSERT_GE(x, 0.0);
        ASSERT_EQ(repair(r, k), r);

        // retained entries are the k largest
        double min_kept = 2.0, max_dropped = -1.0;
        for (std::size_t i = 0; i < n; ++i)
            if (r[i] > 0.0) min_kept = std::min(min_kept, w[i]);
            else if (w[i] > 0.0) max_dropped = std::max(max_dropped, w[i]);
        ASSERT_GE(min_kept, max_dropped);
    }
}

TEST(Portfolio, CachesEvaluation)
{
    std::mt19937_64 gen(6);
    auto u = random_universe(4, gen, 0.001);
    const auto p = Portfolio::repaired(u, std::vector<double>{3.0, 1.0, 0.0, 0.0}, 18);
    EXPECT_EQ(p.weights(), (std::vector<double>{0.75, 0.25, 0.0, 0.0}));
    const auto pt = evaluate(u, p.weights());
    EXPECT_EQ(p.point().risk, pt.risk);
    EXPECT_EQ(p.point().ret, pt.ret);
    EXPECT_EQ(p.sharpe(), sharpe(pt, 0.001));
}
