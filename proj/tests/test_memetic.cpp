#include <epochma/runner.hpp>

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace epochma;

namespace {

Individual individual(const AssetUniverse& u, Weights w) { return Individual{w, Portfolio(u, w)}; }

// Three uncorrelated assets; the tangency Sharpe is sqrt(sum (mu_i / sigma_i)^2).
AssetUniverse three_assets()
{
    AssetUniverse u;
    u.mean_returns = {0.02, 0.01, 0.015};
    u.covariance = Matrix(3, 3);
    u.covariance(0, 0) = 0.04 * 0.04;
    u.covariance(1, 1) = 0.05 * 0.05;
    u.covariance(2, 2) = 0.06 * 0.06;
    return u;
}

double tangency_sharpe(const AssetUniverse& u)
{
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += u.mean_returns[i] * u.mean_returns[i] / u.covariance(i, i);
    return std::sqrt(s);
}

Portfolio portfolio_with_sharpe(double s)
{
    // one asset, mean s, unit variance
    static AssetUniverse u = [] {
        AssetUniverse v;
        v.mean_returns = {0.0, 0.0};
        v.covariance = Matrix(2, 2);
        v.covariance(0, 0) = 1.0;
        v.covariance(1, 1) = 1.0;
        return v;
    }();
    AssetUniverse local = u;
    local.mean_returns[0] = s;
    return Portfolio(local, Weights{1.0, 0.0});
}

Portfolio distinct(const AssetUniverse& u, std::mt19937_64& gen)
{
    return Portfolio(u, testing_support::random_simplex(u.size(), gen));
}

} // namespace

TEST(EpochWindow, HalfOpen)
{
    EXPECT_TRUE(is_active(EpochWindow{0, 50}, 0));
    EXPECT_TRUE(is_active(EpochWindow{0, 50}, 49));
    EXPECT_FALSE(is_active(EpochWindow{0, 50}, 50));
    EXPECT_FALSE(is_active(EpochWindow{20, 30}, 30));
    EXPECT_FALSE(is_active(EpochWindow{20, 30}, 19));
    EXPECT_TRUE(is_active(EpochWindow{20, 30}, 20));
}

TEST(EpochWindow, Validation)
{
    EXPECT_THROW((EpochWindow{10, 10}.validate()), std::invalid_argument);
    EXPECT_THROW((EpochWindow{0, 60}.validate(50)), std::invalid_argument);
    EXPECT_THROW((EpochWindow{0, 50, 1.5}.validate()), std::invalid_argument);
    EXPECT_THROW((EpochWindow{0, 50, 1.0, -0.1}.validate()), std::invalid_argument);
    EXPECT_THROW((EpochWindow{0, 50, 1.0, 1.0, 0}.validate()), std::invalid_argument);
    EXPECT_NO_THROW((EpochWindow{0, 50}.validate(50)));
}

TEST(EliteMemory, OfferRules)
{
    EliteMemory m(3);
    EXPECT_TRUE(m.offer(portfolio_with_sharpe(0.2)));
    EXPECT_EQ(m.size(), 1u);
    EXPECT_FALSE(m.offer(portfolio_with_sharpe(0.2))); // duplicate weights
    m.offer(portfolio_with_sharpe(0.5));
    EXPECT_EQ(m.size(), 1u); // same weight vector again

    std::mt19937_64 gen(1);
    const auto u = testing_support::random_universe(4, gen);
    EliteMemory full(3);
    for (int i = 0; i < 3; ++i) full.offer(distinct(u, gen));
    ASSERT_TRUE(full.full());
    const double worst = full[2].sharpe();

    // candidate below the minimum is rejected
    Portfolio low;
    do low = distinct(u, gen); while (!(low.sharpe() < worst));
    EXPECT_FALSE(full.offer(low));
    EXPECT_EQ(full.size(), 3u);

    // candidate above the minimum evicts it
    Portfolio high;
    do high = distinct(u, gen); while (!(high.sharpe() > worst));
    EXPECT_TRUE(full.offer(high));
    EXPECT_EQ(full.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_GT(full[i].sharpe(), worst);
    for (std::size_t i = 0; i + 1 < 3; ++i) EXPECT_GE(full[i].sharpe(), full[i + 1].sharpe());
}

TEST(EliteMemory, RandomOfferStreams)
{
    std::mt19937_64 gen(2);
    for (int stream = 0; stream < 20; ++stream) {
        const auto u = testing_support::random_universe(5, gen);
        EliteMemory m(30);
        double last_min = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < 500; ++i) {
            m.offer(distinct(u, gen));
            ASSERT_LE(m.size(), 30u);
            for (std::size_t j = 0; j + 1 < m.size(); ++j) ASSERT_GE(m[j].sharpe(), m[j + 1].sharpe());
            if (m.full()) {
                ASSERT_GE(m[m.size() - 1].sharpe(), last_min);
                last_min = m[m.size() - 1].sharpe();
            }
        }
    }
}

TEST(EmCorrect, Rules)
{
    const auto u = three_assets();
    Rng gen(3);
    const auto poor = individual(u, {0.0, 1.0, 0.0});
    const auto elite = individual(u, {1.0, 0.0, 0.0});
    EliteMemory m(30);
    m.offer(elite.portfolio);

    // at or above the mean: unchanged whatever p_em
    auto r = em_correct(m, poor, poor.sharpe(), 1.0, gen);
    EXPECT_EQ(r.portfolio.weights(), poor.portfolio.weights());
    // disabled
    r = em_correct(m, poor, 10.0, 0.0, gen);
    EXPECT_EQ(r.portfolio.weights(), poor.portfolio.weights());
    // empty memory
    r = em_correct(EliteMemory(30), poor, 10.0, 1.0, gen);
    EXPECT_EQ(r.portfolio.weights(), poor.portfolio.weights());
    // forced substitution
    r = em_correct(m, poor, 10.0, 1.0, gen);
    EXPECT_EQ(r.portfolio.weights(), elite.portfolio.weights());
    EXPECT_EQ(r.genome, elite.portfolio.weights());
    EXPECT_EQ(r.sharpe(), elite.sharpe());
}

TEST(LocalSearch, NeverWorsensAndSpendsBudget)
{
    const auto u = testing_support::dataset_universe();
    std::mt19937_64 wgen(4);
    Rng gen(4);
    for (int t = 0; t < 300; ++t) {
        const auto seed = make_individual(u, testing_support::random_simplex(u.size(), wgen), 18);
        const double s_bar = (t % 2) ? -1.0 : seed.sharpe();
        const auto res = local_search(seed, u, 18, 20.0, s_bar, 7, gen);
        ASSERT_EQ(res.evaluations, 7u);
        ASSERT_GE(res.individual.sharpe(), seed.sharpe());
        if (res.accepted == 0) {
            ASSERT_EQ(res.individual.portfolio.weights(), seed.portfolio.weights());
        } else {
            ASSERT_GT(res.individual.sharpe(), seed.sharpe());
            ASSERT_GT(res.individual.sharpe(), s_bar);
        }
        ASSERT_LE(support_size(res.individual.portfolio.weights()), 18u);
    }
}

TEST(LocalSearch, MeanSharpeGatesAcceptance)
{
    const auto u = three_assets();
    const auto seed = individual(u, {0.0, 0.5, 0.5});
    const double ceiling = tangency_sharpe(u); // no portfolio can exceed it

    // with a permissive mean some neighbour improves on the seed...
    Rng open(5);
    const auto free = local_search(seed, u, 3, 20.0, -1e9, 50, open);
    ASSERT_GT(free.accepted, 0u);
    ASSERT_GT(free.individual.sharpe(), seed.sharpe());

    // ...but with the same draws and a mean above every reachable Sharpe nothing is accepted
    Rng gated(5);
    const auto res = local_search(seed, u, 3, 20.0, ceiling + 1e-9, 50, gated);
    EXPECT_EQ(res.accepted, 0u);
    EXPECT_EQ(res.individual.portfolio.weights(), seed.portfolio.weights());
}

TEST(LocalSearch, SingleAssetSeed)
{
    const auto u = three_assets();
    const auto seed = individual(u, {0.0, 0.0, 1.0});
    Rng gen(6);
    const auto res = local_search(seed, u, 3, 20.0, -1.0, 20, gen);
    EXPECT_EQ(res.evaluations, 20u);
    EXPECT_GE(res.individual.sharpe(), seed.sharpe());
}

TEST(MeanSharpe, SkipsNonFinite)
{
    AssetUniverse u;
    u.mean_returns = {0.1, 0.2};
    u.covariance = Matrix(2, 2);
    u.covariance(1, 1) = 0.04;
    std::vector<Individual> v{individual(u, {1.0, 0.0}), individual(u, {0.0, 1.0})};
    EXPECT_TRUE(std::isinf(v[0].sharpe()));
    EXPECT_DOUBLE_EQ(mean_sharpe(v), 1.0);
    EXPECT_EQ(mean_sharpe({}), 0.0);
}

namespace {

EngineConfig quick_config()
{
    EngineConfig c;
    c.pop_size = 100;
    c.eval_budget = 5000;
    c.rng_seed = 21;
    return c;
}

void expect_same_population(const Population& a, const Population& b)
{
    ASSERT_EQ(a.generation, b.generation);
    ASSERT_EQ(a.evaluations_used, b.evaluations_used);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        ASSERT_EQ(a.members[i].genome, b.members[i].genome);
        ASSERT_EQ(a.members[i].portfolio.weights(), b.members[i].portfolio.weights());
        ASSERT_EQ(a.members[i].fitness, b.members[i].fitness);
    }
}

} // namespace

TEST(MemeticStep, InactiveWindowIsIbea)
{
    const auto u = testing_support::dataset_universe();
    const auto cfg = quick_config();
    Rng g1(9), g2(9);
    auto a = initialize(cfg, u, g1);
    auto b = initialize(cfg, u, g2);
    EliteMemory mem(30);
    const EpochWindow window{30, 40, 1.0, 1.0, 4};
    for (int i = 0; i < 10; ++i) {
        a = ibea_step(std::move(a), cfg, u, g1);
        b = memetic_step(std::move(b), cfg, window, mem, u, g2);
        expect_same_population(a, b);
    }
    EXPECT_TRUE(mem.empty());
}

TEST(MemeticStep, DisabledOperatorsAreIbea)
{
    const auto u = testing_support::dataset_universe();
    const auto cfg = quick_config();
    const auto ibea = run_algorithm(Algorithm::ibea, cfg, u).population;
    const auto ma = run_algorithm(Algorithm::ma, cfg, u, MemeticConfig{EpochWindow{0, 50, 0.0, 0.0, 4}, 30});
    expect_same_population(ibea, ma.population);
    EXPECT_EQ(ma.population.ls_evaluations, 0u);
}

TEST(MemeticStep, ActiveWindowFeedsMemoryAndCountsEvaluations)
{
    const auto u = testing_support::dataset_universe();
    auto cfg = quick_config();
    Rng gen(10);
    auto pop = initialize(cfg, u, gen);
    EliteMemory mem(30);
    const EpochWindow window{0, 50, 1.0, 1.0, 3};
    std::size_t engine = pop.evaluations_used;
    for (int i = 0; i < 5; ++i) {
        pop = memetic_step(std::move(pop), cfg, window, mem, u, gen);
        engine += cfg.pop_size;
        ASSERT_EQ(engine + pop.ls_evaluations, pop.evaluations_used);
    }
    EXPECT_EQ(pop.ls_evaluations, 5u * cfg.pop_size * 3u);
    EXPECT_TRUE(mem.full());
}

TEST(MemeticStep, LocalSearchStopsAtBudget)
{
    const auto u = testing_support::dataset_universe();
    for (std::size_t ls : {1u, 4u, 9u}) {
        auto cfg = quick_config();
        cfg.eval_budget = 4500;
        const auto out = run_algorithm(Algorithm::ma, cfg, u, MemeticConfig{EpochWindow{0, 50, 1.0, 1.0, ls}, 30});
        const auto& p = out.population;
        EXPECT_EQ(cfg.pop_size * (p.generation + 1) + p.ls_evaluations, p.evaluations_used);
        EXPECT_LE(p.evaluations_used, cfg.eval_budget + cfg.pop_size);
        EXPECT_FALSE(can_step(p, cfg));
    }
}
