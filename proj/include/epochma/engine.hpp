#pragma once

#include <epochma/portfolio.hpp>
#include <epochma/random.hpp>
#include <epochma/variation.hpp>

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace epochma {

struct EngineConfig {
    std::size_t pop_size = 400;
    double crossover_rate = 0.8;
    double mutation_rate = 0.005; // per gene
    double sbx_eta = 0.0;
    double pm_eta = 20.0;
    std::size_t cardinality = 18;
    std::size_t eval_budget = 20000;
    std::uint64_t rng_seed = 1;

    void validate() const
    {
        auto fail = [](const std::string& what) { throw std::invalid_argument("EngineConfig: " + what); };
        if (pop_size < 2 || pop_size % 2 != 0) fail("population size must be even and at least 2");
        if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0)) fail("crossover rate must lie in [0,1]");
        if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) fail("mutation rate must lie in [0,1]");
        if (!(sbx_eta >= 0.0)) fail("SBX distribution index must be >= 0");
        if (!(pm_eta >= 0.0)) fail("mutation distribution index must be >= 0");
        if (cardinality < 1) fail("cardinality must be at least 1");
        if (eval_budget < pop_size) fail("evaluation budget must cover at least one population");
    }
};

/// One member of a run. `portfolio` is always repair(genome) evaluated;
/// `fitness`, `rank` and `crowding` are scratch values owned by the engine.
struct Individual {
    Genome genome;
    Portfolio portfolio;
    double fitness = 0.0;
    std::size_t rank = 0;
    double crowding = 0.0;

    const ObjectivePoint& objectives() const { return portfolio.point(); }
    double sharpe() const { return portfolio.sharpe(); }
};

struct Population {
    std::vector<Individual> members;
    std::size_t generation = 0;
    std::size_t evaluations_used = 0;
    std::size_t ls_evaluations = 0; // subset of evaluations_used spent by local search

    std::size_t size() const { return members.size(); }
};

/// Builds an evaluated individual from a raw genome. An all-zero genome has
/// no repair, so it is replaced by the uniform allocation.
inline Individual make_individual(const AssetUniverse& u, Genome genome, std::size_t k)
{
    if (support_size(genome) == 0) genome.assign(genome.size(), 1.0 / static_cast<double>(genome.size()));
    auto portfolio = Portfolio::repaired(u, genome, k);
    return Individual{std::move(genome), std::move(portfolio)};
}

template <std::uniform_random_bit_generator G>
Population initialize(const EngineConfig& cfg, const AssetUniverse& u, G& gen)
{
    cfg.validate();
    Population pop;
    pop.members.reserve(cfg.pop_size);
    const std::size_t n = u.size();
    for (std::size_t m = 0; m < cfg.pop_size; ++m) {
        Genome g(n);
        double sum = 0.0;
        for (auto& x : g) sum += (x = uniform01(gen));
        if (sum > 0.0)
            for (auto& x : g) x /= sum;
        pop.members.push_back(make_individual(u, std::move(g), cfg.cardinality));
    }
    pop.evaluations_used = cfg.pop_size;
    return pop;
}

/// True when another generation of `pop_size` evaluations fits the budget.
inline bool can_step(const Population& pop, const EngineConfig& cfg)
{
    return pop.evaluations_used + cfg.pop_size <= cfg.eval_budget;
}

inline void require_budget(const Population& pop, const EngineConfig& cfg)
{
    if (!can_step(pop, cfg)) throw std::runtime_error("evaluation budget exhausted");
}

/// Binary tournament with replacement; `better(a, b)` is a strict preference
/// and ties go to the first contestant.
template <std::uniform_random_bit_generator G, class Better>
std::size_t binary_tournament(std::size_t n, Better&& better, G& gen)
{
    const std::size_t a = uniform_index(gen, n);
    const std::size_t b = uniform_index(gen, n);
    return better(b, a) ? b : a;
}

struct NoSelectionHook {
    template <class G>
    void operator()(Individual&, G&) const {}
};

struct NoOffspringHook {
    template <class G>
    void operator()(Individual&, std::size_t&, G&) const {}
};

/// Shared variation pipeline: mu tournaments fill the mating pool (each
/// winner passes through `on_selected`), consecutive pairs are recombined,
/// mutated, repaired and evaluated, and each child passes through
/// `on_offspring`, which may spend further evaluations. Every evaluation is
/// charged to `evaluations`.
template <std::uniform_random_bit_generator G, class Better, class OnSelected = NoSelectionHook,
          class OnOffspring = NoOffspringHook>
std::vector<Individual> breed(const std::vector<Individual>& parents, Better&& better, const EngineConfig& cfg,
                              const AssetUniverse& u, G& gen, std::size_t& evaluations,
                              OnSelected&& on_selected = {}, OnOffspring&& on_offspring = {})
{
    const std::size_t mu = cfg.pop_size;
    std::vector<Individual> pool;
    pool.reserve(mu);
    for (std::size_t i = 0; i < mu; ++i) {
        pool.push_back(parents[binary_tournament(parents.size(), better, gen)]);
        on_selected(pool.back(), gen);
    }

    std::vector<Individual> offspring;
    offspring.reserve(mu);
    for (std::size_t i = 0; i + 1 < mu; i += 2) {
        auto [g1, g2] = sbx_crossover(pool[i].genome, pool[i + 1].genome, cfg.sbx_eta, cfg.crossover_rate, gen);
        for (Genome* g : {&g1, &g2}) {
            poly_mutation(*g, cfg.pm_eta, cfg.mutation_rate, gen);
            offspring.push_back(make_individual(u, std::move(*g), cfg.cardinality));
            ++evaluations;
            on_offspring(offspring.back(), evaluations, gen);
        }
    }
    return offspring;
}

/// Minimization-form objective vector used inside the engines.
inline std::array<double, 2> minimization_form(const ObjectivePoint& p) { return {p.risk, -p.ret}; }

/// Objectives of `pop` rescaled to [0, 1] per axis by the population's own
/// ranges (degenerate axes map to 0).
inline std::vector<std::array<double, 2>> normalized_objectives(const std::vector<Individual>& pop)
{
    std::vector<std::array<double, 2>> f(pop.size());
    std::array<double, 2> lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    std::array<double, 2> hi{-lo[0], -lo[1]};
    for (std::size_t i = 0; i < pop.size(); ++i) {
        f[i] = minimization_form(pop[i].objectives());
        for (int d = 0; d < 2; ++d) {
            lo[d] = std::min(lo[d], f[i][d]);
            hi[d] = std::max(hi[d], f[i][d]);
        }
    }
    for (auto& x : f)
        for (int d = 0; d < 2; ++d) x[d] = hi[d] > lo[d] ? (x[d] - lo[d]) / (hi[d] - lo[d]) : 0.0;
    return f;
}

} // namespace epochma
