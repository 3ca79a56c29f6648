#pragma once

#include <epochma/engine.hpp>

#include <cmath>
#include <vector>

namespace epochma {

/// Fitness scaling factor of the IBEA recipe.
inline constexpr double ibea_kappa = 0.05;

namespace detail {

struct EpsilonTable {
    std::size_t n = 0;
    std::vector<double> values; // values[x * n + y] = I_eps+(x, y)
    double scale = 1.0;         // c * kappa

    double operator()(std::size_t x, std::size_t y) const { return values[x * n + y]; }
};

/// Additive epsilon indicator between every ordered pair, on objectives
/// normalized by the set's own ranges: the smallest shift that lets x weakly
/// dominate y.
inline EpsilonTable epsilon_table(const std::vector<Individual>& set, double kappa)
{
    const auto f = normalized_objectives(set);
    EpsilonTable t;
    t.n = set.size();
    t.values.assign(t.n * t.n, 0.0);
    double c = 0.0;
    for (std::size_t x = 0; x < t.n; ++x)
        for (std::size_t y = 0; y < t.n; ++y) {
            if (x == y) continue;
            const double eps = std::max(f[x][0] - f[y][0], f[x][1] - f[y][1]);
            t.values[x * t.n + y] = eps;
            c = std::max(c, std::abs(eps));
        }
    t.scale = (c > 0.0 ? c : 1.0) * kappa;
    return t;
}

} // namespace detail

/// F(x) = sum over y != x of -exp(-I(y, x) / (c * kappa)). Larger is better.
inline void assign_ibea_fitness(std::vector<Individual>& set, double kappa = ibea_kappa)
{
    const auto t = detail::epsilon_table(set, kappa);
    for (std::size_t x = 0; x < t.n; ++x) {
        double fit = 0.0;
        for (std::size_t y = 0; y < t.n; ++y)
            if (y != x) fit -= std::exp(-t(y, x) / t.scale);
        set[x].fitness = fit;
    }
}

/// Removes the worst-fitness member one at a time, updating the remaining
/// fitness values after each removal, until `mu` remain. Survivor order is
/// preserved.
inline std::vector<Individual> ibea_environmental_selection(std::vector<Individual> set, std::size_t mu,
                                                            double kappa = ibea_kappa)
{
    if (set.size() <= mu) {
        assign_ibea_fitness(set, kappa);
        return set;
    }
    const auto t = detail::epsilon_table(set, kappa);
    std::vector<double> fit(t.n, 0.0);
    for (std::size_t x = 0; x < t.n; ++x)
        for (std::size_t y = 0; y < t.n; ++y)
            if (y != x) fit[x] -= std::exp(-t(y, x) / t.scale);

    std::vector<bool> alive(t.n, true);
    for (std::size_t remaining = t.n; remaining > mu; --remaining) {
        std::size_t worst = t.n;
        for (std::size_t x = 0; x < t.n; ++x)
            if (alive[x] && (worst == t.n || fit[x] < fit[worst])) worst = x;
        alive[worst] = false;
        for (std::size_t x = 0; x < t.n; ++x)
            if (alive[x]) fit[x] += std::exp(-t(worst, x) / t.scale);
    }

    std::vector<Individual> survivors;
    survivors.reserve(mu);
    for (std::size_t x = 0; x < t.n; ++x)
        if (alive[x]) {
            set[x].fitness = fit[x];
            survivors.push_back(std::move(set[x]));
        }
    return survivors;
}

/// One IBEA generation with optional hooks on mating-selected parents and on
/// evaluated children. The memetic engine reuses this with its operators.
template <std::uniform_random_bit_generator G, class OnSelected = NoSelectionHook,
          class OnOffspring = NoOffspringHook>
Population ibea_generation(Population pop, const EngineConfig& cfg, const AssetUniverse& u, G& gen,
                           OnSelected&& on_selected = {}, OnOffspring&& on_offspring = {})
{
    require_budget(pop, cfg);
    assign_ibea_fitness(pop.members);
    const auto& m = pop.members;
    auto better = [&m](std::size_t a, std::size_t b) { return m[a].fitness > m[b].fitness; };

    auto offspring = breed(pop.members, better, cfg, u, gen, pop.evaluations_used,
                           std::forward<OnSelected>(on_selected), std::forward<OnOffspring>(on_offspring));

    auto merged = std::move(pop.members);
    merged.insert(merged.end(), std::make_move_iterator(offspring.begin()), std::make_move_iterator(offspring.end()));
    pop.members = ibea_environmental_selection(std::move(merged), cfg.pop_size);
    ++pop.generation;
    return pop;
}

template <std::uniform_random_bit_generator G>
Population ibea_step(Population pop, const EngineConfig& cfg, const AssetUniverse& u, G& gen)
{
    return ibea_generation(std::move(pop), cfg, u, gen);
}

} // namespace epochma
