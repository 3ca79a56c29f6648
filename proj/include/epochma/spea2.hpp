#pragma once

#include <epochma/engine.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace epochma {

namespace detail {

inline std::vector<double> pairwise_distances(const std::vector<std::array<double, 2>>& f)
{
    const std::size_t n = f.size();
    std::vector<double> d(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            d[i * n + j] = d[j * n + i] = std::hypot(f[i][0] - f[j][0], f[i][1] - f[j][1]);
    return d;
}

} // namespace detail

/// SPEA2 fitness F = R + D over the whole set: raw fitness R sums the
/// strengths of all dominators (0 for nondominated members) and the density
/// D = 1 / (sigma_k + 2) uses the k-th nearest neighbour with k = sqrt(N) in
/// range-normalized objective space. Smaller is better.
inline void assign_spea2_fitness(std::vector<Individual>& set)
{
    const std::size_t n = set.size();
    if (n == 0) return;
    std::vector<std::size_t> strength(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (dominates(set[i].objectives(), set[j].objectives())) ++strength[i];

    const auto dist = detail::pairwise_distances(normalized_objectives(set));
    const std::size_t kth = std::min<std::size_t>(static_cast<std::size_t>(std::sqrt(static_cast<double>(n))), n - 1);
    std::vector<double> row;
    for (std::size_t i = 0; i < n; ++i) {
        double raw = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            if (dominates(set[j].objectives(), set[i].objectives())) raw += static_cast<double>(strength[j]);

        double sigma = 0.0;
        if (n > 1) {
            row.clear();
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) row.push_back(dist[i * n + j]);
            std::nth_element(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(kth - 1), row.end());
            sigma = row[kth - 1];
        }
        set[i].fitness = raw + 1.0 / (sigma + 2.0);
    }
}

/// Archive truncation: repeatedly drops the member whose sorted list of
/// distances to the others is lexicographically smallest.
inline std::vector<std::size_t> spea2_truncate(const std::vector<std::array<double, 2>>& f, std::size_t target)
{
    const std::size_t n = f.size();
    const auto dist = detail::pairwise_distances(f);
    std::vector<std::size_t> alive(n);
    std::iota(alive.begin(), alive.end(), std::size_t{0});
    // sorted (distance, index) lists per member, kept in sync with `alive`
    std::vector<std::vector<std::pair<double, std::size_t>>> near(n);
    for (std::size_t i = 0; i < n; ++i) {
        near[i].reserve(n - 1);
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) near[i].emplace_back(dist[i * n + j], j);
        std::sort(near[i].begin(), near[i].end());
    }

    while (alive.size() > target) {
        std::size_t victim_pos = 0;
        for (std::size_t p = 1; p < alive.size(); ++p) {
            const auto& a = near[alive[p]];
            const auto& b = near[alive[victim_pos]];
            for (std::size_t k = 0; k < a.size(); ++k) {
                if (a[k].first < b[k].first) {
                    victim_pos = p;
                    break;
                }
                if (a[k].first > b[k].first) break;
            }
        }
        const std::size_t victim = alive[victim_pos];
        alive.erase(alive.begin() + static_cast<std::ptrdiff_t>(victim_pos));
        for (auto i : alive) {
            auto& lst = near[i];
            lst.erase(std::find_if(lst.begin(), lst.end(), [victim](const auto& e) { return e.second == victim; }));
        }
    }
    return alive;
}

/// Environmental selection onto an archive of size `mu`: nondominated members
/// first (truncated if too many), then the best dominated ones by fitness.
inline std::vector<Individual> spea2_environmental_selection(std::vector<Individual> set, std::size_t mu)
{
    assign_spea2_fitness(set);
    std::vector<std::size_t> nondominated;
    std::vector<std::size_t> dominated;
    for (std::size_t i = 0; i < set.size(); ++i) (set[i].fitness < 1.0 ? nondominated : dominated).push_back(i);

    std::vector<std::size_t> chosen;
    if (nondominated.size() > mu) {
        std::vector<Individual> nd;
        nd.reserve(nondominated.size());
        for (auto i : nondominated) nd.push_back(set[i]);
        for (auto p : spea2_truncate(normalized_objectives(nd), mu)) chosen.push_back(nondominated[p]);
    } else {
        chosen = nondominated;
        std::stable_sort(dominated.begin(), dominated.end(),
                         [&](auto a, auto b) { return set[a].fitness < set[b].fitness; });
        for (std::size_t i = 0; chosen.size() < mu && i < dominated.size(); ++i) chosen.push_back(dominated[i]);
    }
    std::sort(chosen.begin(), chosen.end());
    std::vector<Individual> archive;
    archive.reserve(chosen.size());
    for (auto i : chosen) archive.push_back(std::move(set[i]));
    return archive;
}

/// The population is the archive (size mu); offspring are bred from it by
/// tournament on fitness and merged back through environmental selection.
template <std::uniform_random_bit_generator G>
Population spea2_step(Population pop, const EngineConfig& cfg, const AssetUniverse& u, G& gen)
{
    require_budget(pop, cfg);
    assign_spea2_fitness(pop.members);
    const auto& m = pop.members;
    auto better = [&m](std::size_t a, std::size_t b) { return m[a].fitness < m[b].fitness; };
    auto offspring = breed(pop.members, better, cfg, u, gen, pop.evaluations_used);

    auto merged = std::move(pop.members);
    merged.insert(merged.end(), std::make_move_iterator(offspring.begin()), std::make_move_iterator(offspring.end()));
    pop.members = spea2_environmental_selection(std::move(merged), cfg.pop_size);
    ++pop.generation;
    return pop;
}

} // namespace epochma
