#pragma once

#include <epochma/engine.hpp>

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

namespace epochma {

/// Fast nondominated sort. Returns fronts of indices, best first; indices
/// within a front are ascending.
inline std::vector<std::vector<std::size_t>> nondominated_sort(const std::vector<ObjectivePoint>& pts)
{
    const std::size_t n = pts.size();
    std::vector<std::vector<std::size_t>> dominated_by(n);
    std::vector<std::size_t> domination_count(n, 0);
    std::vector<std::vector<std::size_t>> fronts(1);

    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = 0; q < n; ++q) {
            if (dominates(pts[p], pts[q]))
                dominated_by[p].push_back(q);
            else if (dominates(pts[q], pts[p]))
                ++domination_count[p];
        }
        if (domination_count[p] == 0) fronts[0].push_back(p);
    }
    for (std::size_t i = 0; !fronts[i].empty(); ++i) {
        std::vector<std::size_t> next;
        for (auto p : fronts[i])
            for (auto q : dominated_by[p])
                if (--domination_count[q] == 0) next.push_back(q);
        std::sort(next.begin(), next.end());
        fronts.push_back(std::move(next));
    }
    fronts.pop_back();
    return fronts;
}

/// Crowding distance of each member of `front`, in front order. Boundary
/// points on either objective receive +infinity.
inline std::vector<double> crowding_distance(const std::vector<ObjectivePoint>& pts,
                                             const std::vector<std::size_t>& front)
{
    const std::size_t m = front.size();
    std::vector<double> dist(m, 0.0);
    if (m <= 2) {
        std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
        return dist;
    }
    std::vector<std::size_t> order(m);
    for (int d = 0; d < 2; ++d) {
        auto value = [&](std::size_t i) { return d == 0 ? pts[front[i]].risk : pts[front[i]].ret; };
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return value(a) < value(b); });
        const double range = value(order.back()) - value(order.front());
        dist[order.front()] = std::numeric_limits<double>::infinity();
        dist[order.back()] = std::numeric_limits<double>::infinity();
        if (range <= 0.0) continue;
        for (std::size_t i = 1; i + 1 < m; ++i)
            dist[order[i]] += (value(order[i + 1]) - value(order[i - 1])) / range;
    }
    return dist;
}

namespace detail {

inline std::vector<ObjectivePoint> objective_points(const std::vector<Individual>& set)
{
    std::vector<ObjectivePoint> pts;
    pts.reserve(set.size());
    for (const auto& ind : set) pts.push_back(ind.objectives());
    return pts;
}

/// Writes rank and crowding into every member; returns the fronts.
inline std::vector<std::vector<std::size_t>> assign_rank_and_crowding(std::vector<Individual>& set)
{
    const auto pts = objective_points(set);
    auto fronts = nondominated_sort(pts);
    for (std::size_t r = 0; r < fronts.size(); ++r) {
        const auto cd = crowding_distance(pts, fronts[r]);
        for (std::size_t i = 0; i < fronts[r].size(); ++i) {
            set[fronts[r][i]].rank = r;
            set[fronts[r][i]].crowding = cd[i];
        }
    }
    return fronts;
}

} // namespace detail

/// Front-by-front survival; the split front is cut by descending crowding.
inline std::vector<Individual> nsga2_environmental_selection(std::vector<Individual> set, std::size_t mu)
{
    const auto fronts = detail::assign_rank_and_crowding(set);
    std::vector<std::size_t> chosen;
    chosen.reserve(mu);
    for (const auto& front : fronts) {
        if (chosen.size() + front.size() <= mu) {
            chosen.insert(chosen.end(), front.begin(), front.end());
            continue;
        }
        auto last = front;
        std::stable_sort(last.begin(), last.end(),
                         [&](auto a, auto b) { return set[a].crowding > set[b].crowding; });
        last.resize(mu - chosen.size());
        chosen.insert(chosen.end(), last.begin(), last.end());
        break;
    }
    std::sort(chosen.begin(), chosen.end());
    std::vector<Individual> survivors;
    survivors.reserve(chosen.size());
    for (auto i : chosen) survivors.push_back(std::move(set[i]));
    return survivors;
}

template <std::uniform_random_bit_generator G>
Population nsga2_step(Population pop, const EngineConfig& cfg, const AssetUniverse& u, G& gen)
{
    require_budget(pop, cfg);
    detail::assign_rank_and_crowding(pop.members);
    const auto& m = pop.members;
    auto better = [&m](std::size_t a, std::size_t b) {
        return m[a].rank < m[b].rank || (m[a].rank == m[b].rank && m[a].crowding > m[b].crowding);
    };
    auto offspring = breed(pop.members, better, cfg, u, gen, pop.evaluations_used);

    auto merged = std::move(pop.members);
    merged.insert(merged.end(), std::make_move_iterator(offspring.begin()), std::make_move_iterator(offspring.end()));
    pop.members = nsga2_environmental_selection(std::move(merged), cfg.pop_size);
    ++pop.generation;
    return pop;
}

} // namespace epochma
