#pragma once

#include <epochma/ibea.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace epochma {

/// Generation interval [start_gen, end_gen) during which the Sharpe-driven
/// operators are switched on.
struct EpochWindow {
    std::size_t start_gen = 0;
    std::size_t end_gen = 50;
    double p_ls = 1.0;
    double p_em = 1.0;
    std::size_t ls_budget = 1; // evaluations per local-search call

    void validate(std::size_t max_generations = std::numeric_limits<std::size_t>::max()) const
    {
        if (start_gen >= end_gen) throw std::invalid_argument("EpochWindow: IG must be < FG");
        if (end_gen > max_generations) throw std::invalid_argument("EpochWindow: FG exceeds the generation count");
        if (!(p_ls >= 0.0 && p_ls <= 1.0) || !(p_em >= 0.0 && p_em <= 1.0))
            throw std::invalid_argument("EpochWindow: probabilities must lie in [0,1]");
        if (ls_budget < 1) throw std::invalid_argument("EpochWindow: ls_budget must be >= 1");
    }
};

inline bool is_active(const EpochWindow& w, std::size_t generation)
{
    return w.start_gen <= generation && generation < w.end_gen;
}

/// Bounded list of the best portfolios seen, ordered by Sharpe (best first).
class EliteMemory {
public:
    explicit EliteMemory(std::size_t capacity = 30) : capacity_(capacity) {}

    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    bool full() const { return entries_.size() >= capacity_; }
    const std::vector<Portfolio>& entries() const { return entries_; }
    const Portfolio& operator[](std::size_t i) const { return entries_[i]; }

    /// Inserts when there is room, otherwise replaces the worst entry if the
    /// candidate is strictly better. Returns whether the memory changed.
    bool offer(const Portfolio& candidate)
    {
        if (capacity_ == 0) return false;
        if (std::find(entries_.begin(), entries_.end(), candidate) != entries_.end()) return false;
        if (full()) {
            if (!(candidate.sharpe() > entries_.back().sharpe())) return false;
            entries_.pop_back();
        }
        auto pos = std::upper_bound(entries_.begin(), entries_.end(), candidate.sharpe(),
                                    [](double s, const Portfolio& p) { return s > p.sharpe(); });
        entries_.insert(pos, candidate);
        return true;
    }

private:
    std::size_t capacity_;
    std::vector<Portfolio> entries_;
};

inline bool em_offer(EliteMemory& memory, const Individual& candidate) { return memory.offer(candidate.portfolio); }

/// A selected individual below the population's mean Sharpe is swapped, with
/// probability p_em, for a uniformly drawn elite member.
template <std::uniform_random_bit_generator G>
Individual em_correct(const EliteMemory& memory, const Individual& selected, double mean_sharpe, double p_em,
                      G& gen)
{
    if (!(selected.sharpe() < mean_sharpe) || memory.empty() || !bernoulli(gen, p_em)) return selected;
    const Portfolio& elite = memory[uniform_index(gen, memory.size())];
    return Individual{elite.weights(), elite};
}

struct LocalSearchResult {
    Individual individual;
    std::size_t evaluations = 0;
    std::size_t accepted = 0;
};

/// First-ascent hill climbing on the Sharpe index. Each neighbour perturbs one
/// strictly positive weight by polynomial mutation, then repairs and
/// evaluates it; a neighbour replaces the incumbent only if its Sharpe beats
/// both the incumbent and `mean_sharpe`. Spends exactly `budget` evaluations.
template <std::uniform_random_bit_generator G>
LocalSearchResult local_search(const Individual& seed, const AssetUniverse& u, std::size_t k, double pm_eta,
                               double mean_sharpe, std::size_t budget, G& gen)
{
    LocalSearchResult out{seed};
    std::vector<std::size_t> support;
    for (; out.evaluations < budget; ++out.evaluations) {
        const Weights& w = out.individual.portfolio.weights();
        support.clear();
        for (std::size_t i = 0; i < w.size(); ++i)
            if (w[i] > 0.0) support.push_back(i);

        Genome neighbour = w;
        const std::size_t j = support[uniform_index(gen, support.size())];
        neighbour[j] = detail::polynomial_perturb(neighbour[j], pm_eta, uniform01(gen));
        if (support_size(neighbour) == 0) neighbour = w; // sole asset driven to zero

        auto candidate = make_individual(u, std::move(neighbour), k);
        if (candidate.sharpe() > out.individual.sharpe() && candidate.sharpe() > mean_sharpe) {
            out.individual = std::move(candidate);
            ++out.accepted;
        }
    }
    return out;
}

inline double mean_sharpe(const std::vector<Individual>& members)
{
    double s = 0.0;
    std::size_t n = 0;
    for (const auto& m : members)
        if (std::isfinite(m.sharpe())) {
            s += m.sharpe();
            ++n;
        }
    return n ? s / static_cast<double>(n) : 0.0;
}

/// One generation of the memetic algorithm. Outside the window this is
/// exactly ibea_step. Inside it, each mating-selected parent is offered to
/// the elite memory and then passed through em_correct, and each evaluated
/// child undergoes local search with probability p_ls. Local search never
/// spends past the evaluation budget.
template <std::uniform_random_bit_generator G>
Population memetic_step(Population pop, const EngineConfig& cfg, const EpochWindow& window, EliteMemory& memory,
                        const AssetUniverse& u, G& gen)
{
    if (!is_active(window, pop.generation)) return ibea_step(std::move(pop), cfg, u, gen);

    const double s_bar = mean_sharpe(pop.members);
    std::size_t ls_spent = 0;

    auto on_selected = [&](Individual& ind, G& g) {
        em_offer(memory, ind);
        ind = em_correct(memory, ind, s_bar, window.p_em, g);
    };
    auto on_offspring = [&](Individual& child, std::size_t& evaluations, G& g) {
        if (!bernoulli(g, window.p_ls)) return;
        const std::size_t remaining = evaluations < cfg.eval_budget ? cfg.eval_budget - evaluations : 0;
        const std::size_t budget = std::min(window.ls_budget, remaining);
        if (budget == 0) return;
        auto res = local_search(child, u, cfg.cardinality, cfg.pm_eta, s_bar, budget, g);
        evaluations += res.evaluations;
        ls_spent += res.evaluations;
        child = std::move(res.individual);
    };

    auto next = ibea_generation(std::move(pop), cfg, u, gen, on_selected, on_offspring);
    next.ls_evaluations += ls_spent;
    return next;
}

} // namespace epochma
