#pragma once

#include <epochma/ibea.hpp>
#include <epochma/memetic.hpp>
#include <epochma/nsga2.hpp>
#include <epochma/spea2.hpp>

#include <optional>
#include <utility>
#include <stdexcept>
#include <string>
#include <string_view>

namespace epochma {

enum class Algorithm { ibea, nsga2, spea2, ma };

inline std::string_view to_string(Algorithm a)
{
    switch (a) {
    case Algorithm::ibea: return "ibea";
    case Algorithm::nsga2: return "nsga2";
    case Algorithm::spea2: return "spea2";
    case Algorithm::ma: return "ma";
    }
    return "?";
}

inline Algorithm parse_algorithm(std::string_view s)
{
    if (s == "ibea") return Algorithm::ibea;
    if (s == "nsga2" || s == "nsga-ii") return Algorithm::nsga2;
    if (s == "spea2") return Algorithm::spea2;
    if (s == "ma") return Algorithm::ma;
    throw std::invalid_argument("unknown algorithm '" + std::string(s) + "' (expected ibea|nsga2|spea2|ma)");
}

struct MemeticConfig {
    EpochWindow window;
    std::size_t theta = 30;
};

struct RunOutcome {
    Population population;
    EliteMemory memory{0};
};

struct NoObserver {
    void operator()(const Population&) const {}
};

/// Runs one engine from a fresh population (seeded by cfg.rng_seed) until the
/// next generation would exceed the evaluation budget. `observer` sees the
/// initial population and the result of every step.
template <class Observer = NoObserver>
RunOutcome run_algorithm(Algorithm algo, const EngineConfig& cfg, const AssetUniverse& u,
                         const std::optional<MemeticConfig>& memetic = std::nullopt, Observer&& observer = {})
{
    cfg.validate();
    if (algo == Algorithm::ma) {
        if (!memetic) throw std::invalid_argument("the memetic algorithm requires an epoch window");
        memetic->window.validate();
    }
    Rng gen(cfg.rng_seed);
    RunOutcome out{initialize(cfg, u, gen), EliteMemory(memetic ? memetic->theta : 0)};
    observer(std::as_const(out.population));
    while (can_step(out.population, cfg)) {
        auto& pop = out.population;
        switch (algo) {
        case Algorithm::ibea: pop = ibea_step(std::move(pop), cfg, u, gen); break;
        case Algorithm::nsga2: pop = nsga2_step(std::move(pop), cfg, u, gen); break;
        case Algorithm::spea2: pop = spea2_step(std::move(pop), cfg, u, gen); break;
        case Algorithm::ma: pop = memetic_step(std::move(pop), cfg, memetic->window, out.memory, u, gen); break;
        }
        observer(std::as_const(out.population));
    }
    return out;
}

} // namespace epochma
