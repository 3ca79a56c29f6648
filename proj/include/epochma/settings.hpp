#pragma once

#include <epochma/harness.hpp>
#include <epochma/market_data.hpp>

#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace epochma {

/// Everything a CLI invocation can set. Layering is defaults, then --quick,
/// then the key=value config file, then explicit flags; each layer goes
/// through apply() with the same keys.
struct Settings {
    std::string prices;
    char delimiter = ',';
    double risk_free = 0.0;
    Algorithm algorithm = Algorithm::ma;
    std::size_t pop = 400;
    std::size_t budget = 20000; // baseline budget; the MA receives nine tenths
    std::optional<std::size_t> ma_budget;
    std::size_t k = 18;
    double px = 0.8;
    double pm = 0.005;
    double eta = 0.0;
    double eta_m = 20.0;
    double pls = 1.0;
    double pem = 1.0;
    std::size_t ig = 0;
    std::optional<std::size_t> fg; // default: 40% of the baseline generation count
    std::size_t theta = 30;
    std::size_t ls_budget = 1;
    std::size_t runs = 30;
    std::uint64_t seed = 1;
    std::string out = "results";
    std::size_t workers = 1;
    std::string specs = "ma,nsga2,spea2";
    std::string grid;            // "ig:fg,ig:fg,..."; empty means the full grid
    std::string blocks = "1:0,0:1,1:1"; // "pls:pem,..." for the full grid

    void apply_quick()
    {
        runs = 10;
        pop = 100;
        budget = 5000;
    }

    std::size_t max_gen() const { return max_generations(budget, pop); }
    std::size_t end_gen() const { return fg.value_or(max_gen() * 2 / 5); }

    void apply(std::string_view key, std::string_view value);
};

namespace detail {

template <class T>
T parse_number(std::string_view key, std::string_view text)
{
    T v{};
    const auto* end = text.data() + text.size();
    const auto [p, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || p != end)
        throw std::invalid_argument("invalid value '" + std::string(text) + "' for " + std::string(key));
    return v;
}

inline bool parse_bool(std::string_view key, std::string_view text)
{
    if (text == "1" || text == "true" || text == "yes" || text == "on") return true;
    if (text == "0" || text == "false" || text == "no" || text == "off") return false;
    throw std::invalid_argument("invalid value '" + std::string(text) + "' for " + std::string(key));
}

inline std::vector<std::pair<std::string, std::string>> split_pairs(std::string_view list, std::string_view what)
{
    std::vector<std::pair<std::string, std::string>> out;
    for (auto item : split(list, ',')) {
        if (item.empty()) continue;
        const auto colon = item.find(':');
        if (colon == std::string_view::npos)
            throw std::invalid_argument("malformed " + std::string(what) + " entry '" + std::string(item) + "'");
        out.emplace_back(std::string(trim(item.substr(0, colon))), std::string(trim(item.substr(colon + 1))));
    }
    return out;
}

} // namespace detail

inline void Settings::apply(std::string_view key, std::string_view value)
{
    using detail::parse_number;
    value = detail::trim(value);
    if (key == "prices") prices = value;
    else if (key == "delimiter") {
        if (value == "tab" || value == "\\t") delimiter = '\t';
        else if (value.size() == 1) delimiter = value[0];
        else throw std::invalid_argument("delimiter must be a single character or 'tab'");
    }
    else if (key == "risk-free") risk_free = parse_number<double>(key, value);
    else if (key == "algo") algorithm = parse_algorithm(value);
    else if (key == "pop") pop = parse_number<std::size_t>(key, value);
    else if (key == "budget") budget = parse_number<std::size_t>(key, value);
    else if (key == "ma-budget") ma_budget = parse_number<std::size_t>(key, value);
    else if (key == "k") k = parse_number<std::size_t>(key, value);
    else if (key == "px") px = parse_number<double>(key, value);
    else if (key == "pm") pm = parse_number<double>(key, value);
    else if (key == "eta") eta = parse_number<double>(key, value);
    else if (key == "eta-m") eta_m = parse_number<double>(key, value);
    else if (key == "pls") pls = parse_number<double>(key, value);
    else if (key == "pem") pem = parse_number<double>(key, value);
    else if (key == "ig") ig = parse_number<std::size_t>(key, value);
    else if (key == "fg") fg = parse_number<std::size_t>(key, value);
    else if (key == "theta") theta = parse_number<std::size_t>(key, value);
    else if (key == "ls-budget") ls_budget = parse_number<std::size_t>(key, value);
    else if (key == "runs") runs = parse_number<std::size_t>(key, value);
    else if (key == "seed") seed = parse_number<std::uint64_t>(key, value);
    else if (key == "out") out = value;
    else if (key == "workers") workers = parse_number<std::size_t>(key, value);
    else if (key == "specs") specs = value;
    else if (key == "grid") grid = value;
    else if (key == "blocks") blocks = value;
    else if (key == "quick") {
        if (detail::parse_bool(key, value)) apply_quick();
    }
    else throw std::invalid_argument("unknown setting '" + std::string(key) + "'");
}

/// Reads `key = value` lines; '#' starts a comment, blank lines are ignored.
inline void apply_config(Settings& s, std::istream& in, const std::string& source = "config")
{
    std::string line;
    for (std::size_t n = 1; std::getline(in, line); ++n) {
        std::string_view v = line;
        if (const auto hash = v.find('#'); hash != std::string_view::npos) v = v.substr(0, hash);
        v = detail::trim(v);
        if (v.empty()) continue;
        const auto eq = v.find('=');
        if (eq == std::string_view::npos)
            throw std::invalid_argument(source + ":" + std::to_string(n) + ": expected key = value");
        try {
            s.apply(detail::trim(v.substr(0, eq)), v.substr(eq + 1));
        } catch (const std::exception& e) {
            throw std::invalid_argument(source + ":" + std::to_string(n) + ": " + e.what());
        }
    }
}

inline void apply_config_file(Settings& s, const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    apply_config(s, in, path);
}

inline EngineConfig engine_config(const Settings& s, Algorithm algo)
{
    EngineConfig c;
    c.pop_size = s.pop;
    c.crossover_rate = s.px;
    c.mutation_rate = s.pm;
    c.sbx_eta = s.eta;
    c.pm_eta = s.eta_m;
    c.cardinality = s.k;
    c.eval_budget = algo == Algorithm::ma ? s.ma_budget.value_or(memetic_budget(s.budget)) : s.budget;
    c.rng_seed = s.seed;
    return c;
}

inline MemeticConfig memetic_config(const Settings& s)
{
    MemeticConfig m;
    m.theta = s.theta;
    m.window.start_gen = s.ig;
    m.window.end_gen = s.end_gen();
    m.window.p_ls = s.pls;
    m.window.p_em = s.pem;
    m.window.ls_budget = s.ls_budget;
    return m;
}

inline ExperimentSpec make_spec(const Settings& s, Algorithm algo)
{
    ExperimentSpec spec;
    spec.algorithm = algo;
    spec.engine = engine_config(s, algo);
    spec.runs = s.runs;
    spec.seed_base = s.seed;
    if (algo == Algorithm::ma) {
        spec.memetic = memetic_config(s);
        spec.memetic->window.validate(s.max_gen());
    }
    spec.label = default_label(algo, spec.memetic);
    return spec;
}

inline std::vector<ExperimentSpec> compare_specs(const Settings& s)
{
    std::vector<ExperimentSpec> out;
    for (auto name : detail::split(s.specs, ','))
        if (!name.empty()) out.push_back(make_spec(s, parse_algorithm(name)));
    if (out.empty()) throw std::invalid_argument("no algorithms given to compare");
    return out;
}

inline std::vector<SweepCell> sweep_grid(const Settings& s)
{
    std::vector<std::pair<double, double>> blocks;
    for (const auto& [pls, pem] : detail::split_pairs(s.blocks, "blocks"))
        blocks.emplace_back(detail::parse_number<double>("blocks", pls), detail::parse_number<double>("blocks", pem));
    if (s.grid.empty()) return window_grid(s.max_gen(), blocks);

    std::vector<SweepCell> cells;
    for (const auto& [b_ls, b_em] : blocks)
        for (const auto& [ig, fg] : detail::split_pairs(s.grid, "grid"))
            cells.push_back({b_ls, b_em, detail::parse_number<std::size_t>("grid", ig),
                             detail::parse_number<std::size_t>("grid", fg)});
    return cells;
}

inline AssetUniverse load_universe(const Settings& s)
{
    if (s.prices.empty()) throw std::invalid_argument("no price file given (--prices)");
    return universe_from_prices(load_prices(s.prices, s.delimiter), s.risk_free);
}

} // namespace epochma
