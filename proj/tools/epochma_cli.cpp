// Command-line front end: run / sweep / compare / indicators.

#include <epochma/output.hpp>
#include <epochma/settings.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace {

using namespace epochma;

struct FlagDef {
    const char* key;
    const char* help;
};

// Flags shared by run, sweep and compare; the key doubles as the config-file key.
const FlagDef shared_flags[] = {
    {"prices", "price CSV (header row of asset names, one row per period)"},
    {"delimiter", "price file delimiter (single character or 'tab')"},
    {"risk-free", "risk-free rate R0 per period"},
    {"pop", "population size"},
    {"budget", "baseline evaluation budget (the MA receives nine tenths)"},
    {"ma-budget", "explicit MA evaluation budget"},
    {"k", "cardinality: maximum number of assets held"},
    {"px", "crossover probability"},
    {"pm", "per-gene mutation probability"},
    {"eta", "SBX distribution index"},
    {"eta-m", "polynomial mutation distribution index"},
    {"pls", "local-search probability inside the window"},
    {"pem", "elite-memory correction probability inside the window"},
    {"ig", "first generation of the memetic window"},
    {"fg", "first generation after the window (default 40% of the generation count)"},
    {"theta", "elite memory capacity"},
    {"ls-budget", "evaluations per local-search call"},
    {"runs", "independent runs per configuration"},
    {"seed", "seed of run 0; run i uses seed + i"},
    {"out", "output directory"},
    {"workers", "concurrent runs"},
};

struct Invocation {
    std::map<std::string, std::string> values;
    std::string config;
    bool quick = false;
};

void add_shared(CLI::App& app, Invocation& inv)
{
    for (const auto& f : shared_flags) app.add_option(std::string("--") + f.key, inv.values[f.key], f.help);
    app.add_option("--config", inv.config, "key = value settings file");
    app.add_flag("--quick", inv.quick, "desk-scale settings: runs=10, pop=100, budget=5000");
}

Settings resolve(const CLI::App& app, const Invocation& inv)
{
    Settings s;
    if (inv.quick) s.apply_quick();
    if (!inv.config.empty()) apply_config_file(s, inv.config);
    for (const auto& [key, value] : inv.values)
        if (app.count("--" + key) > 0) s.apply(key, value);
    return s;
}

void print_table(const std::vector<SummaryRow>& rows)
{
    std::printf("%-22s %5s  %-26s %-26s %-26s\n", "configuration", "runs", "Sharpe median (QD)", "HV median (QD)",
                "GD median (QD)");
    auto cell = [](const MetricSummary& m) {
        if (!m.spread) return std::string("-");
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.4g (%.2g) %s", m.spread->median, m.spread->qd, m.mark.c_str());
        return std::string(buf);
    };
    for (const auto& r : rows) {
        if (r.error) {
            std::printf("%-22s aborted: %s\n", r.label.c_str(), r.error->c_str());
            continue;
        }
        std::printf("%-22s %5zu  %-26s %-26s %-26s\n", r.label.c_str(), r.runs, cell(r.sharpe).c_str(),
                    cell(r.hypervolume).c_str(), cell(r.gd).c_str());
    }
}

int finish(const ExperimentOutcome& outcome, const Settings& s, const AssetUniverse& u)
{
    emit_outputs(outcome, s.out, u);
    print_table(outcome.table);
    if (outcome.reference.clipped > 0)
        std::printf("hypervolume: %zu front points fell outside the reference box\n", outcome.reference.clipped);
    std::printf("outputs written to %s\n", s.out.c_str());
    for (const auto& r : outcome.table)
        if (r.error) return 2;
    return 0;
}

int indicators(const std::vector<std::string>& files, double rf, const std::string& out)
{
    std::vector<Front> fronts;
    for (const auto& path : files) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open '" + path + "'");
        const auto pts = read_front_csv(in);
        fronts.push_back(extract_front(pts));
    }
    const auto reference = combine_fronts(fronts);
    if (reference.empty()) throw std::runtime_error("all fronts are empty");
    const auto ref = reference_point(reference);

    std::ostringstream os;
    os << "file,points,hv,hv_clipped,gd,sharpe_best\n";
    for (std::size_t i = 0; i < files.size(); ++i) {
        const auto hv = hypervolume_detailed(fronts[i].points, ref);
        const auto gd = generational_distance(fronts[i], reference);
        os << detail::csv_escape(files[i]) << ',' << fronts[i].size() << ',' << detail::fmt_value(hv.area) << ','
           << hv.clipped << ',' << detail::fmt_value(gd) << ',';
        if (!fronts[i].empty()) os << detail::fmt_value(select_by_sharpe(fronts[i], rf).sharpe);
        os << '\n';
    }
    if (out.empty()) {
        std::cout << os.str();
    } else {
        std::ofstream f(out);
        if (!f || !(f << os.str())) throw std::runtime_error("cannot write '" + out + "'");
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Cardinality-constrained mean-variance portfolio search with an epoch-windowed memetic IBEA"};
    app.require_subcommand(1);

    Invocation run_inv, sweep_inv, cmp_inv;
    std::string run_algo = "ma", specs = "ma,nsga2,spea2", grid, blocks = "1:0,0:1,1:1";

    auto* run = app.add_subcommand("run", "run one algorithm for --runs independent runs");
    add_shared(*run, run_inv);
    run->add_option("--algo", run_algo, "ibea | nsga2 | spea2 | ma");

    auto* sw = app.add_subcommand("sweep", "memetic window grid over (IG, FG) and operator settings");
    add_shared(*sw, sweep_inv);
    sw->add_option("--grid", grid, "comma-separated IG:FG cells (default: every IG<FG over fifths of the run)");
    sw->add_option("--blocks", blocks, "comma-separated pls:pem operator settings");

    auto* cmp = app.add_subcommand("compare", "compare several algorithms on one shared reference front");
    add_shared(*cmp, cmp_inv);
    cmp->add_option("--specs", specs, "comma-separated algorithms");

    std::vector<std::string> front_files;
    double ind_rf = 0.0;
    std::string ind_out;
    auto* ind = app.add_subcommand("indicators", "recompute HV / GD / Sharpe from front CSV files");
    ind->add_option("fronts", front_files, "front CSV files (risk,ret[,...])")->required();
    ind->add_option("--risk-free", ind_rf, "risk-free rate used for the Sharpe column");
    ind->add_option("--out", ind_out, "write the table here instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ind) return indicators(front_files, ind_rf, ind_out);

        if (*run) {
            auto s = resolve(*run, run_inv);
            if (run->count("--algo")) s.apply("algo", run_algo);
            const auto u = load_universe(s);
            return finish(compare({make_spec(s, s.algorithm)}, u, s.workers), s, u);
        }
        if (*sw) {
            auto s = resolve(*sw, sweep_inv);
            if (sw->count("--grid")) s.apply("grid", grid);
            if (sw->count("--blocks")) s.apply("blocks", blocks);
            const auto u = load_universe(s);
            return finish(sweep(make_spec(s, Algorithm::ma), sweep_grid(s), u, s.workers), s, u);
        }
        auto s = resolve(*cmp, cmp_inv);
        if (cmp->count("--specs")) s.apply("specs", specs);
        const auto u = load_universe(s);
        return finish(compare(compare_specs(s), u, s.workers), s, u);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
