#pragma once

#include <epochma/indicators.hpp>
#include <epochma/runner.hpp>
#include <epochma/stats.hpp>

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

namespace epochma {

/// Budget given to the memetic algorithm for a baseline budget: 18,000 of
/// 20,000, i.e. nine tenths.
inline std::size_t memetic_budget(std::size_t baseline_budget) { return baseline_budget * 9 / 10; }

/// Generation count of a baseline run, the unit in which IG and FG are given.
inline std::size_t max_generations(std::size_t baseline_budget, std::size_t pop_size)
{
    return baseline_budget / pop_size;
}

struct ExperimentSpec {
    std::string label;
    Algorithm algorithm = Algorithm::ibea;
    EngineConfig engine; // eval_budget is the budget this algorithm actually gets
    std::optional<MemeticConfig> memetic;
    std::size_t runs = 30;
    std::uint64_t seed_base = 1;

    void validate() const
    {
        engine.validate();
        if (runs < 1) throw std::invalid_argument("ExperimentSpec: runs must be >= 1");
        if (algorithm == Algorithm::ma && !memetic)
            throw std::invalid_argument("ExperimentSpec: the memetic algorithm requires an epoch window");
        if (memetic) memetic->window.validate();
    }
};

inline std::string format_probability(double p)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", p);
    return buf;
}

/// MA^{p_ls,p_em}_{IG,FG}
inline std::string ma_label(const EpochWindow& w)
{
    return "MA^{" + format_probability(w.p_ls) + "," + format_probability(w.p_em) + "}_{" +
           std::to_string(w.start_gen) + "," + std::to_string(w.end_gen) + "}";
}

inline std::string default_label(Algorithm a, const std::optional<MemeticConfig>& m)
{
    switch (a) {
    case Algorithm::ibea: return "IBEA";
    case Algorithm::nsga2: return "NSGA-II";
    case Algorithm::spea2: return "SPEA2";
    case Algorithm::ma: return m ? ma_label(m->window) : "MA";
    }
    return "?";
}

struct RunResult {
    std::size_t run_index = 0;
    Front front; // final population's nondominated set, with portfolios
    double sharpe_best = 0.0;
    std::size_t selected = 0; // index into front of the best-Sharpe member
    double hypervolume = 0.0;
    std::size_t hv_clipped = 0;
    std::optional<double> gd;
    std::size_t evaluations_used = 0;
    std::size_t ls_evaluations = 0;
    std::size_t generations = 0; // populations evaluated, initial one included
    double wall_time_s = 0.0;
};

inline Front front_of(const std::vector<Individual>& members)
{
    std::vector<ObjectivePoint> pts;
    std::vector<Weights> ws;
    pts.reserve(members.size());
    ws.reserve(members.size());
    for (const auto& m : members) {
        pts.push_back(m.objectives());
        ws.push_back(m.portfolio.weights());
    }
    return extract_front(pts, ws);
}

/// Executes run `run_index` of `spec` (seed = seed_base + run_index). The
/// indicator fields are filled later by evaluate_batch.
inline RunResult run_one(const ExperimentSpec& spec, const AssetUniverse& u, std::size_t run_index)
{
    spec.validate();
    auto cfg = spec.engine;
    cfg.rng_seed = spec.seed_base + run_index;
    const auto t0 = std::chrono::steady_clock::now();
    auto outcome = run_algorithm(spec.algorithm, cfg, u, spec.memetic);
    const auto t1 = std::chrono::steady_clock::now();

    RunResult r;
    r.run_index = run_index;
    r.front = front_of(outcome.population.members);
    const auto sel = select_by_sharpe(r.front, u.risk_free_rate);
    r.selected = sel.index;
    r.sharpe_best = sel.sharpe;
    r.evaluations_used = outcome.population.evaluations_used;
    r.ls_evaluations = outcome.population.ls_evaluations;
    r.generations = outcome.population.generation + 1;
    r.wall_time_s = std::chrono::duration<double>(t1 - t0).count();
    return r;
}

/// Calls task(i) for i in [0, n) on up to `workers` threads.
template <class Task>
void parallel_for(std::size_t n, std::size_t workers, Task&& task)
{
    workers = std::max<std::size_t>(1, std::min(workers, n));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) task(i);
        });
}

struct BatchResult {
    ExperimentSpec spec;
    std::vector<RunResult> runs;
    std::optional<std::string> error; // set when the batch was aborted
};

/// Runs every spec. A failing run aborts its own batch only.
inline std::vector<BatchResult> run_batches(const std::vector<ExperimentSpec>& specs, const AssetUniverse& u,
                                            std::size_t workers = 1)
{
    std::vector<BatchResult> out(specs.size());
    std::vector<std::pair<std::size_t, std::size_t>> tasks;
    for (std::size_t b = 0; b < specs.size(); ++b) {
        out[b].spec = specs[b];
        try {
            specs[b].validate();
        } catch (const std::exception& e) {
            out[b].error = e.what();
            continue;
        }
        out[b].runs.resize(specs[b].runs);
        for (std::size_t r = 0; r < specs[b].runs; ++r) tasks.emplace_back(b, r);
    }
    std::vector<std::exception_ptr> failures(tasks.size());
    parallel_for(tasks.size(), workers, [&](std::size_t t) {
        const auto [b, r] = tasks[t];
        try {
            out[b].runs[r] = run_one(specs[b], u, r);
        } catch (...) {
            failures[t] = std::current_exception();
        }
    });
    for (std::size_t t = 0; t < tasks.size(); ++t) {
        if (!failures[t]) continue;
        auto& batch = out[tasks[t].first];
        if (batch.error) continue;
        try {
            std::rethrow_exception(failures[t]);
        } catch (const std::exception& e) {
            batch.error = e.what();
        } catch (...) {
            batch.error = "unknown error";
        }
    }
    for (auto& batch : out)
        if (batch.error) batch.runs.clear();
    return out;
}

struct ReferenceContext {
    Front reference_front;
    ObjectivePoint ref_point;
    std::size_t clipped = 0; // points dropped from HV over the whole batch
};

/// Builds the combined front of every run and fills hypervolume (against its
/// max-risk / min-return corner) and GD (against the front itself).
inline ReferenceContext evaluate_batch(std::vector<BatchResult>& batches)
{
    std::vector<Front> fronts;
    for (const auto& b : batches)
        for (const auto& r : b.runs) fronts.push_back(r.front);

    ReferenceContext ctx;
    ctx.reference_front = combine_fronts(fronts);
    if (ctx.reference_front.empty()) return ctx;
    ctx.ref_point = reference_point(ctx.reference_front);
    for (auto& b : batches)
        for (auto& r : b.runs) {
            const auto hv = hypervolume_detailed(r.front.points, ctx.ref_point);
            r.hypervolume = hv.area;
            r.hv_clipped = hv.clipped;
            ctx.clipped += hv.clipped;
            r.gd = generational_distance(r.front, ctx.reference_front);
        }
    return ctx;
}

inline ReferenceContext evaluate_batch(std::vector<std::vector<RunResult>>& results)
{
    std::vector<BatchResult> batches(results.size());
    for (std::size_t i = 0; i < results.size(); ++i) batches[i].runs = std::move(results[i]);
    auto ctx = evaluate_batch(batches);
    for (std::size_t i = 0; i < results.size(); ++i) results[i] = std::move(batches[i].runs);
    return ctx;
}

enum class Direction { maximize, minimize };

inline constexpr const char* mark_best = "★";
inline constexpr const char* mark_alpha10 = "∘"; // p < 0.1
inline constexpr const char* mark_alpha05 = "•"; // p < 0.05
inline constexpr const char* mark_alpha01 = "■"; // p < 0.01

inline const char* significance_mark(double p)
{
    if (p < 0.01) return mark_alpha01;
    if (p < 0.05) return mark_alpha05;
    if (p < 0.1) return mark_alpha10;
    return "";
}

struct MetricSummary {
    std::vector<double> values;
    std::optional<double> best;
    std::optional<stats::Dispersion> spread;
    std::string mark;
    std::optional<double> p_value; // two-sided, against the starred row
};

struct SummaryRow {
    std::string label;
    Algorithm algorithm = Algorithm::ibea;
    std::optional<EpochWindow> window;
    std::size_t runs = 0;
    std::optional<std::string> error;
    MetricSummary sharpe;
    MetricSummary hypervolume;
    MetricSummary gd;
};

namespace detail {

inline void mark_metric(std::vector<SummaryRow>& rows, MetricSummary SummaryRow::*metric, Direction dir)
{
    const bool maximize = dir == Direction::maximize;
    std::optional<std::size_t> star;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto& m = rows[i].*metric;
        if (m.values.empty()) continue;
        m.best = maximize ? *std::max_element(m.values.begin(), m.values.end())
                          : *std::min_element(m.values.begin(), m.values.end());
        m.spread = stats::dispersion(m.values);
        if (!star) {
            star = i;
            continue;
        }
        const auto& s = *(rows[*star].*metric).spread;
        const double med = m.spread->median;
        const bool better = maximize ? med > s.median : med < s.median;
        if (better || (med == s.median && m.spread->qd < s.qd)) star = i;
    }
    if (!star) return;
    const auto& ref = (rows[*star].*metric).values;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto& m = rows[i].*metric;
        if (m.values.empty()) continue;
        if (i == *star) {
            m.mark = mark_best;
            continue;
        }
        m.p_value = stats::mann_whitney_u(m.values, ref).p_two_sided;
        m.mark = significance_mark(*m.p_value);
    }
}

} // namespace detail

/// Per-row best / median / QD / CQD for Sharpe, hypervolume and GD, with the
/// starred best row per metric and significance markers against it.
inline std::vector<SummaryRow> summarize(const std::vector<BatchResult>& batches)
{
    std::vector<SummaryRow> rows;
    rows.reserve(batches.size());
    for (const auto& b : batches) {
        SummaryRow row;
        row.label = b.spec.label.empty() ? default_label(b.spec.algorithm, b.spec.memetic) : b.spec.label;
        row.algorithm = b.spec.algorithm;
        if (b.spec.memetic && b.spec.algorithm == Algorithm::ma) row.window = b.spec.memetic->window;
        row.runs = b.runs.size();
        row.error = b.error;
        for (const auto& r : b.runs) {
            row.sharpe.values.push_back(r.sharpe_best);
            row.hypervolume.values.push_back(r.hypervolume);
            if (r.gd) row.gd.values.push_back(*r.gd);
        }
        rows.push_back(std::move(row));
    }
    detail::mark_metric(rows, &SummaryRow::sharpe, Direction::maximize);
    detail::mark_metric(rows, &SummaryRow::hypervolume, Direction::maximize);
    detail::mark_metric(rows, &SummaryRow::gd, Direction::minimize);
    return rows;
}

struct ExperimentOutcome {
    std::vector<BatchResult> batches;
    ReferenceContext reference;
    std::vector<SummaryRow> table;
};

/// Runs heterogeneous specs against one shared reference context.
inline ExperimentOutcome compare(const std::vector<ExperimentSpec>& specs, const AssetUniverse& u,
                                 std::size_t workers = 1)
{
    ExperimentOutcome out;
    out.batches = run_batches(specs, u, workers);
    out.reference = evaluate_batch(out.batches);
    out.table = summarize(out.batches);
    return out;
}

struct SweepCell {
    double p_ls = 1.0;
    double p_em = 0.0;
    std::size_t ig = 0;
    std::size_t fg = 50;
};

/// Every (IG, FG) pair with IG < FG over {0, 1/5, ..., 5/5} of `max_gen`,
/// for each operator setting in `blocks` (default: LS only, EM only, both).
inline std::vector<SweepCell> window_grid(std::size_t max_gen,
                                         std::vector<std::pair<double, double>> blocks = {{1, 0}, {0, 1}, {1, 1}})
{
    std::vector<std::size_t> marks;
    for (std::size_t i = 0; i <= 5; ++i) marks.push_back(max_gen * i / 5);
    std::vector<SweepCell> cells;
    for (const auto& [pls, pem] : blocks)
        for (std::size_t a = 0; a < marks.size(); ++a)
            for (std::size_t b = a + 1; b < marks.size(); ++b)
                if (marks[a] < marks[b]) cells.push_back({pls, pem, marks[a], marks[b]});
    return cells;
}

/// Expands `base` (a memetic spec) over the grid and compares all cells.
inline ExperimentOutcome sweep(const ExperimentSpec& base, const std::vector<SweepCell>& grid, const AssetUniverse& u,
                               std::size_t workers = 1)
{
    std::vector<ExperimentSpec> specs;
    specs.reserve(grid.size());
    for (const auto& c : grid) {
        auto s = base;
        s.algorithm = Algorithm::ma;
        MemeticConfig m = base.memetic.value_or(MemeticConfig{});
        m.window.p_ls = c.p_ls;
        m.window.p_em = c.p_em;
        m.window.start_gen = c.ig;
        m.window.end_gen = c.fg;
        s.memetic = m;
        s.label = ma_label(m.window);
        specs.push_back(std::move(s));
    }
    return compare(specs, u, workers);
}

namespace detail {

inline std::string fmt_value(const std::optional<double>& v)
{
    if (!v) return "";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", *v);
    return buf;
}

inline std::string csv_escape(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

} // namespace detail

/// Table-shaped CSV: one row per configuration, four statistics plus marker
/// and p-value per metric.
inline void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows)
{
    os << "label,algorithm,p_ls,p_em,ig,fg,runs";
    for (const char* m : {"sharpe", "hv", "gd"})
        os << ',' << m << "_best," << m << "_median," << m << "_qd," << m << "_cqd," << m << "_mark," << m << "_p";
    os << ",status\n";
    for (const auto& r : rows) {
        os << detail::csv_escape(r.label) << ',' << to_string(r.algorithm) << ',';
        if (r.window)
            os << format_probability(r.window->p_ls) << ',' << format_probability(r.window->p_em) << ','
               << r.window->start_gen << ',' << r.window->end_gen;
        else
            os << ",,,";
        os << ',' << r.runs;
        for (const MetricSummary* m : {&r.sharpe, &r.hypervolume, &r.gd}) {
            std::optional<double> median, qd, cqd;
            if (m->spread) {
                median = m->spread->median;
                qd = m->spread->qd;
                cqd = m->spread->cqd;
            }
            os << ',' << detail::fmt_value(m->best) << ',' << detail::fmt_value(median) << ','
               << detail::fmt_value(qd) << ',' << detail::fmt_value(cqd) << ',' << m->mark << ','
               << detail::fmt_value(m->p_value);
        }
        os << ',' << (r.error ? detail::csv_escape("aborted: " + *r.error) : std::string("ok")) << '\n';
    }
}

} // namespace epochma
