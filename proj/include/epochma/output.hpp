#pragma once

#include <epochma/harness.hpp>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace epochma {

/// File-name friendly form of a row label: "MA^{1,1}_{0,40}" -> "ma_1_1_0_40".
inline std::string slugify(const std::string& label)
{
    std::string out;
    for (unsigned char c : label) {
        if (std::isalnum(c))
            out += static_cast<char>(std::tolower(c));
        else if (!out.empty() && out.back() != '_')
            out += '_';
    }
    while (!out.empty() && out.back() == '_') out.pop_back();
    return out.empty() ? "batch" : out;
}

namespace svg {

struct Series {
    std::string name;
    std::vector<std::pair<double, double>> xy;
};

inline std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

/// Line chart with one polyline per nonempty series.
inline std::string line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                              const std::vector<Series>& series)
{
    constexpr double W = 640, H = 480, L = 80, R = 150, T = 40, B = 60;
    double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    bool any = false;
    for (const auto& s : series)
        for (const auto& [x, y] : s.xy) {
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            if (!any) {
                x0 = x1 = x;
                y0 = y1 = y;
                any = true;
            }
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        }
    if (x1 <= x0) x1 = x0 + 1;
    if (y1 <= y0) y1 = y0 + 1;
    auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 "
       << W << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << escape(title)
       << "</text>\n";
    os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double xv = x0 + (x1 - x0) * i / 4.0;
        const double yv = y0 + (y1 - y0) * i / 4.0;
        os << "<text x=\"" << num(px(xv)) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">" << num(xv)
           << "</text>\n";
        os << "<text x=\"" << L - 6 << "\" y=\"" << num(py(yv) + 4) << "\" text-anchor=\"end\">" << num(yv)
           << "</text>\n";
    }
    os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 16 << "\" text-anchor=\"middle\">" << escape(x_label)
       << "</text>\n";
    os << "<text x=\"18\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
       << (T + H - B) / 2 << ")\">" << escape(y_label) << "</text>\n";

    std::size_t drawn = 0;
    for (const auto& s : series) {
        if (s.xy.empty()) continue;
        const char* colour = palette[drawn % std::size(palette)];
        os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.xy.size(); ++i) {
            if (!std::isfinite(s.xy[i].first) || !std::isfinite(s.xy[i].second)) continue;
            os << (i ? " " : "") << num(px(s.xy[i].first)) << ',' << num(py(s.xy[i].second));
        }
        os << "\"/>\n";
        const double ly = T + 10 + 18.0 * static_cast<double>(drawn);
        os << "<line x1=\"" << W - R + 10 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 30 << "\" y2=\"" << ly
           << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << W - R + 35 << "\" y=\"" << ly + 4 << "\">" << escape(s.name) << "</text>\n";
        ++drawn;
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace svg

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write '" + path.string() + "'");
    os << content;
    if (!os) throw std::runtime_error("write failed for '" + path.string() + "'");
}

} // namespace detail

/// Writes summary.csv, one front_<label>_<run>.csv per run, front_combined.csv,
/// selected_portfolios.csv and three SVG panels (front, Sharpe vs risk,
/// Sharpe vs return) built from each row's combined front.
inline void emit_outputs(const ExperimentOutcome& outcome, const std::filesystem::path& out_dir,
                         const AssetUniverse& u)
{
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec || !std::filesystem::is_directory(out_dir))
        throw std::runtime_error("cannot create output directory '" + out_dir.string() + "'");

    std::ostringstream summary;
    write_summary_csv(summary, outcome.table);
    detail::write_file(out_dir / "summary.csv", summary.str());

    const double rf = u.risk_free_rate;
    std::map<std::string, int> slug_uses;
    std::vector<svg::Series> fronts, by_risk, by_ret;
    std::ostringstream selected;
    selected << "label,run,risk,ret,sharpe";
    for (std::size_t i = 0; i < u.size(); ++i)
        selected << ",w_" << (i < u.asset_names.size() ? u.asset_names[i] : std::to_string(i));
    selected << '\n';

    for (std::size_t b = 0; b < outcome.batches.size(); ++b) {
        const auto& batch = outcome.batches[b];
        const std::string label = b < outcome.table.size() ? outcome.table[b].label : batch.spec.label;
        std::string slug = slugify(label);
        if (slug_uses[slug]++ > 0) slug += "_" + std::to_string(slug_uses[slug] - 1);

        std::vector<Front> run_fronts;
        for (const auto& r : batch.runs) {
            std::ostringstream f;
            write_front_csv(f, r.front, rf);
            detail::write_file(out_dir / ("front_" + slug + "_" + std::to_string(r.run_index) + ".csv"), f.str());
            run_fronts.push_back(r.front);

            if (r.front.has_portfolios()) {
                const auto& p = r.front.points[r.selected];
                selected << detail::csv_escape(label) << ',' << r.run_index << ',' << detail::format_double(p.risk)
                         << ',' << detail::format_double(p.ret) << ',' << detail::format_double(r.sharpe_best);
                for (double w : r.front.portfolios[r.selected]) selected << ',' << detail::format_double(w);
                selected << '\n';
            }
        }
        const auto combined = combine_fronts(run_fronts);
        svg::Series sf{label, {}}, sr{label, {}}, se{label, {}};
        for (const auto& p : combined.points) {
            const double s = sharpe(p, rf);
            sf.xy.emplace_back(p.risk, p.ret);
            sr.xy.emplace_back(p.risk, s);
            se.xy.emplace_back(p.ret, s);
        }
        fronts.push_back(std::move(sf));
        by_risk.push_back(std::move(sr));
        by_ret.push_back(std::move(se));
    }

    std::ostringstream comb;
    write_front_csv(comb, outcome.reference.reference_front, rf);
    detail::write_file(out_dir / "front_combined.csv", comb.str());
    detail::write_file(out_dir / "selected_portfolios.csv", selected.str());
    detail::write_file(out_dir / "fronts.svg", svg::line_chart("Combined Pareto fronts", "risk", "return", fronts));
    detail::write_file(out_dir / "sharpe_vs_risk.svg",
                       svg::line_chart("Sharpe index along the front", "risk", "Sharpe index", by_risk));
    detail::write_file(out_dir / "sharpe_vs_return.svg",
                       svg::line_chart("Sharpe index along the front", "return", "Sharpe index", by_ret));
}

} // namespace epochma
