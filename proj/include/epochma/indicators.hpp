#pragma once

#include <epochma/market_data.hpp>
#include <epochma/portfolio.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace epochma {

/// Mutually nondominated points sorted by ascending risk (and therefore
/// strictly ascending return). `portfolios` is either empty or parallel to
/// `points`.
struct Front {
    std::vector<ObjectivePoint> points;
    std::vector<Weights> portfolios;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
    bool has_portfolios() const { return !points.empty() && portfolios.size() == points.size(); }
};

namespace detail {

/// Indices of the nondominated subset, in ascending risk. Equal points keep
/// only their first occurrence.
inline std::vector<std::size_t> front_indices(std::span<const ObjectivePoint> pts)
{
    std::vector<std::size_t> order(pts.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (pts[a].risk != pts[b].risk) return pts[a].risk < pts[b].risk;
        return pts[a].ret > pts[b].ret;
    });
    std::vector<std::size_t> keep;
    for (auto i : order)
        if (keep.empty() || pts[i].ret > pts[keep.back()].ret) keep.push_back(i);
    return keep;
}

} // namespace detail

inline Front extract_front(std::span<const ObjectivePoint> pts, std::span<const Weights> portfolios = {})
{
    if (!portfolios.empty() && portfolios.size() != pts.size())
        throw std::invalid_argument("extract_front: portfolio count does not match point count");
    Front f;
    for (auto i : detail::front_indices(pts)) {
        f.points.push_back(pts[i]);
        if (!portfolios.empty()) f.portfolios.push_back(portfolios[i]);
    }
    return f;
}

/// Union of all fronts reduced to its nondominated subset. Portfolio links
/// survive only when every input carries them.
inline Front combine_fronts(std::span<const Front> fronts)
{
    std::vector<ObjectivePoint> pts;
    std::vector<Weights> ws;
    bool linked = true;
    for (const auto& f : fronts) {
        pts.insert(pts.end(), f.points.begin(), f.points.end());
        if (f.empty()) continue;
        linked = linked && f.has_portfolios();
        if (linked) ws.insert(ws.end(), f.portfolios.begin(), f.portfolios.end());
    }
    if (!linked) ws.clear();
    return extract_front(pts, ws);
}

struct HypervolumeResult {
    double area = 0.0;
    std::size_t clipped = 0; // points outside the reference box
};

/// Exact 2-D dominated area between the points and `ref` (max risk, min
/// return). Points outside the reference box are dropped and counted;
/// dominated points contribute nothing.
inline HypervolumeResult hypervolume_detailed(std::span<const ObjectivePoint> pts, const ObjectivePoint& ref)
{
    HypervolumeResult out;
    std::vector<ObjectivePoint> inside;
    inside.reserve(pts.size());
    for (const auto& p : pts) {
        if (p.risk <= ref.risk && p.ret >= ref.ret)
            inside.push_back(p);
        else
            ++out.clipped;
    }
    const auto idx = detail::front_indices(inside);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        const auto& p = inside[idx[i]];
        const double next_risk = i + 1 < idx.size() ? inside[idx[i + 1]].risk : ref.risk;
        out.area += (next_risk - p.risk) * (p.ret - ref.ret);
    }
    return out;
}

inline double hypervolume(std::span<const ObjectivePoint> pts, const ObjectivePoint& ref)
{
    return hypervolume_detailed(pts, ref).area;
}

inline double hypervolume(const Front& f, const ObjectivePoint& ref) { return hypervolume(f.points, ref); }

/// Reference point of a (combined) front: its maximum risk and minimum return.
inline ObjectivePoint reference_point(const Front& f)
{
    if (f.empty()) throw std::invalid_argument("reference_point: empty front");
    ObjectivePoint r{f.points.front().risk, f.points.front().ret};
    for (const auto& p : f.points) {
        r.risk = std::max(r.risk, p.risk);
        r.ret = std::min(r.ret, p.ret);
    }
    return r;
}

/// GD = sqrt(sum of squared nearest-reference distances) / N. Missing for an
/// empty front.
inline std::optional<double> generational_distance(std::span<const ObjectivePoint> front,
                                                   std::span<const ObjectivePoint> reference)
{
    if (reference.empty()) throw std::invalid_argument("generational_distance: empty reference front");
    if (front.empty()) return std::nullopt;
    double sum = 0.0;
    for (const auto& p : front) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& r : reference) {
            const double dr = p.risk - r.risk;
            const double dm = p.ret - r.ret;
            best = std::min(best, dr * dr + dm * dm);
        }
        sum += best;
    }
    return std::sqrt(sum) / static_cast<double>(front.size());
}

inline std::optional<double> generational_distance(const Front& f, const Front& reference)
{
    return generational_distance(f.points, reference.points);
}

struct SharpeSelection {
    std::size_t index = 0;
    double sharpe = 0.0;
};

/// Front member with the highest Sharpe index; ties go to the lower risk.
inline SharpeSelection select_by_sharpe(std::span<const ObjectivePoint> front, double risk_free_rate)
{
    if (front.empty()) throw std::invalid_argument("select_by_sharpe: empty front");
    SharpeSelection best{0, sharpe(front[0], risk_free_rate)};
    for (std::size_t i = 1; i < front.size(); ++i) {
        const double s = sharpe(front[i], risk_free_rate);
        if (s > best.sharpe || (s == best.sharpe && front[i].risk < front[best.index].risk)) best = {i, s};
    }
    return best;
}

inline SharpeSelection select_by_sharpe(const Front& f, double risk_free_rate)
{
    return select_by_sharpe(f.points, risk_free_rate);
}

// Front CSV: header `risk,ret[,sharpe]`, one point per row, shortest
// round-trip decimal representation.

namespace detail {

inline std::string format_double(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

} // namespace detail

inline void write_front_csv(std::ostream& os, const Front& f, std::optional<double> risk_free_rate = std::nullopt)
{
    os << (risk_free_rate ? "risk,ret,sharpe\n" : "risk,ret\n");
    for (const auto& p : f.points) {
        os << detail::format_double(p.risk) << ',' << detail::format_double(p.ret);
        if (risk_free_rate) os << ',' << detail::format_double(sharpe(p, *risk_free_rate));
        os << '\n';
    }
}

inline std::vector<ObjectivePoint> read_front_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line)) throw DataError("front file is empty");
    const auto header = detail::split(line, ',');
    if (header.size() < 2 || header[0] != "risk" || header[1] != "ret")
        throw DataError("front file header must start with 'risk,ret'");
    std::vector<ObjectivePoint> pts;
    std::size_t row = 0;
    while (std::getline(is, line)) {
        if (detail::trim(line).empty()) continue;
        ++row;
        const auto cells = detail::split(line, ',');
        ObjectivePoint p;
        if (cells.size() != header.size() || !detail::parse_double(cells[0], p.risk) ||
            !detail::parse_double(cells[1], p.ret))
            throw DataError("malformed front row " + std::to_string(row));
        pts.push_back(p);
    }
    return pts;
}

} // namespace epochma
