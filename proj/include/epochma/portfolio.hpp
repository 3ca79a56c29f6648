#pragma once

#include <epochma/market_data.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace epochma {

using Weights = std::vector<double>;

/// A point in objective space: risk is the standard deviation of the
/// portfolio return (minimized), ret its expected return (maximized).
struct ObjectivePoint {
    double risk = 0.0;
    double ret = 0.0;

    friend bool operator==(const ObjectivePoint&, const ObjectivePoint&) = default;
};

/// True iff a is no worse than b in both objectives and strictly better in one.
inline bool dominates(const ObjectivePoint& a, const ObjectivePoint& b)
{
    return a.risk <= b.risk && a.ret >= b.ret && (a.risk < b.risk || a.ret > b.ret);
}

inline ObjectivePoint evaluate(const AssetUniverse& u, std::span<const double> w)
{
    const std::size_t n = u.size();
    if (w.size() != n) throw std::invalid_argument("weight vector length does not match universe size");

    double ret = 0.0;
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (w[i] == 0.0) continue;
        ret += w[i] * u.mean_returns[i];
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += u.covariance(i, j) * w[j];
        var += w[i] * row;
    }
    // absorbs tiny negative noise from cancellation
    return {std::sqrt(std::max(var, 0.0)), ret};
}

inline constexpr double degenerate_risk = 1e-12;

/// Excess return per unit of risk. Zero-risk points map to signed infinities
/// (or 0 when the excess return is itself negligible).
inline double sharpe(const ObjectivePoint& p, double risk_free_rate)
{
    const double excess = p.ret - risk_free_rate;
    if (p.risk < degenerate_risk) {
        if (std::abs(excess) < degenerate_risk) return 0.0;
        return excess > 0.0 ? std::numeric_limits<double>::infinity()
                            : -std::numeric_limits<double>::infinity();
    }
    return excess / p.risk;
}

inline std::size_t support_size(std::span<const double> w)
{
    return static_cast<std::size_t>(std::count_if(w.begin(), w.end(), [](double x) { return x > 0.0; }));
}

/// Keeps the k largest strictly positive entries (ties to the lower index),
/// zeroes the rest and rescales the survivors to sum to one. Inputs that
/// already satisfy both constraints are returned unchanged, which makes the
/// operator exactly idempotent.
inline Weights repair(std::span<const double> w, std::size_t k)
{
    if (k == 0) throw std::invalid_argument("cardinality bound must be at least 1");
    std::vector<std::size_t> positive;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (!(w[i] >= 0.0)) throw std::invalid_argument("weights must be finite and nonnegative");
        if (w[i] > 0.0) positive.push_back(i);
    }
    if (positive.empty()) throw std::invalid_argument("cannot repair an all-zero weight vector");

    if (positive.size() > k) {
        std::stable_sort(positive.begin(), positive.end(), [&](std::size_t a, std::size_t b) { return w[a] > w[b]; });
        positive.resize(k);
        std::sort(positive.begin(), positive.end());
    }

    double sum = 0.0;
    for (auto i : positive) sum += w[i];

    Weights out(w.size(), 0.0);
    if (positive.size() == support_size(w) && std::abs(sum - 1.0) <= 1e-12) {
        for (auto i : positive) out[i] = w[i];
        return out;
    }
    for (auto i : positive) out[i] = w[i] / sum;
    return out;
}

/// A repaired weight vector together with its cached evaluation.
class Portfolio {
public:
    Portfolio() = default;

    /// `weights` must already lie on the simplex; use repair() first otherwise.
    Portfolio(const AssetUniverse& u, Weights weights)
        : weights_(std::move(weights)), point_(evaluate(u, weights_)), sharpe_(epochma::sharpe(point_, u.risk_free_rate))
    {
    }

    static Portfolio repaired(const AssetUniverse& u, std::span<const double> raw, std::size_t k)
    {
        return Portfolio(u, repair(raw, k));
    }

    const Weights& weights() const { return weights_; }
    const ObjectivePoint& point() const { return point_; }
    double risk() const { return point_.risk; }
    double ret() const { return point_.ret; }
    double sharpe() const { return sharpe_; }

    friend bool operator==(const Portfolio& a, const Portfolio& b) { return a.weights_ == b.weights_; }

private:
    Weights weights_;
    ObjectivePoint point_;
    double sharpe_ = 0.0;
};

} // namespace epochma
