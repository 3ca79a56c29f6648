#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace epochma::stats {

/// Quantile by linear interpolation between order statistics (type 7).
inline double quantile(std::span<const double> sample, double q)
{
    if (sample.empty()) throw std::invalid_argument("quantile of an empty sample");
    std::vector<double> v(sample.begin(), sample.end());
    std::sort(v.begin(), v.end());
    const double h = (static_cast<double>(v.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

struct Dispersion {
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double qd = 0.0;                  // (Q3 - Q1) / 2
    std::optional<double> cqd;        // (Q3 - Q1) / (Q3 + Q1), when Q3 + Q1 > 0
};

inline Dispersion dispersion(std::span<const double> sample)
{
    Dispersion d;
    d.q1 = quantile(sample, 0.25);
    d.median = quantile(sample, 0.5);
    d.q3 = quantile(sample, 0.75);
    d.qd = (d.q3 - d.q1) / 2.0;
    if (d.q3 + d.q1 > 0.0) d.cqd = (d.q3 - d.q1) / (d.q3 + d.q1);
    return d;
}

struct MannWhitneyOptions {
    bool exact_when_small = true;    // exact null distribution for n_a + n_b <= 12 without ties
    bool continuity_correction = true;
};

struct MannWhitneyResult {
    double u_a = 0.0;       // number of (a, b) pairs with a > b, ties counting 1/2
    double u_b = 0.0;
    double p_two_sided = 1.0;
    double p_greater = 1.0; // alternative: sample A tends to be larger
    double p_less = 1.0;    // alternative: sample A tends to be smaller
    bool exact = false;
};

namespace detail {

/// Number of arrangements giving each value of U for sample sizes (m, n).
inline std::vector<double> u_distribution(std::size_t m, std::size_t n)
{
    // f[m][n][u] = f[m-1][n][u-n] + f[m][n-1][u]
    std::vector<std::vector<std::vector<double>>> f(m + 1, std::vector<std::vector<double>>(n + 1));
    for (std::size_t i = 0; i <= m; ++i)
        for (std::size_t j = 0; j <= n; ++j) {
            auto& cur = f[i][j];
            cur.assign(i * j + 1, 0.0);
            if (i == 0 || j == 0) {
                cur[0] = 1.0;
                continue;
            }
            for (std::size_t u = 0; u <= i * j; ++u) {
                if (u >= j && u - j < f[i - 1][j].size()) cur[u] += f[i - 1][j][u - j];
                if (u < f[i][j - 1].size()) cur[u] += f[i][j - 1][u];
            }
        }
    return f[m][n];
}

inline double normal_upper_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

} // namespace detail

/// Two-sample Mann-Whitney U test with midranks for ties. Small tie-free
/// samples use the exact permutation distribution; otherwise the normal
/// approximation with tie-corrected variance.
inline MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                                        const MannWhitneyOptions& opt = {})
{
    const std::size_t na = a.size();
    const std::size_t nb = b.size();
    if (na == 0 || nb == 0) throw std::invalid_argument("mann_whitney_u: both samples must be nonempty");
    const std::size_t n = na + nb;

    std::vector<std::pair<double, int>> pooled;
    pooled.reserve(n);
    for (double x : a) pooled.emplace_back(x, 0);
    for (double x : b) pooled.emplace_back(x, 1);
    std::sort(pooled.begin(), pooled.end(), [](const auto& x, const auto& y) { return x.first < y.first; });

    double rank_sum_a = 0.0;
    double tie_term = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && pooled[j].first == pooled[i].first) ++j;
        const double t = static_cast<double>(j - i);
        const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k)
            if (pooled[k].second == 0) rank_sum_a += midrank;
        tie_term += t * t * t - t;
        i = j;
    }

    MannWhitneyResult r;
    const double dna = static_cast<double>(na);
    const double dnb = static_cast<double>(nb);
    r.u_a = rank_sum_a - dna * (dna + 1.0) / 2.0;
    r.u_b = dna * dnb - r.u_a;

    if (opt.exact_when_small && n <= 12 && tie_term == 0.0) {
        const auto dist = detail::u_distribution(na, nb);
        double total = 0.0;
        for (double c : dist) total += c;
        const auto u = static_cast<std::size_t>(std::llround(r.u_a));
        double le = 0.0;
        double ge = 0.0;
        for (std::size_t k = 0; k < dist.size(); ++k) {
            if (k <= u) le += dist[k];
            if (k >= u) ge += dist[k];
        }
        r.p_less = le / total;
        r.p_greater = ge / total;
        r.p_two_sided = std::min(1.0, 2.0 * std::min(r.p_less, r.p_greater));
        r.exact = true;
        return r;
    }

    const double dn = static_cast<double>(n);
    const double mean = dna * dnb / 2.0;
    const double var = dna * dnb / 12.0 * ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));
    if (!(var > 0.0)) return r; // all observations tied
    const double sd = std::sqrt(var);
    const double cc = opt.continuity_correction ? 0.5 : 0.0;
    const double diff = r.u_a - mean;
    r.p_two_sided = std::min(1.0, 2.0 * detail::normal_upper_tail(std::max(0.0, std::abs(diff) - cc) / sd));
    r.p_greater = detail::normal_upper_tail((diff - cc) / sd);
    r.p_less = detail::normal_upper_tail(-(diff + cc) / sd);
    return r;
}

} // namespace epochma::stats
