#pragma once

#include <epochma/random.hpp>

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace epochma {

using Genome = std::vector<double>;

namespace detail {

inline double clip01(double x) { return std::clamp(x, 0.0, 1.0); }

/// SBX spread factor for a uniform draw u.
inline double sbx_beta(double u, double eta)
{
    const double e = 1.0 / (eta + 1.0);
    return u <= 0.5 ? std::pow(2.0 * u, e) : std::pow(1.0 / (2.0 * (1.0 - u)), e);
}

/// Unclipped SBX children for one gene; their mean equals the parents' mean.
inline std::pair<double, double> sbx_gene(double p1, double p2, double beta)
{
    return {0.5 * ((1.0 - beta) * p1 + (1.0 + beta) * p2), 0.5 * ((1.0 + beta) * p1 + (1.0 - beta) * p2)};
}

/// Polynomial perturbation of a single value in [0, 1] for a uniform draw u.
inline double polynomial_perturb(double y, double eta_m, double u)
{
    const double pw = 1.0 / (eta_m + 1.0);
    double dq = 0.0;
    if (u <= 0.5) {
        const double xy = 1.0 - y;
        const double val = 2.0 * u + (1.0 - 2.0 * u) * std::pow(xy, eta_m + 1.0);
        dq = std::pow(val, pw) - 1.0;
    } else {
        const double xy = y;
        const double val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(xy, eta_m + 1.0);
        dq = 1.0 - std::pow(val, pw);
    }
    return clip01(y + dq);
}

} // namespace detail

/// Simulated binary crossover over genes bounded in [0, 1]. With probability
/// 1 - rate the parents are copied; otherwise each gene is recombined with
/// probability 0.5.
template <std::uniform_random_bit_generator G>
std::pair<Genome, Genome> sbx_crossover(std::span<const double> p1, std::span<const double> p2, double eta,
                                        double rate, G& gen)
{
    if (p1.size() != p2.size()) throw std::invalid_argument("sbx_crossover: parent length mismatch");
    Genome c1(p1.begin(), p1.end());
    Genome c2(p2.begin(), p2.end());
    if (!bernoulli(gen, rate)) return {std::move(c1), std::move(c2)};

    for (std::size_t i = 0; i < c1.size(); ++i) {
        if (uniform01(gen) >= 0.5) continue;
        if (std::abs(p1[i] - p2[i]) <= 1e-14) continue;
        const auto [a, b] = detail::sbx_gene(p1[i], p2[i], detail::sbx_beta(uniform01(gen), eta));
        c1[i] = detail::clip01(a);
        c2[i] = detail::clip01(b);
    }
    return {std::move(c1), std::move(c2)};
}

/// Polynomial mutation applied independently to each gene with probability
/// `rate`.
template <std::uniform_random_bit_generator G>
void poly_mutation(Genome& genome, double eta_m, double rate, G& gen)
{
    if (rate <= 0.0) return;
    for (auto& y : genome)
        if (bernoulli(gen, rate)) y = detail::polynomial_perturb(detail::clip01(y), eta_m, uniform01(gen));
}

} // namespace epochma
