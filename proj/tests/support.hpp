#pragma once

#include <epochma/market_data.hpp>
#include <epochma/portfolio.hpp>

#include <random>
#include <vector>

namespace testing_support {

// Universe with covariance A·Aᵀ/n (PSD by construction) and means in [-0.01, 0.03].
inline epochma::AssetUniverse random_universe(std::size_t n, std::mt19937_64& gen, double rf = 0.0)
{
    std::uniform_real_distribution<double> mean(-0.01, 0.03);
    std::normal_distribution<double> z(0.0, 0.05);
    std::vector<double> a(n * n);
    for (auto& x : a) x = z(gen);
    epochma::AssetUniverse u;
    u.risk_free_rate = rf;
    u.mean_returns.resize(n);
    for (auto& m : u.mean_returns) m = mean(gen);
    u.covariance = epochma::Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += a[i * n + k] * a[j * n + k];
            u.covariance(i, j) = s / static_cast<double>(n);
        }
    for (std::size_t i = 0; i < n; ++i) u.asset_names.push_back("A" + std::to_string(i));
    return u;
}

inline std::vector<double> random_simplex(std::size_t n, std::mt19937_64& gen)
{
    std::exponential_distribution<double> e(1.0);
    std::vector<double> w(n);
    double s = 0.0;
    for (auto& x : w) s += (x = e(gen));
    for (auto& x : w) x /= s;
    return w;
}

inline epochma::AssetUniverse dataset_universe()
{
    return epochma::universe_from_prices(epochma::load_prices(EPOCHMA_TEST_DATA));
}

} // namespace testing_support
