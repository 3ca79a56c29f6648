#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace epochma {

/// Row-major dense matrix used for price and return tables.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    friend bool operator==(const Matrix&, const Matrix&) = default;
};

/// Monthly closing prices; one row per month in chronological order, one
/// column per asset.
struct PriceSeries {
    std::vector<std::string> asset_names;
    Matrix prices;

    std::size_t months() const { return prices.rows; }
    std::size_t assets() const { return prices.cols; }
};

/// Statistical inputs of the mean-variance model.
struct AssetUniverse {
    std::vector<std::string> asset_names;
    std::vector<double> mean_returns;
    Matrix covariance;
    double risk_free_rate = 0.0;

    std::size_t size() const { return mean_returns.size(); }
};

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string_view trim(std::string_view s)
{
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split(std::string_view line, char delim)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(delim, start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline bool parse_double(std::string_view text, double& value)
{
    if (text.empty()) return false;
    if (text.front() == '+') text.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    return ec == std::errc{} && ptr == text.data() + text.size() && std::isfinite(value);
}

} // namespace detail

/// Parses a price table: a header row of asset names followed by one row of
/// strictly positive prices per month. Rows in errors are 1-based data rows.
inline PriceSeries parse_prices(std::istream& in, char delimiter = ',')
{
    PriceSeries series;
    std::string line;
    std::size_t line_no = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (!detail::trim(line).empty()) break;
    }
    if (detail::trim(line).empty()) throw DataError("price file is empty");

    for (auto name : detail::split(line, delimiter)) series.asset_names.emplace_back(name);
    const std::size_t n = series.asset_names.size();
    if (n < 2) throw DataError("at least 2 asset columns required");

    std::vector<double> values;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        ++row;
        const auto cells = detail::split(line, delimiter);
        if (cells.size() != n) {
            std::ostringstream msg;
            msg << "ragged row " << row << " (line " << line_no << "): expected " << n << " columns, got "
                << cells.size();
            throw DataError(msg.str());
        }
        for (std::size_t c = 0; c < n; ++c) {
            double v = 0.0;
            if (!detail::parse_double(cells[c], v) || !(v > 0.0)) {
                std::ostringstream msg;
                msg << "invalid price '" << cells[c] << "' at row " << row << ", column " << (c + 1) << " ("
                    << series.asset_names[c] << "): prices must be positive decimals";
                throw DataError(msg.str());
            }
            values.push_back(v);
        }
    }
    if (row < 2) throw DataError("at least 2 price rows required");

    series.prices.rows = row;
    series.prices.cols = n;
    series.prices.data = std::move(values);
    return series;
}

inline PriceSeries load_prices(const std::string& path, char delimiter = ',')
{
    std::ifstream in(path);
    if (!in) throw DataError("cannot open price file '" + path + "'");
    return parse_prices(in, delimiter);
}

/// Simple monthly returns r[t][i] = (p[t+1][i] - p[t][i]) / p[t][i].
inline Matrix to_returns(const PriceSeries& series)
{
    const auto& p = series.prices;
    if (p.rows < 2) throw DataError("at least 2 price rows required");
    Matrix r(p.rows - 1, p.cols);
    for (std::size_t t = 0; t + 1 < p.rows; ++t)
        for (std::size_t i = 0; i < p.cols; ++i) r(t, i) = (p(t + 1, i) - p(t, i)) / p(t, i);
    return r;
}

/// Column means and the sample covariance (denominator m - 1). Each unordered
/// pair is computed once, so the matrix is exactly symmetric.
inline AssetUniverse build_universe(const Matrix& returns, double risk_free_rate = 0.0,
                                    std::vector<std::string> asset_names = {})
{
    const std::size_t m = returns.rows;
    const std::size_t n = returns.cols;
    if (m < 2) throw DataError("at least 2 return rows required to estimate covariance");
    if (!asset_names.empty() && asset_names.size() != n) throw DataError("asset name count mismatch");

    AssetUniverse u;
    u.asset_names = std::move(asset_names);
    u.risk_free_rate = risk_free_rate;
    u.mean_returns.assign(n, 0.0);
    for (std::size_t t = 0; t < m; ++t)
        for (std::size_t i = 0; i < n; ++i) u.mean_returns[i] += returns(t, i);
    for (auto& mu : u.mean_returns) mu /= static_cast<double>(m);

    u.covariance = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            double s = 0.0;
            for (std::size_t t = 0; t < m; ++t)
                s += (returns(t, i) - u.mean_returns[i]) * (returns(t, j) - u.mean_returns[j]);
            s /= static_cast<double>(m - 1);
            u.covariance(i, j) = s;
            u.covariance(j, i) = s;
        }
    }
    return u;
}

inline AssetUniverse universe_from_prices(const PriceSeries& series, double risk_free_rate = 0.0)
{
    return build_universe(to_returns(series), risk_free_rate, series.asset_names);
}

} // namespace epochma
