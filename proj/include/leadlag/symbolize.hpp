#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace leadlag {

using Symbol = std::uint16_t;

/// Discrete series over the alphabet [0, q).
struct SymbolSeries {
    std::vector<Symbol> values;
    int q = 0;

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
    [[nodiscard]] std::span<const Symbol> span() const noexcept { return values; }
};

/// One SymbolSeries per asset, all of equal length and alphabet.
struct SymbolMatrix {
    std::vector<SymbolSeries> columns;

    [[nodiscard]] std::size_t cols() const noexcept { return columns.size(); }
    [[nodiscard]] std::size_t rows() const noexcept { return columns.empty() ? 0 : columns.front().size(); }
    [[nodiscard]] int q() const noexcept { return columns.empty() ? 0 : columns.front().q; }
};

inline constexpr int kMaxAlphabet = 255;

/// Equal-population binning: bin = floor(rank * q / n), rank being the zero-based
/// position in a stable sort (ties keep their original order). Bin populations
/// differ by at most one.
///
/// Throws InsufficientDataError if x.size() < q and InputError for q outside
/// [2, 255] or non-finite input.
[[nodiscard]] SymbolSeries quantile_symbolize(std::span<const double> x, int q);

/// Symbolizes each column with its own quantiles.
[[nodiscard]] SymbolMatrix symbolize_matrix(const Eigen::MatrixXd& data, int q);

}  // namespace leadlag
