#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "leadlag/symbolize.hpp"

namespace leadlag {

/// Joint counts of two symbol series; counts[a * qy + b] = #{i : x_i = a, y_i = b}.
struct ContingencyTable {
    int qx = 0;
    int qy = 0;
    std::vector<std::int64_t> counts;
    std::int64_t n = 0;

    [[nodiscard]] std::int64_t at(int a, int b) const { return counts[static_cast<std::size_t>(a * qy + b)]; }
    [[nodiscard]] std::vector<std::int64_t> row_sums() const;
    [[nodiscard]] std::vector<std::int64_t> col_sums() const;
};

/// Lempel-Ziv entropy-rate estimate in bits per symbol.
struct EntropyRate {
    double value = 0.0;
    std::size_t n = 0;
    int q = 0;
    std::size_t complexity = 0;
    /// Set when n < 100; the estimate is returned but should not be trusted.
    bool unreliable = false;
};

/// Plug-in (empirical-frequency) entropy in bits. Throws InputError when empty.
[[nodiscard]] double plugin_entropy(const SymbolSeries& s);

/// Plug-in entropy in bits of a count vector with total n; zero counts contribute nothing.
[[nodiscard]] double entropy_from_counts(std::span<const std::int64_t> counts, std::int64_t n);

/// Throws InputError on length mismatch.
[[nodiscard]] ContingencyTable contingency(const SymbolSeries& x, const SymbolSeries& y);

/// Paired encoding a * y.q + b, so the joint entropy is one plug-in entropy call.
[[nodiscard]] SymbolSeries joint_series(const SymbolSeries& x, const SymbolSeries& y);

/// I(x;y) = H(x) + H(y) - H(x,y) in bits, clamped at zero for rounding-level negatives.
[[nodiscard]] double mutual_information(const SymbolSeries& x, const SymbolSeries& y);

/// Mutual information of a contingency table, same formula as mutual_information.
[[nodiscard]] double mutual_information(const ContingencyTable& table);

/// Number of phrases in the Lempel-Ziv (1976) parsing, Kaspar-Schuster scan.
[[nodiscard]] std::size_t lz76_complexity(std::span<const Symbol> s);

/// C_LZ76 * log2(n) / n. Throws InputError for n < 2. Not clipped at log2(q).
[[nodiscard]] EntropyRate lz_entropy_rate(const SymbolSeries& s);

/// Fast all-pairs mutual information between the columns of two symbol
/// matrices that share q and length. Precomputes per-symbol row bitsets of the
/// B columns and an n*log2(n) table; scoring one pair costs O(q^2 * T / 64).
/// Results are bit-identical to mutual_information on the same data because
/// both reduce to integer counts fed through the same count-to-bits routine.
class PairwiseMi {
  public:
    explicit PairwiseMi(const SymbolMatrix& b);

    /// mi[m * B.cols() + n] = I(a_m ; b_n). `a` must have B's row count and q.
    void score(const SymbolMatrix& a, std::vector<double>& mi) const;

    /// Same as score but the A columns are given as raw symbol spans (used by surrogates).
    void score_columns(std::span<const std::span<const Symbol>> a, std::vector<double>& mi) const;

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] int q() const noexcept { return q_; }

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    int q_ = 0;
    std::size_t words_ = 0;
    std::vector<std::uint64_t> b_bits_;        // [col][symbol][word]
    std::vector<std::int64_t> b_counts_;       // [col][symbol]
    std::vector<double> xlogx_;                // c * log2(c) for c in [0, rows]
    std::vector<std::vector<Symbol>> b_storage_;

    [[nodiscard]] double mi_from_counts(std::span<const std::int64_t> joint, std::span<const std::int64_t> a_counts,
                                        std::size_t b_col) const;
};

}  // namespace leadlag
