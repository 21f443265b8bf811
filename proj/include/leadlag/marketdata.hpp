#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace leadlag {

/// Price observations: rows are timestamps, columns are symbols.
///
/// Invariants: all prices > 0, timestamps strictly increasing (lexicographic),
/// day_index non-decreasing, no missing cells.
struct PriceMatrix {
    std::vector<std::string> symbols;
    std::vector<std::string> timestamps;
    std::vector<std::int64_t> day_index;
    Eigen::MatrixXd prices;

    [[nodiscard]] std::size_t rows() const noexcept { return timestamps.size(); }
    [[nodiscard]] std::size_t cols() const noexcept { return symbols.size(); }
};

/// Natural-log returns. Each row belongs to exactly one trading day; overnight
/// returns are never formed.
struct ReturnMatrix {
    std::vector<std::string> symbols;
    std::vector<std::int64_t> day_index;
    Eigen::MatrixXd returns;
    int tau = 1;

    [[nodiscard]] std::size_t rows() const noexcept { return day_index.size(); }
    [[nodiscard]] std::size_t cols() const noexcept { return symbols.size(); }
};

/// Row-aligned leader (A) and lagged follower (B) returns. Row i of B lies
/// `lambda` steps after row i of A inside the same trading day.
struct LaggedPair {
    std::vector<std::string> symbols;
    Eigen::MatrixXd A;
    Eigen::MatrixXd B;
    std::vector<std::int64_t> day_a;
    std::vector<std::int64_t> day_b;
    int lambda = 0;

    [[nodiscard]] std::size_t T() const noexcept { return static_cast<std::size_t>(A.rows()); }
};

enum class CsvFormat { wide, long_ };

struct IngestResult {
    PriceMatrix prices;
    /// Symbols dropped because at least one cell was missing.
    std::vector<std::string> dropped;
};

/// Reads `timestamp,day,SYM1,...` (wide) or `timestamp,day,symbol,price` (long).
/// Symbols with any blank cell are dropped and listed in IngestResult::dropped.
/// Throws ParseError (with line number) on malformed rows and InputError on
/// non-positive prices, duplicates, or when no complete symbol remains.
[[nodiscard]] IngestResult ingest_csv(const std::filesystem::path& path, CsvFormat format);
[[nodiscard]] IngestResult read_price_csv(std::istream& in, CsvFormat format);

/// Writes the wide format understood by ingest_csv. Prices use round-trip precision.
void write_price_csv(std::ostream& out, const PriceMatrix& prices);

/// r(t) = ln p(t) - ln p(t - tau), computed inside each day only.
/// Throws InsufficientDataError naming the first day with <= tau rows.
[[nodiscard]] ReturnMatrix log_returns(const PriceMatrix& prices, int tau = 1);

/// Within each day of d rows, A takes rows [0, d - lambda) and B takes rows
/// [lambda, d). Days with d <= lambda contribute nothing; throws
/// InsufficientDataError when every day is that short.
[[nodiscard]] LaggedPair build_lagged_pair(const ReturnMatrix& returns, int lambda);

/// Number of aligned rows build_lagged_pair would produce: sum over days of max(0, d - lambda).
[[nodiscard]] std::size_t lagged_row_count(const ReturnMatrix& returns, int lambda);

/// Relabels every row as day 0 (daily data, where the sampling interval spans the overnight gap).
void collapse_days(PriceMatrix& prices);

}  // namespace leadlag
