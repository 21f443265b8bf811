#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "leadlag/marketdata.hpp"
#include "leadlag/nullmodels.hpp"

namespace leadlag {

enum class Correction { none, bonferroni, fdr };
enum class Method { gamma, shuffle };

/// How many hypotheses a correction divides by for N assets.
enum class TestCount {
    all_ordered,  ///< N^2
    off_diagonal  ///< N(N - 1)
};

[[nodiscard]] std::size_t n_tests_for(std::size_t n_assets, TestCount mode);

/// Score of the ordered pair from -> to: the past of `from` (column of A)
/// against the future of `to` (column of B).
struct PairScore {
    std::size_t from = 0;
    std::size_t to = 0;
    int lambda = 0;
    double statistic = 0.0;  ///< MI in bits, or correlation
    double p_value = 1.0;
    std::optional<GammaNull> gamma;  ///< set for the analytic method
    std::int64_t u = -1;             ///< surrogate counts, -1 when unused
    std::int64_t d = -1;
    std::size_t n_shuffles = 0;
};

struct PairScores {
    std::vector<std::string> symbols;
    int lambda = 0;
    std::size_t T = 0;
    Statistic statistic = Statistic::mi;
    Method method = Method::gamma;
    /// All N^2 ordered pairs, row-major by (from, to); self pairs included for diagnostics.
    std::vector<PairScore> scores;
};

struct Edge {
    std::string from;
    std::string to;
    double statistic = 0.0;
    double p_value = 1.0;
    int sign = 0;  ///< +1 / -1 for correlation links, 0 for MI

    friend bool operator==(const Edge&, const Edge&) = default;
};

struct DirectedNetwork {
    std::vector<std::string> nodes;
    std::vector<Edge> edges;  ///< sorted by (from, to)
    Correction correction = Correction::bonferroni;
    double p_nominal = 0.01;
    int lambda = 0;
    std::size_t n_tests = 0;
    Statistic statistic = Statistic::mi;
};

struct LagSweepResult {
    std::vector<int> lambdas;
    std::vector<std::size_t> count_bonferroni;
    std::vector<std::size_t> count_fdr;
    /// Lags that could not be evaluated, with the reason.
    std::vector<std::pair<int, std::string>> skipped;
};

struct ScoreOptions {
    int q = 4;
    Method method = Method::gamma;
    Statistic statistic = Statistic::mi;
    std::size_t n_shuffles = 1000;
    std::uint64_t seed = 0;
    ShuffleMode shuffle_mode = ShuffleMode::rows;
    unsigned threads = 0;
};

struct ValidationOptions {
    double p = 0.01;
    TestCount test_count = TestCount::all_ordered;
};

/// p / n_tests. Throws InputError unless 0 < p < 1 and n_tests >= 1.
[[nodiscard]] double bonferroni_threshold(double p, std::size_t n_tests);

/// Step-up false discovery rate selection: finds the largest k with
/// p_(k) < k * p / n_tests (strict) and returns the input indices of the k
/// smallest p-values, ordered by ascending p-value. Empty when no k qualifies.
[[nodiscard]] std::vector<std::size_t> fdr_select(std::span<const double> p_values, double p, std::size_t n_tests);

/// Scores all ordered pairs of one lagged pair. The MI null uses the aligned
/// row count T as its sample size. Pearson is only validated by shuffling.
[[nodiscard]] PairScores score_pairs(const LaggedPair& pair, const ScoreOptions& options);

/// Keeps exactly the off-diagonal pairs passing the corrected threshold.
/// Bonferroni keeps p < p_nominal / n_tests; FDR uses fdr_select; `none`
/// keeps p < p_nominal. Throws InputError if an off-diagonal pair is missing
/// or duplicated.
[[nodiscard]] DirectedNetwork validate_links(const PairScores& scores, Correction correction,
                                             const ValidationOptions& options);

/// True iff every edge (from, to) of `a` is in `b`. Throws InputError when node sets differ.
[[nodiscard]] bool is_subnetwork(const DirectedNetwork& a, const DirectedNetwork& b);

struct LagAnalysis {
    PairScores scores;
    DirectedNetwork bonferroni;
    DirectedNetwork fdr;
};

/// Score, then build both networks. Throws NumericalError if the Bonferroni
/// network is not contained in the FDR network.
[[nodiscard]] LagAnalysis analyze_lag(const ReturnMatrix& returns, int lambda, const ScoreOptions& scoring,
                                      const ValidationOptions& validation);

/// Shuffle seed used for lag `lambda` under root seed `seed`.
[[nodiscard]] std::uint64_t lag_seed(std::uint64_t seed, int lambda);

/// analyze_lag for each lag; lags with too little data are skipped and reported.
/// Throws InputError on an empty or negative lag list.
[[nodiscard]] LagSweepResult lag_sweep(const ReturnMatrix& returns, std::span<const int> lambdas,
                                       const ScoreOptions& scoring, const ValidationOptions& validation);

[[nodiscard]] const char* to_string(Correction c);
[[nodiscard]] const char* to_string(Method m);
[[nodiscard]] const char* to_string(Statistic s);

}  // namespace leadlag
