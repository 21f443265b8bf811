#pragma once

#include <cstddef>
#include <cstdint>

#include <Eigen/Dense>

#include "leadlag/marketdata.hpp"
#include "leadlag/symbolize.hpp"

namespace leadlag {

/// Gamma(alpha, beta) law of plug-in MI (bits) between independent discrete
/// variables: alpha = (qx - 1)(qy - 1) / 2, beta = 1 / (N ln 2).
struct GammaNull {
    double alpha = 0.0;
    double beta = 0.0;
    std::size_t N = 0;
};

/// Throws InputError unless qx, qy >= 2 and N >= 1.
[[nodiscard]] GammaNull gamma_null(int qx, int qy, std::size_t N);

/// Regularized lower incomplete gamma P(a, x). Series for x < a + 1, continued
/// fraction otherwise; throws NumericalError if either fails to converge.
[[nodiscard]] double regularized_gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), evaluated directly
/// so tail probabilities keep their relative precision.
[[nodiscard]] double regularized_gamma_q(double a, double x);

/// Threshold x (bits) with P(alpha, x / beta) = prob, 0 < prob < 1.
[[nodiscard]] double gamma_quantile(const GammaNull& g, double prob);

/// Threshold x (bits) with upper-tail probability Q(alpha, x / beta) = tail.
/// Preferred for validation thresholds such as p / N^2, where 1 - tail would
/// round away the significant digits.
[[nodiscard]] double gamma_upper_quantile(const GammaNull& g, double tail);

/// Upper-tail probability of an observed MI under the null; 1 at zero.
[[nodiscard]] double mi_pvalue(const GammaNull& g, double observed_mi);

/// C(m, n): Pearson correlation between column m of A and column n of B.
struct LaggedCorrMatrix {
    Eigen::MatrixXd C;
    int lambda = 0;
    std::size_t T = 0;
};

/// Throws InsufficientDataError when T < 3 and NumericalError naming the
/// column when one is constant.
[[nodiscard]] LaggedCorrMatrix lagged_pearson(const LaggedPair& pair);

enum class Statistic { mi, pearson };
enum class ShuffleMode {
    rows,     ///< permute whole rows of A (keeps cross-sectional structure)
    columns,  ///< independent permutation per A column (diagnostic)
};

struct ShuffleOptions {
    std::size_t n_shuffles = 1000;
    std::uint64_t seed = 0;
    ShuffleMode mode = ShuffleMode::rows;
    int q = 4;
    /// Test hook: every realization uses the identity permutation.
    bool identity = false;
    unsigned threads = 0;
};

using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// U(m, n) counts realizations with shuffled >= observed; D(m, n) (Pearson
/// only) counts shuffled <= observed. Ties land in both.
struct SurrogateCounts {
    Statistic statistic = Statistic::mi;
    Eigen::MatrixXd observed;
    CountMatrix U;
    CountMatrix D;
    std::size_t n_shuffles = 0;
    std::uint64_t seed = 0;

    [[nodiscard]] bool has_d() const noexcept { return D.size() != 0; }
};

/// Realization r draws its permutation from an engine seeded by (seed, r), so
/// the result is independent of thread count.
[[nodiscard]] SurrogateCounts shuffle_surrogates(const LaggedPair& pair, Statistic statistic,
                                                 const ShuffleOptions& options);

/// MI surrogates on already symbolized A/B columns.
[[nodiscard]] SurrogateCounts shuffle_mi_surrogates(const SymbolMatrix& a, const SymbolMatrix& b,
                                                    const ShuffleOptions& options);

/// Pearson surrogates on raw A/B returns.
[[nodiscard]] SurrogateCounts shuffle_pearson_surrogates(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                                         const ShuffleOptions& options);

/// One-tailed empirical p-value: U/n for MI and non-negative correlations, D/n for negative ones.
[[nodiscard]] double surrogate_pvalue(const SurrogateCounts& counts, Eigen::Index m, Eigen::Index n);

}  // namespace leadlag
