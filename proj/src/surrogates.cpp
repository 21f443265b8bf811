#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "leadlag/detail/parallel.hpp"
#include "leadlag/detail/rng.hpp"
#include "leadlag/error.hpp"
#include "leadlag/infotheory.hpp"
#include "leadlag/nullmodels.hpp"

namespace leadlag {

namespace {

// Column-standardized copy (mean 0, sample sd 1). Names the offending column when constant.
Eigen::MatrixXd standardize(const Eigen::MatrixXd& X, const char* which, const std::vector<std::string>* symbols) {
    const auto T = X.rows();
    Eigen::MatrixXd Z(T, X.cols());
    for (Eigen::Index c = 0; c < X.cols(); ++c) {
        const double mean = X.col(c).mean();
        const Eigen::ArrayXd centered = X.col(c).array() - mean;
        const double sd = std::sqrt(centered.square().sum() / static_cast<double>(T - 1));
        if (!(sd > 0.0) || !std::isfinite(sd)) {
            std::string name = symbols && static_cast<std::size_t>(c) < symbols->size() ? (*symbols)[c]
                                                                                        : std::to_string(c);
            throw NumericalError(std::string("correlation undefined: column '") + name + "' of " + which +
                                 " is constant");
        }
        Z.col(c) = (centered / sd).matrix();
    }
    return Z;
}

Eigen::MatrixXd correlation(const Eigen::MatrixXd& ZA, const Eigen::MatrixXd& ZB) {
    Eigen::MatrixXd C = (ZA.transpose() * ZB) / static_cast<double>(ZA.rows() - 1);
    return C.cwiseMax(-1.0).cwiseMin(1.0);
}

void check_shapes(Eigen::Index ta, Eigen::Index tb, std::size_t n_shuffles) {
    if (ta != tb) throw InputError("A and B must have the same number of rows");
    if (n_shuffles < 1) throw InputError("at least one shuffle is required");
}

// Permutation(s) for realization r, drawn from an engine seeded by (seed, r).
void draw_permutation(std::vector<std::size_t>& perm, detail::Engine& engine, bool identity) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    if (!identity) std::shuffle(perm.begin(), perm.end(), engine);
}

}  // namespace

LaggedCorrMatrix lagged_pearson(const LaggedPair& pair) {
    if (pair.T() < 3) throw InsufficientDataError("lagged correlation needs at least 3 aligned rows");
    LaggedCorrMatrix out;
    out.lambda = pair.lambda;
    out.T = pair.T();
    out.C = correlation(standardize(pair.A, "A", &pair.symbols), standardize(pair.B, "B", &pair.symbols));
    return out;
}

SurrogateCounts shuffle_mi_surrogates(const SymbolMatrix& a, const SymbolMatrix& b, const ShuffleOptions& options) {
    check_shapes(static_cast<Eigen::Index>(a.rows()), static_cast<Eigen::Index>(b.rows()), options.n_shuffles);
    const PairwiseMi scorer(b);
    const std::size_t na = a.cols();
    const std::size_t nb = b.cols();
    const std::size_t T = a.rows();

    SurrogateCounts out;
    out.statistic = Statistic::mi;
    out.n_shuffles = options.n_shuffles;
    out.seed = options.seed;
    std::vector<double> observed;
    scorer.score(a, observed);
    out.observed.resize(static_cast<Eigen::Index>(na), static_cast<Eigen::Index>(nb));
    for (std::size_t m = 0; m < na; ++m)
        for (std::size_t n = 0; n < nb; ++n)
            out.observed(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)) = observed[m * nb + n];

    const unsigned workers = detail::worker_count(options.n_shuffles, options.threads);
    std::vector<std::vector<std::int64_t>> partial(workers, std::vector<std::int64_t>(na * nb, 0));

    detail::parallel_chunks(options.n_shuffles, workers, [&](std::size_t begin, std::size_t end, unsigned w) {
        std::vector<std::vector<Symbol>> shuffled(na, std::vector<Symbol>(T));
        std::vector<std::span<const Symbol>> spans(shuffled.begin(), shuffled.end());
        std::vector<std::size_t> perm(T);
        std::vector<double> mi;
        auto& U = partial[w];
        for (std::size_t r = begin; r < end; ++r) {
            auto engine = detail::make_engine(options.seed, r);
            for (std::size_t m = 0; m < na; ++m) {
                if (m == 0 || options.mode == ShuffleMode::columns) draw_permutation(perm, engine, options.identity);
                const auto& src = a.columns[m].values;
                auto& dst = shuffled[m];
                for (std::size_t i = 0; i < T; ++i) dst[i] = src[perm[i]];
            }
            scorer.score_columns(spans, mi);
            for (std::size_t k = 0; k < mi.size(); ++k) U[k] += mi[k] >= observed[k] ? 1 : 0;
        }
    });

    out.U = CountMatrix::Zero(static_cast<Eigen::Index>(na), static_cast<Eigen::Index>(nb));
    for (const auto& U : partial)
        for (std::size_t m = 0; m < na; ++m)
            for (std::size_t n = 0; n < nb; ++n)
                out.U(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)) += U[m * nb + n];
    return out;
}

SurrogateCounts shuffle_pearson_surrogates(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                           const ShuffleOptions& options) {
    check_shapes(A.rows(), B.rows(), options.n_shuffles);
    if (A.rows() < 3) throw InsufficientDataError("lagged correlation needs at least 3 aligned rows");
    const Eigen::MatrixXd ZA = standardize(A, "A", nullptr);
    const Eigen::MatrixXd ZB = standardize(B, "B", nullptr);
    const auto T = static_cast<std::size_t>(A.rows());

    SurrogateCounts out;
    out.statistic = Statistic::pearson;
    out.n_shuffles = options.n_shuffles;
    out.seed = options.seed;
    out.observed = correlation(ZA, ZB);

    const unsigned workers = detail::worker_count(options.n_shuffles, options.threads);
    std::vector<CountMatrix> partial_u(workers, CountMatrix::Zero(A.cols(), B.cols()));
    std::vector<CountMatrix> partial_d(workers, CountMatrix::Zero(A.cols(), B.cols()));

    detail::parallel_chunks(options.n_shuffles, workers, [&](std::size_t begin, std::size_t end, unsigned w) {
        Eigen::MatrixXd shuffled(ZA.rows(), ZA.cols());
        std::vector<std::size_t> perm(T);
        auto& U = partial_u[w];
        auto& D = partial_d[w];
        for (std::size_t r = begin; r < end; ++r) {
            auto engine = detail::make_engine(options.seed, r);
            for (Eigen::Index m = 0; m < ZA.cols(); ++m) {
                if (m == 0 || options.mode == ShuffleMode::columns) draw_permutation(perm, engine, options.identity);
                for (std::size_t i = 0; i < T; ++i)
                    shuffled(static_cast<Eigen::Index>(i), m) = ZA(static_cast<Eigen::Index>(perm[i]), m);
            }
            const Eigen::MatrixXd C = correlation(shuffled, ZB);
            U.array() += (C.array() >= out.observed.array()).cast<std::int64_t>();
            D.array() += (C.array() <= out.observed.array()).cast<std::int64_t>();
        }
    });

    out.U = CountMatrix::Zero(A.cols(), B.cols());
    out.D = CountMatrix::Zero(A.cols(), B.cols());
    for (unsigned w = 0; w < workers; ++w) {
        out.U += partial_u[w];
        out.D += partial_d[w];
    }
    return out;
}

SurrogateCounts shuffle_surrogates(const LaggedPair& pair, Statistic statistic, const ShuffleOptions& options) {
    if (statistic == Statistic::pearson) {
        try {
            return shuffle_pearson_surrogates(pair.A, pair.B, options);
        } catch (const NumericalError&) {
            // rerun the check with symbol names for a better message
            (void)lagged_pearson(pair);
            throw;
        }
    }
    return shuffle_mi_surrogates(symbolize_matrix(pair.A, options.q), symbolize_matrix(pair.B, options.q), options);
}

double surrogate_pvalue(const SurrogateCounts& counts, Eigen::Index m, Eigen::Index n) {
    const auto total = static_cast<double>(counts.n_shuffles);
    if (counts.statistic == Statistic::pearson && counts.has_d() && counts.observed(m, n) < 0.0) {
        return static_cast<double>(counts.D(m, n)) / total;
    }
    return static_cast<double>(counts.U(m, n)) / total;
}

}  // namespace leadlag
