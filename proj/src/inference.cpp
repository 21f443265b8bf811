#include "leadlag/inference.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <utility>

#include "leadlag/detail/rng.hpp"
#include "leadlag/error.hpp"
#include "leadlag/infotheory.hpp"
#include "leadlag/symbolize.hpp"

namespace leadlag {

std::size_t n_tests_for(std::size_t n_assets, TestCount mode) {
    return mode == TestCount::all_ordered ? n_assets * n_assets : n_assets * (n_assets - (n_assets > 0 ? 1 : 0));
}

double bonferroni_threshold(double p, std::size_t n_tests) {
    if (!(p > 0.0 && p < 1.0)) throw InputError("nominal p must lie in (0, 1)");
    if (n_tests < 1) throw InputError("number of tests must be positive");
    return p / static_cast<double>(n_tests);
}

std::vector<std::size_t> fdr_select(std::span<const double> p_values, double p, std::size_t n_tests) {
    if (!(p > 0.0 && p < 1.0)) throw InputError("nominal p must lie in (0, 1)");
    if (n_tests < p_values.size() || n_tests == 0) throw InputError("n_tests must be at least the number of p-values");
    std::vector<std::size_t> order(p_values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
    std::size_t k = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const double rank = static_cast<double>(i + 1);
        if (p_values[order[i]] < rank * p / static_cast<double>(n_tests)) k = i + 1;
    }
    order.resize(k);
    return order;
}

std::uint64_t lag_seed(std::uint64_t seed, int lambda) {
    return detail::derive_seed(seed, static_cast<std::uint64_t>(lambda));
}

PairScores score_pairs(const LaggedPair& pair, const ScoreOptions& options) {
    PairScores out;
    out.symbols = pair.symbols;
    out.lambda = pair.lambda;
    out.T = pair.T();
    out.statistic = options.statistic;
    out.method = options.method;
    const std::size_t N = pair.symbols.size();
    out.scores.resize(N * N);
    for (std::size_t m = 0; m < N; ++m) {
        for (std::size_t n = 0; n < N; ++n) {
            auto& s = out.scores[m * N + n];
            s.from = m;
            s.to = n;
            s.lambda = pair.lambda;
        }
    }

    if (options.method == Method::gamma) {
        if (options.statistic != Statistic::mi) {
            throw InputError("the analytic Gamma null applies to mutual information only; use shuffling for Pearson");
        }
        const SymbolMatrix a = symbolize_matrix(pair.A, options.q);
        const SymbolMatrix b = symbolize_matrix(pair.B, options.q);
        const PairwiseMi scorer(b);
        std::vector<double> mi;
        scorer.score(a, mi);
        const GammaNull g = gamma_null(options.q, options.q, pair.T());
        for (std::size_t k = 0; k < mi.size(); ++k) {
            auto& s = out.scores[k];
            s.statistic = mi[k];
            s.p_value = mi_pvalue(g, mi[k]);
            s.gamma = g;
        }
        return out;
    }

    ShuffleOptions so;
    so.n_shuffles = options.n_shuffles;
    so.seed = options.seed;
    so.mode = options.shuffle_mode;
    so.q = options.q;
    so.threads = options.threads;
    const SurrogateCounts counts = shuffle_surrogates(pair, options.statistic, so);
    for (std::size_t m = 0; m < N; ++m) {
        for (std::size_t n = 0; n < N; ++n) {
            const auto mi = static_cast<Eigen::Index>(m);
            const auto ni = static_cast<Eigen::Index>(n);
            auto& s = out.scores[m * N + n];
            s.statistic = counts.observed(mi, ni);
            s.p_value = surrogate_pvalue(counts, mi, ni);
            s.u = counts.U(mi, ni);
            s.d = counts.has_d() ? counts.D(mi, ni) : -1;
            s.n_shuffles = counts.n_shuffles;
        }
    }
    return out;
}

DirectedNetwork validate_links(const PairScores& scores, Correction correction, const ValidationOptions& options) {
    const std::size_t N = scores.symbols.size();
    if (!(options.p > 0.0 && options.p < 1.0)) throw InputError("nominal p must lie in (0, 1)");

    // Collect one score per off-diagonal ordered pair, indexed by (from, to).
    std::vector<const PairScore*> by_pair(N * N, nullptr);
    for (const auto& s : scores.scores) {
        if (s.from >= N || s.to >= N) throw InputError("pair score refers to an unknown symbol");
        if (s.from == s.to) continue;
        auto& slot = by_pair[s.from * N + s.to];
        if (slot) throw InputError("duplicate score for pair " + scores.symbols[s.from] + " -> " + scores.symbols[s.to]);
        slot = &s;
    }
    std::vector<const PairScore*> candidates;
    for (std::size_t m = 0; m < N; ++m) {
        for (std::size_t n = 0; n < N; ++n) {
            if (m == n) continue;
            if (!by_pair[m * N + n]) {
                throw InputError("missing score for pair " + scores.symbols[m] + " -> " + scores.symbols[n]);
            }
            candidates.push_back(by_pair[m * N + n]);
        }
    }

    DirectedNetwork net;
    net.nodes = scores.symbols;
    std::sort(net.nodes.begin(), net.nodes.end());
    net.correction = correction;
    net.p_nominal = options.p;
    net.lambda = scores.lambda;
    net.statistic = scores.statistic;
    net.n_tests = correction == Correction::none ? 1 : n_tests_for(N, options.test_count);

    std::vector<const PairScore*> accepted;
    switch (correction) {
        case Correction::none:
        case Correction::bonferroni: {
            const double threshold =
                correction == Correction::none ? options.p : bonferroni_threshold(options.p, net.n_tests);
            for (const auto* s : candidates)
                if (s->p_value < threshold) accepted.push_back(s);
            break;
        }
        case Correction::fdr: {
            std::vector<double> pv;
            pv.reserve(candidates.size());
            for (const auto* s : candidates) pv.push_back(s->p_value);
            for (const auto idx : fdr_select(pv, options.p, net.n_tests)) accepted.push_back(candidates[idx]);
            break;
        }
    }

    for (const auto* s : accepted) {
        Edge e;
        e.from = scores.symbols[s->from];
        e.to = scores.symbols[s->to];
        e.statistic = s->statistic;
        e.p_value = s->p_value;
        e.sign = scores.statistic == Statistic::pearson ? (s->statistic < 0.0 ? -1 : 1) : 0;
        net.edges.push_back(std::move(e));
    }
    std::sort(net.edges.begin(), net.edges.end(),
              [](const Edge& a, const Edge& b) { return std::tie(a.from, a.to) < std::tie(b.from, b.to); });
    return net;
}

bool is_subnetwork(const DirectedNetwork& a, const DirectedNetwork& b) {
    const std::set<std::string> na(a.nodes.begin(), a.nodes.end());
    const std::set<std::string> nb(b.nodes.begin(), b.nodes.end());
    if (na != nb) throw InputError("networks are defined on different node sets");
    std::set<std::pair<std::string, std::string>> eb;
    for (const auto& e : b.edges) eb.emplace(e.from, e.to);
    return std::all_of(a.edges.begin(), a.edges.end(),
                       [&](const Edge& e) { return eb.count({e.from, e.to}) > 0; });
}

LagAnalysis analyze_lag(const ReturnMatrix& returns, int lambda, const ScoreOptions& scoring,
                        const ValidationOptions& validation) {
    const LaggedPair pair = build_lagged_pair(returns, lambda);
    ScoreOptions opts = scoring;
    opts.seed = lag_seed(scoring.seed, lambda);
    LagAnalysis out;
    out.scores = score_pairs(pair, opts);
    out.bonferroni = validate_links(out.scores, Correction::bonferroni, validation);
    out.fdr = validate_links(out.scores, Correction::fdr, validation);
    if (!is_subnetwork(out.bonferroni, out.fdr)) {
        throw NumericalError("Bonferroni network is not a subnetwork of the FDR network at lag " +
                             std::to_string(lambda));
    }
    return out;
}

LagSweepResult lag_sweep(const ReturnMatrix& returns, std::span<const int> lambdas, const ScoreOptions& scoring,
                         const ValidationOptions& validation) {
    if (lambdas.empty()) throw InputError("lag list is empty");
    if (std::any_of(lambdas.begin(), lambdas.end(), [](int l) { return l < 0; })) {
        throw InputError("lags must be non-negative");
    }
    LagSweepResult result;
    for (const int lambda : lambdas) {
        try {
            const LagAnalysis a = analyze_lag(returns, lambda, scoring, validation);
            result.lambdas.push_back(lambda);
            result.count_bonferroni.push_back(a.bonferroni.edges.size());
            result.count_fdr.push_back(a.fdr.edges.size());
        } catch (const InsufficientDataError& e) {
            result.skipped.emplace_back(lambda, e.what());
        }
    }
    return result;
}

const char* to_string(Correction c) {
    switch (c) {
        case Correction::none: return "none";
        case Correction::bonferroni: return "bonferroni";
        case Correction::fdr: return "fdr";
    }
    return "?";
}

const char* to_string(Method m) { return m == Method::gamma ? "gamma" : "shuffle"; }

const char* to_string(Statistic s) { return s == Statistic::mi ? "mi" : "pearson"; }

}  // namespace leadlag
