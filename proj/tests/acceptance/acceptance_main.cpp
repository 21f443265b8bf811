// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Usage: acceptance [criterion ids...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/poisson.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "leadlag/analysis.hpp"
#include "leadlag/cli.hpp"
#include "leadlag/error.hpp"
#include "leadlag/inference.hpp"
#include "leadlag/infotheory.hpp"
#include "leadlag/nullmodels.hpp"
#include "leadlag/symbolize.hpp"
#include "leadlag/synth.hpp"
#include "support.hpp"

using namespace leadlag;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// Bonferroni-within-FDR bookkeeping shared by every pipeline run in the suite.
struct SubsetLedger {
    std::size_t checked = 0;
    std::size_t violations = 0;
} g_subset;

LagAnalysis analyze(const ReturnMatrix& r, int lambda, const ScoreOptions& so, const ValidationOptions& vo = {}) {
    try {
        LagAnalysis a = analyze_lag(r, lambda, so, vo);
        ++g_subset.checked;
        if (!is_subnetwork(a.bonferroni, a.fdr)) ++g_subset.violations;
        return a;
    } catch (const NumericalError&) {
        ++g_subset.checked;
        ++g_subset.violations;
        throw;
    }
}

ReturnMatrix market(const SynthSpec& spec) { return log_returns(gen_coupled(spec).prices); }

bool has_edge(const DirectedNetwork& net, const std::string& from, const std::string& to) {
    return std::any_of(net.edges.begin(), net.edges.end(), [&](const Edge& e) { return e.from == from && e.to == to; });
}

// Smallest k with P(Poisson(mean) > k) < 1e-3: an allowance for false positives.
std::size_t poisson_allowance(double mean) {
    if (mean <= 0.0) return 0;
    const boost::math::poisson_distribution<double> dist(mean);
    std::size_t k = 0;
    while (boost::math::cdf(boost::math::complement(dist, static_cast<double>(k))) >= 1e-3) ++k;
    return k;
}

double two_sample_ks(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= v) ++i;
        while (j < b.size() && b[j] <= v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / static_cast<double>(a.size()) -
                                 static_cast<double>(j) / static_cast<double>(b.size())));
    }
    return d;
}

// --- criteria -------------------------------------------------------------

Outcome gamma_null_calibration() {
    const auto t0 = Clock::now();
    constexpr std::size_t kPairs = 10000, kN = 2000;
    const GammaNull g = gamma_null(4, 4, kN);
    std::mt19937_64 rng(20240101);
    std::vector<double> mi(kPairs);
    std::size_t rejected = 0;
    for (std::size_t k = 0; k < kPairs; ++k) {
        const auto x = testing::uniform_symbols(kN, 4, rng);
        const auto y = testing::uniform_symbols(kN, 4, rng);
        mi[k] = mutual_information(x, y);
        rejected += mi_pvalue(g, mi[k]) < 0.05;
    }
    std::gamma_distribution<double> gamma(g.alpha, g.beta);
    std::vector<double> reference(kPairs);
    for (auto& v : reference) v = gamma(rng);
    const double ks2 = two_sample_ks(mi, reference);
    const double ks1 = testing::ks_statistic(mi, [&](double x) { return boost::math::gamma_p(g.alpha, x / g.beta); });
    const double fpr = static_cast<double>(rejected) / kPairs;
    const double secs = seconds_since(t0);
    const bool pass = ks2 < 0.05 && ks1 < 0.05 && std::abs(fpr - 0.05) <= 0.01 && secs < 30.0;
    return {pass, fmt("KS two-sample=%.4f one-sample=%.4f (<0.05), FPR@0.05=%.4f (0.05±0.01), %.1f s (<30 s)", ks2, ks1,
                      fpr, secs)};
}

Outcome chi_square_identity() {
    constexpr std::size_t kN = 2000;
    const double scale = 2.0 * static_cast<double>(kN) * std::numbers::ln2;
    double worst = 0.0;
    for (const int dof : {1, 9, 25}) {
        const boost::math::chi_squared chi(dof);
        const GammaNull g{dof / 2.0, 1.0 / (static_cast<double>(kN) * std::numbers::ln2), kN};
        for (const double p : {0.1, 0.01, 1e-6}) {
            const double oracle = boost::math::quantile(boost::math::complement(chi, p)) / scale;
            worst = std::max(worst, std::abs(gamma_upper_quantile(g, p) - oracle) / oracle);
            worst = std::max(worst, std::abs(gamma_quantile(g, 1.0 - p) - oracle) / oracle);
        }
    }
    return {worst <= 1e-9, fmt("max relative error %.2e over dof {1,9,25} x p {0.1,0.01,1e-6} (<=1e-9)", worst)};
}

Outcome nonlinear_separation() {
    constexpr int kRuns = 100;
    int mi_hits = 0, pearson_hits = 0;
    const auto t0 = Clock::now();
    for (int run = 0; run < kRuns; ++run) {
        SynthSpec spec;
        spec.n_assets = 20;
        spec.n_steps = 3001;
        spec.seed = 3000 + static_cast<std::uint64_t>(run);
        spec.couplings.push_back({3, 11, 2, 0.8, CouplingKind::quadratic});
        const auto r = market(spec);
        mi_hits += has_edge(analyze(r, 2, {}).bonferroni, "S03", "S11");
        ScoreOptions pearson;
        pearson.method = Method::shuffle;
        pearson.statistic = Statistic::pearson;
        pearson.n_shuffles = 10000;
        pearson.seed = spec.seed;
        pearson_hits += has_edge(analyze(r, 2, pearson).bonferroni, "S03", "S11");
    }
    const double mi_rate = mi_hits / static_cast<double>(kRuns);
    const double pearson_rate = pearson_hits / static_cast<double>(kRuns);
    return {mi_rate >= 0.95 && pearson_rate <= 0.05,
            fmt("MI recovers %d/%d (>=95%%), shuffled Pearson recovers %d/%d (<=5%%), %.1f s", mi_hits, kRuns,
                pearson_hits, kRuns, seconds_since(t0))};
}

Outcome linear_parity() {
    constexpr int kRuns = 40, kAssets = 10, kLag = 3;
    const auto t0 = Clock::now();
    int mi_hits = 0, pearson_hits = 0;
    std::size_t mi_wrong_lag = 0, pearson_wrong_lag = 0, mi_other = 0, pearson_other = 0;
    for (int run = 0; run < kRuns; ++run) {
        SynthSpec spec;
        spec.n_assets = kAssets;
        spec.n_steps = 3001;
        spec.seed = 4000 + static_cast<std::uint64_t>(run);
        spec.couplings.push_back({2, 7, kLag, 0.8, CouplingKind::linear});
        const auto r = market(spec);
        ScoreOptions pearson;
        pearson.method = Method::shuffle;
        pearson.statistic = Statistic::pearson;
        pearson.n_shuffles = 10000;
        pearson.seed = spec.seed;
        for (int lambda = 0; lambda <= 5; ++lambda) {
            const auto mi_net = analyze(r, lambda, {}).bonferroni;
            const auto pe_net = analyze(r, lambda, pearson).bonferroni;
            const bool mi_found = has_edge(mi_net, "S02", "S07");
            const bool pe_found = has_edge(pe_net, "S02", "S07");
            if (lambda == kLag) {
                mi_hits += mi_found;
                pearson_hits += pe_found;
            } else {
                mi_wrong_lag += mi_found;
                pearson_wrong_lag += pe_found;
            }
            mi_other += mi_net.edges.size() - (mi_found && lambda == kLag);
            pearson_other += pe_net.edges.size() - (pe_found && lambda == kLag);
        }
    }
    const std::size_t n_tests = kAssets * kAssets;
    const double level = 0.01 / static_cast<double>(n_tests);
    // Pearson shuffling validates only U = 0, whose null probability is 1 / (n_shuffles + 1).
    const double pearson_level = std::max(level, 1.0 / 10001.0);
    const double wrong_lag_tests = 5.0 * kRuns;
    const double other_tests = (6.0 * (kAssets * (kAssets - 1) - 1) + 5.0) * kRuns;
    const std::size_t allow_wrong_mi = poisson_allowance(wrong_lag_tests * level);
    const std::size_t allow_wrong_pe = poisson_allowance(wrong_lag_tests * pearson_level);
    const std::size_t allow_other_mi = poisson_allowance((other_tests - wrong_lag_tests) * level);
    const std::size_t allow_other_pe = poisson_allowance((other_tests - wrong_lag_tests) * pearson_level);
    const bool pass = mi_hits >= 0.95 * kRuns && pearson_hits >= 0.95 * kRuns && mi_wrong_lag <= allow_wrong_mi &&
                      pearson_wrong_lag <= allow_wrong_pe && mi_other - mi_wrong_lag <= allow_other_mi &&
                      pearson_other - pearson_wrong_lag <= allow_other_pe;
    return {pass, fmt("at lag 3 MI %d/%d, Pearson %d/%d (>=95%%); planted pair at other lags MI %zu (<=%zu), "
                      "Pearson %zu (<=%zu); other false links MI %zu (<=%zu), Pearson %zu (<=%zu); %.1f s",
                      mi_hits, kRuns, pearson_hits, kRuns, mi_wrong_lag, allow_wrong_mi, pearson_wrong_lag,
                      allow_wrong_pe, mi_other - mi_wrong_lag, allow_other_mi, pearson_other - pearson_wrong_lag,
                      allow_other_pe, seconds_since(t0))};
}

Outcome gamma_shuffle_agreement() {
    constexpr int kRuns = 20;
    const auto t0 = Clock::now();
    int agree = 0;
    std::size_t max_diff = 0, gamma_edges = 0;
    for (int run = 0; run < kRuns; ++run) {
        SynthSpec spec;
        spec.n_assets = 10;
        spec.n_steps = 1001;
        spec.seed = 6000 + static_cast<std::uint64_t>(run);
        spec.couplings = {{0, 1, 1, 0.5, CouplingKind::linear},
                          {2, 3, 1, 0.4, CouplingKind::quadratic},
                          {4, 5, 1, 0.3, CouplingKind::linear},
                          {6, 7, 1, 0.2, CouplingKind::linear}};
        const auto r = market(spec);
        const auto gamma = analyze(r, 1, {}).bonferroni;
        ScoreOptions shuffle;
        shuffle.method = Method::shuffle;
        shuffle.n_shuffles = 100000;
        shuffle.seed = spec.seed;
        const auto shuffled = analyze(r, 1, shuffle).bonferroni;
        std::set<std::pair<std::string, std::string>> a, b, diff;
        for (const auto& e : gamma.edges) a.emplace(e.from, e.to);
        for (const auto& e : shuffled.edges) b.emplace(e.from, e.to);
        std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::inserter(diff, diff.end()));
        agree += diff.size() <= 1;
        max_diff = std::max(max_diff, diff.size());
        gamma_edges += a.size();
    }
    const double secs = seconds_since(t0);
    return {agree >= 0.95 * kRuns && secs < 600.0,
            fmt("edge sets within 1 edge in %d/%d runs (>=95%%), max difference %zu, mean %.1f Gamma edges/run, "
                "%.1f s (<600 s)",
                agree, kRuns, max_diff, gamma_edges / static_cast<double>(kRuns), secs)};
}

Outcome mi_brute_force() {
    double worst = 0.0;
    std::size_t pairs = 0;
    for (unsigned xb = 0; xb < 64; ++xb) {
        for (unsigned yb = 0; yb < 64; ++yb) {
            SymbolSeries x{std::vector<Symbol>(6), 2}, y{std::vector<Symbol>(6), 2};
            for (int i = 0; i < 6; ++i) {
                x.values[static_cast<std::size_t>(i)] = static_cast<Symbol>((xb >> i) & 1U);
                y.values[static_cast<std::size_t>(i)] = static_cast<Symbol>((yb >> i) & 1U);
            }
            double joint[2][2] = {{0, 0}, {0, 0}}, px[2] = {0, 0}, py[2] = {0, 0};
            for (int i = 0; i < 6; ++i) {
                joint[x.values[static_cast<std::size_t>(i)]][y.values[static_cast<std::size_t>(i)]] += 1.0 / 6.0;
                px[x.values[static_cast<std::size_t>(i)]] += 1.0 / 6.0;
                py[y.values[static_cast<std::size_t>(i)]] += 1.0 / 6.0;
            }
            double direct = 0.0;
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    if (joint[a][b] > 0.0) direct += joint[a][b] * std::log2(joint[a][b] / (px[a] * py[b]));
            worst = std::max(worst, std::abs(mutual_information(x, y) - direct));
            ++pairs;
        }
    }
    return {worst <= 1e-12 && pairs == 4096, fmt("%zu pairs, max |difference| %.2e (<=1e-12)", pairs, worst)};
}

Outcome discretization_balance() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(8);
    std::normal_distribution<double> normal;
    const std::vector<std::function<double(double)>> maps{
        [](double v) { return std::exp(v); }, [](double v) { return v * v * v + v; },
        [](double v) { return std::atan(v / 3.0); }};
    std::size_t cases = 0, balance_failures = 0, invariance_failures = 0;
    std::vector<double> x, fx;
    for (std::size_t n = 5; n <= 5000; ++n) {
        x.resize(n);
        const bool tied = n % 2 == 0;
        for (auto& v : x) v = tied ? std::round(normal(rng) * 4.0) / 4.0 : normal(rng);
        const auto& f = maps[n % maps.size()];
        fx.resize(n);
        std::transform(x.begin(), x.end(), fx.begin(), f);
        for (const int q : {2, 4, 8, 16}) {
            if (static_cast<std::size_t>(q) > n) continue;
            const auto s = quantile_symbolize(x, q);
            std::vector<std::size_t> pop(static_cast<std::size_t>(q), 0);
            for (const auto v : s.values) ++pop[v];
            balance_failures += *std::max_element(pop.begin(), pop.end()) - *std::min_element(pop.begin(), pop.end()) > 1;
            invariance_failures += quantile_symbolize(fx, q).values != s.values;
            ++cases;
        }
    }
    return {balance_failures == 0 && invariance_failures == 0,
            fmt("%zu (length, q) cases, n=5..5000: %zu unbalanced, %zu not invariant under monotone maps, %.1f s", cases,
                balance_failures, invariance_failures, seconds_since(t0))};
}

Outcome entropy_rate_sanity() {
    std::mt19937_64 rng(9);
    const double iid = lz_entropy_rate(testing::uniform_symbols(50000, 4, rng)).value;
    const double constant = lz_entropy_rate(SymbolSeries{std::vector<Symbol>(10000, 1), 4}).value;
    SymbolSeries alt{std::vector<Symbol>(10000), 2};
    for (std::size_t i = 0; i < alt.size(); ++i) alt.values[i] = static_cast<Symbol>(i % 2);
    const double periodic = lz_entropy_rate(alt).value;
    return {iid >= 1.80 && iid <= 2.05 && constant <= 0.05 && periodic <= 0.05,
            fmt("iid %.4f in [1.80, 2.05], constant %.4f, period-2 %.4f (<=0.05)", iid, constant, periodic)};
}

Outcome synchronous_drop() {
    std::string detail;
    bool pass = true;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        SynthSpec spec;
        spec.n_assets = 50;
        spec.n_steps = 2501;
        spec.seed = 10000 + seed;
        spec.common_factor_loading = {0.5};
        const auto r = market(spec);
        const auto c0 = analyze(r, 0, {}).bonferroni.edges.size();
        const auto c1 = analyze(r, 1, {}).bonferroni.edges.size();
        pass = pass && c0 > 0 && c0 >= 10 * c1;
        detail += fmt("%s%zu/%zu", detail.empty() ? "" : ", ", c0, c1);
    }
    return {pass, "lambda=0 / lambda=1 Bonferroni links over 5 seeds: " + detail + " (ratio >= 10)"};
}

Outcome permutation_calibration() {
    constexpr int kRuns = 200;
    constexpr std::size_t kPerms = 1000;
    std::mt19937_64 rng(11);
    int null_rejections = 0, alt_rejections = 0;
    for (int run = 0; run < kRuns; ++run) {
        const auto a = testing::normal_sample(100, rng());
        const auto b = testing::normal_sample(100, rng());
        null_rejections += permutation_test(a, b, kPerms, rng()) < 0.05;
        const auto c = testing::normal_sample(100, rng(), 1.0);
        alt_rejections += permutation_test(a, c, kPerms, rng()) < 0.01;
    }
    const double null_rate = null_rejections / static_cast<double>(kRuns);
    const double power = alt_rejections / static_cast<double>(kRuns);
    return {std::abs(null_rate - 0.05) <= 0.04 && power >= 0.95,
            fmt("null p<0.05 rate %.3f (0.05±0.04), N(0,1) vs N(1,1) p<0.01 rate %.3f (>=0.95)", null_rate, power)};
}

Outcome performance() {
    testing::TempDir dir("acceptance_perf");
    SynthSpec spec;
    spec.n_assets = 98;
    spec.n_steps = 3001;
    spec.seed = 12;
    spec.common_factor_loading = {0.3};
    {
        std::ofstream out(dir / "prices.csv");
        write_price_csv(out, gen_coupled(spec).prices);
    }
    RunConfig c;
    c.input = dir / "prices.csv";
    c.out = dir / "out";
    c.lambdas = parse_lambdas("0..10");
    const auto t0 = Clock::now();
    const auto sweep = cmd_sweep(c);
    const double secs = seconds_since(t0);
    g_subset.checked += sweep.lambdas.size();  // lag_sweep runs analyze_lag, which enforces the subset check
    return {secs < 60.0 && sweep.lambdas.size() == 11,
            fmt("98 assets x 3000 returns, lambda 0..10, ingest+sweep %.2f s (<60 s) on %u hardware thread(s)", secs,
                std::thread::hardware_concurrency())};
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"Gamma-null calibration", gamma_null_calibration},
        {"chi-square/Gamma identity", chi_square_identity},
        {"nonlinear detection separation", nonlinear_separation},
        {"linear detection parity", linear_parity},
        {"Bonferroni within FDR", nullptr},
        {"Gamma vs shuffle agreement", gamma_shuffle_agreement},
        {"MI estimator oracle", mi_brute_force},
        {"discretization balance", discretization_balance},
        {"entropy-rate sanity", entropy_rate_sanity},
        {"synchronous vs lagged drop", synchronous_drop},
        {"permutation-test calibration", permutation_calibration},
        {"performance target", performance},
    };
    int failures = 0;
    auto print = [&](std::size_t id, const char* name, const Outcome& o) {
        std::printf("%s [C%02zu] %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
        std::fflush(stdout);
        failures += !o.pass;
    };
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i + 1);
        if (!criteria[i].second || (!only.empty() && !only.count(id))) continue;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        print(i + 1, criteria[i].first, o);
    }
    if (only.empty() || only.count(5)) {
        print(5, criteria[4].first,
              {g_subset.violations == 0 && g_subset.checked > 0,
               fmt("%zu lag analyses checked, %zu violations", g_subset.checked, g_subset.violations)});
    }
    return failures == 0 ? 0 : 1;
}
