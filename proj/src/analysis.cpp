#include "leadlag/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>

#include "leadlag/detail/rng.hpp"
#include "leadlag/error.hpp"

namespace leadlag {

namespace {

// Linear-interpolation quantile of sorted data.
double sorted_quantile(std::span<const double> sorted, double prob) {
    const double pos = prob * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double mean(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

}  // namespace

double pair_entropy_rate(const SymbolSeries& x, const SymbolSeries& y) {
    return 0.5 * (lz_entropy_rate(x).value + lz_entropy_rate(y).value);
}

double silverman_bandwidth(std::span<const double> values) {
    if (values.size() < 2) throw InputError("bandwidth selection needs at least two values");
    const double m = mean(values);
    double ss = 0.0;
    for (const double v : values) ss += (v - m) * (v - m);
    const double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
    if (!(sd > 0.0)) throw InputError("values have zero variance; pass an explicit bandwidth");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double iqr = sorted_quantile(sorted, 0.75) - sorted_quantile(sorted, 0.25);
    double spread = std::min(sd, iqr / 1.34);
    if (!(spread > 0.0)) spread = sd;
    return 0.9 * spread * std::pow(static_cast<double>(values.size()), -0.2);
}

std::vector<double> kde_grid(std::span<const double> values, double bandwidth, std::size_t points, double pad) {
    if (values.empty()) throw InputError("grid needs at least one value");
    if (points < 2) throw InputError("grid needs at least two points");
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it - pad * bandwidth;
    const double hi = *hi_it + pad * bandwidth;
    std::vector<double> grid(points);
    const double step = (hi - lo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) grid[i] = lo + step * static_cast<double>(i);
    return grid;
}

std::vector<double> kde(std::span<const double> values, std::span<const double> grid, std::optional<double> bandwidth) {
    if (values.empty()) throw InputError("density estimate needs at least one value");
    const double h = bandwidth ? *bandwidth : silverman_bandwidth(values);
    if (!(h > 0.0) || !std::isfinite(h)) throw InputError("bandwidth must be positive");
    const double norm = 1.0 / (static_cast<double>(values.size()) * h * std::sqrt(2.0 * std::numbers::pi));
    std::vector<double> density(grid.size(), 0.0);
    for (std::size_t g = 0; g < grid.size(); ++g) {
        double sum = 0.0;
        for (const double v : values) {
            const double u = (grid[g] - v) / h;
            sum += std::exp(-0.5 * u * u);
        }
        density[g] = sum * norm;
    }
    return density;
}

double trapezoid(std::span<const double> grid, std::span<const double> y) {
    if (grid.size() != y.size()) throw InputError("grid and curve lengths differ");
    double total = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i) total += 0.5 * (y[i] + y[i - 1]) * (grid[i] - grid[i - 1]);
    return total;
}

double permutation_test(std::span<const double> a, std::span<const double> b, std::size_t n_permutations,
                        std::uint64_t seed) {
    if (a.empty() || b.empty()) throw InputError("permutation test needs two non-empty groups");
    if (n_permutations < 100) throw InputError("permutation test needs at least 100 permutations");

    // Canonical group order makes the result symmetric in (a, b).
    std::vector<double> first(a.begin(), a.end());
    std::vector<double> second(b.begin(), b.end());
    std::sort(first.begin(), first.end());
    std::sort(second.begin(), second.end());
    if (first.size() > second.size() || (first.size() == second.size() && first > second)) std::swap(first, second);

    const std::size_t n1 = first.size();
    const std::size_t n2 = second.size();
    std::vector<double> pooled = first;
    pooled.insert(pooled.end(), second.begin(), second.end());
    const double total = std::accumulate(pooled.begin(), pooled.end(), 0.0);

    auto statistic = [&](std::span<const double> values) {
        const double s1 = std::accumulate(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(n1), 0.0);
        return std::abs(s1 / static_cast<double>(n1) - (total - s1) / static_cast<double>(n2));
    };
    const double observed = statistic(pooled);
    const double tolerance = 1e-12 * std::max(1.0, std::abs(observed));

    std::size_t extreme = 0;
    std::vector<double> work(pooled.size());
    for (std::size_t r = 0; r < n_permutations; ++r) {
        auto engine = detail::make_engine(seed, r);
        work = pooled;
        std::shuffle(work.begin(), work.end(), engine);
        if (statistic(work) >= observed - tolerance) ++extreme;
    }
    return static_cast<double>(1 + extreme) / static_cast<double>(n_permutations + 1);
}

GroupComparison compare_groups(std::span<const double> a, std::span<const double> b, const CompareOptions& options) {
    GroupComparison out;
    out.group_a.assign(a.begin(), a.end());
    out.group_b.assign(b.begin(), b.end());
    out.n_permutations = options.n_permutations;
    out.seed = options.seed;
    out.perm_p = permutation_test(a, b, options.n_permutations, options.seed);
    out.mean_a = mean(a);
    out.mean_b = mean(b);
    out.bandwidth_a = options.bandwidth ? *options.bandwidth : silverman_bandwidth(a);
    out.bandwidth_b = options.bandwidth ? *options.bandwidth : silverman_bandwidth(b);

    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    out.grid = kde_grid(pooled, std::max(out.bandwidth_a, out.bandwidth_b), options.grid_points);
    out.kde_a = kde(a, out.grid, out.bandwidth_a);
    out.kde_b = kde(b, out.grid, out.bandwidth_b);

    if (options.band_permutations > 0) {
        std::vector<std::vector<double>> curves;
        curves.reserve(options.band_permutations);
        // separate stream family from the test's permutations
        const auto band_seed = detail::derive_seed(options.seed, 0xBA4D);
        std::vector<double> work;
        for (std::size_t r = 0; r < options.band_permutations; ++r) {
            auto engine = detail::make_engine(band_seed, r);
            work = pooled;
            std::shuffle(work.begin(), work.end(), engine);
            curves.push_back(kde(std::span<const double>(work).first(a.size()), out.grid, out.bandwidth_a));
        }
        out.band_lo.resize(out.grid.size());
        out.band_hi.resize(out.grid.size());
        std::vector<double> column(curves.size());
        for (std::size_t g = 0; g < out.grid.size(); ++g) {
            for (std::size_t r = 0; r < curves.size(); ++r) column[r] = curves[r][g];
            std::sort(column.begin(), column.end());
            out.band_lo[g] = sorted_quantile(column, 0.025);
            out.band_hi[g] = sorted_quantile(column, 0.975);
        }
    }
    return out;
}

std::pair<std::vector<double>, std::vector<double>> split_pair_rates(const std::vector<std::string>& symbols,
                                                                     std::span<const double> rates,
                                                                     const DirectedNetwork& network) {
    if (rates.size() != symbols.size()) throw InputError("one entropy rate per symbol is required");
    std::set<std::pair<std::string, std::string>> linked;
    for (const auto& e : network.edges) linked.emplace(e.from, e.to);
    std::pair<std::vector<double>, std::vector<double>> groups;
    for (std::size_t m = 0; m < symbols.size(); ++m) {
        for (std::size_t n = 0; n < symbols.size(); ++n) {
            if (m == n) continue;
            const double v = 0.5 * (rates[m] + rates[n]);
            (linked.count({symbols[m], symbols[n]}) ? groups.first : groups.second).push_back(v);
        }
    }
    return groups;
}

}  // namespace leadlag
