#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "leadlag/inference.hpp"
#include "leadlag/infotheory.hpp"

namespace leadlag {

/// Mean of the two Lempel-Ziv entropy-rate estimates.
[[nodiscard]] double pair_entropy_rate(const SymbolSeries& x, const SymbolSeries& y);

/// 0.9 * min(sd, IQR / 1.34) * n^(-1/5); falls back to sd when the IQR is zero.
/// Throws InputError for fewer than two values or zero variance (pass an explicit bandwidth instead).
[[nodiscard]] double silverman_bandwidth(std::span<const double> values);

/// Evenly spaced grid over [min - pad * h, max + pad * h].
[[nodiscard]] std::vector<double> kde_grid(std::span<const double> values, double bandwidth, std::size_t points,
                                           double pad = 4.0);

/// Gaussian kernel density of `values` evaluated on `grid`. Bandwidth defaults to Silverman's rule.
[[nodiscard]] std::vector<double> kde(std::span<const double> values, std::span<const double> grid,
                                      std::optional<double> bandwidth = std::nullopt);

/// Trapezoid-rule integral of a curve sampled on `grid`.
[[nodiscard]] double trapezoid(std::span<const double> grid, std::span<const double> y);

/// Two-sided permutation test on |mean(a) - mean(b)|:
/// p = (1 + #{permuted >= observed}) / (n_permutations + 1).
/// The result does not depend on which group is passed first.
/// Throws InputError for an empty group or fewer than 100 permutations.
[[nodiscard]] double permutation_test(std::span<const double> a, std::span<const double> b,
                                      std::size_t n_permutations, std::uint64_t seed);

struct CompareOptions {
    std::size_t n_permutations = 10000;
    std::uint64_t seed = 0;
    std::size_t grid_points = 256;
    std::optional<double> bandwidth;
    /// Relabelings used for the pointwise envelope; 0 disables it.
    std::size_t band_permutations = 100;
};

/// Validated (a) versus non-validated (b) entropy rates.
struct GroupComparison {
    std::vector<double> group_a;
    std::vector<double> group_b;
    std::vector<double> grid;
    std::vector<double> kde_a;
    std::vector<double> kde_b;
    /// Pointwise 2.5% / 97.5% quantiles of the group-a density under random relabeling.
    std::vector<double> band_lo;
    std::vector<double> band_hi;
    double bandwidth_a = 0.0;
    double bandwidth_b = 0.0;
    double mean_a = 0.0;
    double mean_b = 0.0;
    double perm_p = 1.0;
    std::size_t n_permutations = 0;
    std::uint64_t seed = 0;
};

[[nodiscard]] GroupComparison compare_groups(std::span<const double> a, std::span<const double> b,
                                             const CompareOptions& options);

/// Splits all off-diagonal ordered pairs into (in network, not in network),
/// each valued by the mean entropy rate of its two assets. `rates` is indexed
/// like `symbols`.
[[nodiscard]] std::pair<std::vector<double>, std::vector<double>> split_pair_rates(
    const std::vector<std::string>& symbols, std::span<const double> rates, const DirectedNetwork& network);

}  // namespace leadlag
