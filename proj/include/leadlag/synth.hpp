#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "leadlag/marketdata.hpp"

namespace leadlag {

enum class CouplingKind { linear, quadratic };

/// target(t) += strength * f(source(t - lag)); f is the identity or the
/// mean-removed square x^2 - mean(x^2).
struct Coupling {
    std::size_t source = 0;
    std::size_t target = 0;
    int lag = 1;
    double strength = 0.0;
    CouplingKind kind = CouplingKind::linear;
};

struct SynthSpec {
    std::size_t n_assets = 2;
    std::size_t n_steps = 1000;  ///< price rows
    std::size_t day_length = 0;  ///< price rows per trading day; 0 means one day
    std::uint64_t seed = 0;
    std::vector<Coupling> couplings;
    /// Per-asset loading on a common N(0,1) factor; empty means no factor, one
    /// value is broadcast to every asset.
    std::vector<double> common_factor_loading;
    /// Returns are generated in unit-variance units and scaled by this before pricing.
    double volatility = 0.01;
    double initial_price = 100.0;
    std::string symbol_prefix = "S";
};

struct GroundTruthEdge {
    std::string source;
    std::string target;
    int lag = 1;
    double strength = 0.0;
    CouplingKind kind = CouplingKind::linear;
};

struct SynthMarket {
    PriceMatrix prices;
    std::vector<GroundTruthEdge> edges;
};

/// Independent Gaussian random walks in log-price. Throws InputError if the spec has couplings.
[[nodiscard]] PriceMatrix gen_iid(const SynthSpec& spec);

/// Throws InputError for self-couplings, lags < 1, non-finite strengths,
/// out-of-range assets, or coupling cycles (assets are generated in
/// topological order so each source series is complete before its targets).
[[nodiscard]] SynthMarket gen_coupled(const SynthSpec& spec);

/// Ticker for asset i, e.g. "S07" (zero padded to at least two digits).
[[nodiscard]] std::string synth_symbol(const SynthSpec& spec, std::size_t i);

[[nodiscard]] SynthSpec synth_spec_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json synth_spec_to_json(const SynthSpec& spec);
[[nodiscard]] nlohmann::json ground_truth_to_json(const SynthSpec& spec, const std::vector<GroundTruthEdge>& edges);

[[nodiscard]] const char* to_string(CouplingKind k);

}  // namespace leadlag
