#include "leadlag/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <random>
#include <string>

#include "leadlag/detail/rng.hpp"
#include "leadlag/error.hpp"

namespace leadlag {

namespace {

std::string zero_pad(std::size_t value, std::size_t width) {
    std::string s = std::to_string(value);
    if (s.size() < width) s.insert(0, width - s.size(), '0');
    return s;
}

std::size_t digits(std::size_t v) { return std::to_string(v).size(); }

void validate(const SynthSpec& spec) {
    if (spec.n_assets < 1) throw InputError("synthetic market needs at least one asset");
    if (spec.n_steps < 2) throw InputError("synthetic market needs at least two steps");
    if (spec.day_length == 1) throw InputError("day_length must be 0 (single day) or at least 2");
    if (!(spec.volatility > 0.0) || !std::isfinite(spec.volatility)) throw InputError("volatility must be positive");
    if (!(spec.initial_price > 0.0)) throw InputError("initial price must be positive");
    const auto nl = spec.common_factor_loading.size();
    if (nl != 0 && nl != 1 && nl != spec.n_assets) {
        throw InputError("common_factor_loading must have 0, 1 or n_assets entries");
    }
    for (const auto& c : spec.couplings) {
        if (c.source >= spec.n_assets || c.target >= spec.n_assets) throw InputError("coupling refers to unknown asset");
        if (c.source == c.target) {
            throw InputError("self-coupling of asset " + std::to_string(c.source) + " is not allowed");
        }
        if (c.lag < 1) throw InputError("coupling lag must be at least 1");
        if (!std::isfinite(c.strength)) throw InputError("coupling strength must be finite");
    }
}

std::vector<std::size_t> topological_order(const SynthSpec& spec) {
    std::vector<std::size_t> indegree(spec.n_assets, 0);
    std::vector<std::vector<std::size_t>> out(spec.n_assets);
    for (const auto& c : spec.couplings) {
        out[c.source].push_back(c.target);
        ++indegree[c.target];
    }
    // min-heap keeps the order deterministic and close to index order
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t i = 0; i < spec.n_assets; ++i)
        if (indegree[i] == 0) ready.push(i);
    std::vector<std::size_t> order;
    while (!ready.empty()) {
        const auto v = ready.top();
        ready.pop();
        order.push_back(v);
        for (const auto t : out[v])
            if (--indegree[t] == 0) ready.push(t);
    }
    if (order.size() != spec.n_assets) throw InputError("coupling graph contains a cycle");
    return order;
}

double loading(const SynthSpec& spec, std::size_t i) {
    if (spec.common_factor_loading.empty()) return 0.0;
    return spec.common_factor_loading.size() == 1 ? spec.common_factor_loading[0] : spec.common_factor_loading[i];
}

PriceMatrix generate(const SynthSpec& spec) {
    validate(spec);
    const auto order = topological_order(spec);
    const std::size_t n_ret = spec.n_steps - 1;

    std::vector<double> factor(n_ret, 0.0);
    if (!spec.common_factor_loading.empty()) {
        auto engine = detail::make_engine(spec.seed, 0);
        std::normal_distribution<double> normal;
        for (auto& f : factor) f = normal(engine);
    }

    std::vector<std::vector<double>> r(spec.n_assets, std::vector<double>(n_ret));
    for (std::size_t i = 0; i < spec.n_assets; ++i) {
        auto engine = detail::make_engine(spec.seed, i + 1);
        std::normal_distribution<double> normal;
        const double l = loading(spec, i);
        for (std::size_t t = 0; t < n_ret; ++t) r[i][t] = normal(engine) + l * factor[t];
    }
    for (const auto target : order) {
        for (const auto& c : spec.couplings) {
            if (c.target != target) continue;
            const auto& src = r[c.source];
            double center = 0.0;
            if (c.kind == CouplingKind::quadratic) {
                center = std::accumulate(src.begin(), src.end(), 0.0, [](double acc, double x) { return acc + x * x; }) /
                         static_cast<double>(n_ret);
            }
            auto& dst = r[target];
            const auto lag = static_cast<std::size_t>(c.lag);
            for (std::size_t t = lag; t < n_ret; ++t) {
                const double x = src[t - lag];
                dst[t] += c.strength * (c.kind == CouplingKind::linear ? x : x * x - center);
            }
        }
    }

    PriceMatrix pm;
    const std::size_t day_length = spec.day_length == 0 ? spec.n_steps : spec.day_length;
    for (std::size_t i = 0; i < spec.n_assets; ++i) pm.symbols.push_back(synth_symbol(spec, i));
    const std::size_t width = std::max<std::size_t>(6, digits(spec.n_steps - 1));
    pm.timestamps.reserve(spec.n_steps);
    pm.day_index.reserve(spec.n_steps);
    for (std::size_t t = 0; t < spec.n_steps; ++t) {
        pm.timestamps.push_back("t" + zero_pad(t, width));
        pm.day_index.push_back(static_cast<std::int64_t>(t / day_length));
    }
    pm.prices.resize(static_cast<Eigen::Index>(spec.n_steps), static_cast<Eigen::Index>(spec.n_assets));
    const double log_p0 = std::log(spec.initial_price);
    for (std::size_t i = 0; i < spec.n_assets; ++i) {
        double logp = log_p0;
        const auto c = static_cast<Eigen::Index>(i);
        pm.prices(0, c) = spec.initial_price;
        for (std::size_t t = 1; t < spec.n_steps; ++t) {
            logp += spec.volatility * r[i][t - 1];
            pm.prices(static_cast<Eigen::Index>(t), c) = std::exp(logp);
        }
    }
    return pm;
}

CouplingKind kind_from_string(const std::string& s) {
    if (s == "linear") return CouplingKind::linear;
    if (s == "quadratic") return CouplingKind::quadratic;
    throw InputError("unknown coupling kind '" + s + "'");
}

}  // namespace

const char* to_string(CouplingKind k) { return k == CouplingKind::linear ? "linear" : "quadratic"; }

std::string synth_symbol(const SynthSpec& spec, std::size_t i) {
    return spec.symbol_prefix + zero_pad(i, std::max<std::size_t>(2, digits(spec.n_assets - 1)));
}

PriceMatrix gen_iid(const SynthSpec& spec) {
    if (!spec.couplings.empty()) throw InputError("gen_iid expects a spec without couplings");
    return generate(spec);
}

SynthMarket gen_coupled(const SynthSpec& spec) {
    SynthMarket market;
    market.prices = generate(spec);
    for (const auto& c : spec.couplings) {
        market.edges.push_back(
            {synth_symbol(spec, c.source), synth_symbol(spec, c.target), c.lag, c.strength, c.kind});
    }
    return market;
}

SynthSpec synth_spec_from_json(const nlohmann::json& j) {
    SynthSpec spec;
    try {
        spec.n_assets = j.at("n_assets").get<std::size_t>();
        spec.n_steps = j.at("n_steps").get<std::size_t>();
        spec.day_length = j.value("day_length", std::size_t{0});
        spec.seed = j.value("seed", std::uint64_t{0});
        spec.volatility = j.value("volatility", 0.01);
        spec.initial_price = j.value("initial_price", 100.0);
        spec.symbol_prefix = j.value("symbol_prefix", std::string("S"));
        if (j.contains("common_factor_loading")) {
            const auto& l = j.at("common_factor_loading");
            if (l.is_array()) {
                spec.common_factor_loading = l.get<std::vector<double>>();
            } else {
                spec.common_factor_loading = {l.get<double>()};
            }
        }
        for (const auto& c : j.value("couplings", nlohmann::json::array())) {
            Coupling cp;
            cp.source = c.at("source").get<std::size_t>();
            cp.target = c.at("target").get<std::size_t>();
            cp.lag = c.at("lag").get<int>();
            cp.strength = c.at("strength").get<double>();
            cp.kind = kind_from_string(c.value("kind", std::string("linear")));
            spec.couplings.push_back(cp);
        }
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("invalid synth spec: ") + e.what());
    }
    validate(spec);
    return spec;
}

nlohmann::json synth_spec_to_json(const SynthSpec& spec) {
    nlohmann::json j;
    j["n_assets"] = spec.n_assets;
    j["n_steps"] = spec.n_steps;
    j["day_length"] = spec.day_length;
    j["seed"] = spec.seed;
    j["volatility"] = spec.volatility;
    j["initial_price"] = spec.initial_price;
    j["symbol_prefix"] = spec.symbol_prefix;
    j["common_factor_loading"] = spec.common_factor_loading;
    j["couplings"] = nlohmann::json::array();
    for (const auto& c : spec.couplings) {
        j["couplings"].push_back({{"source", c.source},
                                  {"target", c.target},
                                  {"lag", c.lag},
                                  {"strength", c.strength},
                                  {"kind", to_string(c.kind)}});
    }
    return j;
}

nlohmann::json ground_truth_to_json(const SynthSpec& spec, const std::vector<GroundTruthEdge>& edges) {
    nlohmann::json j;
    j["seed"] = spec.seed;
    j["symbols"] = nlohmann::json::array();
    for (std::size_t i = 0; i < spec.n_assets; ++i) j["symbols"].push_back(synth_symbol(spec, i));
    j["edges"] = nlohmann::json::array();
    for (const auto& e : edges) {
        j["edges"].push_back({{"source", e.source},
                              {"target", e.target},
                              {"lag", e.lag},
                              {"strength", e.strength},
                              {"kind", to_string(e.kind)}});
    }
    return j;
}

}  // namespace leadlag
