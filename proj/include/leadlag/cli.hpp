#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "leadlag/analysis.hpp"
#include "leadlag/export.hpp"
#include "leadlag/inference.hpp"
#include "leadlag/marketdata.hpp"

namespace leadlag {

inline constexpr const char* kToolName = "leadlag";
inline constexpr const char* kToolVersion = "0.1.0";

/// Every field maps to one CLI flag and one config-file key (same name, dashes
/// become underscores). Flags override the file.
struct RunConfig {
    std::filesystem::path input;
    CsvFormat format = CsvFormat::wide;
    int q = 4;
    int tau = 1;
    std::vector<int> lambdas{0};
    double p = 0.01;
    Correction correction = Correction::bonferroni;
    Method method = Method::gamma;
    Statistic statistic = Statistic::mi;
    std::size_t shuffles = 1000;
    ShuffleMode shuffle_mode = ShuffleMode::rows;
    std::uint64_t seed = 0;
    std::filesystem::path out = "leadlag_out";
    std::vector<ExportFormat> exports{ExportFormat::json};
    TestCount tests = TestCount::all_ordered;
    /// Treat every row as one trading day (daily data).
    bool daily = false;
    /// Collapse m->n / n->m pairs of lag-0 networks into undirected edges on export.
    bool collapse_sync = false;
    /// Correction whose network defines the "validated" group in `compare`.
    Correction compare_correction = Correction::fdr;
    std::size_t permutations = 10000;
    unsigned threads = 0;
};

[[nodiscard]] nlohmann::json config_to_json(const RunConfig& c);
/// Applies the keys present in `j` on top of `base`. Throws InputError on unknown keys or bad values.
[[nodiscard]] RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});
/// FNV-1a 64 of the canonical config JSON (excluding threads), as 16 hex digits.
[[nodiscard]] std::string config_hash(const RunConfig& c);

/// "0..10", "0,1,5" or mixtures such as "0..3,8". Throws InputError on empty or malformed lists.
[[nodiscard]] std::vector<int> parse_lambdas(const std::string& text);

/// Loads prices and computes returns as configured (applies `daily`).
[[nodiscard]] ReturnMatrix load_returns(const RunConfig& c, std::vector<std::string>* dropped = nullptr);

/// Writes network exports, per-lag score tables and report.json into c.out; returns the report.
nlohmann::json cmd_analyze(const RunConfig& c);

/// Writes sweep.csv (lambda,count_bonferroni,count_fdr) into c.out and returns the result.
LagSweepResult cmd_sweep(const RunConfig& c);

/// Generates the market described by the JSON spec file and writes the wide CSV and ground-truth JSON.
void cmd_synth(const std::filesystem::path& spec_file, const std::filesystem::path& csv_out,
               const std::filesystem::path& truth_out);

/// Entropy-rate comparison of validated vs non-validated pairs per lag; writes
/// compare_l<lag>.csv and compare_l<lag>.json into c.out and returns the summaries.
nlohmann::json cmd_compare(const RunConfig& c);

/// Full command-line entry point. Exit codes: 0 success, 1 pipeline or
/// numerical error, 2 usage or input error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace leadlag
