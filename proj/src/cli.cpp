#include "leadlag/cli.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "leadlag/detail/rng.hpp"
#include "leadlag/error.hpp"
#include "leadlag/synth.hpp"

namespace leadlag {

namespace {

namespace fs = std::filesystem;

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Correction parse_correction(const std::string& s) {
    if (s == "bonferroni") return Correction::bonferroni;
    if (s == "fdr") return Correction::fdr;
    if (s == "none") return Correction::none;
    throw InputError("unknown correction '" + s + "' (expected bonferroni, fdr or none)");
}

Method parse_method(const std::string& s) {
    if (s == "gamma") return Method::gamma;
    if (s == "shuffle") return Method::shuffle;
    throw InputError("unknown method '" + s + "' (expected gamma or shuffle)");
}

Statistic parse_statistic(const std::string& s) {
    if (s == "mi") return Statistic::mi;
    if (s == "pearson") return Statistic::pearson;
    throw InputError("unknown statistic '" + s + "' (expected mi or pearson)");
}

CsvFormat parse_format(const std::string& s) {
    if (s == "wide") return CsvFormat::wide;
    if (s == "long") return CsvFormat::long_;
    throw InputError("unknown CSV format '" + s + "' (expected wide or long)");
}

ShuffleMode parse_shuffle_mode(const std::string& s) {
    if (s == "rows") return ShuffleMode::rows;
    if (s == "columns") return ShuffleMode::columns;
    throw InputError("unknown shuffle mode '" + s + "' (expected rows or columns)");
}

TestCount parse_tests(const std::string& s) {
    if (s == "n2") return TestCount::all_ordered;
    if (s == "n(n-1)") return TestCount::off_diagonal;
    throw InputError("unknown test count '" + s + "' (expected n2 or n(n-1))");
}

std::vector<ExportFormat> parse_exports(const std::string& s) {
    std::vector<ExportFormat> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(export_format_from_string(item));
    }
    return out;
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    return out;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw InputError("cannot create output directory '" + dir.string() + "': " + ec.message());
}

ScoreOptions score_options(const RunConfig& c) {
    ScoreOptions so;
    so.q = c.q;
    so.method = c.method;
    so.statistic = c.statistic;
    so.n_shuffles = c.shuffles;
    so.seed = c.seed;
    so.shuffle_mode = c.shuffle_mode;
    so.threads = c.threads;
    return so;
}

ValidationOptions validation_options(const RunConfig& c) { return {c.p, c.tests}; }

std::string lag_tag(int lambda) { return "l" + std::to_string(lambda); }

void write_scores_csv(const fs::path& path, const PairScores& scores) {
    auto out = open_output(path);
    out << "from,to,lambda,self,statistic,p_value,null_alpha,null_beta,null_n,u,d,n_shuffles\n";
    for (const auto& s : scores.scores) {
        out << scores.symbols[s.from] << ',' << scores.symbols[s.to] << ',' << s.lambda << ','
            << (s.from == s.to ? 1 : 0) << ',' << fmt_double(s.statistic) << ',' << fmt_double(s.p_value) << ',';
        if (s.gamma) {
            out << fmt_double(s.gamma->alpha) << ',' << fmt_double(s.gamma->beta) << ',' << s.gamma->N;
        } else {
            out << ",,";
        }
        out << ',';
        if (s.u >= 0) out << s.u;
        out << ',';
        if (s.d >= 0) out << s.d;
        out << ',';
        if (s.n_shuffles > 0) out << s.n_shuffles;
        out << '\n';
    }
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// String-valued flags collected before they are applied on top of the config file.
struct RunFlags {
    std::string config, input, format, lambdas, correction, method, statistic, shuffle_mode, out, exports, tests,
        compare_correction;
    int q = 0, tau = 0;
    double p = 0.0;
    std::size_t shuffles = 0, permutations = 0;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    bool daily = false, collapse_sync = false;
    std::vector<CLI::Option*> opts;
};

void add_run_options(CLI::App* app, RunFlags& f) {
    app->add_option("--config", f.config, "JSON config file; flags override its keys");
    f.opts = {
        app->add_option("--input", f.input, "price CSV"),
        app->add_option("--format", f.format, "wide|long"),
        app->add_option("--q", f.q, "quantile bins per series (default 4)"),
        app->add_option("--tau", f.tau, "return horizon in data steps (default 1)"),
        app->add_option("--lambdas", f.lambdas, "lags, e.g. 0..10 or 0,1,5"),
        app->add_option("--p", f.p, "nominal p-value (default 0.01)"),
        app->add_option("--correction", f.correction, "bonferroni|fdr|none"),
        app->add_option("--method", f.method, "gamma|shuffle"),
        app->add_option("--statistic", f.statistic, "mi|pearson (pearson requires shuffle)"),
        app->add_option("--shuffles", f.shuffles, "surrogate realizations"),
        app->add_option("--shuffle-mode", f.shuffle_mode, "rows|columns"),
        app->add_option("--seed", f.seed, "root seed"),
        app->add_option("--out", f.out, "output directory"),
        app->add_option("--export", f.exports, "comma list of dot,graphml,json"),
        app->add_option("--tests", f.tests, "n2|n(n-1) hypotheses per scan"),
        app->add_flag("--daily", f.daily, "treat all rows as a single trading day"),
        app->add_flag("--collapse-sync", f.collapse_sync, "export lag-0 MI networks as undirected"),
        app->add_option("--compare-correction", f.compare_correction, "network defining validated pairs (compare)"),
        app->add_option("--permutations", f.permutations, "permutation-test relabelings (compare)"),
        app->add_option("--threads", f.threads, "worker threads (0 = all cores)"),
    };
}

RunConfig resolve_config(const RunFlags& f) {
    RunConfig c;
    if (!f.config.empty()) {
        std::ifstream in(f.config);
        if (!in) throw InputError("cannot open config file '" + f.config + "'");
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw InputError("config file '" + f.config + "' is not valid JSON: " + e.what());
        }
        c = config_from_json(j);
    }
    auto given = [&](std::size_t i) { return f.opts[i]->count() > 0; };
    if (given(0)) c.input = f.input;
    if (given(1)) c.format = parse_format(f.format);
    if (given(2)) c.q = f.q;
    if (given(3)) c.tau = f.tau;
    if (given(4)) c.lambdas = parse_lambdas(f.lambdas);
    if (given(5)) c.p = f.p;
    if (given(6)) c.correction = parse_correction(f.correction);
    if (given(7)) c.method = parse_method(f.method);
    if (given(8)) c.statistic = parse_statistic(f.statistic);
    if (given(9)) c.shuffles = f.shuffles;
    if (given(10)) c.shuffle_mode = parse_shuffle_mode(f.shuffle_mode);
    if (given(11)) c.seed = f.seed;
    if (given(12)) c.out = f.out;
    if (given(13)) c.exports = parse_exports(f.exports);
    if (given(14)) c.tests = parse_tests(f.tests);
    if (given(15)) c.daily = f.daily;
    if (given(16)) c.collapse_sync = f.collapse_sync;
    if (given(17)) c.compare_correction = parse_correction(f.compare_correction);
    if (given(18)) c.permutations = f.permutations;
    if (given(19)) c.threads = f.threads;
    if (c.input.empty()) throw InputError("no input file given (--input)");
    if (c.lambdas.empty()) throw InputError("lag list is empty");
    return c;
}

}  // namespace

nlohmann::json config_to_json(const RunConfig& c) {
    nlohmann::json j;
    j["input"] = c.input.string();
    j["format"] = c.format == CsvFormat::wide ? "wide" : "long";
    j["q"] = c.q;
    j["tau"] = c.tau;
    j["lambdas"] = c.lambdas;
    j["p"] = c.p;
    j["correction"] = to_string(c.correction);
    j["method"] = to_string(c.method);
    j["statistic"] = to_string(c.statistic);
    j["shuffles"] = c.shuffles;
    j["shuffle_mode"] = c.shuffle_mode == ShuffleMode::rows ? "rows" : "columns";
    j["seed"] = c.seed;
    j["out"] = c.out.string();
    j["export"] = nlohmann::json::array();
    for (const auto f : c.exports) j["export"].push_back(extension(f));
    j["tests"] = c.tests == TestCount::all_ordered ? "n2" : "n(n-1)";
    j["daily"] = c.daily;
    j["collapse_sync"] = c.collapse_sync;
    j["compare_correction"] = to_string(c.compare_correction);
    j["permutations"] = c.permutations;
    j["threads"] = c.threads;
    return j;
}

RunConfig config_from_json(const nlohmann::json& j, RunConfig c) {
    if (!j.is_object()) throw InputError("config must be a JSON object");
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "input") c.input = v.get<std::string>();
            else if (key == "format") c.format = parse_format(v.get<std::string>());
            else if (key == "q") c.q = v.get<int>();
            else if (key == "tau") c.tau = v.get<int>();
            else if (key == "lambdas") c.lambdas = v.is_string() ? parse_lambdas(v.get<std::string>()) : v.get<std::vector<int>>();
            else if (key == "p") c.p = v.get<double>();
            else if (key == "correction") c.correction = parse_correction(v.get<std::string>());
            else if (key == "method") c.method = parse_method(v.get<std::string>());
            else if (key == "statistic") c.statistic = parse_statistic(v.get<std::string>());
            else if (key == "shuffles") c.shuffles = v.get<std::size_t>();
            else if (key == "shuffle_mode") c.shuffle_mode = parse_shuffle_mode(v.get<std::string>());
            else if (key == "seed") c.seed = v.get<std::uint64_t>();
            else if (key == "out") c.out = v.get<std::string>();
            else if (key == "export") {
                if (v.is_string()) {
                    c.exports = parse_exports(v.get<std::string>());
                } else {
                    c.exports.clear();
                    for (const auto& e : v) c.exports.push_back(export_format_from_string(e.get<std::string>()));
                }
            } else if (key == "tests") c.tests = parse_tests(v.get<std::string>());
            else if (key == "daily") c.daily = v.get<bool>();
            else if (key == "collapse_sync") c.collapse_sync = v.get<bool>();
            else if (key == "compare_correction") c.compare_correction = parse_correction(v.get<std::string>());
            else if (key == "permutations") c.permutations = v.get<std::size_t>();
            else if (key == "threads") c.threads = v.get<unsigned>();
            else throw InputError("unknown config key '" + key + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("bad config value: ") + e.what());
    }
    return c;
}

std::string config_hash(const RunConfig& c) {
    auto j = config_to_json(c);
    j.erase("threads");
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(j.dump())));
    return buf;
}

std::vector<int> parse_lambdas(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    auto to_int = [&](const std::string& s) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(s, &used);
        } catch (const std::exception&) {
            throw InputError("malformed lag list '" + text + "'");
        }
        if (used != s.size() || v < 0) throw InputError("malformed lag list '" + text + "'");
        return v;
    };
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto dots = item.find("..");
        if (dots == std::string::npos) {
            out.push_back(to_int(item));
        } else {
            const int lo = to_int(item.substr(0, dots));
            const int hi = to_int(item.substr(dots + 2));
            if (hi < lo) throw InputError("descending lag range '" + item + "'");
            for (int l = lo; l <= hi; ++l) out.push_back(l);
        }
    }
    if (out.empty()) throw InputError("lag list is empty");
    return out;
}

ReturnMatrix load_returns(const RunConfig& c, std::vector<std::string>* dropped) {
    if (!fs::exists(c.input)) throw InputError("input file '" + c.input.string() + "' does not exist");
    IngestResult ingest = ingest_csv(c.input, c.format);
    if (dropped) *dropped = ingest.dropped;
    if (c.daily) collapse_days(ingest.prices);
    return log_returns(ingest.prices, c.tau);
}

nlohmann::json cmd_analyze(const RunConfig& c) {
    const auto started = std::chrono::steady_clock::now();
    std::vector<std::string> dropped;
    const ReturnMatrix R = load_returns(c, &dropped);
    ensure_dir(c.out);
    const ScoreOptions so = score_options(c);
    const ValidationOptions vo = validation_options(c);
    const std::size_t n_tests = n_tests_for(R.cols(), c.tests);

    nlohmann::json report;
    report["tool"] = kToolName;
    report["version"] = kToolVersion;
    report["seed"] = c.seed;
    report["config_hash"] = config_hash(c);
    report["config"] = config_to_json(c);
    report["symbols"] = R.symbols;
    report["dropped_symbols"] = dropped;
    report["n_tests"] = n_tests;
    report["threshold_bonferroni"] = bonferroni_threshold(c.p, n_tests);
    report["lags"] = nlohmann::json::array();
    report["skipped"] = nlohmann::json::array();

    for (const int lambda : c.lambdas) {
        LagAnalysis a;
        try {
            a = analyze_lag(R, lambda, so, vo);
        } catch (const InsufficientDataError& e) {
            report["skipped"].push_back({{"lambda", lambda}, {"reason", e.what()}});
            continue;
        }
        const DirectedNetwork net = c.correction == Correction::fdr          ? a.fdr
                                    : c.correction == Correction::bonferroni ? a.bonferroni
                                                                             : validate_links(a.scores, Correction::none, vo);
        ExportOptions eo;
        eo.collapse_symmetric = c.collapse_sync && lambda == 0 && c.statistic == Statistic::mi;
        for (const auto f : c.exports) {
            const auto name = "network_" + lag_tag(lambda) + "_" + to_string(c.correction) + "." + extension(f);
            export_network(net, f, c.out / name, eo);
        }
        write_scores_csv(c.out / ("scores_" + lag_tag(lambda) + ".csv"), a.scores);

        const double bonf = bonferroni_threshold(c.p, n_tests);
        std::size_t self_significant = 0;
        for (const auto& s : a.scores.scores)
            if (s.from == s.to && s.p_value < bonf) ++self_significant;

        nlohmann::json lag;
        lag["lambda"] = lambda;
        lag["T"] = a.scores.T;
        lag["seed"] = lag_seed(c.seed, lambda);
        lag["count_bonferroni"] = a.bonferroni.edges.size();
        lag["count_fdr"] = a.fdr.edges.size();
        lag["count_exported"] = net.edges.size();
        lag["bonferroni_subset_of_fdr"] = true;
        lag["self_pairs_significant"] = self_significant;
        if (c.method == Method::gamma) {
            const GammaNull g = gamma_null(c.q, c.q, a.scores.T);
            lag["gamma_alpha"] = g.alpha;
            lag["gamma_beta"] = g.beta;
            lag["mi_threshold_bits_bonferroni"] = gamma_upper_quantile(g, bonf);
        }
        report["lags"].push_back(std::move(lag));
    }
    report["timing_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    auto out = open_output(c.out / "report.json");
    out << report.dump(2) << '\n';
    return report;
}

LagSweepResult cmd_sweep(const RunConfig& c) {
    const ReturnMatrix R = load_returns(c);
    ensure_dir(c.out);
    const LagSweepResult result = lag_sweep(R, c.lambdas, score_options(c), validation_options(c));
    auto out = open_output(c.out / "sweep.csv");
    out << "lambda,count_bonferroni,count_fdr\n";
    for (std::size_t i = 0; i < result.lambdas.size(); ++i) {
        out << result.lambdas[i] << ',' << result.count_bonferroni[i] << ',' << result.count_fdr[i] << '\n';
    }
    return result;
}

void cmd_synth(const fs::path& spec_file, const fs::path& csv_out, const fs::path& truth_out) {
    std::ifstream in(spec_file);
    if (!in) throw InputError("cannot open synth spec '" + spec_file.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("synth spec '" + spec_file.string() + "' is not valid JSON: " + e.what());
    }
    const SynthSpec spec = synth_spec_from_json(j);
    const SynthMarket market = gen_coupled(spec);
    {
        auto out = open_output(csv_out);
        write_price_csv(out, market.prices);
    }
    auto out = open_output(truth_out);
    out << ground_truth_to_json(spec, market.edges).dump(2) << '\n';
}

nlohmann::json cmd_compare(const RunConfig& c) {
    const ReturnMatrix R = load_returns(c);
    ensure_dir(c.out);
    std::vector<double> rates(R.cols());
    for (std::size_t j = 0; j < R.cols(); ++j) {
        const auto col = R.returns.col(static_cast<Eigen::Index>(j));
        const auto symbols =
            quantile_symbolize(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())), c.q);
        rates[j] = lz_entropy_rate(symbols).value;
    }

    nlohmann::json summary = nlohmann::json::array();
    for (const int lambda : c.lambdas) {
        nlohmann::json entry;
        entry["lambda"] = lambda;
        LagAnalysis a;
        try {
            a = analyze_lag(R, lambda, score_options(c), validation_options(c));
        } catch (const InsufficientDataError& e) {
            entry["skipped"] = e.what();
            summary.push_back(entry);
            continue;
        }
        const DirectedNetwork net = c.compare_correction == Correction::bonferroni ? a.bonferroni
                                    : c.compare_correction == Correction::fdr
                                        ? a.fdr
                                        : validate_links(a.scores, Correction::none, validation_options(c));
        const auto [validated, rest] = split_pair_rates(R.symbols, rates, net);
        entry["n_validated"] = validated.size();
        entry["n_nonvalidated"] = rest.size();
        entry["correction"] = to_string(c.compare_correction);
        if (validated.size() < 2 || rest.size() < 2) {
            entry["skipped"] = "each group needs at least two pairs";
            summary.push_back(entry);
            continue;
        }
        CompareOptions co;
        co.n_permutations = c.permutations;
        co.seed = detail::derive_seed(c.seed, 0xC0000000ULL + static_cast<std::uint64_t>(lambda));
        GroupComparison g;
        try {
            g = compare_groups(validated, rest, co);
        } catch (const InputError& e) {
            entry["skipped"] = e.what();
            summary.push_back(entry);
            continue;
        }
        {
            auto out = open_output(c.out / ("compare_" + lag_tag(lambda) + ".csv"));
            out << "grid,density_validated,density_nonvalidated,band_lo,band_hi\n";
            for (std::size_t i = 0; i < g.grid.size(); ++i) {
                out << fmt_double(g.grid[i]) << ',' << fmt_double(g.kde_a[i]) << ',' << fmt_double(g.kde_b[i]) << ','
                    << fmt_double(g.band_lo[i]) << ',' << fmt_double(g.band_hi[i]) << '\n';
            }
        }
        entry["perm_p"] = g.perm_p;
        entry["n_permutations"] = g.n_permutations;
        entry["seed"] = g.seed;
        entry["mean_validated"] = g.mean_a;
        entry["mean_nonvalidated"] = g.mean_b;
        entry["bandwidth_validated"] = g.bandwidth_a;
        entry["bandwidth_nonvalidated"] = g.bandwidth_b;
        {
            auto out = open_output(c.out / ("compare_" + lag_tag(lambda) + ".json"));
            out << entry.dump(2) << '\n';
        }
        summary.push_back(entry);
    }
    return summary;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Statistically validated lead-lag networks from mutual information"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    RunFlags analyze_flags, sweep_flags, compare_flags;
    auto* analyze = app.add_subcommand("analyze", "score, validate and export networks for each lag");
    add_run_options(analyze, analyze_flags);
    auto* sweep = app.add_subcommand("sweep", "validated link counts per lag");
    add_run_options(sweep, sweep_flags);
    auto* compare = app.add_subcommand("compare", "entropy rates of validated vs non-validated pairs");
    add_run_options(compare, compare_flags);

    std::string spec_path, csv_path, truth_path;
    auto* synth = app.add_subcommand("synth", "generate a synthetic market with planted couplings");
    synth->add_option("--spec", spec_path, "JSON market spec")->required();
    synth->add_option("--out", csv_path, "output price CSV (wide)")->required();
    synth->add_option("--truth", truth_path, "output ground-truth JSON (default: <out>.truth.json)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*analyze) {
            const auto report = cmd_analyze(resolve_config(analyze_flags));
            for (const auto& lag : report["lags"]) {
                out << "lambda=" << lag["lambda"] << " bonferroni=" << lag["count_bonferroni"]
                    << " fdr=" << lag["count_fdr"] << '\n';
            }
            for (const auto& s : report["skipped"]) {
                err << "warning: skipped lambda=" << s["lambda"] << ": " << s["reason"].get<std::string>() << '\n';
            }
            for (const auto& d : report["dropped_symbols"]) {
                err << "warning: dropped incomplete symbol " << d.get<std::string>() << '\n';
            }
        } else if (*sweep) {
            const auto result = cmd_sweep(resolve_config(sweep_flags));
            out << "lambda,count_bonferroni,count_fdr\n";
            for (std::size_t i = 0; i < result.lambdas.size(); ++i) {
                out << result.lambdas[i] << ',' << result.count_bonferroni[i] << ',' << result.count_fdr[i] << '\n';
            }
            for (const auto& [lambda, reason] : result.skipped) {
                err << "warning: skipped lambda=" << lambda << ": " << reason << '\n';
            }
        } else if (*compare) {
            out << cmd_compare(resolve_config(compare_flags)).dump(2) << '\n';
        } else if (*synth) {
            if (truth_path.empty()) truth_path = csv_path + ".truth.json";
            cmd_synth(spec_path, csv_path, truth_path);
        }
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace leadlag
