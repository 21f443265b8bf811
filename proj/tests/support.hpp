#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "leadlag/symbolize.hpp"

namespace leadlag::testing {

inline std::vector<double> normal_sample(std::size_t n, std::uint64_t seed, double mean = 0.0, double sd = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(mean, sd);
    std::vector<double> out(n);
    for (auto& v : out) v = dist(rng);
    return out;
}

inline SymbolSeries uniform_symbols(std::size_t n, int q, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> dist(0, q - 1);
    SymbolSeries s;
    s.q = q;
    s.values.resize(n);
    for (auto& v : s.values) v = static_cast<Symbol>(dist(rng));
    return s;
}

inline SymbolSeries series(std::vector<Symbol> values, int q) { return SymbolSeries{std::move(values), q}; }

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
  public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("leadlag_" + tag + "_" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    [[nodiscard]] const std::filesystem::path& path() const { return path_; }
    [[nodiscard]] std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

  private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Two-sided one-sample Kolmogorov-Smirnov statistic of `sample` against `cdf`.
template <class Cdf>
double ks_statistic(std::vector<double> sample, Cdf cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
    }
    return d;
}

}  // namespace leadlag::testing
