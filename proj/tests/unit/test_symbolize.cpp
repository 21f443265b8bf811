#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"

#include "leadlag/error.hpp"
#include "leadlag/symbolize.hpp"
#include "support.hpp"

using namespace leadlag;

namespace {

std::vector<Symbol> symbolize(std::vector<double> x, int q) { return quantile_symbolize(x, q).values; }

// Rank oracle: count strictly smaller values plus equal values that come earlier.
std::vector<Symbol> rank_oracle(const std::vector<double>& x, int q) {
    const std::size_t n = x.size();
    std::vector<Symbol> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t rank = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (x[j] < x[i] || (x[j] == x[i] && j < i)) ++rank;
        }
        out[i] = static_cast<Symbol>(rank * static_cast<std::size_t>(q) / n);
    }
    return out;
}

std::vector<std::size_t> populations(const SymbolSeries& s) {
    std::vector<std::size_t> pop(static_cast<std::size_t>(s.q), 0);
    for (const auto v : s.values) ++pop[v];
    return pop;
}

}  // namespace

TEST_CASE("small examples") {
    CHECK(symbolize({1, 2, 3, 4}, 4) == std::vector<Symbol>{0, 1, 2, 3});
    CHECK(symbolize({3, 1, 4, 2}, 2) == std::vector<Symbol>{1, 0, 1, 0});
    CHECK(symbolize({5, 5, 1, 1}, 2) == std::vector<Symbol>{1, 1, 0, 0});
}

TEST_CASE("stable ranking matches the oracle on every ordering of a tied sample") {
    std::array<double, 4> x{1, 1, 5, 5};
    std::sort(x.begin(), x.end());
    int checked = 0;
    do {
        const std::vector<double> v(x.begin(), x.end());
        CHECK(symbolize(v, 2) == rank_oracle(v, 2));
        ++checked;
    } while (std::next_permutation(x.begin(), x.end()));
    CHECK(checked == 6);

    std::array<int, 4> idx{0, 1, 2, 3};
    do {
        const std::vector<double> v{5.0 * (idx[0] < 2), 5.0 * (idx[1] < 2), 5.0 * (idx[2] < 2), 5.0 * (idx[3] < 2)};
        CHECK(symbolize(v, 2) == rank_oracle(v, 2));
    } while (std::next_permutation(idx.begin(), idx.end()));
}

TEST_CASE("heavily tied input stays balanced") {
    std::vector<double> zeros(103, 0.0);
    zeros[50] = 1.0;
    const auto s = quantile_symbolize(zeros, 4);
    const auto pop = populations(s);
    CHECK(*std::max_element(pop.begin(), pop.end()) - *std::min_element(pop.begin(), pop.end()) <= 1);
    CHECK(s.values == rank_oracle(zeros, 4));
}

TEST_CASE("lower bins take the remainder") {
    const auto pop = populations(quantile_symbolize(testing::normal_sample(10, 1), 4));
    CHECK(pop == std::vector<std::size_t>{3, 2, 3, 2});
    // floor(rank * q / n) for n = 10, q = 4: ranks 0-2 -> 0, 3-4 -> 1, 5-7 -> 2, 8-9 -> 3
}

TEST_CASE("errors") {
    CHECK_THROWS_AS((void)symbolize({1, 2, 3}, 4), InsufficientDataError);
    CHECK_THROWS_AS((void)symbolize({1, 2, 3}, 1), InputError);
    CHECK_THROWS_AS((void)symbolize(std::vector<double>(300, 1.0), 256), InputError);
    CHECK_THROWS_AS((void)symbolize({1, NAN, 3, 4}, 2), InputError);
}

TEST_CASE("symbolize_matrix: identical and affine columns give identical symbols") {
    const auto x = testing::normal_sample(500, 9);
    Eigen::MatrixXd m(500, 3);
    for (Eigen::Index i = 0; i < 500; ++i) {
        m(i, 0) = x[static_cast<std::size_t>(i)];
        m(i, 1) = x[static_cast<std::size_t>(i)];
        m(i, 2) = 2.0 * x[static_cast<std::size_t>(i)] + 3.0;
    }
    const auto s = symbolize_matrix(m, 4);
    REQUIRE(s.cols() == 3);
    CHECK(s.rows() == 500);
    CHECK(s.q() == 4);
    CHECK(s.columns[0].values == s.columns[1].values);
    CHECK(s.columns[0].values == s.columns[2].values);
}

TEST_CASE("symbolize_matrix: 98 x 3000 quartiles are exactly 750 each") {
    std::mt19937_64 rng(42);
    std::student_t_distribution<double> dist(3.0);
    Eigen::MatrixXd m(3000, 98);
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = std::round(dist(rng) * 20.0) / 20.0;  // many ties
    const auto s = symbolize_matrix(m, 4);
    for (const auto& col : s.columns) CHECK(populations(col) == std::vector<std::size_t>(4, 750));
}

TEST_CASE("property: balance and monotone invariance on random inputs") {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<std::size_t> len(16, 700);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = len(rng);
        auto x = testing::normal_sample(n, rng());
        if (trial % 3 == 0)
            for (auto& v : x) v = std::round(v * 2.0);
        for (const int q : {2, 4, 8, 16}) {
            const auto s = quantile_symbolize(x, q);
            const auto pop = populations(s);
            CHECK(*std::max_element(pop.begin(), pop.end()) - *std::min_element(pop.begin(), pop.end()) <= 1);
            std::vector<double> fx(n);
            std::transform(x.begin(), x.end(), fx.begin(), [](double v) { return std::exp(3.0 * v) + std::cbrt(v); });
            CHECK(quantile_symbolize(fx, q).values == s.values);
        }
    }
}

TEST_CASE("property: permutation equivariance on tie-free data") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const auto x = testing::normal_sample(200, rng());
        std::vector<std::size_t> perm(x.size());
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<double> px(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) px[i] = x[perm[i]];
        const auto s = quantile_symbolize(x, 8);
        const auto ps = quantile_symbolize(px, 8);
        for (std::size_t i = 0; i < x.size(); ++i) CHECK(ps.values[i] == s.values[perm[i]]);
    }
}
