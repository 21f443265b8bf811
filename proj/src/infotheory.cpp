#include "leadlag/infotheory.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "leadlag/error.hpp"

namespace leadlag {

namespace {

constexpr double kNegativeMiTolerance = 1e-12;

inline double xlog2x(std::int64_t c) {
    return c > 0 ? static_cast<double>(c) * std::log2(static_cast<double>(c)) : 0.0;
}

// H = log2(n) - sum(c log2 c) / n
inline double entropy_from_xlogx_sum(double sum, std::int64_t n) {
    return std::log2(static_cast<double>(n)) - sum / static_cast<double>(n);
}

// Sum of f(count) over a qx-by-qy joint table (row-major), visiting cell (a, b)
// together with (b, a) so the result is bit-identical under transposition.
template <class F>
double joint_xlogx_sum(std::span<const std::int64_t> joint, int qx, int qy, F f) {
    const int q = std::max(qx, qy);
    auto cell = [&](int a, int b) -> std::int64_t {
        return a < qx && b < qy ? joint[static_cast<std::size_t>(a * qy + b)] : 0;
    };
    double sum = 0.0;
    for (int a = 0; a < q; ++a) {
        sum += f(cell(a, a));
        for (int b = a + 1; b < q; ++b) sum += f(cell(a, b)) + f(cell(b, a));
    }
    return sum;
}

double combine_mi(double hx, double hy, double hxy) {
    const double mi = (hx + hy) - hxy;
    if (mi < 0.0) {
        if (mi < -kNegativeMiTolerance) {
            throw NumericalError("mutual information evaluated to " + std::to_string(mi));
        }
        return 0.0;
    }
    return mi;
}

std::vector<std::int64_t> symbol_counts(std::span<const Symbol> s, int q) {
    std::vector<std::int64_t> counts(static_cast<std::size_t>(q), 0);
    for (const Symbol v : s) {
        if (v >= q) throw InputError("symbol " + std::to_string(v) + " outside alphabet of size " + std::to_string(q));
        ++counts[v];
    }
    return counts;
}

void require_same_length(const SymbolSeries& x, const SymbolSeries& y) {
    if (x.size() != y.size()) {
        throw InputError("series lengths differ: " + std::to_string(x.size()) + " vs " + std::to_string(y.size()));
    }
}

}  // namespace

std::vector<std::int64_t> ContingencyTable::row_sums() const {
    std::vector<std::int64_t> sums(static_cast<std::size_t>(qx), 0);
    for (int a = 0; a < qx; ++a)
        for (int b = 0; b < qy; ++b) sums[static_cast<std::size_t>(a)] += at(a, b);
    return sums;
}

std::vector<std::int64_t> ContingencyTable::col_sums() const {
    std::vector<std::int64_t> sums(static_cast<std::size_t>(qy), 0);
    for (int a = 0; a < qx; ++a)
        for (int b = 0; b < qy; ++b) sums[static_cast<std::size_t>(b)] += at(a, b);
    return sums;
}

double entropy_from_counts(std::span<const std::int64_t> counts, std::int64_t n) {
    if (n <= 0) throw InputError("entropy of an empty sample is undefined");
    double sum = 0.0;
    for (const auto c : counts) sum += xlog2x(c);
    return entropy_from_xlogx_sum(sum, n);
}

double plugin_entropy(const SymbolSeries& s) {
    if (s.values.empty()) throw InputError("entropy of an empty series is undefined");
    const auto counts = symbol_counts(s.span(), s.q);
    return entropy_from_counts(counts, static_cast<std::int64_t>(s.size()));
}

ContingencyTable contingency(const SymbolSeries& x, const SymbolSeries& y) {
    require_same_length(x, y);
    ContingencyTable t;
    t.qx = x.q;
    t.qy = y.q;
    t.n = static_cast<std::int64_t>(x.size());
    t.counts.assign(static_cast<std::size_t>(x.q * y.q), 0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x.values[i] >= x.q || y.values[i] >= y.q) throw InputError("symbol outside alphabet");
        ++t.counts[static_cast<std::size_t>(x.values[i] * y.q + y.values[i])];
    }
    return t;
}

SymbolSeries joint_series(const SymbolSeries& x, const SymbolSeries& y) {
    require_same_length(x, y);
    SymbolSeries j;
    j.q = x.q * y.q;
    j.values.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        j.values[i] = static_cast<Symbol>(x.values[i] * y.q + y.values[i]);
    }
    return j;
}

double mutual_information(const SymbolSeries& x, const SymbolSeries& y) {
    require_same_length(x, y);
    if (x.values.empty()) throw InputError("mutual information of empty series is undefined");
    const auto joint = joint_series(x, y);
    const auto counts = symbol_counts(joint.span(), joint.q);
    const auto n = static_cast<std::int64_t>(x.size());
    const double hxy = entropy_from_xlogx_sum(joint_xlogx_sum(counts, x.q, y.q, xlog2x), n);
    return combine_mi(plugin_entropy(x), plugin_entropy(y), hxy);
}

double mutual_information(const ContingencyTable& table) {
    const auto rows = table.row_sums();
    const auto cols = table.col_sums();
    if (table.n <= 0) throw InputError("mutual information of an empty table is undefined");
    const double hxy = entropy_from_xlogx_sum(joint_xlogx_sum(table.counts, table.qx, table.qy, xlog2x), table.n);
    return combine_mi(entropy_from_counts(rows, table.n), entropy_from_counts(cols, table.n), hxy);
}

std::size_t lz76_complexity(std::span<const Symbol> s) {
    const std::size_t n = s.size();
    if (n == 0) return 0;
    if (n == 1) return 1;
    std::size_t c = 1, l = 1, i = 0, k = 1, k_max = 1;
    while (true) {
        if (s[i + k - 1] == s[l + k - 1]) {
            ++k;
            if (l + k > n) {
                ++c;
                break;
            }
        } else {
            k_max = std::max(k, k_max);
            ++i;
            if (i == l) {
                ++c;
                l += k_max;
                if (l + 1 > n) break;
                i = 0;
                k = 1;
                k_max = 1;
            } else {
                k = 1;
            }
        }
    }
    return c;
}

EntropyRate lz_entropy_rate(const SymbolSeries& s) {
    const std::size_t n = s.size();
    if (n < 2) throw InputError("entropy rate needs at least 2 symbols");
    EntropyRate r;
    r.n = n;
    r.q = s.q;
    r.complexity = lz76_complexity(s.span());
    r.value = static_cast<double>(r.complexity) * std::log2(static_cast<double>(n)) / static_cast<double>(n);
    r.unreliable = n < 100;
    return r;
}

// ---------------------------------------------------------------------------
// PairwiseMi

PairwiseMi::PairwiseMi(const SymbolMatrix& b)
    : rows_(b.rows()), cols_(b.cols()), q_(b.q()), words_((b.rows() + 63) / 64) {
    if (cols_ == 0 || rows_ == 0) throw InputError("pairwise MI needs a non-empty symbol matrix");
    const auto q = static_cast<std::size_t>(q_);
    b_bits_.assign(cols_ * q * words_, 0);
    b_counts_.assign(cols_ * q, 0);
    for (std::size_t n = 0; n < cols_; ++n) {
        const auto& col = b.columns[n];
        if (col.size() != rows_ || col.q != q_) throw InputError("symbol matrix columns disagree in length or q");
        for (std::size_t i = 0; i < rows_; ++i) {
            const Symbol v = col.values[i];
            if (v >= q_) throw InputError("symbol outside alphabet");
            b_bits_[(n * q + v) * words_ + i / 64] |= std::uint64_t{1} << (i % 64);
            ++b_counts_[n * q + v];
        }
        b_storage_.push_back(col.values);
    }
    xlogx_.resize(rows_ + 1);
    for (std::size_t c = 0; c <= rows_; ++c) xlogx_[c] = xlog2x(static_cast<std::int64_t>(c));
}

double PairwiseMi::mi_from_counts(std::span<const std::int64_t> joint, std::span<const std::int64_t> a_counts,
                                  std::size_t b_col) const {
    const auto q = static_cast<std::size_t>(q_);
    const auto n = static_cast<std::int64_t>(rows_);
    double sa = 0.0, sb = 0.0, sj = 0.0;
    for (std::size_t a = 0; a < q; ++a) sa += xlogx_[static_cast<std::size_t>(a_counts[a])];
    for (std::size_t b = 0; b < q; ++b) sb += xlogx_[static_cast<std::size_t>(b_counts_[b_col * q + b])];
    sj = joint_xlogx_sum(joint, q_, q_, [this](std::int64_t c) { return xlogx_[static_cast<std::size_t>(c)]; });
    return combine_mi(entropy_from_xlogx_sum(sa, n), entropy_from_xlogx_sum(sb, n), entropy_from_xlogx_sum(sj, n));
}

void PairwiseMi::score(const SymbolMatrix& a, std::vector<double>& mi) const {
    std::vector<std::span<const Symbol>> cols;
    cols.reserve(a.cols());
    for (const auto& c : a.columns) {
        if (c.q != q_) throw InputError("A and B symbol matrices use different q");
        cols.push_back(c.span());
    }
    score_columns(cols, mi);
}

void PairwiseMi::score_columns(std::span<const std::span<const Symbol>> a, std::vector<double>& mi) const {
    const auto q = static_cast<std::size_t>(q_);
    mi.assign(a.size() * cols_, 0.0);
    std::vector<std::int64_t> a_counts(q);
    std::vector<std::int64_t> joint(q * q);
    // Bitset intersection wins while q^2 * words stays below the row count.
    const bool use_bits = (q - 1) * (q - 1) * words_ < rows_;
    std::vector<std::uint64_t> a_bits(use_bits ? q * words_ : 0);

    for (std::size_t m = 0; m < a.size(); ++m) {
        const auto col = a[m];
        if (col.size() != rows_) throw InputError("A column length differs from B");
        std::fill(a_counts.begin(), a_counts.end(), 0);
        if (use_bits) std::fill(a_bits.begin(), a_bits.end(), 0);
        for (std::size_t i = 0; i < rows_; ++i) {
            const Symbol v = col[i];
            if (v >= q_) throw InputError("symbol outside alphabet");
            ++a_counts[v];
            if (use_bits) a_bits[v * words_ + i / 64] |= std::uint64_t{1} << (i % 64);
        }

        for (std::size_t n = 0; n < cols_; ++n) {
            if (use_bits) {
                const std::uint64_t* bb = &b_bits_[n * q * words_];
                std::int64_t corner = static_cast<std::int64_t>(rows_);
                for (std::size_t x = 0; x + 1 < q; ++x) {
                    std::int64_t row_rest = a_counts[x];
                    const std::uint64_t* ab = &a_bits[x * words_];
                    for (std::size_t y = 0; y + 1 < q; ++y) {
                        const std::uint64_t* bw = bb + y * words_;
                        std::int64_t c = 0;
                        for (std::size_t w = 0; w < words_; ++w) c += std::popcount(ab[w] & bw[w]);
                        joint[x * q + y] = c;
                        row_rest -= c;
                    }
                    joint[x * q + q - 1] = row_rest;
                }
                for (std::size_t y = 0; y + 1 < q; ++y) {
                    std::int64_t col_rest = b_counts_[n * q + y];
                    for (std::size_t x = 0; x + 1 < q; ++x) col_rest -= joint[x * q + y];
                    joint[(q - 1) * q + y] = col_rest;
                }
                for (std::size_t k = 0; k + 1 < q * q; ++k) corner -= joint[k];
                joint[q * q - 1] = corner;
            } else {
                std::fill(joint.begin(), joint.end(), 0);
                const auto& bcol = b_storage_[n];
                for (std::size_t i = 0; i < rows_; ++i) ++joint[col[i] * q + bcol[i]];
            }
            mi[m * cols_ + n] = mi_from_counts(joint, a_counts, n);
        }
    }
}

}  // namespace leadlag
