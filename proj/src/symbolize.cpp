#include "leadlag/symbolize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "leadlag/error.hpp"

namespace leadlag {

SymbolSeries quantile_symbolize(std::span<const double> x, int q) {
    if (q < 2 || q > kMaxAlphabet) throw InputError("bin count q must be in [2, 255], got " + std::to_string(q));
    const std::size_t n = x.size();
    if (n < static_cast<std::size_t>(q)) {
        throw InsufficientDataError("cannot split " + std::to_string(n) + " values into " + std::to_string(q) +
                                    " bins");
    }
    if (!std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); })) {
        throw InputError("cannot symbolize non-finite values");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&x](std::size_t a, std::size_t b) { return x[a] < x[b]; });

    SymbolSeries out;
    out.q = q;
    out.values.resize(n);
    const auto qq = static_cast<std::size_t>(q);
    for (std::size_t rank = 0; rank < n; ++rank) {
        out.values[order[rank]] = static_cast<Symbol>(rank * qq / n);
    }
    return out;
}

SymbolMatrix symbolize_matrix(const Eigen::MatrixXd& data, int q) {
    SymbolMatrix m;
    m.columns.reserve(static_cast<std::size_t>(data.cols()));
    for (Eigen::Index c = 0; c < data.cols(); ++c) {
        const auto col = data.col(c);
        m.columns.push_back(quantile_symbolize(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())), q));
    }
    return m;
}

}  // namespace leadlag
