#include "leadlag/marketdata.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string_view>
#include <unordered_map>

#include "leadlag/error.hpp"

namespace leadlag {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            fields.push_back(trim(line.substr(start)));
            break;
        }
        fields.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return fields;
}

double parse_price(std::string_view field, std::size_t line) {
    double value = 0.0;
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
        throw ParseError("invalid price '" + std::string(field) + "'", line);
    }
    return value;
}

std::int64_t parse_day(std::string_view field, std::size_t line) {
    std::int64_t value = 0;
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        throw ParseError("invalid day label '" + std::string(field) + "'", line);
    }
    return value;
}

void check_positive(double price, std::string_view timestamp, std::string_view symbol, std::size_t line) {
    if (!(price > 0.0)) {
        std::ostringstream msg;
        msg << "line " << line << ": non-positive price " << price << " at row '" << timestamp << "' for symbol '"
            << symbol << "'";
        throw InputError(msg.str());
    }
}

struct RawTable {
    std::vector<std::string> symbols;
    std::vector<std::string> timestamps;
    std::vector<std::int64_t> days;
    // cells[row][col]; NaN marks a missing cell
    std::vector<std::vector<double>> cells;
};

IngestResult finalize(RawTable raw) {
    if (raw.timestamps.empty()) throw InsufficientDataError("price file has no data rows");

    for (std::size_t r = 1; r < raw.timestamps.size(); ++r) {
        if (!(raw.timestamps[r - 1] < raw.timestamps[r])) {
            throw InputError("timestamps not strictly increasing at '" + raw.timestamps[r] + "'");
        }
        if (raw.days[r] < raw.days[r - 1]) {
            throw InputError("day labels decrease at timestamp '" + raw.timestamps[r] + "'");
        }
    }

    IngestResult result;
    std::vector<std::size_t> kept;
    for (std::size_t c = 0; c < raw.symbols.size(); ++c) {
        const bool complete = std::none_of(raw.cells.begin(), raw.cells.end(),
                                           [c](const auto& row) { return std::isnan(row[c]); });
        if (complete) {
            kept.push_back(c);
        } else {
            result.dropped.push_back(raw.symbols[c]);
        }
    }
    if (kept.empty()) throw InsufficientDataError("no symbol has complete price data");

    auto& pm = result.prices;
    pm.timestamps = std::move(raw.timestamps);
    pm.day_index = std::move(raw.days);
    pm.prices.resize(static_cast<Eigen::Index>(pm.timestamps.size()), static_cast<Eigen::Index>(kept.size()));
    for (std::size_t j = 0; j < kept.size(); ++j) {
        pm.symbols.push_back(raw.symbols[kept[j]]);
        for (std::size_t r = 0; r < raw.cells.size(); ++r) {
            pm.prices(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = raw.cells[r][kept[j]];
        }
    }
    return result;
}

RawTable read_wide(std::istream& in) {
    RawTable raw;
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw ParseError("empty file", 0);
    ++line_no;
    const auto header = split(line);
    if (header.size() < 3 || header[0] != "timestamp" || header[1] != "day") {
        throw ParseError("wide header must be 'timestamp,day,SYM1,...'", line_no);
    }
    for (std::size_t i = 2; i < header.size(); ++i) {
        if (header[i].empty()) throw ParseError("empty symbol name in header", line_no);
        raw.symbols.emplace_back(header[i]);
    }
    const std::size_t n_sym = raw.symbols.size();

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split(line);
        if (fields.size() != n_sym + 2) {
            throw ParseError("expected " + std::to_string(n_sym + 2) + " fields, got " + std::to_string(fields.size()),
                             line_no);
        }
        if (fields[0].empty()) throw ParseError("empty timestamp", line_no);
        raw.timestamps.emplace_back(fields[0]);
        raw.days.push_back(parse_day(fields[1], line_no));
        std::vector<double> row(n_sym, std::numeric_limits<double>::quiet_NaN());
        for (std::size_t c = 0; c < n_sym; ++c) {
            const auto f = fields[c + 2];
            if (f.empty()) continue;
            row[c] = parse_price(f, line_no);
            check_positive(row[c], fields[0], raw.symbols[c], line_no);
        }
        raw.cells.push_back(std::move(row));
    }
    return raw;
}

RawTable read_long(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw ParseError("empty file", 0);
    ++line_no;
    const auto header = split(line);
    if (header.size() != 4 || header[0] != "timestamp" || header[1] != "day" || header[2] != "symbol" ||
        header[3] != "price") {
        throw ParseError("long header must be 'timestamp,day,symbol,price'", line_no);
    }

    struct Row {
        std::int64_t day;
        std::size_t first_line;
        std::unordered_map<std::size_t, double> prices;
    };
    std::map<std::string, Row> rows;
    std::vector<std::string> symbols;
    std::unordered_map<std::string, std::size_t> symbol_pos;

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split(line);
        if (fields.size() != 4) {
            throw ParseError("expected 4 fields, got " + std::to_string(fields.size()), line_no);
        }
        if (fields[0].empty() || fields[2].empty()) throw ParseError("empty timestamp or symbol", line_no);
        const std::int64_t day = parse_day(fields[1], line_no);
        std::string sym(fields[2]);
        auto [it, inserted] = symbol_pos.try_emplace(sym, symbols.size());
        if (inserted) symbols.push_back(sym);
        const std::size_t col = it->second;

        auto [row_it, new_row] = rows.try_emplace(std::string(fields[0]), Row{day, line_no, {}});
        if (!new_row && row_it->second.day != day) {
            throw ParseError("conflicting day label for timestamp '" + row_it->first + "'", line_no);
        }
        if (fields[3].empty()) continue;  // explicit blank: treated as missing
        const double price = parse_price(fields[3], line_no);
        check_positive(price, fields[0], sym, line_no);
        if (!row_it->second.prices.emplace(col, price).second) {
            throw ParseError("duplicate entry for (" + row_it->first + ", " + sym + ")", line_no);
        }
    }

    // columns in lexicographic symbol order
    std::vector<std::size_t> order(symbols.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return symbols[a] < symbols[b]; });
    std::vector<std::size_t> position(symbols.size());
    RawTable raw;
    for (std::size_t k = 0; k < order.size(); ++k) {
        position[order[k]] = k;
        raw.symbols.push_back(symbols[order[k]]);
    }
    for (auto& [ts, row] : rows) {
        raw.timestamps.push_back(ts);
        raw.days.push_back(row.day);
        std::vector<double> cells(raw.symbols.size(), std::numeric_limits<double>::quiet_NaN());
        for (const auto& [col, price] : row.prices) cells[position[col]] = price;
        raw.cells.push_back(std::move(cells));
    }
    return raw;
}

// [begin, end) row ranges of consecutive equal day labels
std::vector<std::pair<std::size_t, std::size_t>> day_spans(const std::vector<std::int64_t>& days) {
    std::vector<std::pair<std::size_t, std::size_t>> spans;
    std::size_t begin = 0;
    for (std::size_t i = 1; i <= days.size(); ++i) {
        if (i == days.size() || days[i] != days[begin]) {
            spans.emplace_back(begin, i);
            begin = i;
        }
    }
    return spans;
}

}  // namespace

IngestResult read_price_csv(std::istream& in, CsvFormat format) {
    return finalize(format == CsvFormat::wide ? read_wide(in) : read_long(in));
}

IngestResult ingest_csv(const std::filesystem::path& path, CsvFormat format) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open input file '" + path.string() + "'");
    return read_price_csv(in, format);
}

void write_price_csv(std::ostream& out, const PriceMatrix& prices) {
    out << "timestamp,day";
    for (const auto& s : prices.symbols) out << ',' << s;
    out << '\n';
    const auto old_precision = out.precision(17);
    for (std::size_t r = 0; r < prices.rows(); ++r) {
        out << prices.timestamps[r] << ',' << prices.day_index[r];
        for (std::size_t c = 0; c < prices.cols(); ++c) {
            out << ',' << prices.prices(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        }
        out << '\n';
    }
    out.precision(old_precision);
}

ReturnMatrix log_returns(const PriceMatrix& prices, int tau) {
    if (tau < 1) throw InputError("tau must be a positive integer");
    const auto spans = day_spans(prices.day_index);
    std::size_t total = 0;
    for (const auto& [b, e] : spans) {
        if (e - b <= static_cast<std::size_t>(tau)) {
            throw InsufficientDataError("day " + std::to_string(prices.day_index[b]) + " has " +
                                        std::to_string(e - b) + " rows; need more than tau = " + std::to_string(tau));
        }
        total += e - b - static_cast<std::size_t>(tau);
    }

    ReturnMatrix r;
    r.symbols = prices.symbols;
    r.tau = tau;
    r.day_index.reserve(total);
    r.returns.resize(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(prices.cols()));
    const Eigen::MatrixXd logp = prices.prices.array().log().matrix();
    Eigen::Index out = 0;
    for (const auto& [b, e] : spans) {
        for (std::size_t t = b + static_cast<std::size_t>(tau); t < e; ++t, ++out) {
            const auto ti = static_cast<Eigen::Index>(t);
            r.returns.row(out) = logp.row(ti) - logp.row(ti - tau);
            r.day_index.push_back(prices.day_index[t]);
        }
    }
    return r;
}

std::size_t lagged_row_count(const ReturnMatrix& returns, int lambda) {
    std::size_t total = 0;
    for (const auto& [b, e] : day_spans(returns.day_index)) {
        const std::size_t d = e - b;
        if (d > static_cast<std::size_t>(lambda)) total += d - static_cast<std::size_t>(lambda);
    }
    return total;
}

LaggedPair build_lagged_pair(const ReturnMatrix& returns, int lambda) {
    if (lambda < 0) throw InputError("lag must be non-negative");
    const std::size_t T = lagged_row_count(returns, lambda);
    if (T == 0) {
        throw InsufficientDataError("lag " + std::to_string(lambda) + " leaves no aligned rows: every day has <= " +
                                    std::to_string(lambda) + " return rows");
    }

    LaggedPair pair;
    pair.symbols = returns.symbols;
    pair.lambda = lambda;
    pair.A.resize(static_cast<Eigen::Index>(T), static_cast<Eigen::Index>(returns.cols()));
    pair.B.resizeLike(pair.A);
    pair.day_a.reserve(T);
    pair.day_b.reserve(T);
    Eigen::Index out = 0;
    const auto lag = static_cast<std::size_t>(lambda);
    for (const auto& [b, e] : day_spans(returns.day_index)) {
        if (e - b <= lag) continue;
        for (std::size_t i = b; i + lag < e; ++i, ++out) {
            pair.A.row(out) = returns.returns.row(static_cast<Eigen::Index>(i));
            pair.B.row(out) = returns.returns.row(static_cast<Eigen::Index>(i + lag));
            pair.day_a.push_back(returns.day_index[i]);
            pair.day_b.push_back(returns.day_index[i + lag]);
        }
    }
    return pair;
}

void collapse_days(PriceMatrix& prices) {
    std::fill(prices.day_index.begin(), prices.day_index.end(), std::int64_t{0});
}

}  // namespace leadlag
