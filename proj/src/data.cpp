#include "barow/data.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "barow/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace barow::data {

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_number(const std::string& cell, std::size_t line_no, const std::string& column) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(cell, &pos);
    } catch (const std::exception&) {
        throw InvalidData("line " + std::to_string(line_no) + ": non-numeric value '" + cell +
                          "' in column " + column);
    }
    while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
    if (pos != cell.size())
        throw InvalidData("line " + std::to_string(line_no) + ": non-numeric value '" + cell +
                          "' in column " + column);
    return v;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

struct RawRow {
    Date date;
    std::string symbol;
    double y;
    Vector x;
};

} // namespace

std::size_t RegimeSpec::total_days() const {
    std::size_t n = 0;
    for (const auto& s : segments) n += s.length_days;
    return n;
}

void RegimeSpec::validate() const {
    if (segments.empty()) throw std::invalid_argument("RegimeSpec: at least one segment required");
    const std::size_t d = segments.front().w.size();
    if (d == 0) throw std::invalid_argument("RegimeSpec: weight vectors must be non-empty");
    for (std::size_t i = 0; i < segments.size(); ++i) {
        if (segments[i].length_days == 0)
            throw std::invalid_argument("RegimeSpec: segment " + std::to_string(i) +
                                        " has zero length");
        if (segments[i].w.size() != d)
            throw std::invalid_argument("RegimeSpec: segment " + std::to_string(i) +
                                        " weight dimension mismatch");
    }
    if (noise_std < 0.0) throw std::invalid_argument("RegimeSpec: noise_std must be nonnegative");
    if (universe_size == 0) throw std::invalid_argument("RegimeSpec: universe_size must be positive");
    if (feature_dist == FeatureDist::Uniform && !(uniform_lo < uniform_hi))
        throw std::invalid_argument("RegimeSpec: uniform_lo must be < uniform_hi");
    if (!start_date.valid()) throw std::invalid_argument("RegimeSpec: invalid start_date");
}

PanelDataset load_panel_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidData("cannot open panel file: " + path);

    std::string line;
    std::size_t line_no = 0;
    // Header (comment lines may precede it).
    std::size_t dim = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty() || line[0] == '#') continue;
        auto cells = split_csv_line(line);
        if (cells.size() < 4 || cells[0] != "date" || cells[1] != "symbol" || cells[2] != "y")
            throw InvalidData("line " + std::to_string(line_no) +
                              ": expected header 'date,symbol,y,x0,...'");
        for (std::size_t j = 3; j < cells.size(); ++j) {
            if (cells[j] != "x" + std::to_string(j - 3))
                throw InvalidData("line " + std::to_string(line_no) + ": expected column 'x" +
                                  std::to_string(j - 3) + "', got '" + cells[j] + "'");
        }
        dim = cells.size() - 3;
        header_seen = true;
        break;
    }
    if (!header_seen) throw InvalidData("panel file has no header: " + path);

    std::vector<RawRow> rows;
    std::size_t dropped = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty() || line[0] == '#') continue;
        auto cells = split_csv_line(line);
        if (cells.size() != dim + 3)
            throw InvalidData("line " + std::to_string(line_no) + ": expected " +
                              std::to_string(dim + 3) + " columns, got " +
                              std::to_string(cells.size()));
        RawRow row;
        try {
            row.date = Date::parse(cells[0]);
        } catch (const InvalidData& e) {
            throw InvalidData("line " + std::to_string(line_no) + ": " + e.what());
        }
        row.symbol = cells[1];
        if (row.symbol.empty())
            throw InvalidData("line " + std::to_string(line_no) + ": empty symbol");
        row.y = parse_number(cells[2], line_no, "y");
        row.x.resize(dim);
        for (std::size_t j = 0; j < dim; ++j)
            row.x[j] = parse_number(cells[3 + j], line_no, "x" + std::to_string(j));
        bool finite = std::isfinite(row.y);
        for (double v : row.x) finite = finite && std::isfinite(v);
        if (!finite) {
            ++dropped;
            continue;
        }
        rows.push_back(std::move(row));
    }
    if (dropped > 0)
        std::fprintf(stderr, "warning: dropped %zu row(s) with non-finite values from %s\n",
                     dropped, path.c_str());

    std::stable_sort(rows.begin(), rows.end(), [](const RawRow& a, const RawRow& b) {
        if (a.date != b.date) return a.date < b.date;
        return a.symbol < b.symbol;
    });
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].date == rows[i - 1].date && rows[i].symbol == rows[i - 1].symbol)
            throw InvalidData("duplicate (date,symbol) pair: " + rows[i].date.to_string() + "," +
                              rows[i].symbol);
    }

    PanelDataset panel;
    panel.dim = dim;
    std::map<std::string, bool> universe;
    for (std::size_t i = 0; i < rows.size();) {
        std::size_t j = i;
        while (j < rows.size() && rows[j].date == rows[i].date) ++j;
        const std::size_t k = j - i;
        Batch b;
        b.date = rows[i].date;
        b.X = Matrix(k, dim);
        b.Y.resize(k);
        b.symbols.resize(k);
        for (std::size_t r = 0; r < k; ++r) {
            const RawRow& src = rows[i + r];
            for (std::size_t c = 0; c < dim; ++c) b.X(r, c) = src.x[c];
            b.Y[r] = src.y;
            b.symbols[r] = src.symbol;
            universe[src.symbol] = true;
        }
        panel.batches.push_back(std::move(b));
        i = j;
    }
    panel.universe.reserve(universe.size());
    for (const auto& [sym, _] : universe) panel.universe.push_back(sym);
    return panel;
}

void write_panel_csv(const std::string& path, const PanelDataset& panel,
                     const std::string& prologue) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidData("cannot open file for writing: " + path);
    out << prologue;
    out << "date,symbol,y";
    for (std::size_t j = 0; j < panel.dim; ++j) out << ",x" << j;
    out << "\n";
    for (const auto& b : panel.batches) {
        const std::string date = b.date.to_string();
        for (std::size_t r = 0; r < b.size(); ++r) {
            out << date << ',' << b.symbols[r] << ',' << format_double(b.Y[r]);
            for (std::size_t c = 0; c < panel.dim; ++c) out << ',' << format_double(b.X(r, c));
            out << "\n";
        }
    }
    if (!out) throw InvalidData("write failed: " + path);
}

void write_truth_csv(const std::string& path, const PanelDataset& panel,
                     const std::string& prologue) {
    if (!panel.truth) throw std::invalid_argument("panel has no truth weights");
    if (panel.truth->size() != panel.batches.size())
        throw std::invalid_argument("truth length does not match batch count");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidData("cannot open file for writing: " + path);
    out << prologue;
    out << "date";
    for (std::size_t j = 0; j < panel.dim; ++j) out << ",w" << j;
    out << "\n";
    for (std::size_t i = 0; i < panel.batches.size(); ++i) {
        out << panel.batches[i].date.to_string();
        for (double v : (*panel.truth)[i]) out << ',' << format_double(v);
        out << "\n";
    }
    if (!out) throw InvalidData("write failed: " + path);
}

std::vector<Vector> load_truth_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidData("cannot open truth file: " + path);
    std::string line;
    std::size_t line_no = 0;
    std::size_t dim = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty() || line[0] == '#') continue;
        auto cells = split_csv_line(line);
        if (cells.empty() || cells[0] != "date")
            throw InvalidData("line " + std::to_string(line_no) + ": expected header 'date,w0,...'");
        dim = cells.size() - 1;
        break;
    }
    std::vector<Vector> truth;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty() || line[0] == '#') continue;
        auto cells = split_csv_line(line);
        if (cells.size() != dim + 1)
            throw InvalidData("line " + std::to_string(line_no) + ": expected " +
                              std::to_string(dim + 1) + " columns");
        Date::parse(cells[0]);  // validates
        Vector w(dim);
        for (std::size_t j = 0; j < dim; ++j)
            w[j] = parse_number(cells[1 + j], line_no, "w" + std::to_string(j));
        truth.push_back(std::move(w));
    }
    return truth;
}

PanelDataset generate_synthetic_panel(const RegimeSpec& spec) {
    spec.validate();
    const std::size_t d = spec.dim();
    const std::size_t K = spec.universe_size;
    const std::size_t days = spec.total_days();

    std::size_t width = 1;
    for (std::size_t v = K > 0 ? K - 1 : 0; v >= 10; v /= 10) ++width;
    std::vector<std::string> symbols(K);
    for (std::size_t k = 0; k < K; ++k) {
        std::string digits = std::to_string(k);
        if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
        symbols[k] = "S" + digits;
    }

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(spec.uniform_lo, spec.uniform_hi);

    PanelDataset panel;
    panel.dim = d;
    panel.universe = symbols;
    panel.truth = std::vector<Vector>();
    panel.truth->reserve(days);
    panel.batches.reserve(days);

    Date date = spec.start_date;
    for (const auto& seg : spec.segments) {
        for (std::size_t t = 0; t < seg.length_days; ++t) {
            Batch b;
            b.date = date;
            b.symbols = symbols;
            b.X = Matrix(K, d);
            b.Y.resize(K);
            for (std::size_t k = 0; k < K; ++k) {
                double y = 0.0;
                for (std::size_t j = 0; j < d; ++j) {
                    const double x = spec.feature_dist == FeatureDist::StandardNormal
                                         ? normal(rng)
                                         : uniform(rng);
                    b.X(k, j) = x;
                    y += seg.w[j] * x;
                }
                // Noise is always drawn so the feature stream is unchanged
                // when noise_std moves between zero and nonzero.
                const double eps = normal(rng);
                b.Y[k] = y + spec.noise_std * eps;
            }
            panel.batches.push_back(std::move(b));
            panel.truth->push_back(seg.w);
            date = date.add_days(1);
        }
    }
    return panel;
}

Batch neutralize_cross_section(const Batch& batch) {
    const std::size_t k = batch.size();
    if (k < 2) throw std::invalid_argument("neutralize_cross_section requires K >= 2");
    double mean = 0.0;
    for (double v : batch.Y) mean += v;
    mean /= static_cast<double>(k);
    double var = 0.0;
    for (double v : batch.Y) var += (v - mean) * (v - mean);
    var /= static_cast<double>(k);
    const double sd = std::sqrt(var);
    Batch out = batch;
    if (sd < 1e-12) {
        std::fill(out.Y.begin(), out.Y.end(), 0.0);
    } else {
        for (double& v : out.Y) v = (v - mean) / sd;
    }
    return out;
}

void standardize_features(Batch& batch) {
    const std::size_t k = batch.size();
    if (k < 2) throw std::invalid_argument("standardize_features requires K >= 2");
    const std::size_t d = batch.X.cols();
    for (std::size_t j = 0; j < d; ++j) {
        double mean = 0.0;
        for (std::size_t r = 0; r < k; ++r) mean += batch.X(r, j);
        mean /= static_cast<double>(k);
        double var = 0.0;
        for (std::size_t r = 0; r < k; ++r) {
            const double c = batch.X(r, j) - mean;
            var += c * c;
        }
        var /= static_cast<double>(k);
        const double sd = std::sqrt(var);
        if (sd < 1e-12) {
            for (std::size_t r = 0; r < k; ++r) batch.X(r, j) = 0.0;
        } else {
            for (std::size_t r = 0; r < k; ++r) batch.X(r, j) = (batch.X(r, j) - mean) / sd;
        }
    }
}

std::vector<PriceSeries> load_price_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidData("cannot open price file: " + path);
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty() || line[0] == '#') continue;
        auto cells = split_csv_line(line);
        if (cells.size() != 3 || cells[0] != "date" || cells[1] != "symbol" || cells[2] != "close")
            throw InvalidData("line " + std::to_string(line_no) +
                              ": expected header 'date,symbol,close'");
        header_seen = true;
        break;
    }
    if (!header_seen) throw InvalidData("price file has no header: " + path);

    struct PriceRow {
        Date date;
        std::string symbol;
        double close;
    };
    std::vector<PriceRow> rows;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty() || line[0] == '#') continue;
        auto cells = split_csv_line(line);
        if (cells.size() != 3)
            throw InvalidData("line " + std::to_string(line_no) + ": expected 3 columns");
        PriceRow row;
        try {
            row.date = Date::parse(cells[0]);
        } catch (const InvalidData& e) {
            throw InvalidData("line " + std::to_string(line_no) + ": " + e.what());
        }
        row.symbol = cells[1];
        if (row.symbol.empty())
            throw InvalidData("line " + std::to_string(line_no) + ": empty symbol");
        row.close = parse_number(cells[2], line_no, "close");
        if (!std::isfinite(row.close))
            throw InvalidData("line " + std::to_string(line_no) + ": non-finite close");
        rows.push_back(std::move(row));
    }

    std::stable_sort(rows.begin(), rows.end(), [](const PriceRow& a, const PriceRow& b) {
        if (a.symbol != b.symbol) return a.symbol < b.symbol;
        return a.date < b.date;
    });
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].symbol == rows[i - 1].symbol && rows[i].date == rows[i - 1].date)
            throw InvalidData("duplicate (date,symbol) pair: " + rows[i].date.to_string() + "," +
                              rows[i].symbol);
    }

    std::vector<PriceSeries> out;
    for (std::size_t i = 0; i < rows.size();) {
        std::size_t j = i;
        while (j < rows.size() && rows[j].symbol == rows[i].symbol) ++j;
        PriceSeries s;
        s.symbol = rows[i].symbol;
        s.dates.reserve(j - i);
        s.close.reserve(j - i);
        for (std::size_t r = i; r < j; ++r) {
            s.dates.push_back(rows[r].date);
            s.close.push_back(rows[r].close);
        }
        out.push_back(std::move(s));
        i = j;
    }
    return out;
}

std::vector<MacdRow> macd_features(const PriceSeries& series, int fast, int slow, int signal) {
    if (fast <= 0 || slow <= 0 || signal <= 0)
        throw std::invalid_argument("macd periods must be positive");
    if (fast >= slow) throw std::invalid_argument("macd fast period must be < slow period");
    const std::size_t n = series.close.size();
    if (series.dates.size() != n)
        throw std::invalid_argument("price series dates/close length mismatch");

    std::vector<MacdRow> out;
    const std::size_t need = static_cast<std::size_t>(slow) + static_cast<std::size_t>(signal);
    if (n < need) return out;

    auto ema_series = [&](const Vector& v, int period) {
        // Defined from index period-1 onward; seeded with the mean of the
        // first `period` values.
        Vector e(v.size(), 0.0);
        double seed = 0.0;
        for (int i = 0; i < period; ++i) seed += v[i];
        seed /= period;
        e[period - 1] = seed;
        const double alpha = 2.0 / (period + 1.0);
        for (std::size_t i = period; i < v.size(); ++i)
            e[i] = alpha * v[i] + (1.0 - alpha) * e[i - 1];
        return e;
    };

    const Vector ema_fast = ema_series(series.close, fast);
    const Vector ema_slow = ema_series(series.close, slow);

    // MACD line exists from index slow-1.
    const std::size_t macd_start = static_cast<std::size_t>(slow) - 1;
    Vector macd(n - macd_start);
    for (std::size_t i = macd_start; i < n; ++i) macd[i - macd_start] = ema_fast[i] - ema_slow[i];

    const Vector sig = ema_series(macd, signal);

    // Seed rows are warm-up only: emission starts after the signal seed.
    const std::size_t first = static_cast<std::size_t>(signal);
    out.reserve(macd.size() - first);
    for (std::size_t i = first; i < macd.size(); ++i) {
        MacdRow row;
        row.date = series.dates[macd_start + i];
        row.macd = macd[i];
        row.signal = sig[i];
        row.histogram = macd[i] - sig[i];
        out.push_back(row);
    }
    return out;
}

std::vector<std::pair<std::string, std::vector<MacdRow>>> macd_features_all(
    const std::vector<PriceSeries>& series, int fast, int slow, int signal) {
    std::vector<std::pair<std::string, std::vector<MacdRow>>> out(series.size());
    const std::int64_t n = static_cast<std::int64_t>(series.size());
#pragma omp parallel for schedule(dynamic) if (n > 1)
    for (std::int64_t i = 0; i < n; ++i) {
        out[i].first = series[i].symbol;
        out[i].second = macd_features(series[i], fast, slow, signal);
    }
    return out;
}

} // namespace barow::data
