#include "barow/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "barow/errors.hpp"

namespace barow::cli {

namespace {

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

std::string metric_cell(const std::optional<double>& v, const char* spec) {
    return v ? fmt(spec, *v) : std::string("n/a");
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_metric(const std::string& cell, const std::string& path, std::size_t line_no) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(cell, &pos);
        if (pos != cell.size()) throw std::invalid_argument(cell);
        return v;
    } catch (const std::exception&) {
        throw InvalidData(path + ":" + std::to_string(line_no) + ": bad metric value '" + cell +
                          "'");
    }
}

} // namespace

std::string now_iso8601_utc() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

RunManifest make_manifest(const Config& cfg) {
    RunManifest m;
    m.timestamp = now_iso8601_utc();
    m.config_path = cfg.origin();
    m.resolved = cfg.resolved();
    return m;
}

std::string manifest_prologue(const RunManifest& m) {
    std::ostringstream out;
    out << "# tool_version = " << m.tool_version << "\n";
    out << "# timestamp = " << m.timestamp << "\n";
    out << "# config = " << m.config_path << "\n";
    for (const auto& [k, v] : m.resolved) out << "# " << k << " = " << v << "\n";
    return out.str();
}

void write_series_csv(const std::string& path, const std::string& prologue,
                      const backtest::BacktestReport& report) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidData("cannot open file for writing: " + path);
    out << prologue;
    out << "date,ic,return,equity\n";
    for (std::size_t i = 0; i < report.dates.size(); ++i) {
        out << report.dates[i].to_string() << ',' << format_double_full(report.daily_ic[i]) << ','
            << format_double_full(report.daily_return[i]) << ','
            << format_double_full(report.equity[i]) << "\n";
    }
    if (!out) throw InvalidData("write failed: " + path);
}

void write_metrics_csv(const std::string& path, const std::string& prologue,
                       const std::string& label, const backtest::Metrics& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidData("cannot open file for writing: " + path);
    out << prologue;
    out << "model,total_return,sharpe,max_dd,calmar\n";
    const double nan = std::nan("");
    out << label << ',' << format_double_full(m.total_return) << ','
        << format_double_full(m.sharpe.value_or(nan)) << ',' << format_double_full(m.max_dd)
        << ',' << format_double_full(m.calmar.value_or(nan)) << "\n";
    if (!out) throw InvalidData("write failed: " + path);
}

void write_tune_csv(const std::string& path, const std::string& prologue,
                    const backtest::TuneResult& result) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidData("cannot open file for writing: " + path);
    out << prologue;
    out << "# selected_r = " << format_double_full(result.chosen_r) << "\n";
    out << "r,total_return,sharpe\n";
    const double nan = std::nan("");
    for (const auto& row : result.rows) {
        out << format_double_full(row.r) << ',' << format_double_full(row.total_return) << ','
            << format_double_full(row.sharpe.value_or(nan)) << "\n";
    }
    if (!out) throw InvalidData("write failed: " + path);
}

std::vector<MetricsRow> read_metrics_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidData("cannot open metrics file: " + path);
    std::vector<MetricsRow> rows;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto cells = split_csv_line(line);
        if (!header_seen) {
            if (cells.size() != 5 || cells[0] != "model" || cells[1] != "total_return" ||
                cells[2] != "sharpe" || cells[3] != "max_dd" || cells[4] != "calmar")
                throw InvalidData(path + ":" + std::to_string(line_no) +
                                  ": expected header 'model,total_return,sharpe,max_dd,calmar'");
            header_seen = true;
            continue;
        }
        if (cells.size() != 5)
            throw InvalidData(path + ":" + std::to_string(line_no) + ": expected 5 columns");
        MetricsRow row;
        row.model = cells[0];
        row.total_return = parse_metric(cells[1], path, line_no);
        const double sharpe = parse_metric(cells[2], path, line_no);
        if (std::isfinite(sharpe)) row.sharpe = sharpe;
        row.max_dd = parse_metric(cells[3], path, line_no);
        const double calmar = parse_metric(cells[4], path, line_no);
        if (std::isfinite(calmar)) row.calmar = calmar;
        rows.push_back(std::move(row));
    }
    if (!header_seen) throw InvalidData("metrics file has no header: " + path);
    return rows;
}

std::string render_comparison(const std::vector<MetricsRow>& rows) {
    const std::size_t n = rows.size();
    std::vector<std::optional<double>> ret(n), sharpe(n), dd(n), calmar(n);
    for (std::size_t i = 0; i < n; ++i) {
        ret[i] = rows[i].total_return;
        sharpe[i] = rows[i].sharpe;
        dd[i] = rows[i].max_dd;
        calmar[i] = rows[i].calmar;
    }
    auto best_of = [](const std::vector<std::optional<double>>& col) -> std::size_t {
        std::size_t best = col.size();
        for (std::size_t i = 0; i < col.size(); ++i) {
            if (!col[i]) continue;
            if (best == col.size() || *col[i] > *col[best]) best = i;
        }
        return best;  // col.size() when every value is undefined
    };
    const std::size_t best_ret = best_of(ret);
    const std::size_t best_sharpe = best_of(sharpe);
    const std::size_t best_dd = best_of(dd);  // max: least negative drawdown
    const std::size_t best_calmar = best_of(calmar);

    std::vector<std::vector<std::string>> cells;
    cells.push_back({"model", "return", "sharpe", "max_dd", "calmar"});
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::string> row;
        row.push_back(rows[i].model);
        row.push_back(fmt("%.1f%%", rows[i].total_return * 100.0) +
                      (i == best_ret ? "*" : ""));
        row.push_back(metric_cell(rows[i].sharpe, "%.1f") + (i == best_sharpe ? "*" : ""));
        row.push_back(fmt("%.2f%%", rows[i].max_dd * 100.0) + (i == best_dd ? "*" : ""));
        row.push_back(metric_cell(rows[i].calmar, "%.3g") + (i == best_calmar ? "*" : ""));
        cells.push_back(std::move(row));
    }

    std::vector<std::size_t> width(5, 0);
    for (const auto& row : cells)
        for (std::size_t c = 0; c < 5; ++c) width[c] = std::max(width[c], row[c].size());

    std::ostringstream out;
    for (const auto& row : cells) {
        for (std::size_t c = 0; c < 5; ++c) {
            if (c > 0) out << "  ";
            if (c == 0) {
                out << row[c] << std::string(width[c] - row[c].size(), ' ');
            } else {
                out << std::string(width[c] - row[c].size(), ' ') << row[c];
            }
        }
        out << "\n";
    }
    return out.str();
}

} // namespace barow::cli
