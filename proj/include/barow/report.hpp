#pragma once

#include <optional>
#include <string>
#include <vector>

#include "barow/backtest.hpp"
#include "barow/config.hpp"

namespace barow::cli {

inline constexpr const char* kToolVersion = "0.1.0";

/// Every output file starts with this block as '#' comments. The timestamp
/// sits on its own line so stripping it leaves repeated runs byte-identical.
struct RunManifest {
    std::string tool_version = kToolVersion;
    std::string timestamp;  // ISO-8601 UTC
    std::string config_path;
    std::map<std::string, std::string> resolved;
};

std::string now_iso8601_utc();
RunManifest make_manifest(const Config& cfg);
std::string manifest_prologue(const RunManifest& m);

/// `date,ic,return,equity` rows, 17 significant digits.
void write_series_csv(const std::string& path, const std::string& prologue,
                      const backtest::BacktestReport& report);

/// One `model,total_return,sharpe,max_dd,calmar` row; undefined markers
/// serialize as nan.
void write_metrics_csv(const std::string& path, const std::string& prologue,
                       const std::string& label, const backtest::Metrics& m);

/// `r,total_return,sharpe` rows plus a `# selected_r = ...` comment.
void write_tune_csv(const std::string& path, const std::string& prologue,
                    const backtest::TuneResult& result);

struct MetricsRow {
    std::string model;
    double total_return = 0.0;
    std::optional<double> sharpe;
    double max_dd = 0.0;
    std::optional<double> calmar;
};

std::vector<MetricsRow> read_metrics_csv(const std::string& path);

/// Fixed-precision side-by-side table (returns and drawdowns as percentages,
/// Sharpe to one decimal, Calmar to three significant digits); the best
/// value per column gets a '*', ties toward the earliest row, undefined
/// values render as n/a and never win.
std::string render_comparison(const std::vector<MetricsRow>& rows);

} // namespace barow::cli
