#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "barow/baselines.hpp"
#include "barow/data.hpp"
#include "barow/model.hpp"

namespace barow::backtest {

struct BarowModel {
    Hyperparams params;
};

struct SequentialArowModel {
    double r = 1.0;
    baselines::UpdateOrder order = baselines::UpdateOrder::AsGiven;
};

struct RollingModel {
    baselines::RollingConfig config;
};

using ModelSpec = std::variant<BarowModel, SequentialArowModel, RollingModel>;

/// "barow", "arow-seq" or "rolling" — also the CLI spelling.
std::string model_label(const ModelSpec& model);

enum class IcMethod { Pearson, Rank };

struct BacktestConfig {
    std::size_t burn_in_days = 252;
    ModelSpec model = BarowModel{};
    double annualization = 252.0;
    std::uint64_t seed = 0;
    IcMethod ic_method = IcMethod::Pearson;
    bool neutralize = false;          // z-score Y per date before the walk
    bool standardize = false;         // z-score each feature column per date
    void validate() const;
};

struct Metrics {
    double total_return = 0.0;
    std::optional<double> sharpe;  // empty when the return series has zero dispersion
    double max_dd = 0.0;           // <= 0
    std::optional<double> calmar;  // empty when max_dd == 0
};

struct BacktestReport {
    std::vector<Date> dates;  // post-burn-in dates only
    Vector daily_ic;
    Vector daily_return;
    Vector equity;  // running sum of daily_return
    Metrics metrics;
    std::string model_label;
};

/// ic = cross-sectional correlation(preds, realized); ret = ic * population
/// std of realized. Zero dispersion on either side gives (0, 0). Rank method
/// correlates average-tie ranks instead of levels; the std factor stays on
/// the raw values. Requires K >= 2.
std::pair<double, double> estimate_daily_return(const Vector& preds, const Vector& realized,
                                                IcMethod method = IcMethod::Pearson);

/// total_return = sum; equity = running sums from 0; max_dd = min over t of
/// equity[t] - max_{s<=t} equity[s]; sharpe = mean/std * sqrt(annualization).
Metrics compute_metrics(const Vector& daily_return, double annualization);

/// Chronological walk: for each date past burn-in, predict on X with the
/// state fitted strictly on prior dates, score against the revealed Y, then
/// update. Burn-in dates update only. Days with K < 2 score (0, 0).
BacktestReport run_backtest(const data::PanelDataset& panel, const BacktestConfig& cfg);

/// Inclusive date window; an unset bound is open.
struct DateRange {
    std::optional<Date> start;
    std::optional<Date> end;
};

data::PanelDataset slice_panel(const data::PanelDataset& panel, const DateRange& range);

struct TuneRow {
    double r = 0.0;
    double total_return = 0.0;
    std::optional<double> sharpe;
};

struct TuneResult {
    double chosen_r = 0.0;
    std::vector<TuneRow> rows;  // ascending in r
};

/// Backtests cfg.model on the window once per grid value of r and picks the
/// highest total return, ties toward the smaller r. The rolling baseline has
/// no r and is rejected.
TuneResult tune_r(const data::PanelDataset& panel, std::vector<double> grid,
                  const DateRange& window, const BacktestConfig& cfg);

} // namespace barow::backtest
