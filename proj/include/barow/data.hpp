#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "barow/model.hpp"

namespace barow::data {

/// Date-ordered sequence of daily cross-sections. `truth` carries the
/// generating weight vector per date when the panel is synthetic.
struct PanelDataset {
    std::vector<Batch> batches;  // strictly increasing dates
    std::size_t dim = 0;
    std::vector<std::string> universe;  // sorted unique symbols
    std::optional<std::vector<Vector>> truth;

    std::size_t days() const { return batches.size(); }
};

enum class FeatureDist { StandardNormal, Uniform };

struct RegimeSegment {
    std::size_t length_days = 0;
    Vector w;
};

/// Piecewise-constant ground truth for the synthetic generator: the weight
/// vector holds within a segment and jumps between segments.
struct RegimeSpec {
    std::vector<RegimeSegment> segments;
    double noise_std = 0.0;
    std::size_t universe_size = 0;  // K
    FeatureDist feature_dist = FeatureDist::StandardNormal;
    double uniform_lo = -1.0;
    double uniform_hi = 1.0;
    std::uint64_t seed = 0;
    Date start_date{2015, 1, 1};

    std::size_t dim() const { return segments.empty() ? 0 : segments.front().w.size(); }
    std::size_t total_days() const;
    void validate() const;
};

/// Reads the panel schema `date,symbol,y,x0,...,x{d-1}` (ISO dates, decimal
/// numbers, LF endings; lines starting with '#' are skipped). Batches come
/// back date-sorted with rows symbol-sorted. Throws InvalidData naming the
/// offending line. Rows holding non-finite numbers are dropped with a
/// count reported on stderr.
PanelDataset load_panel_csv(const std::string& path);

/// Inverse of load_panel_csv; numbers carry 17 significant digits so a
/// round trip is bit-exact. `prologue`, when given, is written verbatim
/// ahead of the header and must consist of '#' comment lines.
void write_panel_csv(const std::string& path, const PanelDataset& panel,
                     const std::string& prologue = {});

/// Sidecar schema `date,w0,...,w{d-1}`, one row per batch.
void write_truth_csv(const std::string& path, const PanelDataset& panel,
                     const std::string& prologue = {});
std::vector<Vector> load_truth_csv(const std::string& path);

PanelDataset generate_synthetic_panel(const RegimeSpec& spec);

/// Replaces Y by its cross-sectional z-score (population std). A
/// dispersion below 1e-12 maps Y to zeros. Requires K >= 2.
Batch neutralize_cross_section(const Batch& batch);

/// In-place per-feature cross-sectional z-score of X, same conventions.
void standardize_features(Batch& batch);

// ---------------------------------------------------------------------
// MACD feature construction

struct PriceSeries {
    std::string symbol;
    std::vector<Date> dates;  // ascending
    Vector close;
};

/// Reads `date,symbol,close`, one series per symbol, dates ascending.
std::vector<PriceSeries> load_price_csv(const std::string& path);

struct MacdRow {
    Date date;
    double macd = 0.0;
    double signal = 0.0;
    double histogram = 0.0;  // macd - signal
};

/// EMA(fast) - EMA(slow) plus its EMA(signal) line. EMAs use smoothing
/// 2/(n+1) seeded with the simple mean of the first n observations; the
/// first row is emitted once slow+signal closes are available, shorter
/// series yield no rows.
std::vector<MacdRow> macd_features(const PriceSeries& series, int fast, int slow, int signal);

/// Runs macd_features across symbols (parallel; order preserved).
std::vector<std::pair<std::string, std::vector<MacdRow>>> macd_features_all(
    const std::vector<PriceSeries>& series, int fast, int slow, int signal);

} // namespace barow::data
