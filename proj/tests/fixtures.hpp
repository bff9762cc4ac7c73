#pragma once

// Frozen fixtures shared by the unit tests and the acceptance runner. The
// constants below are part of the golden expectations; changing any of them
// invalidates recorded results.

#include <cstdint>
#include <vector>

#include "barow/backtest.hpp"
#include "barow/data.hpp"
#include "barow/model.hpp"

namespace fixtures {

// ---------------------------------------------------------------------
// Model-ordering panel: two regimes, ratio-like features clustered near a
// market level of 1 with ~0.4% cross-sectional spread, weight vectors with
// a dominant level component, a mild rotation at the regime break, unit
// target noise. 750 days of 100 names, seed 42.
//
// On this geometry the three frozen models separate for structural
// reasons: the unit-prior per-row learner shrinks the idiosyncratic weight
// components hard while the accumulated signal is still small and recovers
// only slowly; the windowed fit carries the estimation variance of a
// 126-day sample for the whole run; the batched learner with a diffuse
// prior integrates the full history. The resulting total-return ordering
// (batched > rolling > per-row) holds across independent generator seeds,
// not just the frozen one.

inline barow::data::RegimeSpec ordering_panel_spec() {
    barow::data::RegimeSpec spec;
    spec.segments = {
        {600, {18.0, 3.6, -3.0}},
        {150, {14.4, 6.0, -1.8}},
    };
    spec.noise_std = 1.0;
    spec.universe_size = 100;
    spec.feature_dist = barow::data::FeatureDist::Uniform;
    spec.uniform_lo = 0.9963;
    spec.uniform_hi = 1.0037;
    spec.seed = 42;
    spec.start_date = barow::Date{2015, 1, 1};
    return spec;
}

inline constexpr std::size_t kOrderingBurnIn = 126;
inline constexpr std::uint64_t kOrderingSeed = 42;

inline barow::backtest::BarowModel ordering_barow() {
    barow::Hyperparams hp;
    hp.r = 1.0;
    hp.sigma0_scale = 1e4;  // diffuse prior
    hp.r_scaling = barow::RScaling::PerBatch;
    return barow::backtest::BarowModel{hp};
}

inline barow::backtest::SequentialArowModel ordering_seq() {
    return barow::backtest::SequentialArowModel{1.0, barow::baselines::UpdateOrder::AsGiven};
}

inline barow::backtest::RollingModel ordering_rolling() {
    barow::baselines::RollingConfig rc;
    rc.window_days = 126;
    rc.refit_every = 1;
    rc.ridge_eps = 1e-8;
    return barow::backtest::RollingModel{rc};
}

inline barow::backtest::BacktestConfig ordering_config(barow::backtest::ModelSpec model) {
    barow::backtest::BacktestConfig cfg;
    cfg.burn_in_days = kOrderingBurnIn;
    cfg.model = std::move(model);
    cfg.annualization = 252.0;
    cfg.seed = kOrderingSeed;
    return cfg;
}

// ---------------------------------------------------------------------
// Heterogeneous batch for the order-sensitivity demonstration: row scales
// span four orders of magnitude, so per-row updates with a small r collapse
// the covariance along varying directions and accumulated rounding splits
// the orders apart. The batched solve sees one well-conditioned system.

inline barow::Batch heterogeneous_batch() {
    barow::Batch b;
    const std::size_t k = 12, d = 4;
    b.X = barow::Matrix(k, d);
    b.Y = barow::Vector(k);
    // Fixed entries (no RNG): alternating O(1) and O(300) rows.
    const double rows[12][5] = {
        {0.91, -0.44, 0.23, 0.67, 1.20},
        {310.0, -140.0, 95.0, -210.0, -0.80},
        {-0.35, 0.81, -0.59, 0.12, 0.45},
        {-270.0, 180.0, -120.0, 330.0, 1.70},
        {0.58, 0.29, -0.74, -0.31, -1.10},
        {190.0, 260.0, -310.0, 80.0, 0.30},
        {-0.62, -0.17, 0.41, 0.88, 0.95},
        {240.0, -90.0, 150.0, -280.0, -1.40},
        {0.13, 0.77, 0.52, -0.46, 0.60},
        {-330.0, 110.0, 230.0, 160.0, 0.25},
        {0.84, -0.66, -0.28, 0.39, -0.75},
        {140.0, 320.0, 70.0, -190.0, 1.05},
    };
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < d; ++j) b.X(i, j) = rows[i][j];
        b.Y[i] = rows[i][4];
    }
    return b;
}

inline constexpr double kSeqOrderR = 1e-8;  // per-row regularizer in the demo

// ---------------------------------------------------------------------
// Noiseless single-regime panel: with a diffuse prior the posterior mean
// pins down the generating weights after a handful of days.

inline barow::data::RegimeSpec consistency_panel_spec() {
    barow::data::RegimeSpec spec;
    spec.segments = {{40, {1.0, -2.0, 0.5}}};
    spec.noise_std = 0.0;
    spec.universe_size = 10;
    spec.feature_dist = barow::data::FeatureDist::StandardNormal;
    spec.seed = 7;
    spec.start_date = barow::Date{2018, 1, 2};
    return spec;
}

inline barow::backtest::BacktestConfig consistency_config() {
    barow::Hyperparams hp;
    hp.r = 1.0;
    hp.sigma0_scale = 1e6;
    barow::backtest::BacktestConfig cfg;
    cfg.burn_in_days = 10;
    cfg.model = barow::backtest::BarowModel{hp};
    cfg.seed = 7;
    return cfg;
}

// ---------------------------------------------------------------------
// Tuning panel: heavy target noise over weakly dispersed features, so an
// over-aggressive r underperforms the grid optimum.

inline barow::data::RegimeSpec tune_panel_spec() {
    barow::data::RegimeSpec spec;
    spec.segments = {{160, {1.4, -1.1, 0.8}}};
    spec.noise_std = 2.0;
    spec.universe_size = 50;
    spec.feature_dist = barow::data::FeatureDist::Uniform;
    spec.uniform_lo = 0.945;
    spec.uniform_hi = 1.055;
    spec.seed = 11;
    spec.start_date = barow::Date{2016, 1, 4};
    return spec;
}

inline std::vector<double> tune_grid() { return {0.1, 1.0, 10.0}; }
inline constexpr std::size_t kTuneBurnIn = 40;

} // namespace fixtures
