#include "barow/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <span>
#include <stdexcept>
#include <type_traits>

#include "barow/linalg.hpp"

namespace barow::backtest {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t day_seed(std::uint64_t seed, std::size_t day) {
    return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(day)));
}

double population_std(const Vector& v) {
    const double n = static_cast<double>(v.size());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    return std::sqrt(var / n);
}

bool degenerate(double sd, const Vector& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    return sd <= 1e-12 * (1.0 + std::fabs(mean));
}

// Average-tie ranks (1-based; the offset cancels in the correlation).
Vector ranks_of(const Vector& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    Vector r(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && v[idx[j]] == v[idx[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j - 1) + 1.0;
        for (std::size_t k = i; k < j; ++k) r[idx[k]] = avg;
        i = j;
    }
    return r;
}

double pearson(const Vector& a, const Vector& b) {
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double ca = a[i] - ma;
        const double cb = b[i] - mb;
        sab += ca * cb;
        saa += ca * ca;
        sbb += cb * cb;
    }
    return sab / std::sqrt(saa * sbb);
}

// Walk-time model state behind one interface so run_backtest stays a single
// date loop.
class ModelState {
public:
    virtual ~ModelState() = default;
    virtual Vector predict(const Matrix& X) const = 0;
    virtual void update(const Batch& batch, std::size_t day_index) = 0;
};

class BarowState final : public ModelState {
public:
    BarowState(std::size_t dim, const Hyperparams& hp)
        : hp_(hp), belief_(init_belief(dim, hp.sigma0_scale)) {}

    Vector predict(const Matrix& X) const override { return barow::predict(belief_, X); }
    void update(const Batch& batch, std::size_t) override {
        belief_ = barow_step(belief_, batch, hp_);
    }

private:
    Hyperparams hp_;
    BeliefState belief_;
};

class SequentialArowState final : public ModelState {
public:
    SequentialArowState(std::size_t dim, const SequentialArowModel& spec, std::uint64_t seed,
                        double sigma0 = 1.0)
        : spec_(spec), seed_(seed), belief_(init_belief(dim, sigma0)) {}

    Vector predict(const Matrix& X) const override { return barow::predict(belief_, X); }
    void update(const Batch& batch, std::size_t day_index) override {
        belief_ = baselines::sequential_arow_day(std::move(belief_), batch, spec_.r, spec_.order,
                                                 day_seed(seed_, day_index));
    }

private:
    SequentialArowModel spec_;
    std::uint64_t seed_;
    BeliefState belief_;
};

class RollingState final : public ModelState {
public:
    RollingState(std::size_t dim, const RollingModel& spec, std::size_t burn_in)
        : cfg_(spec.config), burn_in_(burn_in), w_(dim, 0.0) {}

    Vector predict(const Matrix& X) const override { return linalg::multiply(X, w_); }

    void update(const Batch& batch, std::size_t day_index) override {
        history_.push_back(batch);
        if (history_.size() > cfg_.window_days) history_.erase(history_.begin());
        // Refit on the configured cadence, anchored at the first scored day,
        // so the weights used at day t saw only days < t.
        const std::size_t next = day_index + 1;
        if (next >= burn_in_ && (next - burn_in_) % cfg_.refit_every == 0)
            w_ = baselines::rolling_fit(std::span<const Batch>(history_), cfg_);
    }

private:
    baselines::RollingConfig cfg_;
    std::size_t burn_in_;
    std::vector<Batch> history_;
    Vector w_;
};

std::unique_ptr<ModelState> make_state(std::size_t dim, const BacktestConfig& cfg) {
    return std::visit(
        [&](const auto& spec) -> std::unique_ptr<ModelState> {
            using T = std::decay_t<decltype(spec)>;
            if constexpr (std::is_same_v<T, BarowModel>)
                return std::make_unique<BarowState>(dim, spec.params);
            else if constexpr (std::is_same_v<T, SequentialArowModel>)
                return std::make_unique<SequentialArowState>(dim, spec, cfg.seed);
            else
                return std::make_unique<RollingState>(dim, spec, cfg.burn_in_days);
        },
        cfg.model);
}

Batch preprocess(const Batch& src, const BacktestConfig& cfg) {
    Batch b = src;
    if (cfg.standardize && b.size() >= 2) data::standardize_features(b);
    if (cfg.neutralize && b.size() >= 2) b = data::neutralize_cross_section(b);
    return b;
}

} // namespace

std::string model_label(const ModelSpec& model) {
    return std::visit(
        [](const auto& spec) -> std::string {
            using T = std::decay_t<decltype(spec)>;
            if constexpr (std::is_same_v<T, BarowModel>)
                return "barow";
            else if constexpr (std::is_same_v<T, SequentialArowModel>)
                return "arow-seq";
            else
                return "rolling";
        },
        model);
}

void BacktestConfig::validate() const {
    if (!(annualization > 0.0))
        throw std::invalid_argument("annualization must be positive");
    std::visit(
        [](const auto& spec) {
            using T = std::decay_t<decltype(spec)>;
            if constexpr (std::is_same_v<T, BarowModel>)
                spec.params.validate();
            else if constexpr (std::is_same_v<T, SequentialArowModel>) {
                if (!(spec.r > 0.0))
                    throw std::invalid_argument("sequential model r must be positive");
            } else
                spec.config.validate();
        },
        model);
}

std::pair<double, double> estimate_daily_return(const Vector& preds, const Vector& realized,
                                                IcMethod method) {
    if (preds.size() != realized.size())
        throw std::invalid_argument("preds/realized length mismatch");
    if (preds.size() < 2)
        throw std::invalid_argument("estimate_daily_return requires K >= 2");

    const double sd_p = population_std(preds);
    const double sd_r = population_std(realized);
    if (degenerate(sd_p, preds) || degenerate(sd_r, realized)) return {0.0, 0.0};

    double ic = 0.0;
    if (method == IcMethod::Pearson) {
        ic = pearson(preds, realized);
    } else {
        const Vector rp = ranks_of(preds);
        const Vector rr = ranks_of(realized);
        ic = pearson(rp, rr);
    }
    return {ic, ic * sd_r};
}

Metrics compute_metrics(const Vector& daily_return, double annualization) {
    if (daily_return.empty()) throw std::invalid_argument("compute_metrics: empty return series");
    if (!(annualization > 0.0))
        throw std::invalid_argument("annualization must be positive");

    Metrics m;
    double equity = 0.0;
    double peak = -std::numeric_limits<double>::infinity();
    double max_dd = 0.0;
    for (double r : daily_return) {
        equity += r;
        peak = std::max(peak, equity);
        max_dd = std::min(max_dd, equity - peak);
    }
    m.total_return = equity;
    m.max_dd = max_dd;

    const double sd = population_std(daily_return);
    if (sd > 0.0) {
        double mean = 0.0;
        for (double r : daily_return) mean += r;
        mean /= static_cast<double>(daily_return.size());
        m.sharpe = mean / sd * std::sqrt(annualization);
    }
    if (max_dd < 0.0) m.calmar = m.total_return / std::fabs(max_dd);
    return m;
}

BacktestReport run_backtest(const data::PanelDataset& panel, const BacktestConfig& cfg) {
    cfg.validate();
    if (panel.batches.empty()) throw std::invalid_argument("empty panel");
    if (panel.days() <= cfg.burn_in_days)
        throw std::invalid_argument("panel has " + std::to_string(panel.days()) +
                                    " day(s), burn-in needs more than " +
                                    std::to_string(cfg.burn_in_days));

    const std::size_t dim = panel.dim;
    auto state = make_state(dim, cfg);

    BacktestReport report;
    report.model_label = model_label(cfg.model);
    const std::size_t scored = panel.days() - cfg.burn_in_days;
    report.dates.reserve(scored);
    report.daily_ic.reserve(scored);
    report.daily_return.reserve(scored);
    report.equity.reserve(scored);

    double equity = 0.0;
    for (std::size_t t = 0; t < panel.days(); ++t) {
        const Batch batch = preprocess(panel.batches[t], cfg);
        validate_batch(batch, dim);
        if (t >= cfg.burn_in_days) {
            double ic = 0.0, ret = 0.0;
            if (batch.size() >= 2) {
                const Vector preds = state->predict(batch.X);
                std::tie(ic, ret) = estimate_daily_return(preds, batch.Y, cfg.ic_method);
            }
            equity += ret;
            report.dates.push_back(batch.date);
            report.daily_ic.push_back(ic);
            report.daily_return.push_back(ret);
            report.equity.push_back(equity);
        }
        state->update(batch, t);
    }

    report.metrics = compute_metrics(report.daily_return, cfg.annualization);
    return report;
}

data::PanelDataset slice_panel(const data::PanelDataset& panel, const DateRange& range) {
    data::PanelDataset out;
    out.dim = panel.dim;
    out.universe = panel.universe;
    if (panel.truth) out.truth = std::vector<Vector>();
    for (std::size_t i = 0; i < panel.batches.size(); ++i) {
        const Date d = panel.batches[i].date;
        if (range.start && d < *range.start) continue;
        if (range.end && d > *range.end) continue;
        out.batches.push_back(panel.batches[i]);
        if (panel.truth) out.truth->push_back((*panel.truth)[i]);
    }
    return out;
}

TuneResult tune_r(const data::PanelDataset& panel, std::vector<double> grid,
                  const DateRange& window, const BacktestConfig& cfg) {
    if (grid.empty()) throw std::invalid_argument("tune_r: empty grid");
    for (double r : grid)
        if (!(r > 0.0)) throw std::invalid_argument("tune_r: grid values must be positive");
    if (std::holds_alternative<RollingModel>(cfg.model))
        throw std::invalid_argument("tune_r: the rolling model has no r hyperparameter");

    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    const data::PanelDataset tune_panel = slice_panel(panel, window);
    if (tune_panel.days() <= cfg.burn_in_days)
        throw std::invalid_argument("tune_r: tune window has " +
                                    std::to_string(tune_panel.days()) +
                                    " day(s), burn-in needs more than " +
                                    std::to_string(cfg.burn_in_days));

    TuneResult result;
    result.rows.resize(grid.size());
    std::exception_ptr error;
    const std::int64_t n = static_cast<std::int64_t>(grid.size());
#pragma omp parallel for schedule(dynamic) if (n > 1)
    for (std::int64_t i = 0; i < n; ++i) {
        try {
            BacktestConfig run_cfg = cfg;
            std::visit(
                [&](auto& spec) {
                    using T = std::decay_t<decltype(spec)>;
                    if constexpr (std::is_same_v<T, BarowModel>)
                        spec.params.r = grid[i];
                    else if constexpr (std::is_same_v<T, SequentialArowModel>)
                        spec.r = grid[i];
                },
                run_cfg.model);
            const BacktestReport rep = run_backtest(tune_panel, run_cfg);
            result.rows[i] = TuneRow{grid[i], rep.metrics.total_return, rep.metrics.sharpe};
        } catch (...) {
#pragma omp critical
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);

    std::size_t best = 0;
    for (std::size_t i = 1; i < result.rows.size(); ++i)
        if (result.rows[i].total_return > result.rows[best].total_return) best = i;
    result.chosen_r = result.rows[best].r;
    return result;
}

} // namespace barow::backtest
