#include "barow/cli_commands.hpp"

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <stdexcept>

#include "barow/backtest.hpp"
#include "barow/config.hpp"
#include "barow/data.hpp"
#include "barow/errors.hpp"
#include "barow/report.hpp"

namespace barow::cli {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kKnownKeys = {
    "out", "seed", "panel", "models", "burn_in", "annualization", "ic.method", "neutralize",
    "features.standardize",
    // generator
    "gen.segment", "gen.universe_size", "gen.noise_std", "gen.feature_dist", "gen.uniform_lo",
    "gen.uniform_hi", "gen.start_date", "gen.panel_file", "gen.truth_file",
    // indicator defaults (validated everywhere, consumed by the library)
    "macd.fast", "macd.slow", "macd.signal",
    // models
    "barow.r", "barow.sigma0", "barow.r_scaling", "barow.fixed_k", "arow.r", "arow.order",
    "rolling.window", "rolling.refit_every", "rolling.ridge_eps",
    // tuning
    "tune.grid", "tune.start", "tune.end", "tune.model"};

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        std::size_t b = 0, e = cell.size();
        while (b < e && std::isspace(static_cast<unsigned char>(cell[b]))) ++b;
        while (e > b && std::isspace(static_cast<unsigned char>(cell[e - 1]))) --e;
        out.push_back(cell.substr(b, e - b));
    }
    return out;
}

void validate_macd_keys(const Config& cfg) {
    const std::int64_t fast = cfg.get_int("macd.fast", 12);
    const std::int64_t slow = cfg.get_int("macd.slow", 26);
    const std::int64_t signal = cfg.get_int("macd.signal", 9);
    if (fast <= 0) throw std::invalid_argument("config key 'macd.fast': must be positive");
    if (slow <= 0) throw std::invalid_argument("config key 'macd.slow': must be positive");
    if (signal <= 0) throw std::invalid_argument("config key 'macd.signal': must be positive");
    if (fast >= slow)
        throw std::invalid_argument("config key 'macd.fast': must be < macd.slow (got " +
                                    std::to_string(fast) + " vs " + std::to_string(slow) + ")");
}

std::uint64_t read_seed(const Config& cfg) {
    return static_cast<std::uint64_t>(cfg.get_int("seed", 42));
}

backtest::ModelSpec build_model(const Config& cfg, const std::string& label) {
    if (label == "barow") {
        Hyperparams hp;
        hp.r = cfg.get_double("barow.r", 1.0);
        hp.sigma0_scale = cfg.get_double("barow.sigma0", 1.0);
        const std::string scaling = cfg.get_string("barow.r_scaling", "per-batch");
        if (scaling == "per-batch")
            hp.r_scaling = RScaling::PerBatch;
        else if (scaling == "fixed")
            hp.r_scaling = RScaling::Fixed;
        else
            throw std::invalid_argument(
                "config key 'barow.r_scaling': expected per-batch or fixed, got '" + scaling +
                "'");
        hp.fixed_k = cfg.get_size("barow.fixed_k", 1);
        hp.validate();
        return backtest::BarowModel{hp};
    }
    if (label == "arow-seq") {
        backtest::SequentialArowModel m;
        m.r = cfg.get_double("arow.r", 1.0);
        const std::string order = cfg.get_string("arow.order", "as-given");
        if (order == "as-given")
            m.order = baselines::UpdateOrder::AsGiven;
        else if (order == "shuffled")
            m.order = baselines::UpdateOrder::Shuffled;
        else
            throw std::invalid_argument(
                "config key 'arow.order': expected as-given or shuffled, got '" + order + "'");
        return m;
    }
    if (label == "rolling") {
        baselines::RollingConfig rc;
        rc.window_days = cfg.get_size("rolling.window", 252);
        rc.refit_every = cfg.get_size("rolling.refit_every", 1);
        rc.ridge_eps = cfg.get_double("rolling.ridge_eps", 1e-8);
        rc.validate();
        return backtest::RollingModel{rc};
    }
    throw std::invalid_argument("unknown model '" + label +
                                "' (expected barow, arow-seq or rolling)");
}

backtest::BacktestConfig build_backtest_config(const Config& cfg, const std::string& label) {
    backtest::BacktestConfig bt;
    bt.burn_in_days = cfg.get_size("burn_in", 252);
    bt.annualization = cfg.get_double("annualization", 252.0);
    bt.seed = read_seed(cfg);
    const std::string ic = cfg.get_string("ic.method", "pearson");
    if (ic == "pearson")
        bt.ic_method = backtest::IcMethod::Pearson;
    else if (ic == "rank")
        bt.ic_method = backtest::IcMethod::Rank;
    else
        throw std::invalid_argument("config key 'ic.method': expected pearson or rank, got '" +
                                    ic + "'");
    bt.neutralize = cfg.get_bool("neutralize", false);
    bt.standardize = cfg.get_bool("features.standardize", false);
    bt.model = build_model(cfg, label);
    bt.validate();
    return bt;
}

std::vector<std::string> resolve_models(const Config& cfg) {
    auto labels = split_list(cfg.get_string("models", "barow"));
    if (labels.empty()) throw std::invalid_argument("config key 'models': empty model list");
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != "barow" && labels[i] != "arow-seq" && labels[i] != "rolling")
            throw std::invalid_argument("unknown model '" + labels[i] +
                                        "' (expected barow, arow-seq or rolling)");
        for (std::size_t j = 0; j < i; ++j)
            if (labels[j] == labels[i])
                throw std::invalid_argument("duplicate model '" + labels[i] + "'");
    }
    return labels;
}

fs::path resolve_out_dir(const Config& cfg) {
    const fs::path out = cfg.get_string("out", "out");
    fs::create_directories(out);
    return out;
}

fs::path join_out(const fs::path& out, const std::string& name) {
    const fs::path p(name);
    return p.is_absolute() ? p : out / p;
}

data::RegimeSegment parse_segment(const std::string& text, std::size_t index) {
    const std::string key = "gen.segment." + std::to_string(index);
    const std::size_t colon = text.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("config key '" + key +
                                    "': expected 'length : w0, w1, ...', got '" + text + "'");
    const std::string len_text = text.substr(0, colon);
    std::size_t pos = 0;
    long long len = 0;
    try {
        len = std::stoll(len_text, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': bad segment length '" + len_text +
                                    "'");
    }
    while (pos < len_text.size() && std::isspace(static_cast<unsigned char>(len_text[pos]))) ++pos;
    if (pos != len_text.size() || len <= 0)
        throw std::invalid_argument("config key '" + key + "': bad segment length '" + len_text +
                                    "'");

    data::RegimeSegment seg;
    seg.length_days = static_cast<std::size_t>(len);
    for (const std::string& cell : split_list(text.substr(colon + 1))) {
        try {
            std::size_t p = 0;
            const double w = std::stod(cell, &p);
            if (p != cell.size()) throw std::invalid_argument(cell);
            seg.w.push_back(w);
        } catch (const std::exception&) {
            throw std::invalid_argument("config key '" + key + "': bad weight '" + cell + "'");
        }
    }
    if (seg.w.empty())
        throw std::invalid_argument("config key '" + key + "': at least one weight is required");
    return seg;
}

data::RegimeSpec build_regime_spec(const Config& cfg) {
    data::RegimeSpec spec;
    const auto segment_texts = cfg.get_values("gen.segment");
    if (segment_texts.empty())
        throw std::invalid_argument("config key 'gen.segment': at least one segment is required");
    for (std::size_t i = 0; i < segment_texts.size(); ++i)
        spec.segments.push_back(parse_segment(segment_texts[i], i));
    spec.universe_size = cfg.get_size("gen.universe_size", 100);
    spec.noise_std = cfg.get_double("gen.noise_std", 1.0);
    const std::string dist = cfg.get_string("gen.feature_dist", "normal");
    if (dist == "normal")
        spec.feature_dist = data::FeatureDist::StandardNormal;
    else if (dist == "uniform")
        spec.feature_dist = data::FeatureDist::Uniform;
    else
        throw std::invalid_argument(
            "config key 'gen.feature_dist': expected normal or uniform, got '" + dist + "'");
    spec.uniform_lo = cfg.get_double("gen.uniform_lo", -1.0);
    spec.uniform_hi = cfg.get_double("gen.uniform_hi", 1.0);
    spec.seed = read_seed(cfg);
    spec.start_date = cfg.get_date("gen.start_date", Date{2015, 1, 1});
    spec.validate();
    return spec;
}

void apply_overrides(Config& cfg, const CliOptions& opts) {
    if (opts.out_dir) cfg.override_value("out", *opts.out_dir);
    if (opts.seed) cfg.override_value("seed", std::to_string(*opts.seed));
    if (!opts.models.empty()) {
        std::string joined;
        for (std::size_t i = 0; i < opts.models.size(); ++i) {
            if (i) joined += ",";
            joined += opts.models[i];
        }
        cfg.override_value("models", joined);
    }
}

Config load_config(const CliOptions& opts) {
    if (opts.config_path.empty())
        throw std::invalid_argument("--config is required for " + opts.command);
    Config cfg = Config::parse_file(opts.config_path);
    cfg.ensure_known(kKnownKeys);
    apply_overrides(cfg, opts);
    validate_macd_keys(cfg);
    cfg.note("command", opts.command);
    return cfg;
}

std::string metric_summary(const backtest::Metrics& m) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "total_return=%.6g sharpe=%s max_dd=%.6g calmar=%s", m.total_return,
                  m.sharpe ? std::to_string(*m.sharpe).c_str() : "n/a", m.max_dd,
                  m.calmar ? std::to_string(*m.calmar).c_str() : "n/a");
    return buf;
}

int cmd_generate(const CliOptions& opts) {
    Config cfg = load_config(opts);
    const data::RegimeSpec spec = build_regime_spec(cfg);
    const fs::path out = resolve_out_dir(cfg);
    const fs::path panel_path = join_out(out, cfg.get_string("gen.panel_file", "panel.csv"));
    const fs::path truth_path = join_out(out, cfg.get_string("gen.truth_file", "truth.csv"));

    const data::PanelDataset panel = data::generate_synthetic_panel(spec);
    const std::string prologue = manifest_prologue(make_manifest(cfg));
    data::write_panel_csv(panel_path.string(), panel, prologue);
    data::write_truth_csv(truth_path.string(), panel, prologue);

    std::printf("wrote %s (%zu days, K=%zu, d=%zu)\n", panel_path.string().c_str(), panel.days(),
                spec.universe_size, panel.dim);
    std::printf("wrote %s\n", truth_path.string().c_str());
    return 0;
}

int cmd_backtest(const CliOptions& opts) {
    Config cfg = load_config(opts);
    const auto panel_path = cfg.get_optional_string("panel");
    if (!panel_path)
        throw std::invalid_argument("config key 'panel' is required for backtest");
    const auto labels = resolve_models(cfg);
    const fs::path out = resolve_out_dir(cfg);

    const data::PanelDataset panel = data::load_panel_csv(*panel_path);
    for (const std::string& label : labels) {
        const backtest::BacktestConfig bt = build_backtest_config(cfg, label);
        const backtest::BacktestReport report = backtest::run_backtest(panel, bt);
        const std::string prologue = manifest_prologue(make_manifest(cfg));
        const fs::path series_path = out / (label + "_series.csv");
        const fs::path metrics_path = out / (label + "_metrics.csv");
        write_series_csv(series_path.string(), prologue, report);
        write_metrics_csv(metrics_path.string(), prologue, label, report.metrics);
        std::printf("%s: %s\n", label.c_str(), metric_summary(report.metrics).c_str());
        std::printf("wrote %s\n", series_path.string().c_str());
        std::printf("wrote %s\n", metrics_path.string().c_str());
    }
    return 0;
}

int cmd_tune(const CliOptions& opts) {
    Config cfg = load_config(opts);
    const auto panel_path = cfg.get_optional_string("panel");
    if (!panel_path) throw std::invalid_argument("config key 'panel' is required for tune");
    if (!cfg.has("tune.grid"))
        throw std::invalid_argument("config key 'tune.grid' is required for tune");
    const std::vector<double> grid = cfg.get_double_list("tune.grid");

    std::string label = cfg.get_string("tune.model", "barow");
    if (!opts.models.empty()) label = opts.models.front();
    if (label == "rolling")
        throw std::invalid_argument("tune applies to barow or arow-seq, not rolling");
    cfg.note("tune.model", label);

    backtest::DateRange window;
    window.start = cfg.get_optional_date("tune.start");
    window.end = cfg.get_optional_date("tune.end");

    const backtest::BacktestConfig bt = build_backtest_config(cfg, label);
    const data::PanelDataset panel = data::load_panel_csv(*panel_path);
    const backtest::TuneResult result = backtest::tune_r(panel, grid, window, bt);

    const fs::path out = resolve_out_dir(cfg);
    const fs::path tune_path = out / "tune.csv";
    write_tune_csv(tune_path.string(), manifest_prologue(make_manifest(cfg)), result);
    std::printf("selected_r = %s\n", format_double_full(result.chosen_r).c_str());
    std::printf("wrote %s\n", tune_path.string().c_str());
    return 0;
}

int cmd_compare(const CliOptions& opts) {
    if (opts.inputs.empty())
        throw std::invalid_argument("compare needs at least one metrics CSV path");
    std::vector<MetricsRow> rows;
    for (const std::string& path : opts.inputs) {
        auto file_rows = read_metrics_csv(path);
        rows.insert(rows.end(), file_rows.begin(), file_rows.end());
    }
    if (rows.empty()) throw std::invalid_argument("no metrics rows found in the given files");
    std::fputs(render_comparison(rows).c_str(), stdout);
    return 0;
}

} // namespace

int run_command(const CliOptions& opts) {
    try {
        if (opts.command == "generate") return cmd_generate(opts);
        if (opts.command == "backtest") return cmd_backtest(opts);
        if (opts.command == "tune") return cmd_tune(opts);
        if (opts.command == "compare") return cmd_compare(opts);
        throw std::invalid_argument("unknown command '" + opts.command + "'");
    } catch (const InvalidData& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

} // namespace barow::cli
