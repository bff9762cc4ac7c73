#include <CLI11.hpp>

#include "barow/cli_commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Batched confidence-weighted online regression: synthetic panels, backtests, "
                 "hyperparameter tuning and report comparison"};
    app.require_subcommand(1);

    barow::cli::CliOptions opts;
    std::string out_dir;
    std::int64_t seed = 0;

    auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* c = sub->add_option("--config", opts.config_path, "configuration file (key = value)");
        if (config_required) c->required();
        sub->add_option("--out", out_dir, "output directory (overrides config `out`)");
        sub->add_option("--seed", seed, "random seed (overrides config `seed`)");
        sub->add_option("--model", opts.models,
                        "model to run: barow, arow-seq or rolling (repeatable)");
    };

    add_common(app.add_subcommand("generate", "write a synthetic panel and its truth sidecar"),
               true);
    add_common(app.add_subcommand("backtest", "walk a panel and write per-model reports"), true);
    add_common(app.add_subcommand("tune", "grid-search r on a date window"), true);

    auto* compare = app.add_subcommand("compare", "render metrics CSVs side by side");
    compare->add_option("files", opts.inputs, "metrics CSV paths")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    opts.command = sub->get_name();
    auto given = [&](const std::string& name) {
        const CLI::Option* o = sub->get_option_no_throw(name);
        return o != nullptr && o->count() > 0;
    };
    if (given("--out")) opts.out_dir = out_dir;
    if (given("--seed")) opts.seed = seed;
    return barow::cli::run_command(opts);
}
