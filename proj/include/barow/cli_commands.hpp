#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace barow::cli {

struct CliOptions {
    std::string command;  // generate | backtest | tune | compare
    std::string config_path;
    std::optional<std::string> out_dir;   // --out, overrides config `out`
    std::optional<std::int64_t> seed;     // --seed, overrides config `seed`
    std::vector<std::string> models;      // --model, overrides config `models`
    std::vector<std::string> inputs;      // compare: metrics CSV paths
};

/// Dispatches one command and maps failures to exit codes: 2 for config,
/// usage and data validation errors, 1 for numerical or internal failures,
/// 0 on success.
int run_command(const CliOptions& opts);

} // namespace barow::cli
