#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dblevy/mc.hpp"
#include "dblevy/pricer.hpp"
#include "dblevy/regime.hpp"

namespace dntcli {

/// Fully resolved invocation: one command, model, market and numerics.
struct RunConfig {
    std::string command;
    std::optional<dblevy::KoBoLParams> model;
    std::string preset_key;
    double lo = 0.95;
    double hi = 1.05;
    std::vector<double> spots{1.0};
    double maturity = 0.25;
    double rate = 0.004;
    dblevy::Numerics numerics;
    dblevy::McConfig mc;
    std::optional<dblevy::RegimeModel> regime;
    dblevy::RegimeNumerics regime_numerics;
    int initial_state = 0;
    std::string output_format = "csv";  // csv | json
    std::string output_path;            // empty = stdout
    int verbosity = 0;
};

/// Parses CLI arguments plus an optional JSON config file; flag values
/// override file values. Throws std::invalid_argument on malformed input
/// (unknown keys, bad numbers, unknown presets, barriers out of order).
RunConfig parse(const std::vector<std::string>& args);

/// Applies a flat JSON config (blocks model/market/option/numerics/regime)
/// onto cfg. Numbers may be given as decimal strings.
void apply_json(RunConfig& cfg, const nlohmann::json& j);

/// Emits the resolved configuration; apply_json(parse-equivalent) of the
/// result reproduces the same request.
nlohmann::json resolved_config(const RunConfig& cfg);

/// Dispatches to the selected command. Returns the process exit code:
/// 0 success, 1 pricing error, 2 configuration error.
int run(const RunConfig& cfg);

int main_entry(int argc, char** argv);

}  // namespace dntcli
