// Command-line front end: configuration parsing, presets, and deterministic
// CSV/JSON emission for the run/coeffs/sweep/compare subcommands.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "twinbeam/dynamics.hpp"

namespace twinbeam::cli {

using ordered_json = nlohmann::ordered_json;

// Configuration document errors; mapped to exit code 2.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct SweepAxis {
    std::string param;  // one of r, omega0, alpha, lambda, beta
    std::vector<double> values;
};

struct CliConfig {
    dynamics::RunConfig run;
    int coeff_samples = 64;  // sampling count for the coeffs subcommand
    std::optional<SweepAxis> sweep;
};

struct FigurePreset {
    const char* name;
    CliConfig config;
};

const std::vector<FigurePreset>& presets();
const FigurePreset* find_preset(const std::string& name);

// Strict parse: unknown keys anywhere in the document are rejected; physical
// parameters are validated before any computation.
CliConfig parse_config(const ordered_json& doc);
ordered_json dump_config(const CliConfig& cfg);

std::string format_number(double x);  // %.12g, used for all CSV fields

// Process entry point shared by the binary and the tests.
// Exit codes: 0 success, 2 configuration, 3 numerical convergence.
int cli_main(const std::vector<std::string>& args);

}  // namespace twinbeam::cli
