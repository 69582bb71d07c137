#pragma once

#include "ctrig/cause_trigger.hpp"
#include "ctrig/synth.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ctrig {

/// `key = value` lines; `#` starts a comment. Later keys override earlier ones.
using KeyValues = std::map<std::string, std::string>;

/// Throws ConfigError on malformed lines.
KeyValues parse_key_values(std::string_view text);
/// Throws IoError when the file cannot be read.
KeyValues read_key_values(const std::filesystem::path& path);

/// Settings of an `analyze` run.
struct RunConfig {
    std::optional<std::filesystem::path> input;
    std::filesystem::path output_dir = ".";
    std::string target = "ws";
    /// Empty selects every variable column (u and v are dropped once the
    /// wind variables have been derived from them).
    std::vector<std::string> variables;
    int workers = 1;
    AlgorithmConfig algorithm;
};

/// Applies the algorithm keys present in `kv` on top of `config`.
/// Keys: lag (integer or "auto"), max_lag, min_size_I2, min_size_I1,
/// threshold_y, threshold_x, alpha, aggregation, backend, trigger_alignment,
/// absolute_means, emit_all_causes, seed, ga_population, ga_generations,
/// ga_mutation_rate, ga_tournament.
void apply_algorithm_keys(const KeyValues& kv, AlgorithmConfig& config);

/// Run keys (input, output_dir, target, variables, workers) plus algorithm
/// keys. Unknown keys are rejected.
RunConfig run_config_from(const KeyValues& kv);

/// Scenario keys (length, p, d_true, cause_index, trigger_index, t1_true,
/// gamma_interaction, noise_sigma, seed, cause_coefficient, cause_mean,
/// cause_ar, cause_sd, trigger_noise, trigger_width, innovation) plus
/// algorithm keys. Unknown keys are rejected.
ScenarioSpec scenario_from(const KeyValues& kv, AlgorithmConfig* algorithm = nullptr);

// Typed value parsing shared with the CLI. All throw ConfigError naming `key`.
double parse_double(std::string_view key, std::string_view value);
long long parse_integer(std::string_view key, std::string_view value);
bool parse_bool(std::string_view key, std::string_view value);
std::optional<int> parse_lag(std::string_view value);

} // namespace ctrig
