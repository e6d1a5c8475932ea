#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "daqc/noise.hpp"

namespace daqc {

enum class KeyType { Int, Double, String, IntList, DoubleList, Json };

struct KeySpec {
    std::string name;
    KeyType type = KeyType::String;
    nlohmann::json fallback;  // null when the key is optional without a default
    std::string help;
};

const std::vector<std::string>& cli_commands();
// Common keys followed by the command's own keys. Throws ConfigError for an
// unknown command.
std::vector<KeySpec> command_keys(const std::string& command);
// Converts flag text to the key's JSON type. Lists are comma separated; Json
// keys take JSON text (or a bare preset name for `noise`).
nlohmann::json flag_value(const KeySpec& key, const std::string& text);

struct ExperimentConfig {
    std::string command;
    nlohmann::json params;  // every key of the command, defaults filled in
    NoiseModel noise;
    int shots = 1;
    std::uint64_t seed = 1;
    std::string out;
};

// Rejects unknown keys and wrong types; applies DAQC_SEED.
ExperimentConfig resolve_config(const nlohmann::json& raw);

struct ExperimentOutput {
    nlohmann::json record;                      // without the timestamp
    std::map<std::string, std::string> files;   // file name -> contents (CSV, text)
};

ExperimentOutput run_experiment(const ExperimentConfig& cfg);

// Resolves, runs and writes <out>/<command>.json plus the extra files.
// Returns 0 on success, 2 on validation errors, 3 on numeric failures.
// Nothing is written when the run fails.
int run(const nlohmann::json& raw, std::ostream& log);

std::string version_string();

}  // namespace daqc
