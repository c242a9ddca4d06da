#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "liouville/io.hpp"

namespace liouville {

enum class ParamKind { Int, Real, Complex, String, Bool, RealList };

struct ParamSpec {
  std::string key;
  ParamKind kind;
  std::string default_value;  // textual, converted like a command-line value
  std::string help;
};

// The experiment commands, in CLI order.
const std::vector<std::string>& command_names();
// One-line description shown in the CLI help.
std::string command_summary(const std::string& command);
// Allowed parameters of a command; ConfigError for an unknown command.
const std::vector<ParamSpec>& command_params(const std::string& command);

struct ExperimentConfig {
  std::string command;
  Json params = Json::object();  // every allowed key, typed, defaults filled in
  std::string output_dir = "out";
  std::uint64_t seed = 0;
  int threads = 0;  // worker threads for independent sub-experiments; 0: hardware concurrency
};

// Flat key/value text: "key = value" lines (numbers, "strings", true/false,
// one-line [arrays], # comments) or a flat JSON object. ConfigError on
// anything else, including duplicate keys and [sections].
Json parse_config_text(const std::string& text);
Json load_config_file(const std::filesystem::path& path);

// "0.2+0.1i", "-3", "2i", "1e-3-4.5e-2i".
cplx parse_complex(const std::string& text);

Json convert_param(const ParamSpec& spec, const Json& raw);

// Merges file values (which may also carry command, output_dir, seed and threads) with
// command-line overrides given as text. Unknown keys raise ConfigError.
ExperimentConfig make_config(const std::string& command, const Json& file_values,
                             const std::map<std::string, std::string>& overrides);

// Typed accessors for filled-in params.
int param_int(const ExperimentConfig& c, const std::string& key);
double param_real(const ExperimentConfig& c, const std::string& key);
cplx param_complex(const ExperimentConfig& c, const std::string& key);
std::string param_string(const ExperimentConfig& c, const std::string& key);
bool param_bool(const ExperimentConfig& c, const std::string& key);
std::vector<double> param_list(const ExperimentConfig& c, const std::string& key);

// Canonical JSON for complex values: [re, im].
Json complex_json(cplx z);

}  // namespace liouville
