#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "conemeander/verify.hpp"

namespace cmeander {

/// Every tunable of a CLI run. Keys in config files and flag names match the
/// field names (flags use dashes: `t_list` is `--t-list`).
struct RunConfig {
  std::string cone = "wedge:1.5707963267948966";
  std::string sampler = "meander-approx";  // bm, transform, section, conditioned, d-meander, meander-approx
  std::string check = "density";           // verify subcommand
  double dt = 1e-4;
  std::int64_t n = 100'000;
  double epsilon = 0.05;
  std::int64_t max_attempts = 10'000'000;
  double horizon = 1.0;
  std::vector<double> x;  // start point; empty means the sampler's default
  double t = 1.0;         // density time and fdd time
  double scale_t = 4.0;   // horizon of the scaling check
  std::string grid = "50x50";
  double r_max = 6.0;
  std::string survival = "auto";  // auto, series, closed-form, monte-carlo
  std::int64_t survival_n = 100'000;
  std::vector<double> t_list{2.0, 4.0};
  std::vector<double> epsilon_list{0.4, 0.2, 0.1, 0.05};
  std::vector<double> lambda_list{0.1, 0.05, 0.02};
  std::vector<double> s_list{0.1, 0.05, 0.01};
  std::vector<double> times{0.25, 1.0};
  int d = 2;
  std::string probes = "1,0.5;0.5,1;0.8,0.8;1,1;1.2,1.2";
  double bandwidth = 0.05;
  std::optional<std::uint64_t> seed;
  int workers = 1;
  std::string out = ".";
  Thresholds thresholds;
};

/// Names of all recognised keys, in a stable order.
const std::vector<std::string>& config_keys();

/// Sets one key from its text value. Throws ConfigError naming the key on an
/// unknown key, a malformed value, or a value violating its invariant.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Parses `key = value` lines with `#` comments, or a JSON run manifest
/// (text starting with '{'), whose "params" object is applied key by key.
/// Errors name the line number.
RunConfig parse_config(const std::string& text, RunConfig base = {});

/// Reads and parses a file.
RunConfig load_config(const std::string& path, RunConfig base = {});

/// Current value of every key as text that apply_setting reads back exactly.
std::vector<std::pair<std::string, std::string>> config_params(const RunConfig& cfg);

/// Seed from the config, else CONE_MEANDER_SEED, else 0.
std::uint64_t resolve_seed(const RunConfig& cfg);

/// Cross-field checks (cone syntax, positive numbers).
void validate(const RunConfig& cfg);

}  // namespace cmeander
