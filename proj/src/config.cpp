#include "conemeander/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "json.hpp"

#include "conemeander/cones.hpp"
#include "conemeander/errors.hpp"

namespace cmeander {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string fmt(const std::vector<double>& v) {
  std::string out;
  for (double x : v) out += (out.empty() ? "" : ",") + fmt(x);
  return out;
}

double to_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    throw ConfigError(key + ": '" + value + "' is not a number");
  }
  if (used != value.size() || !std::isfinite(v)) throw ConfigError(key + ": '" + value + "' is not a number");
  return v;
}

std::int64_t to_int(const std::string& key, const std::string& value) {
  const double v = to_double(key, value);
  if (v != std::floor(v) || std::abs(v) > 9e18) throw ConfigError(key + ": '" + value + "' is not an integer");
  return static_cast<std::int64_t>(v);
}

double positive(const std::string& key, const std::string& value) {
  const double v = to_double(key, value);
  if (!(v > 0.0)) throw ConfigError(key + " must be positive");
  return v;
}

std::int64_t positive_int(const std::string& key, const std::string& value) {
  const std::int64_t v = to_int(key, value);
  if (v < 1) throw ConfigError(key + " must be positive");
  return v;
}

std::uint64_t to_seed(const std::string& value) {
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    if (!value.empty() && value[0] == '-') throw std::invalid_argument("negative");
    v = std::stoull(value, &used);
  } catch (const std::exception&) {
    throw ConfigError("seed: '" + value + "' is not a non-negative integer");
  }
  if (used != value.size()) throw ConfigError("seed: '" + value + "' is not a non-negative integer");
  return v;
}

std::vector<double> to_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_double(key, item));
  }
  return out;
}

std::vector<double> positive_list(const std::string& key, const std::string& value) {
  std::vector<double> v = to_list(key, value);
  if (v.empty()) throw ConfigError(key + " must not be empty");
  for (double x : v) {
    if (!(x > 0.0)) throw ConfigError(key + " entries must be positive");
  }
  return v;
}

std::string one_of(const std::string& key, const std::string& value, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed) {
    if (value == a) return value;
  }
  std::string names;
  for (const char* a : allowed) names += (names.empty() ? "" : ", ") + std::string(a);
  throw ConfigError(key + ": '" + value + "' is not one of " + names);
}

struct Field {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define CM_FIELD(name, setter, getter)                                                        \
  {                                                                                           \
    #name, Field {                                                                            \
      [](RunConfig& c, const std::string& v) { c.name = setter; },                            \
          [](const RunConfig& c) { return getter; }                                           \
    }                                                                                         \
  }

const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = {
      CM_FIELD(cone, (ConeSpec::parse(v), v), c.cone),
      CM_FIELD(sampler,
               one_of("sampler", v, {"bm", "transform", "section", "conditioned", "d-meander", "meander-approx"}),
               c.sampler),
      CM_FIELD(check,
               one_of("check", v, {"density", "exit-law", "scaling", "ball", "fdd", "meander", "heat-kernel"}),
               c.check),
      CM_FIELD(dt, positive("dt", v), fmt(c.dt)),
      CM_FIELD(n, positive_int("n", v), std::to_string(c.n)),
      CM_FIELD(epsilon, positive("epsilon", v), fmt(c.epsilon)),
      CM_FIELD(max_attempts, positive_int("max_attempts", v), std::to_string(c.max_attempts)),
      CM_FIELD(horizon, positive("horizon", v), fmt(c.horizon)),
      CM_FIELD(x, to_list("x", v), fmt(c.x)),
      CM_FIELD(t, positive("t", v), fmt(c.t)),
      CM_FIELD(scale_t, positive("scale_t", v), fmt(c.scale_t)),
      CM_FIELD(grid, v, c.grid),
      CM_FIELD(r_max, positive("r_max", v), fmt(c.r_max)),
      CM_FIELD(survival, one_of("survival", v, {"auto", "series", "closed-form", "monte-carlo"}), c.survival),
      CM_FIELD(survival_n, positive_int("survival_n", v), std::to_string(c.survival_n)),
      CM_FIELD(t_list, positive_list("t_list", v), fmt(c.t_list)),
      CM_FIELD(epsilon_list, positive_list("epsilon_list", v), fmt(c.epsilon_list)),
      CM_FIELD(lambda_list, positive_list("lambda_list", v), fmt(c.lambda_list)),
      CM_FIELD(s_list, positive_list("s_list", v), fmt(c.s_list)),
      CM_FIELD(times, positive_list("times", v), fmt(c.times)),
      CM_FIELD(d, static_cast<int>(positive_int("d", v)), std::to_string(c.d)),
      CM_FIELD(probes, v, c.probes),
      CM_FIELD(bandwidth, positive("bandwidth", v), fmt(c.bandwidth)),
      CM_FIELD(seed, to_seed(v), c.seed ? std::to_string(*c.seed) : std::string()),
      CM_FIELD(workers, static_cast<int>(positive_int("workers", v)), std::to_string(c.workers)),
      CM_FIELD(out, v.empty() ? throw ConfigError("out must not be empty") : v, c.out),
      CM_FIELD(thresholds.ks_p, positive("ks_p", v), fmt(c.thresholds.ks_p)),
      CM_FIELD(thresholds.z_max, positive("z_max", v), fmt(c.thresholds.z_max)),
      CM_FIELD(thresholds.slope_sigmas, positive("slope_sigmas", v), fmt(c.thresholds.slope_sigmas)),
      CM_FIELD(thresholds.trend_p, positive("trend_p", v), fmt(c.thresholds.trend_p)),
      CM_FIELD(thresholds.noise_floor, positive("noise_floor", v), fmt(c.thresholds.noise_floor)),
      CM_FIELD(thresholds.ball_sigmas, positive("ball_sigmas", v), fmt(c.thresholds.ball_sigmas)),
      CM_FIELD(thresholds.ball_small, positive("ball_small", v), fmt(c.thresholds.ball_small)),
  };
  return table;
}

#undef CM_FIELD

// Threshold keys are written without the "thresholds." prefix.
std::string public_name(const std::string& field) {
  const std::string prefix = "thresholds.";
  return field.rfind(prefix, 0) == 0 ? field.substr(prefix.size()) : field;
}

const Field* find_field(const std::string& key) {
  for (const auto& [name, field] : fields()) {
    if (public_name(name) == key) return &field;
  }
  return nullptr;
}

std::string json_value_text(const std::string& key, const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return v.dump();
  if (v.is_array()) {
    std::string out;
    for (const auto& item : v) out += (out.empty() ? "" : ",") + json_value_text(key, item);
    return out;
  }
  if (v.is_null()) return "";
  throw ConfigError(key + ": unsupported JSON value");
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, field] : fields()) k.push_back(public_name(name));
    return k;
  }();
  return keys;
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  const Field* field = find_field(key);
  if (field == nullptr) throw ConfigError("unknown key '" + key + "'");
  // An empty seed in a manifest means "not set".
  if (key == "seed" && value.empty()) {
    cfg.seed.reset();
    return;
  }
  try {
    field->set(cfg, value);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

RunConfig parse_config(const std::string& text, RunConfig base) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(std::string("manifest is not valid JSON: ") + e.what());
    }
    const nlohmann::json& params = doc.contains("params") ? doc["params"] : doc;
    if (!params.is_object()) throw ConfigError("manifest 'params' must be an object");
    for (const auto& [key, value] : params.items()) apply_setting(base, key, json_value_text(key, value));
    return base;
  }
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      apply_setting(base, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return base;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), std::move(base));
}

std::vector<std::pair<std::string, std::string>> config_params(const RunConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [name, field] : fields()) out.emplace_back(public_name(name), field.get(cfg));
  return out;
}

std::uint64_t resolve_seed(const RunConfig& cfg) {
  if (cfg.seed) return *cfg.seed;
  if (const char* env = std::getenv("CONE_MEANDER_SEED"); env != nullptr && *env != '\0') {
    RunConfig tmp;
    apply_setting(tmp, "seed", env);
    return *tmp.seed;
  }
  return 0;
}

void validate(const RunConfig& cfg) {
  ConeSpec::parse(cfg.cone);
  if (!(cfg.dt > 0.0 && cfg.dt < 1.0)) throw ConfigError("dt must lie in (0, 1)");
  if (cfg.n < 1) throw ConfigError("n must be positive");
  if (cfg.workers < 1) throw ConfigError("workers must be positive");
  if (cfg.thresholds.ks_p >= 1.0) throw ConfigError("ks_p must be below 1");
}

}  // namespace cmeander
