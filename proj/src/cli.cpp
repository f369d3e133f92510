#include "conemeander/cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "conemeander/config.hpp"
#include "conemeander/errors.hpp"
#include "conemeander/kernel.hpp"
#include "conemeander/parallel.hpp"
#include "conemeander/sampler.hpp"
#include "conemeander/spectrum.hpp"
#include "conemeander/verify.hpp"

namespace cmeander {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string dashed(std::string key) {
  for (auto& ch : key) {
    if (ch == '_') ch = '-';
  }
  return key;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json params_json(const RunConfig& cfg) {
  json p = json::object();
  for (const auto& [k, v] : config_params(cfg)) p[k] = v;
  return p;
}

std::string csv_field(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string num(double v) {
  if (!std::isfinite(v)) return "";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

fs::path output_dir(const RunConfig& cfg) {
  fs::path dir(cfg.out);
  fs::create_directories(dir);
  return dir;
}

std::vector<double> point_from_polar(const ConeSpec& cone, double r, double angular) {
  const int d = cone.dimension();
  std::vector<double> y(d, 0.0);
  if (d == 1) {
    y[0] = r;
    return y;
  }
  y[0] = r * std::cos(angular);
  y[1] = r * std::sin(angular);
  return y;
}

SurvivalMode survival_mode(const std::string& name) {
  if (name == "series") return SurvivalMode::Series;
  if (name == "closed-form") return SurvivalMode::ClosedForm;
  if (name == "monte-carlo") return SurvivalMode::MonteCarlo;
  return SurvivalMode::Automatic;
}

std::pair<int, int> parse_grid(const std::string& grid) {
  const auto x = grid.find('x');
  try {
    if (x == std::string::npos) throw ConfigError("");
    std::size_t u1 = 0, u2 = 0;
    const int a = std::stoi(grid.substr(0, x), &u1);
    const int b = std::stoi(grid.substr(x + 1), &u2);
    if (u1 != x || u2 != grid.size() - x - 1 || a < 1 || b < 1) throw ConfigError("");
    return {a, b};
  } catch (const std::exception&) {
    throw ConfigError("grid: expected <radial>x<angular> with positive counts, got '" + grid + "'");
  }
}

std::vector<std::vector<double>> parse_probes(const std::string& text) {
  std::vector<std::vector<double>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    RunConfig tmp;
    apply_setting(tmp, "x", item);
    if (!tmp.x.empty()) out.push_back(tmp.x);
  }
  if (out.empty()) throw ConfigError("probes: no probe points");
  return out;
}

int cmd_spectrum(const RunConfig& cfg, std::ostream& out) {
  const ConeSpec cone = ConeSpec::parse(cfg.cone);
  const EntranceLaw law = make_entrance_law(spectral_basis(cone));
  json j;
  j["cone"] = cone.to_string();
  j["lambda1"] = law.basis.lambda1();
  j["alpha1"] = law.alpha1;
  j["exit_exponent"] = exit_exponent(law.basis);
  j["m1_integral"] = law.basis.m1_integral();
  j["normalization_c"] = law.c;
  out << j.dump(2) << '\n';
  return 0;
}

int cmd_density(const RunConfig& cfg, std::ostream& out) {
  const ConeSpec cone = ConeSpec::parse(cfg.cone);
  const EntranceLaw law = make_entrance_law(spectral_basis(cone));
  auto [nr, na] = parse_grid(cfg.grid);
  if (cone.dimension() == 1) na = 1;
  if (!(cfg.t > 0.0 && cfg.t <= 1.0)) throw ConfigError("t must lie in (0, 1]");
  const double dr = cfg.r_max / nr;
  const double extent = cone.dimension() == 1 ? 0.0 : cone.cap_extent();
  const double da = extent / na;

  SurvivalOptions so;
  so.mode = survival_mode(cfg.survival);
  so.n = cfg.survival_n;
  so.dt = cfg.dt;
  so.seed = resolve_seed(cfg);
  so.workers = cfg.workers;

  std::vector<double> values(static_cast<std::size_t>(nr) * na);
  double mass = 0.0;
  for (int i = 0; i < nr; ++i) {
    const double r = (i + 0.5) * dr;
    for (int j = 0; j < na; ++j) {
      const double a = (j + 0.5) * da;
      const std::vector<double> y = point_from_polar(cone, r, a);
      const double e = entrance_density(law, cfg.t, y, so).value;
      values[static_cast<std::size_t>(i) * na + j] = e;
      const double cap = cone.dimension() == 1 ? 1.0 : cap_measure_density(cone, a) * da;
      mass += e * std::pow(r, cone.dimension() - 1) * dr * cap;
    }
  }
  json header;
  header["cone"] = cone.to_string();
  header["c"] = law.c;
  header["alpha1"] = law.alpha1;
  header["t"] = cfg.t;
  header["d"] = cone.dimension();
  header["dr"] = dr;
  header["dangular"] = da;
  header["grid_mass"] = mass;
  std::ostringstream csv;
  csv << "# " << header.dump() << '\n' << "r,angular,e\n";
  csv.precision(17);
  for (int i = 0; i < nr; ++i) {
    for (int j = 0; j < na; ++j) {
      csv << (i + 0.5) * dr << ',' << (j + 0.5) * da << ',' << values[static_cast<std::size_t>(i) * na + j] << '\n';
    }
  }
  const fs::path file = output_dir(cfg) / "density.csv";
  write_atomic(file.string(), csv.str());
  out << "wrote " << file.string() << " (grid mass " << mass << ")\n";
  return 0;
}

int cmd_sample(const RunConfig& cfg, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const ConeSpec cone = ConeSpec::parse(cfg.cone);
  const std::uint64_t seed = resolve_seed(cfg);
  const fs::path dir = output_dir(cfg);
  ConditionedOptions co;
  co.dt = cfg.dt;
  co.horizon = cfg.horizon;
  co.max_attempts = cfg.max_attempts;
  if (cfg.sampler == "conditioned" && cfg.x.empty()) throw ConfigError("sampler conditioned needs x");

  const std::size_t n = static_cast<std::size_t>(cfg.n);
  std::vector<RejectionReport> reports(n);
  std::vector<std::int64_t> redraws(n, 0);
  parallel_for(n, cfg.workers, [&](std::size_t i) {
    const RngStreamSpec spec{seed, i};
    PathSample path;
    if (cfg.sampler == "bm") {
      path = sample_bm(cone.dimension(), cfg.dt, cfg.horizon, spec, cfg.x);
    } else if (cfg.sampler == "transform") {
      path = sample_meander_transform(cfg.dt, spec);
    } else if (cfg.sampler == "section") {
      path = sample_meander_section(cfg.x.empty() ? 0.0 : cfg.x[0], cfg.dt, spec);
    } else if (cfg.sampler == "d-meander") {
      path = sample_d_meander(cone.dimension(), cfg.dt, spec);
    } else {
      ConditionedSample s = cfg.sampler == "conditioned"
                                ? sample_conditioned(cone, cfg.x, co, spec)
                                : sample_cone_meander_approx(cone, cfg.epsilon, cfg.x, co, spec);
      reports[i] = s.report;
      path = std::move(s.path);
    }
    redraws[i] = path.redraws;
    std::ostringstream csv;
    write_path_csv(csv, path);
    write_atomic((dir / ("path_" + std::to_string(i) + ".csv")).string(), csv.str());
  });

  RejectionReport total;
  std::int64_t total_redraws = 0;
  for (std::size_t i = 0; i < n; ++i) {
    total += reports[i];
    total_redraws += redraws[i];
  }
  RunConfig echo = cfg;
  echo.seed = seed;
  json manifest;
  manifest["params"] = params_json(echo);
  manifest["acceptance"] = {{"attempts", total.attempts},
                            {"accepted", total.accepted},
                            {"rate", number_or_null(total.attempts > 0 ? total.acceptance_rate() : NAN)},
                            {"redraws", total_redraws}};
  manifest["wall_time"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_atomic((dir / "manifest.json").string(), manifest.dump(2) + "\n");
  out << "wrote " << n << " paths to " << dir.string() << '\n';
  return 0;
}

McReport dispatch_check(const RunConfig& cfg, const VerifyOptions& vo) {
  const ConeSpec cone = ConeSpec::parse(cfg.cone);
  if (cfg.check == "density") return verify_entrance_density(cone, cfg.epsilon, cfg.n, cfg.dt, vo);
  if (cfg.check == "exit-law") return verify_exit_law(cone, cfg.epsilon, cfg.n, cfg.dt, cfg.t_list, vo);
  if (cfg.check == "scaling") {
    std::vector<double> x = cfg.x;
    if (x.empty()) {
      x = default_direction(cone);
      for (auto& v : x) v *= std::numbers::sqrt2;
    }
    return verify_scaling(cone, x, cfg.scale_t, cfg.n, cfg.dt, vo);
  }
  if (cfg.check == "ball") return verify_ball_estimate(cfg.d, cfg.lambda_list, cfg.s_list, cfg.n, cfg.dt, vo);
  if (cfg.check == "fdd") return verify_fdd_trend(cone, cfg.epsilon_list, cfg.t, cfg.n, cfg.dt, vo);
  if (cfg.check == "meander") return verify_meander_construction(cfg.times, cfg.n, cfg.dt, vo);
  if (cfg.check == "heat-kernel") {
    const std::vector<double> x = cfg.x.empty() ? std::vector<double>{0.3, 0.3} : cfg.x;
    return verify_heat_kernel(cone, x, parse_probes(cfg.probes), cfg.bandwidth, cfg.n, cfg.dt, vo);
  }
  throw ConfigError("unknown check '" + cfg.check + "'");
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  VerifyOptions vo;
  vo.seed = resolve_seed(cfg);
  vo.workers = cfg.workers;
  vo.max_attempts = cfg.max_attempts;
  vo.thresholds = cfg.thresholds;
  const McReport r = dispatch_check(cfg, vo);

  json cells = json::array();
  std::ostringstream csv;
  csv << "label,estimate,std_error,target,statistic,p_value,pass,control\n";
  for (const auto& c : r.cells) {
    cells.push_back({{"label", c.label},
                     {"estimate", number_or_null(c.estimate)},
                     {"std_error", number_or_null(c.std_error)},
                     {"target", number_or_null(c.target)},
                     {"statistic", number_or_null(c.statistic)},
                     {"p_value", number_or_null(c.p_value)},
                     {"pass", c.pass},
                     {"control", c.control}});
    csv << csv_field(c.label) << ',' << num(c.estimate) << ',' << num(c.std_error) << ',' << num(c.target) << ','
        << num(c.statistic) << ',' << num(c.p_value) << ',' << (c.pass ? 1 : 0) << ',' << (c.control ? 1 : 0) << '\n';
  }
  json config = json::object();
  for (const auto& [k, v] : r.config) config[k] = v;
  json report;
  report["name"] = r.name;
  report["n"] = r.n;
  report["pass"] = r.pass;
  report["checks_pass"] = r.checks_pass;
  report["control_rejected"] = r.control_rejected;
  report["wall_time"] = r.wall_time;
  report["sampling"] = {{"attempts", r.sampling.attempts},
                        {"accepted", r.sampling.accepted},
                        {"acceptance_rate", number_or_null(r.sampling.attempts > 0 ? r.sampling.acceptance_rate() : NAN)}};
  report["thresholds"] = {{"ks_p", vo.thresholds.ks_p},
                          {"z_max", vo.thresholds.z_max},
                          {"slope_sigmas", vo.thresholds.slope_sigmas},
                          {"trend_p", vo.thresholds.trend_p},
                          {"noise_floor", vo.thresholds.noise_floor},
                          {"ball_sigmas", vo.thresholds.ball_sigmas},
                          {"ball_small", vo.thresholds.ball_small}};
  report["config"] = config;
  report["cells"] = cells;

  const fs::path dir = output_dir(cfg);
  RunConfig echo = cfg;
  echo.seed = vo.seed;
  json manifest;
  manifest["params"] = params_json(echo);
  manifest["wall_time"] = r.wall_time;
  write_atomic((dir / "report.json").string(), report.dump(2) + "\n");
  write_atomic((dir / "cells.csv").string(), csv.str());
  write_atomic((dir / "manifest.json").string(), manifest.dump(2) + "\n");
  out << r.name << ": " << (r.pass ? "PASS" : "FAIL") << " (checks " << (r.checks_pass ? "pass" : "fail")
      << ", negative control " << (r.control_rejected ? "rejected" : "NOT rejected") << ", n=" << r.n << ", "
      << r.wall_time << " s)\n";
  return r.pass ? 0 : 1;
}

}  // namespace

void write_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f << content;
    f.flush();
    if (!f) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cone heat kernels, meander entrance laws and their Monte Carlo checks"};
  app.require_subcommand(1);
  struct Sub {
    CLI::App* app;
    std::string config;
    std::map<std::string, std::string> flags;
  };
  std::map<std::string, Sub> subs;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"spectrum", "print the principal spectral data of a cone as JSON"},
      {"density", "tabulate e(t, y) on a polar grid"},
      {"sample", "write sampled paths and a run manifest"},
      {"verify", "run a Monte Carlo check and write report.json and cells.csv"}};
  for (const auto& [name, help] : commands) {
    Sub& s = subs[name];
    s.app = app.add_subcommand(name, help);
    s.app->add_option("--config", s.config, "key = value file or JSON manifest");
    for (const std::string& key : config_keys()) {
      s.app->add_option("--" + dashed(key), s.flags[key], "see README");
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code != 0) err << app.help();
    return code == 0 ? 0 : 2;
  }

  try {
    for (auto& [name, s] : subs) {
      if (!s.app->parsed()) continue;
      RunConfig cfg;
      if (!s.config.empty()) cfg = load_config(s.config);
      for (const std::string& key : config_keys()) {
        if (s.app->count("--" + dashed(key)) > 0) apply_setting(cfg, key, s.flags[key]);
      }
      validate(cfg);
      if (name == "spectrum") return cmd_spectrum(cfg, out);
      if (name == "density") return cmd_density(cfg, out);
      if (name == "sample") return cmd_sample(cfg, out);
      return cmd_verify(cfg, out);
    }
  } catch (const std::logic_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace cmeander
