#include "lgcol/config.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace lgcol {

namespace {

using nlohmann::json;

/// Reads `key` into `value` when present; finish() rejects keys that were never requested.
class Reader
{
public:
  Reader(const json & obj, std::string section) : obj_(obj), section_(std::move(section))
  {
    if (!obj_.is_object()) { throw ConfigError(section_, "expected an object"); }
  }

  template<class T>
  void get(const char * key, T & value)
  {
    seen_.insert(key);
    if (!obj_.contains(key)) { return; }
    try {
      value = obj_.at(key).get<T>();
    } catch (const json::exception & e) {
      throw ConfigError(field(key), e.what());
    }
  }

  void allow(const char * key) { seen_.insert(key); }

  void finish() const
  {
    for (const auto & item : obj_.items()) {
      if (!seen_.contains(item.key())) { throw ConfigError(field(item.key()), "unknown key"); }
    }
  }

  [[nodiscard]] std::string field(const std::string & key) const
  {
    return section_.empty() ? key : section_ + "." + key;
  }

private:
  const json & obj_;
  std::string section_;
  std::set<std::string> seen_;
};

void require_positive(double v, const std::string & field)
{
  if (!(v > 0.) || !std::isfinite(v)) { throw ConfigError(field, "must be a positive finite number"); }
}

}  // namespace

json to_json(const ModelConfig & cfg)
{
  const auto & p = cfg.pendulum;
  const auto & c = cfg.cartpole;
  json doc;
  doc["schema"]   = kModelConfigSchema;
  doc["pendulum"] = {{"mass", p.mass},           {"length", p.length}, {"gravity", p.gravity},
                     {"torque_max", p.torque_max}, {"tf_min", p.tf_min}, {"tf_max", p.tf_max}};
  doc["cartpole"] = {{"cart_mass", c.cart_mass}, {"pole_mass", c.pole_mass}, {"pole_length", c.pole_length},
                     {"gravity", c.gravity},     {"distance", c.distance},   {"duration", c.duration},
                     {"force_max", c.force_max}, {"track_limit", c.track_limit}};
  doc["solver"]   = {{"feas_tol", cfg.solver.feas_tol}, {"opt_tol", cfg.solver.opt_tol}, {"max_iter", cfg.solver.max_iter}};
  if (!cfg.problem.empty()) { doc["problem"] = cfg.problem; }
  return doc;
}

ModelConfig model_config_from_json(const json & doc)
{
  ModelConfig cfg;
  Reader top(doc, "");
  std::string schema = kModelConfigSchema;
  top.get("schema", schema);
  if (schema != kModelConfigSchema) { throw ConfigError("schema", "unsupported model config schema '" + schema + "'"); }
  top.get("problem", cfg.problem);
  if (doc.contains("pendulum")) {
    Reader r(doc.at("pendulum"), "pendulum");
    auto & p = cfg.pendulum;
    r.get("mass", p.mass);
    r.get("length", p.length);
    r.get("gravity", p.gravity);
    r.get("torque_max", p.torque_max);
    r.get("tf_min", p.tf_min);
    r.get("tf_max", p.tf_max);
    r.finish();
  }
  if (doc.contains("cartpole")) {
    Reader r(doc.at("cartpole"), "cartpole");
    auto & c = cfg.cartpole;
    r.get("cart_mass", c.cart_mass);
    r.get("pole_mass", c.pole_mass);
    r.get("pole_length", c.pole_length);
    r.get("gravity", c.gravity);
    r.get("distance", c.distance);
    r.get("duration", c.duration);
    r.get("force_max", c.force_max);
    r.get("track_limit", c.track_limit);
    r.finish();
  }
  if (doc.contains("solver")) {
    Reader r(doc.at("solver"), "solver");
    r.get("feas_tol", cfg.solver.feas_tol);
    r.get("opt_tol", cfg.solver.opt_tol);
    r.get("max_iter", cfg.solver.max_iter);
    r.finish();
  }
  top.allow("pendulum");
  top.allow("cartpole");
  top.allow("solver");
  top.finish();

  const auto & p = cfg.pendulum;
  require_positive(p.mass, "pendulum.mass");
  require_positive(p.length, "pendulum.length");
  require_positive(p.torque_max, "pendulum.torque_max");
  require_positive(p.tf_min, "pendulum.tf_min");
  if (!(p.tf_max >= p.tf_min) || !std::isfinite(p.tf_max)) { throw ConfigError("pendulum.tf_max", "must be finite and >= tf_min"); }
  const auto & c = cfg.cartpole;
  require_positive(c.cart_mass, "cartpole.cart_mass");
  require_positive(c.pole_mass, "cartpole.pole_mass");
  require_positive(c.pole_length, "cartpole.pole_length");
  require_positive(c.duration, "cartpole.duration");
  require_positive(c.force_max, "cartpole.force_max");
  require_positive(c.track_limit, "cartpole.track_limit");
  require_positive(cfg.solver.feas_tol, "solver.feas_tol");
  require_positive(cfg.solver.opt_tol, "solver.opt_tol");
  if (cfg.solver.max_iter < 1) { throw ConfigError("solver.max_iter", "must be >= 1"); }
  if (!cfg.problem.empty() && cfg.problem != "pendulum" && cfg.problem != "cartpole") {
    throw ConfigError("problem", "must be pendulum or cartpole");
  }
  return cfg;
}

ModelConfig load_model_config(const std::string & path)
{
  std::ifstream in(path);
  if (!in) { throw ConfigError("config", "cannot open '" + path + "'"); }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error & e) {
    throw ConfigError("config", "'" + path + "' is not valid JSON: " + e.what());
  }
  return model_config_from_json(doc);
}

std::vector<int> parse_range(const std::string & text)
{
  std::vector<int> parts;
  std::size_t start = 0;
  while (true) {
    const auto colon = text.find(':', start);
    const std::string tok = text.substr(start, colon == std::string::npos ? std::string::npos : colon - start);
    try {
      std::size_t used = 0;
      parts.push_back(std::stoi(tok, &used));
      if (used != tok.size()) { throw std::invalid_argument(tok); }
    } catch (const std::exception &) {
      throw ConfigError("N-range", "malformed range '" + text + "' (expected first:last[:step])");
    }
    if (colon == std::string::npos) { break; }
    start = colon + 1;
  }
  if (parts.size() < 2 || parts.size() > 3) {
    throw ConfigError("N-range", "malformed range '" + text + "' (expected first:last[:step])");
  }
  const int step = parts.size() == 3 ? parts[2] : 1;
  if (step < 1 || parts[1] < parts[0]) { throw ConfigError("N-range", "range '" + text + "' is empty"); }
  std::vector<int> out;
  for (int n = parts[0]; n <= parts[1]; n += step) { out.push_back(n); }
  return out;
}

void validate(const RunConfig & cfg)
{
  static const std::set<std::string> commands{"solve", "sweep", "ivp"};
  static const std::set<std::string> problems{"pendulum", "cartpole", "double_integrator", "custom"};
  if (!commands.contains(cfg.command)) { throw ConfigError("command", "unknown command '" + cfg.command + "'"); }
  if (!problems.contains(cfg.problem)) { throw ConfigError("problem", "unknown problem '" + cfg.problem + "'"); }
  if (cfg.problem == "custom" && cfg.config_path.empty()) {
    throw ConfigError("config", "problem 'custom' requires a model config file");
  }
  if (cfg.scheme != "lg" && cfg.scheme != "lg2" && cfg.scheme != "both") {
    throw ConfigError("scheme", "must be lg, lg2 or both");
  }
  if (cfg.N_list.empty()) { throw ConfigError("N", "at least one collocation count is required"); }
  for (int n : cfg.N_list) {
    if (n < 1 || n > kMaxCollocationPoints) {
      throw ConfigError("N", "N=" + std::to_string(n) + " must lie in [1, " + std::to_string(kMaxCollocationPoints) + "]");
    }
  }
  if (cfg.command != "sweep" && cfg.N_list.size() != 1) { throw ConfigError("N", "expected a single value"); }
  require_positive(cfg.solver.feas_tol, "feas-tol");
  require_positive(cfg.solver.opt_tol, "opt-tol");
  if (cfg.solver.max_iter < 1) { throw ConfigError("max-iter", "must be >= 1"); }
  if (cfg.format != "csv" && cfg.format != "json") { throw ConfigError("format", "must be csv or json"); }
  if (cfg.output.empty()) { throw ConfigError("out", "must not be empty"); }
  if (cfg.command == "ivp") {
    require_positive(cfg.tf, "tf");
    if (!(cfg.reference_tol >= 1e-13 && cfg.reference_tol <= 1e-6)) {
      throw ConfigError("ref-tol", "must lie in [1e-13, 1e-6]");
    }
  }
}

std::vector<Scheme> schemes(const RunConfig & cfg)
{
  if (cfg.scheme == "both") { return {Scheme::Lg, Scheme::Lg2}; }
  return {scheme_from_string(cfg.scheme)};
}

json to_json(const RunConfig & cfg)
{
  json doc;
  doc["schema"]  = kRunConfigSchema;
  doc["command"] = cfg.command;
  doc["problem"] = cfg.problem;
  doc["config"]  = cfg.config_path;
  doc["scheme"]  = cfg.scheme;
  doc["N"]       = cfg.N_list;
  doc["solver"]  = {{"feas_tol", cfg.solver.feas_tol}, {"opt_tol", cfg.solver.opt_tol}, {"max_iter", cfg.solver.max_iter}};
  doc["output"]  = cfg.output;
  doc["format"]  = cfg.format;
  doc["seed"]    = cfg.seed ? json(*cfg.seed) : json(nullptr);
  if (cfg.command == "ivp") {
    doc["ivp"] = {{"q0", cfg.q0},
                  {"v0", cfg.v0},
                  {"controls", cfg.controls},
                  {"tf", cfg.tf},
                  {"reference_tol", cfg.reference_tol}};
  }
  return doc;
}

RunConfig run_config_from_json(const json & doc)
{
  RunConfig cfg;
  Reader top(doc, "");
  std::string schema;
  top.get("schema", schema);
  if (schema != kRunConfigSchema) { throw ConfigError("schema", "unsupported run config schema '" + schema + "'"); }
  top.get("command", cfg.command);
  top.get("problem", cfg.problem);
  top.get("config", cfg.config_path);
  top.get("scheme", cfg.scheme);
  top.get("N", cfg.N_list);
  top.get("output", cfg.output);
  top.get("format", cfg.format);
  json seed, solver, ivp;
  top.get("seed", seed);
  top.get("solver", solver);
  top.get("ivp", ivp);
  top.finish();
  if (!seed.is_null()) { cfg.seed = seed.get<std::uint64_t>(); }
  if (!solver.is_null()) {
    Reader r(solver, "solver");
    r.get("feas_tol", cfg.solver.feas_tol);
    r.get("opt_tol", cfg.solver.opt_tol);
    r.get("max_iter", cfg.solver.max_iter);
    r.finish();
  }
  if (!ivp.is_null()) {
    Reader r(ivp, "ivp");
    r.get("q0", cfg.q0);
    r.get("v0", cfg.v0);
    r.get("controls", cfg.controls);
    r.get("tf", cfg.tf);
    r.get("reference_tol", cfg.reference_tol);
    r.finish();
  }
  validate(cfg);
  return cfg;
}

ModelConfig resolve_model_config(const RunConfig & cfg)
{
  if (cfg.config_path.empty()) { return ModelConfig{}; }
  return load_model_config(cfg.config_path);
}

namespace {

std::string base_problem(const RunConfig & cfg, const ModelConfig & models)
{
  if (cfg.problem != "custom") { return cfg.problem; }
  if (models.problem.empty()) { throw ConfigError("problem", "custom model config must name its problem"); }
  return models.problem;
}

}  // namespace

OcpDefinition make_ocp(const RunConfig & cfg, const ModelConfig & models)
{
  const std::string name = base_problem(cfg, models);
  if (name == "pendulum") { return pendulum_ocp(models.pendulum); }
  if (name == "cartpole") { return cartpole_ocp(models.cartpole); }
  return double_integrator_min_time_ocp();
}

SecondOrderModel make_model(const RunConfig & cfg, const ModelConfig & models)
{
  const std::string name = base_problem(cfg, models);
  if (name == "pendulum") { return pendulum_model(models.pendulum); }
  if (name == "cartpole") { return cartpole_model(models.cartpole); }
  return double_integrator_model();
}

}  // namespace lgcol
