#ifndef LGCOL__CONFIG_HPP_
#define LGCOL__CONFIG_HPP_

/**
 * @file
 * @brief Model-parameter files and normalized run configurations for the command-line tool.
 */

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "models.hpp"
#include "nlp.hpp"
#include "transcription.hpp"

namespace lgcol {

/// Invalid configuration; `field` names the offending entry.
class ConfigError : public std::invalid_argument
{
public:
  ConfigError(const std::string & field, const std::string & message)
      : std::invalid_argument(field + ": " + message), field(field)
  {}

  std::string field;
};

inline constexpr const char * kModelConfigSchema = "lgcol.models.v1";
inline constexpr const char * kRunConfigSchema   = "lgcol.run.v1";

struct SolverSettings
{
  double feas_tol{1e-8};
  double opt_tol{1e-6};
  int max_iter{5000};

  bool operator==(const SolverSettings &) const = default;
};

/// Benchmark parameters and solver tolerances.
struct ModelConfig
{
  PendulumParams pendulum;
  CartPoleParams cartpole;
  SolverSettings solver;
  /// Benchmark a `custom` run instantiates with these parameters.
  std::string problem;

  bool operator==(const ModelConfig &) const = default;
};

nlohmann::json to_json(const ModelConfig & cfg);
/// Missing keys keep their defaults; unknown keys are rejected.
ModelConfig model_config_from_json(const nlohmann::json & doc);
ModelConfig load_model_config(const std::string & path);

struct RunConfig
{
  std::string command{"solve"};   ///< solve | sweep | ivp
  std::string problem{"pendulum"};  ///< pendulum | cartpole | double_integrator | custom
  std::string config_path;          ///< model-parameter file, required for custom
  std::string scheme{"lg2"};        ///< lg | lg2 | both
  std::vector<int> N_list{10};
  SolverSettings solver;
  std::string output{"lgcol_out"};
  std::string format{"csv"};        ///< csv | json
  std::optional<std::uint64_t> seed;  ///< reserved; every component is deterministic

  // ivp only
  std::vector<double> q0;
  std::vector<double> v0;
  std::vector<std::string> controls{"0"};
  double tf{1.};
  double reference_tol{1e-12};

  bool operator==(const RunConfig &) const = default;
};

/// Check every field; throws ConfigError naming the first bad field.
void validate(const RunConfig & cfg);

std::vector<Scheme> schemes(const RunConfig & cfg);

nlohmann::json to_json(const RunConfig & cfg);
RunConfig run_config_from_json(const nlohmann::json & doc);

/// Parse "a:b" or "a:b:step" into the inclusive list a, a+step, ..., <= b.
std::vector<int> parse_range(const std::string & text);

/// Model parameters for a run: embedded defaults, overridden by the file when given.
ModelConfig resolve_model_config(const RunConfig & cfg);

OcpDefinition make_ocp(const RunConfig & cfg, const ModelConfig & models);
SecondOrderModel make_model(const RunConfig & cfg, const ModelConfig & models);

}  // namespace lgcol

#endif  // LGCOL__CONFIG_HPP_
