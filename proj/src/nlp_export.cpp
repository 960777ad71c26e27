#include <nlohmann/json.hpp>

#include <cmath>
#include <limits>
#include <numeric>

#include "lgcol/nlp.hpp"

namespace lgcol {

namespace {

// null encodes an infinite bound; its sign follows from lower/upper
nlohmann::json bound_array(const Eigen::VectorXd & v)
{
  auto arr = nlohmann::json::array();
  for (double x : v) {
    if (std::isfinite(x)) {
      arr.push_back(x);
    } else {
      arr.push_back(nullptr);
    }
  }
  return arr;
}

Eigen::VectorXd read_bounds(const nlohmann::json & arr, double infinite_value)
{
  Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = arr[i].is_null() ? infinite_value : arr[i].get<double>();
  }
  return v;
}

nlohmann::json value_array(const Eigen::VectorXd & v)
{
  return nlohmann::json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd read_values(const nlohmann::json & arr)
{
  const auto vals = arr.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

nlohmann::json block_array(const std::vector<ConstraintBlock> & blocks)
{
  auto arr = nlohmann::json::array();
  for (const auto & b : blocks) { arr.push_back({{"name", b.name}, {"size", b.size}}); }
  return arr;
}

std::vector<ConstraintBlock> read_blocks(const nlohmann::json & arr)
{
  std::vector<ConstraintBlock> blocks;
  for (const auto & b : arr) { blocks.push_back({b.at("name").get<std::string>(), b.at("size").get<Eigen::Index>()}); }
  return blocks;
}

Eigen::Index total(const std::vector<ConstraintBlock> & blocks)
{
  return std::accumulate(blocks.begin(), blocks.end(), Eigen::Index{0},
                         [](Eigen::Index acc, const ConstraintBlock & b) { return acc + b.size; });
}

}  // namespace

Eigen::Index NlpExport::n_eq() const { return total(eq_blocks); }
Eigen::Index NlpExport::n_ineq() const { return total(ineq_blocks); }

nlohmann::json export_problem(const NlpProblem & problem, const Eigen::VectorXd & sample)
{
  validate(problem);
  if (sample.size() != problem.dim) { throw std::invalid_argument("export_problem: sample point has wrong size"); }

  nlohmann::json doc;
  doc["schema"] = kNlpExportSchema;
  doc["dim"]    = problem.dim;
  doc["n_eq"]   = problem.n_eq;
  doc["n_ineq"] = problem.n_ineq;
  doc["bounds"] = {{"lower", bound_array(problem.lower)}, {"upper", bound_array(problem.upper)}};
  doc["eq_blocks"]   = block_array(problem.eq_blocks);
  doc["ineq_blocks"] = block_array(problem.ineq_blocks);
  doc["callbacks"]   = {
    {"protocol", "dense"},
    {"objective", "f(z) -> real, minimized"},
    {"eq", "c(z) -> real[n_eq], feasible when == 0, rows ordered by eq_blocks"},
    {"ineq", "h(z) -> real[n_ineq], feasible when <= 0, rows ordered by ineq_blocks"},
    {"derivatives", "none supplied; backend differentiates or uses its own"},
  };
  const Eigen::VectorXd eq   = problem.n_eq > 0 ? problem.eq_constraints(sample) : Eigen::VectorXd{};
  const Eigen::VectorXd ineq = problem.n_ineq > 0 ? problem.ineq_constraints(sample) : Eigen::VectorXd{};
  doc["sample"] = {
    {"z", value_array(sample)},
    {"objective", problem.objective(sample)},
    {"eq", value_array(eq)},
    {"ineq", value_array(ineq)},
  };
  return doc;
}

NlpExport import_problem(const nlohmann::json & doc)
{
  if (doc.value("schema", std::string{}) != kNlpExportSchema) {
    throw std::invalid_argument("import_problem: unsupported schema '" + doc.value("schema", std::string{}) + "'");
  }
  NlpExport ex;
  ex.dim              = doc.at("dim").get<Eigen::Index>();
  ex.lower            = read_bounds(doc.at("bounds").at("lower"), -std::numeric_limits<double>::infinity());
  ex.upper            = read_bounds(doc.at("bounds").at("upper"), std::numeric_limits<double>::infinity());
  ex.eq_blocks        = read_blocks(doc.at("eq_blocks"));
  ex.ineq_blocks      = read_blocks(doc.at("ineq_blocks"));
  const auto & sample = doc.at("sample");
  ex.sample_point     = read_values(sample.at("z"));
  ex.sample_objective = sample.at("objective").get<double>();
  ex.sample_eq        = read_values(sample.at("eq"));
  ex.sample_ineq      = read_values(sample.at("ineq"));
  if (ex.lower.size() != ex.dim || ex.upper.size() != ex.dim || ex.sample_point.size() != ex.dim) {
    throw std::invalid_argument("import_problem: vector sizes disagree with dim");
  }
  return ex;
}

}  // namespace lgcol
