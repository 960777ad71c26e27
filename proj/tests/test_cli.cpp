#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lgcol/cli.hpp"

using namespace lgcol;
namespace fs = std::filesystem;

namespace {

struct Run
{
  int code{-1};
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args)
{
  args.insert(args.begin(), "lgcol");
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(args, out, err);
  r.out  = out.str();
  r.err  = err.str();
  return r;
}

std::string read(const fs::path & p)
{
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

struct Csv
{
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  [[nodiscard]] std::size_t col(const std::string & name) const
  {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) { throw std::out_of_range("no column " + name); }
    return static_cast<std::size_t>(it - header.begin());
  }
};

std::vector<std::string> split(const std::string & line)
{
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) { cells.push_back(cell); }
  if (!line.empty() && line.back() == ',') { cells.emplace_back(); }
  return cells;
}

Csv parse_csv(const std::string & text)
{
  Csv csv;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.rfind("# ", 0) == 0) {
      csv.comments.push_back(line);
    } else if (csv.header.empty()) {
      csv.header = split(line);
    } else {
      csv.rows.push_back(split(line));
    }
  }
  return csv;
}

class CliTest : public ::testing::Test
{
protected:
  void SetUp() override
  {
    dir_ = fs::temp_directory_path()
           / ("lgcol_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  [[nodiscard]] std::string prefix(const std::string & name = "run") const { return (dir_ / name).string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, SolvePendulumLg2)
{
  const auto r = run({"solve", "--problem", "pendulum", "--scheme", "lg2", "--N", "12", "--out", prefix()});
  ASSERT_EQ(r.code, kExitOk) << r.err << r.out;
  const Csv summary = parse_csv(read(prefix() + "_summary.csv"));
  ASSERT_EQ(summary.rows.size(), 1u);
  EXPECT_EQ(summary.comments.at(0), std::string("# schema: ") + kSolveSummarySchema);
  EXPECT_EQ(summary.rows[0][summary.col("status")], "converged");
  EXPECT_EQ(std::stod(summary.rows[0][summary.col("E1_q1")]), 0.);
  EXPECT_EQ(summary.rows[0][summary.col("objective")], summary.rows[0][summary.col("tf")]);

  const Csv traj = parse_csv(read(prefix() + "_lg2_trajectory.csv"));
  EXPECT_EQ(traj.comments.at(0), std::string("# schema: ") + kTrajectorySchema);
  ASSERT_EQ(traj.rows.size(), static_cast<std::size_t>(kTrajectorySamples));
  for (const char * c : {"t", "q1", "v1", "u1", "u_extrapolated", "eps1_q1", "eps2_q1"}) { EXPECT_NO_THROW((void)traj.col(c)); }
  EXPECT_EQ(std::stod(traj.rows.front()[traj.col("t")]), 0.);
  EXPECT_EQ(traj.rows.back()[traj.col("t")], summary.rows[0][summary.col("tf")]);
  EXPECT_EQ(traj.rows.front()[traj.col("u_extrapolated")], "1");
  EXPECT_EQ(traj.rows[500][traj.col("u_extrapolated")], "0");
  for (const auto & row : traj.rows) { EXPECT_EQ(std::stod(row[traj.col("eps1_q1")]), 0.); }
}

TEST_F(CliTest, SolveCartPoleBothSharesConfigEcho)
{
  const auto r = run({"solve", "--problem", "cartpole", "--scheme", "both", "--N", "10", "--out", prefix(), "--format",
                      "json"});
  ASSERT_EQ(r.code, kExitOk) << r.err << r.out;
  const auto doc = nlohmann::json::parse(read(prefix() + "_summary.json"));
  EXPECT_EQ(doc.at("schema"), kSolveSummarySchema);
  ASSERT_EQ(doc.at("rows").size(), 2u);
  EXPECT_EQ(doc.at("rows")[0].at("scheme"), "lg");
  EXPECT_EQ(doc.at("rows")[1].at("scheme"), "lg2");
  EXPECT_EQ(doc.at("config").at("scheme"), "both");
  EXPECT_EQ(doc.at("config").at("problem"), "cartpole");
  // joint error is not reported for mixed units
  EXPECT_TRUE(doc.at("rows")[0].at("E2_joint").is_null());
  EXPECT_TRUE(fs::exists(prefix() + "_lg_trajectory.json"));
  EXPECT_TRUE(fs::exists(prefix() + "_lg2_trajectory.json"));
}

TEST_F(CliTest, ConfigErrorsExitTwoNamingField)
{
  auto r = run({"solve", "--problem", "pendulum", "--N", "0", "--out", prefix()});
  EXPECT_EQ(r.code, kExitConfigError);
  EXPECT_NE(r.err.find("N"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(prefix() + "_summary.csv"));

  r = run({"solve", "--problem", "pendulum", "--scheme", "radau", "--out", prefix()});
  EXPECT_EQ(r.code, kExitConfigError);
  EXPECT_NE(r.err.find("scheme"), std::string::npos) << r.err;

  r = run({"sweep", "--problem", "pendulum", "--N-range", "8:4", "--out", prefix()});
  EXPECT_EQ(r.code, kExitConfigError);
  EXPECT_NE(r.err.find("N-range"), std::string::npos) << r.err;

  r = run({"solve", "--problem", "custom", "--out", prefix()});
  EXPECT_EQ(r.code, kExitConfigError);
  EXPECT_NE(r.err.find("config"), std::string::npos) << r.err;

  r = run({"solve", "--problem", "pendulum", "--config", prefix("missing.json")});
  EXPECT_EQ(r.code, kExitConfigError);

  r = run({"solve", "--bogus"});
  EXPECT_EQ(r.code, kExitConfigError);
  r = run({});
  EXPECT_EQ(r.code, kExitConfigError);
  r = run({"sweep", "--problem", "pendulum"});
  EXPECT_EQ(r.code, kExitConfigError);
}

TEST_F(CliTest, HelpExitsZero)
{
  EXPECT_EQ(run({"--help"}).code, kExitOk);
  const auto r = run({"solve", "--help"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("--N"), std::string::npos);
}

TEST_F(CliTest, NonConvergenceExitsOneAndWritesSummary)
{
  const auto r = run({"solve", "--problem", "pendulum", "--N", "8", "--max-iter", "2", "--out", prefix()});
  EXPECT_EQ(r.code, kExitSolveFailed);
  const Csv summary = parse_csv(read(prefix() + "_summary.csv"));
  ASSERT_EQ(summary.rows.size(), 1u);
  EXPECT_NE(summary.rows[0][summary.col("status")], "converged");
}

TEST_F(CliTest, CustomConfigSuppliesParameters)
{
  const auto path = prefix("custom.json");
  std::ofstream(path) << R"({"schema": "lgcol.models.v1", "problem": "pendulum",
                           "pendulum": {"torque_max": 5.0}, "solver": {"max_iter": 3000}})";
  const auto r = run({"solve", "--problem", "custom", "--config", path, "--N", "8", "--out", prefix()});
  ASSERT_EQ(r.code, kExitOk) << r.err << r.out;
  const Csv summary = parse_csv(read(prefix() + "_summary.csv"));
  EXPECT_NE(summary.comments.at(2).find("\"max_iter\":3000"), std::string::npos) << summary.comments.at(2);
  const Csv traj = parse_csv(read(prefix() + "_lg2_trajectory.csv"));
  double umax    = 0.;
  for (const auto & row : traj.rows) {
    if (row[traj.col("u_extrapolated")] == "0") { umax = std::max(umax, std::abs(std::stod(row[traj.col("u1")]))); }
  }
  EXPECT_GT(umax, 2.5);
}

TEST_F(CliTest, SweepPendulumTwentyRowsDeterministic)
{
  const std::vector<std::string> args{"sweep", "--problem", "pendulum", "--scheme", "both", "--N-range", "6:24:2"};
  auto a = args, b = args;
  a.insert(a.end(), {"--out", prefix("a")});
  b.insert(b.end(), {"--out", prefix("b")});
  const auto ra = run(a);
  const auto rb = run(b);
  ASSERT_EQ(ra.code, kExitOk) << ra.err;
  ASSERT_EQ(rb.code, kExitOk) << rb.err;

  Csv ca = parse_csv(read(prefix("a") + "_sweep.csv"));
  Csv cb = parse_csv(read(prefix("b") + "_sweep.csv"));
  EXPECT_EQ(ca.comments.at(0), std::string("# schema: ") + kSweepSchema);
  ASSERT_EQ(ca.rows.size(), 20u);
  ASSERT_EQ(ca.header.back(), "wall_seconds");
  for (auto * c : {&ca, &cb}) {
    for (auto & row : c->rows) { row.pop_back(); }
  }
  EXPECT_EQ(ca.header, cb.header);
  EXPECT_EQ(ca.rows, cb.rows);
  // config echo differs only in the output prefix
  EXPECT_EQ(ca.comments.size(), cb.comments.size());

  std::map<int, std::map<std::string, double>> e2;
  for (const auto & row : ca.rows) {
    EXPECT_EQ(row[ca.col("status")], "converged") << row[0] << " N=" << row[1];
    e2[std::stoi(row[ca.col("N")])][row[ca.col("scheme")]] = std::stod(row[ca.col("E2_q1")]);
  }
  ASSERT_EQ(e2.size(), 10u);
  for (const auto & [N, by_scheme] : e2) { EXPECT_LT(by_scheme.at("lg2"), by_scheme.at("lg")) << "N=" << N; }
}

TEST_F(CliTest, IvpPendulumMatchesReference)
{
  const auto r = run({"ivp", "--model", "pendulum", "--q0", "0.1", "--u", "0", "--tf", "1", "--N", "16", "--out",
                      prefix()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const Csv csv = parse_csv(read(prefix() + "_ivp.csv"));
  EXPECT_EQ(csv.comments.at(0), std::string("# schema: ") + kIvpSchema);
  ASSERT_EQ(csv.rows.size(), 2u);
  for (const auto & row : csv.rows) {
    EXPECT_EQ(row[csv.col("status")], "converged");
    EXPECT_LT(std::stod(row[csv.col("endpoint_q_discrepancy")]), 1e-6);
    EXPECT_LT(std::stod(row[csv.col("max_q_discrepancy")]), 1e-6);
  }
}

TEST_F(CliTest, IvpExpressionControls)
{
  auto r = run({"ivp", "--model", "cartpole", "--q0", "0", "0", "--u", "sin(3*t)", "--tf", "1", "--N", "12",
                "--scheme", "lg2", "--out", prefix()});
  EXPECT_EQ(r.code, kExitOk) << r.err;

  r = run({"ivp", "--model", "pendulum", "--u", "tan(t)", "--out", prefix()});
  EXPECT_EQ(r.code, kExitConfigError);
  EXPECT_NE(r.err.find("position 0"), std::string::npos) << r.err;

  r = run({"ivp", "--model", "pendulum", "--u", "1 +", "--out", prefix()});
  EXPECT_EQ(r.code, kExitConfigError);
  EXPECT_NE(r.err.find("position 3"), std::string::npos) << r.err;

  r = run({"ivp", "--model", "cartpole", "--q0", "0.1", "--out", prefix()});
  EXPECT_EQ(r.code, kExitConfigError);
  EXPECT_NE(r.err.find("q0"), std::string::npos) << r.err;
}

TEST_F(CliTest, SeedIsEchoedButDoesNotChangeResults)
{
  const auto a = run({"solve", "--problem", "double_integrator", "--N", "6", "--out", prefix("a")});
  const auto b = run({"solve", "--problem", "double_integrator", "--N", "6", "--seed", "7", "--out", prefix("b")});
  ASSERT_EQ(a.code, kExitOk) << a.err;
  ASSERT_EQ(b.code, kExitOk) << b.err;
  Csv ta = parse_csv(read(prefix("a") + "_lg2_trajectory.csv"));
  Csv tb = parse_csv(read(prefix("b") + "_lg2_trajectory.csv"));
  EXPECT_EQ(ta.rows, tb.rows);
  EXPECT_NE(tb.comments.at(2).find("\"seed\":7"), std::string::npos);
}
