#ifndef LGCOL__CLI_HPP_
#define LGCOL__CLI_HPP_

/**
 * @file
 * @brief `lgcol` command-line front end: solve, sweep and ivp subcommands.
 *
 * Exit codes: 0 success, 1 solver or Newton failure (results still written), 2 configuration error.
 */

#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"

namespace lgcol {

inline constexpr int kExitOk          = 0;
inline constexpr int kExitSolveFailed = 1;
inline constexpr int kExitConfigError = 2;

inline constexpr const char * kSolveSummarySchema = "lgcol.solve.summary.v1";
inline constexpr const char * kTrajectorySchema   = "lgcol.trajectory.v1";
inline constexpr const char * kSweepSchema        = "lgcol.sweep.v1";
inline constexpr const char * kIvpSchema          = "lgcol.ivp.v1";

/// Samples on the uniform output grid over [0, t_f].
inline constexpr int kTrajectorySamples = 1000;

int cmd_solve(const RunConfig & cfg, std::ostream & out);
int cmd_sweep(const RunConfig & cfg, std::ostream & out);
int cmd_ivp(const RunConfig & cfg, std::ostream & out);

/// Parse arguments (args[0] is the program name) and dispatch.
int run_cli(const std::vector<std::string> & args, std::ostream & out, std::ostream & err);

}  // namespace lgcol

#endif  // LGCOL__CLI_HPP_
