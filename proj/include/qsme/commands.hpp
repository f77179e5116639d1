#pragma once

// Subcommand implementations shared by the CLI binary and the tests. Each
// returns the process exit code: 0 ok, 1 check failure, 2 bad config,
// 3 integration blowup, 4 exponent estimation impossible.

#include <cstdint>
#include <iosfwd>
#include <string>

#include "qsme/ensemble.hpp"
#include "qsme/scenario.hpp"

namespace qsme {

// Trajectory CSV: t,x,y,z,x_hat,y_hat,z_hat,u,V,dB_actual,dB_estimate.
std::string trajectory_csv(const Trajectory& traj, Target target);

// Summary CSV: t,mean_V,q10,q50,q90.
std::string ensemble_csv(const EnsembleSummary& s);

int cmd_simulate(const Scenario& sc, const std::string& out_path, std::ostream& log);
int cmd_ensemble(const Scenario& sc, const std::string& out_base, int threads,
                 std::ostream& log);
int cmd_exponent(const Scenario& sc, const std::string& out_path, int threads,
                 std::ostream& log);
int cmd_exit_time(const Scenario& sc, const std::string& out_path, int threads,
                  std::ostream& log);
int cmd_check(const Scenario& sc, const std::string& out_path, int threads,
              std::ostream& log);

} // namespace qsme
