#pragma once

// Monte Carlo over trajectories. Each trajectory i runs on its own RNG
// stream derived from (master seed, i), so results do not depend on the
// number of worker threads or on scheduling; aggregation reduces in index
// order to keep summaries bit-reproducible.

#include <cstdint>
#include <vector>

#include "qsme/analysis.hpp"
#include "qsme/bloch.hpp"
#include "qsme/controller.hpp"
#include "qsme/integrator.hpp"
#include "qsme/rng.hpp"

namespace qsme {

struct EnsembleOptions {
    int threads = 0;                      // 0 = hardware concurrency
    double convergence_threshold = 0.05;  // terminal coupled distance to target
    double fit_start = -1.0;              // exponent window; <0 = default (last 80%)
    double fit_end = -1.0;
};

struct EnsembleSummary {
    int n_traj = 0;
    std::vector<double> times;
    std::vector<double> mean_V;
    std::vector<double> q10, q50, q90;
    std::vector<double> per_traj_exponents; // NaN where the fit was not possible
    std::vector<double> terminal_V;
    double convergence_fraction = 0.0;
    int n_failed = 0;                    // trajectories that blew up
    std::vector<int> failed_indices;
};

EnsembleSummary run_ensemble(const CoupledState& ic, const PhysParams& p,
                             const EstParams& e, const FeedbackLaw& law,
                             const SdeConfig& cfg, int n_traj,
                             const EnsembleOptions& opts = {});

// Uniform draw from the closed Bloch ball.
BlochVector sample_ball(rng::Xoshiro256pp& gen);

// n points uniform in the coupled Bures ball of given radius around center
// (product Lebesgue measure on ball x ball restricted to the set), center
// excluded. Only pole-pair centers are supported (the Bures distance to a
// pure pole depends on z alone, which makes cap-based rejection exact).
std::vector<CoupledState> sample_coupled_ball(const CoupledState& center, double radius,
                                              int n, std::uint64_t seed);

// n points uniform in ball x ball.
std::vector<CoupledState> sample_coupled_uniform(int n, std::uint64_t seed);

struct ExitTimeStudy {
    int n_traj = 0;
    double radius = 0.0;
    double exit_fraction = 0.0;
    double mean_exit_time = 0.0; // over exiting trajectories
    int n_exit = 0;
};

// Trajectories start uniform in the coupled ball of given radius around
// (antipode(target), target); exit = coupled distance to that center reaches
// the radius, checked at recorded times.
ExitTimeStudy exit_time_study(Target target, double radius, const PhysParams& p,
                              const EstParams& e, const FeedbackLaw& law,
                              const SdeConfig& cfg, int n_traj,
                              const EnsembleOptions& opts = {});

struct ReachTimeStudy {
    int n_traj = 0;
    double radius = 0.0;
    double reach_fraction = 0.0;
    double mean_tau_r = 0.0; // over reaching trajectories
    int n_reach = 0;
};

// Trajectory i starts at ics[i % ics.size()]; reach = coupled distance to
// (target, target) drops below the radius, checked at recorded times.
ReachTimeStudy reach_time_study(const std::vector<CoupledState>& ics, double radius,
                                const PhysParams& p, const EstParams& e,
                                const FeedbackLaw& law, const SdeConfig& cfg,
                                int n_traj, const EnsembleOptions& opts = {});

struct MartingaleStat {
    double z0 = 0.0;
    double mean_zT = 0.0;
    double std_error = 0.0;
    int n = 0;
};

// Terminal-z statistics under the Zero law (dz has no drift when u = 0).
MartingaleStat martingale_check(const CoupledState& ic, const PhysParams& p,
                                const EstParams& e, const SdeConfig& cfg, int n_traj,
                                const EnsembleOptions& opts = {});

} // namespace qsme
