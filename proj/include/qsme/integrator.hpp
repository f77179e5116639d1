#pragma once

// Euler-Maruyama stepping of the coupled SDE. One Gaussian increment per
// step drives both components (shared measurement record); the control is
// held over the step; states are projected back onto the ball after each
// update. Everything is a deterministic function of the inputs and the seed.

#include <cstdint>
#include <vector>

#include "qsme/bloch.hpp"
#include "qsme/controller.hpp"
#include "qsme/dynamics.hpp"

namespace qsme {

enum class Scheme { EulerMaruyama };
enum class Projection { RadialClip, None };

struct SdeConfig {
    double dt = 1e-3;
    double t_final = 10.0;
    std::int64_t record_stride = 10;
    std::uint64_t seed = 0;
    Scheme scheme = Scheme::EulerMaruyama;
    Projection projection = Projection::RadialClip;
};

void validate(const SdeConfig& cfg);

// Number of micro-steps for a config (t_final / dt, rounded to the nearest
// integer; t_final must be an integer multiple of dt within 1e-9 relative).
std::int64_t n_steps(const SdeConfig& cfg);

struct Trajectory {
    std::vector<double> times;
    std::vector<CoupledState> states;
    std::vector<double> controls; // u at each recorded time
    std::vector<double> lyapunov; // V at each recorded time
    std::uint64_t noise_seed = 0;
};

// Radial clip onto the closed unit ball; identity inside.
BlochVector project(const BlochVector& b);

CoupledState step(const CoupledState& s, double u, double dW, double dt,
                  const PhysParams& p, const EstParams& e,
                  Projection proj = Projection::RadialClip);

Trajectory simulate(const CoupledState& ic, const PhysParams& p, const EstParams& e,
                    const FeedbackLaw& law, const SdeConfig& cfg);

// Same as simulate but consuming pre-drawn Wiener increments (one per step,
// each already scaled to sqrt(dt) variance). Used for coupled-path step-size
// studies.
Trajectory simulate_with_noise(const CoupledState& ic, const PhysParams& p,
                               const EstParams& e, const FeedbackLaw& law,
                               const SdeConfig& cfg, const std::vector<double>& dW);

} // namespace qsme
