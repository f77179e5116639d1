#pragma once

// Lyapunov function V, its infinitesimal generator in closed form and via
// the generic drift-plus-half-Hessian formula, the exponent reference rates
// nu_av / nu_s / K, and least-squares exponent estimation from trajectories.

#include <cstddef>
#include <utility>
#include <vector>

#include "qsme/bloch.hpp"
#include "qsme/dynamics.hpp"
#include "qsme/integrator.hpp"

namespace qsme {

// V = sqrt(1-z) + sqrt(1-zhat) for the Excited target, sqrt(1+z)+sqrt(1+zhat)
// for Ground.
double lyapunov_V(const CoupledState& s, Target target);

// Closed-form generator LV = u*U1 + U2 for the Excited-target V. Requires
// z < 1 and zhat < 1 (the formula is singular at the pole).
double generator_V_closed(const CoupledState& s, double u, const PhysParams& p,
                          const EstParams& e);

enum class GeneratorMode { Analytic, FiniteDifference };

// Generic generator applied to V: drift . grad V + 1/2 sigma^T Hess(V) sigma
// over the 6-dimensional Bloch state. Analytic mode uses exact partials of V;
// FiniteDifference is a slower cross-check.
double generator_V_numeric(const CoupledState& s, double u, const PhysParams& p,
                           const EstParams& e,
                           GeneratorMode mode = GeneratorMode::Analytic);

// Mean-curve reference rate: -sqrt(eta_hat*eta*M_hat*M) + eta_hat*M_hat/2.
double nu_av(const PhysParams& p, const EstParams& e);
// Sample-path reference rate:
// -sqrt(eta_hat*eta*M_hat*M) - min(eta*M - eta_hat*M_hat, 0)/2.
double nu_s(const PhysParams& p, const EstParams& e);
// Companion values printed in some summaries: the bare -sqrt term, and the
// sqrt term shifted by eta*M/2.
double nu_s_alt(const PhysParams& p, const EstParams& e);
double nu_av_alt(const PhysParams& p, const EstParams& e);
// K = min(eta*M, eta_hat*M_hat).
double k_bound(const PhysParams& p, const EstParams& e);

struct ExponentReport {
    double slope = 0.0;
    double intercept = 0.0;
    double t_start = 0.0;
    double t_end = 0.0;
    double r_squared = 0.0;
    std::size_t n_points = 0;
};

inline constexpr double kLyapunovFloor = 1e-12;

// OLS fit of log V against t over [t_start, t_end], truncated at the first
// sample with V < kLyapunovFloor. Throws estimation_error with fewer than 3
// usable samples.
ExponentReport estimate_sample_exponent(const std::vector<double>& times,
                                        const std::vector<double>& V,
                                        double t_start, double t_end);
ExponentReport estimate_sample_exponent(const Trajectory& traj, double t_start,
                                        double t_end);
// Default window: the last 80% of the time span.
ExponentReport estimate_sample_exponent(const Trajectory& traj);

std::pair<double, double> default_fit_window(double t_final);

} // namespace qsme
