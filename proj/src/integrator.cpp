#include "qsme/integrator.hpp"

#include <cmath>
#include <string>

#include "qsme/analysis.hpp"
#include "qsme/errors.hpp"
#include "qsme/rng.hpp"

namespace qsme {

void validate(const SdeConfig& cfg) {
    if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw config_error("dt must be > 0");
    if (!(cfg.t_final >= 0.0) || !std::isfinite(cfg.t_final))
        throw config_error("t_final must be >= 0");
    if (cfg.t_final > 0.0 && cfg.dt > cfg.t_final)
        throw config_error("dt must not exceed t_final");
    if (cfg.record_stride < 1) throw config_error("record_stride must be >= 1");
}

std::int64_t n_steps(const SdeConfig& cfg) {
    double steps = cfg.t_final / cfg.dt;
    auto n = static_cast<std::int64_t>(std::llround(steps));
    if (std::abs(steps - static_cast<double>(n)) > 1e-9 * std::max(1.0, steps))
        throw config_error("t_final must be an integer multiple of dt");
    return n;
}

BlochVector project(const BlochVector& b) {
    double n2 = b.norm2();
    if (n2 <= 1.0) return b;
    double inv = 1.0 / std::sqrt(n2);
    return BlochVector{b.x * inv, b.y * inv, b.z * inv};
}

namespace {

inline BlochVector advance(const BlochVector& b, const VectorField3& a,
                           const VectorField3& s, double dt, double dW) {
    return BlochVector{
        b.x + a.dx * dt + s.dx * dW,
        b.y + a.dy * dt + s.dy * dW,
        b.z + a.dz * dt + s.dz * dW,
    };
}

inline bool finite(const BlochVector& b) {
    return std::isfinite(b.x) && std::isfinite(b.y) && std::isfinite(b.z);
}

} // namespace

CoupledState step(const CoupledState& s, double u, double dW, double dt,
                  const PhysParams& p, const EstParams& e, Projection proj) {
    CoupledState out{
        advance(s.actual, drift_actual(s.actual, u, p), diffusion_actual(s.actual, p),
                dt, dW),
        advance(s.estimate, drift_estimate(s, u, p, e),
                diffusion_estimate(s.estimate, e), dt, dW),
    };
    if (proj == Projection::RadialClip) {
        out.actual = project(out.actual);
        out.estimate = project(out.estimate);
    }
    return out;
}

namespace {

Trajectory run(const CoupledState& ic, const PhysParams& p, const EstParams& e,
               const FeedbackLaw& law, const SdeConfig& cfg,
               const std::vector<double>* noise) {
    validate(p);
    validate(e);
    validate(cfg);
    if (!ic.in_ball()) throw config_error("initial condition outside the Bloch ball");

    const std::int64_t total = n_steps(cfg);
    if (total > 0 && total % cfg.record_stride != 0)
        throw config_error("record_stride must divide the step count " +
                           std::to_string(total));
    if (noise && static_cast<std::int64_t>(noise->size()) < total)
        throw config_error("noise sequence shorter than the step count");

    Trajectory traj;
    traj.noise_seed = cfg.seed;
    const std::int64_t n_records = total / (total > 0 ? cfg.record_stride : 1) + 1;
    traj.times.reserve(n_records);
    traj.states.reserve(n_records);
    traj.controls.reserve(n_records);
    traj.lyapunov.reserve(n_records);

    rng::GaussianStream stream(cfg.seed);
    const double sqrt_dt = std::sqrt(cfg.dt);

    CoupledState s = ic;
    auto record = [&](std::int64_t step_idx) {
        traj.times.push_back(static_cast<double>(step_idx) * cfg.dt);
        traj.states.push_back(s);
        traj.controls.push_back(feedback_u(law, s.estimate));
        traj.lyapunov.push_back(lyapunov_V(s, law.target));
    };
    record(0);

    for (std::int64_t i = 0; i < total; ++i) {
        double u = feedback_u(law, s.estimate);
        double dW = noise ? (*noise)[i] : sqrt_dt * stream.normal();
        s = step(s, u, dW, cfg.dt, p, e, cfg.projection);
        if (!finite(s.actual) || !finite(s.estimate))
            throw integration_error("non-finite state at step " + std::to_string(i + 1),
                                    i + 1, static_cast<double>(i + 1) * cfg.dt);
        if ((i + 1) % cfg.record_stride == 0) record(i + 1);
    }
    return traj;
}

} // namespace

Trajectory simulate(const CoupledState& ic, const PhysParams& p, const EstParams& e,
                    const FeedbackLaw& law, const SdeConfig& cfg) {
    return run(ic, p, e, law, cfg, nullptr);
}

Trajectory simulate_with_noise(const CoupledState& ic, const PhysParams& p,
                               const EstParams& e, const FeedbackLaw& law,
                               const SdeConfig& cfg, const std::vector<double>& dW) {
    return run(ic, p, e, law, cfg, &dW);
}

} // namespace qsme
