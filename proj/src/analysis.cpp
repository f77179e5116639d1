#include "qsme/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qsme/errors.hpp"

namespace qsme {

double lyapunov_V(const CoupledState& s, Target target) {
    double sign = target_pole(target);
    double a = std::max(0.0, 1.0 - sign * s.actual.z);
    double b = std::max(0.0, 1.0 - sign * s.estimate.z);
    return std::sqrt(a) + std::sqrt(b);
}

namespace {

void require_interior_z(const CoupledState& s) {
    if (s.actual.z >= 1.0 || s.estimate.z >= 1.0)
        throw std::domain_error("generator formula singular at z = 1");
}

} // namespace

double generator_V_closed(const CoupledState& s, double u, const PhysParams& p,
                          const EstParams& e) {
    require_interior_z(s);
    const double z = s.actual.z, zh = s.estimate.z;
    const double sm = std::sqrt(1.0 - z), smh = std::sqrt(1.0 - zh);
    const double u1 = 0.5 * (s.actual.x / sm + s.estimate.x / smh);
    const double se = std::sqrt(e.eta_hat * e.M_hat);
    const double sp = std::sqrt(p.eta * p.M);
    const double u2 =
        -0.125 * (p.eta * p.M * (1.0 + z) * (1.0 + z) * sm +
                  e.eta_hat * e.M_hat * (1.0 + zh) * (1.0 + zh) * smh) +
        0.5 * se * (1.0 + zh) * (se * zh - sp * z) * smh;
    return u * u1 + u2;
}

namespace {

double excited_V(double z, double zh) {
    return std::sqrt(1.0 - z) + std::sqrt(1.0 - zh);
}

} // namespace

double generator_V_numeric(const CoupledState& s, double u, const PhysParams& p,
                           const EstParams& e, GeneratorMode mode) {
    require_interior_z(s);
    const VectorField3 a = drift_actual(s.actual, u, p);
    const VectorField3 ah = drift_estimate(s, u, p, e);
    const VectorField3 g = diffusion_actual(s.actual, p);
    const VectorField3 gh = diffusion_estimate(s.estimate, e);
    const double z = s.actual.z, zh = s.estimate.z;

    if (mode == GeneratorMode::Analytic) {
        // V depends on (z, zhat) only; exact partials of sqrt(1-z):
        //   dV/dz = -1/2 (1-z)^{-1/2},  d2V/dz2 = -1/4 (1-z)^{-3/2},
        // and the mixed partial vanishes, so the shared noise contributes no
        // cross term even though dW is common to both components.
        const double vz = -0.5 / std::sqrt(1.0 - z);
        const double vzh = -0.5 / std::sqrt(1.0 - zh);
        const double vzz = -0.25 / std::pow(1.0 - z, 1.5);
        const double vzhzh = -0.25 / std::pow(1.0 - zh, 1.5);
        return a.dz * vz + ah.dz * vzh + 0.5 * (g.dz * g.dz * vzz + gh.dz * gh.dz * vzhzh);
    }

    // Finite differences in (z, zhat), including the mixed term.
    const double h = 1e-4;
    auto f = [&](double dz, double dzh) { return excited_V(z + dz, zh + dzh); };
    const double vz = (f(h, 0) - f(-h, 0)) / (2 * h);
    const double vzh = (f(0, h) - f(0, -h)) / (2 * h);
    const double vzz = (f(h, 0) - 2 * f(0, 0) + f(-h, 0)) / (h * h);
    const double vzhzh = (f(0, h) - 2 * f(0, 0) + f(0, -h)) / (h * h);
    const double vzzh =
        (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4 * h * h);
    return a.dz * vz + ah.dz * vzh +
           0.5 * (g.dz * g.dz * vzz + 2.0 * g.dz * gh.dz * vzzh + gh.dz * gh.dz * vzhzh);
}

double nu_av(const PhysParams& p, const EstParams& e) {
    return -std::sqrt(e.eta_hat * p.eta * e.M_hat * p.M) + 0.5 * e.eta_hat * e.M_hat;
}

double nu_s(const PhysParams& p, const EstParams& e) {
    return -std::sqrt(e.eta_hat * p.eta * e.M_hat * p.M) -
           0.5 * std::min(p.eta * p.M - e.eta_hat * e.M_hat, 0.0);
}

double nu_s_alt(const PhysParams& p, const EstParams& e) {
    return -std::sqrt(e.eta_hat * p.eta * e.M_hat * p.M);
}

double nu_av_alt(const PhysParams& p, const EstParams& e) {
    return -std::sqrt(e.eta_hat * p.eta * e.M_hat * p.M) + 0.5 * p.eta * p.M;
}

double k_bound(const PhysParams& p, const EstParams& e) {
    return std::min(p.eta * p.M, e.eta_hat * e.M_hat);
}

ExponentReport estimate_sample_exponent(const std::vector<double>& times,
                                        const std::vector<double>& V,
                                        double t_start, double t_end) {
    if (times.size() != V.size())
        throw estimation_error("times and V have different lengths");
    if (!(t_start < t_end)) throw estimation_error("empty fit window");

    std::vector<double> ts, ys;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < t_start - 1e-12 || times[i] > t_end + 1e-12) continue;
        if (V[i] < kLyapunovFloor) break; // stop at the first vanishing sample
        ts.push_back(times[i]);
        ys.push_back(std::log(V[i]));
    }
    if (ts.size() < 3)
        throw estimation_error("fewer than 3 usable samples in the fit window");

    const auto n = static_cast<double>(ts.size());
    double mt = 0, my = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        mt += ts[i];
        my += ys[i];
    }
    mt /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        double dx = ts[i] - mt, dy = ys[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    ExponentReport rep;
    rep.slope = sxy / sxx;
    rep.intercept = my - rep.slope * mt;
    rep.t_start = ts.front();
    rep.t_end = ts.back();
    rep.n_points = ts.size();
    double ss_res = syy - rep.slope * sxy;
    rep.r_squared = syy > 1e-30 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    return rep;
}

ExponentReport estimate_sample_exponent(const Trajectory& traj, double t_start,
                                        double t_end) {
    return estimate_sample_exponent(traj.times, traj.lyapunov, t_start, t_end);
}

ExponentReport estimate_sample_exponent(const Trajectory& traj) {
    if (traj.times.empty()) throw estimation_error("empty trajectory");
    auto [t0, t1] = default_fit_window(traj.times.back());
    return estimate_sample_exponent(traj, t0, t1);
}

std::pair<double, double> default_fit_window(double t_final) {
    return {0.2 * t_final, t_final};
}

} // namespace qsme
