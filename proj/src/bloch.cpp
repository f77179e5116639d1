#include "qsme/bloch.hpp"

#include <algorithm>
#include <cmath>

#include "qsme/errors.hpp"

namespace qsme {

Target target_from_string(const std::string& s) {
    if (s == "excited") return Target::Excited;
    if (s == "ground") return Target::Ground;
    throw config_error("target must be \"excited\" or \"ground\", got \"" + s + "\"");
}

std::string to_string(Target t) {
    return t == Target::Excited ? "excited" : "ground";
}

DensityMatrix bloch_to_density(const BlochVector& r) {
    if (!r.in_ball())
        throw config_error("Bloch vector outside the unit ball: |r|^2 = " +
                           std::to_string(r.norm2()));
    // rho = 1/2 (I + x sx + y sy + z sz), basis ordered so tr(sz rho) = z
    // and the Excited projector sits at z = +1.
    return DensityMatrix{
        {0.5 * (1.0 + r.z), 0.0},
        {0.5 * r.x, -0.5 * r.y},
        {0.5 * r.x, 0.5 * r.y},
        {0.5 * (1.0 - r.z), 0.0},
    };
}

namespace {

void check_physical(const DensityMatrix& rho) {
    constexpr double tol = 1e-12;
    if (std::abs(rho.m00.imag()) > tol || std::abs(rho.m11.imag()) > tol)
        throw config_error("density matrix has complex diagonal");
    if (std::abs(rho.m00.real() + rho.m11.real() - 1.0) > tol)
        throw config_error("density matrix trace != 1");
    if (std::abs(rho.m10 - std::conj(rho.m01)) > tol)
        throw config_error("density matrix not Hermitian");
    // Eigenvalues of a Hermitian 2x2 with trace 1: 1/2 +- sqrt(D).
    double tr = rho.m00.real() + rho.m11.real();
    double det = (rho.m00 * rho.m11 - rho.m01 * rho.m10).real();
    double disc = std::max(0.0, 0.25 * tr * tr - det);
    if (0.5 * tr - std::sqrt(disc) < -tol)
        throw config_error("density matrix has a negative eigenvalue");
}

double det_real(const DensityMatrix& rho) {
    return (rho.m00 * rho.m11 - rho.m01 * rho.m10).real();
}

} // namespace

BlochVector density_to_bloch(const DensityMatrix& rho) {
    check_physical(rho);
    return BlochVector{
        2.0 * rho.m01.real(),
        2.0 * rho.m10.imag(),
        rho.m00.real() - rho.m11.real(),
    };
}

BlochVector target_bloch(Target t) {
    return BlochVector{0.0, 0.0, target_pole(t)};
}

DensityMatrix target_density(Target t) {
    return bloch_to_density(target_bloch(t));
}

double fidelity(const DensityMatrix& a, const DensityMatrix& b) {
    double tr_ab = (a.m00 * b.m00 + a.m01 * b.m10 + a.m10 * b.m01 + a.m11 * b.m11).real();
    double da = std::max(0.0, det_real(a));
    double db = std::max(0.0, det_real(b));
    return std::clamp(tr_ab + 2.0 * std::sqrt(da * db), 0.0, 1.0);
}

double fidelity(const BlochVector& a, const BlochVector& b) {
    // tr(rho_a rho_b) = (1 + a.b)/2, det rho = (1 - |r|^2)/4.
    double dot = a.x * b.x + a.y * b.y + a.z * b.z;
    double da = std::max(0.0, 1.0 - a.norm2());
    double db = std::max(0.0, 1.0 - b.norm2());
    return std::clamp(0.5 * (1.0 + dot + std::sqrt(da * db)), 0.0, 1.0);
}

double bures_distance(const BlochVector& a, const BlochVector& b) {
    double f = fidelity(a, b);
    return std::sqrt(std::max(0.0, 2.0 - 2.0 * std::sqrt(f)));
}

double bures_to_target(const BlochVector& a, Target t) {
    return bures_distance(a, target_bloch(t));
}

double coupled_distance(const CoupledState& a, const CoupledState& b) {
    return bures_distance(a.actual, b.actual) + bures_distance(a.estimate, b.estimate);
}

double coupled_distance_to_target(const CoupledState& s, Target t) {
    return bures_to_target(s.actual, t) + bures_to_target(s.estimate, t);
}

} // namespace qsme
