#include "qsme/dynamics.hpp"

#include <cmath>

#include "qsme/errors.hpp"

namespace qsme {

void validate(const PhysParams& p) {
    if (!(p.omega >= 0.0) || !std::isfinite(p.omega))
        throw config_error("omega must be finite and >= 0");
    if (!(p.eta > 0.0 && p.eta <= 1.0)) throw config_error("eta must be in (0,1]");
    if (!(p.M > 0.0) || !std::isfinite(p.M)) throw config_error("M must be > 0");
}

void validate(const EstParams& e) {
    if (!(e.omega_hat >= 0.0) || !std::isfinite(e.omega_hat))
        throw config_error("omega_hat must be finite and >= 0");
    if (!(e.eta_hat > 0.0 && e.eta_hat <= 1.0))
        throw config_error("eta_hat must be in (0,1]");
    if (!(e.M_hat > 0.0) || !std::isfinite(e.M_hat))
        throw config_error("M_hat must be > 0");
}

double innovation_factor(double z, double z_hat, const PhysParams& p, const EstParams& e) {
    double se = std::sqrt(e.eta_hat * e.M_hat);
    double sp = std::sqrt(p.eta * p.M);
    return se * (se * z_hat - sp * z);
}

VectorField3 drift_actual(const BlochVector& b, double u, const PhysParams& p) {
    return VectorField3{
        -p.omega * b.y - 0.5 * p.M * b.x + u * b.z,
        p.omega * b.x - 0.5 * p.M * b.y,
        -u * b.x,
    };
}

VectorField3 diffusion_actual(const BlochVector& b, const PhysParams& p) {
    double s = std::sqrt(p.eta * p.M);
    return VectorField3{
        -s * b.x * b.z,
        -s * b.y * b.z,
        s * (1.0 - b.z * b.z),
    };
}

VectorField3 drift_estimate(const CoupledState& s, double u, const PhysParams& p,
                            const EstParams& e) {
    const BlochVector& h = s.estimate;
    double E = innovation_factor(s.actual.z, h.z, p, e);
    return VectorField3{
        -e.omega_hat * h.y - 0.5 * e.M_hat * h.x + u * h.z + h.x * h.z * E,
        e.omega_hat * h.x - 0.5 * e.M_hat * h.y + h.y * h.z * E,
        -u * h.x - (1.0 - h.z * h.z) * E,
    };
}

VectorField3 diffusion_estimate(const BlochVector& b_hat, const EstParams& e) {
    double s = std::sqrt(e.eta_hat * e.M_hat);
    return VectorField3{
        -s * b_hat.x * b_hat.z,
        -s * b_hat.y * b_hat.z,
        s * (1.0 - b_hat.z * b_hat.z),
    };
}

namespace {

using cd = std::complex<double>;

Matrix2c commutator_i_half(const Matrix2c& h, const DensityMatrix& rho) {
    // -i/2 (h rho - rho h)
    cd a00 = h.m00 * rho.m00 + h.m01 * rho.m10 - (rho.m00 * h.m00 + rho.m01 * h.m10);
    cd a01 = h.m00 * rho.m01 + h.m01 * rho.m11 - (rho.m00 * h.m01 + rho.m01 * h.m11);
    cd a10 = h.m10 * rho.m00 + h.m11 * rho.m10 - (rho.m10 * h.m00 + rho.m11 * h.m10);
    cd a11 = h.m10 * rho.m01 + h.m11 * rho.m11 - (rho.m10 * h.m01 + rho.m11 * h.m11);
    cd f{0.0, -0.5};
    return Matrix2c{f * a00, f * a01, f * a10, f * a11};
}

} // namespace

Matrix2c superoperator_L(const DensityMatrix& rho, double u, const PhysParams& p) {
    // H = omega sz + u sy with sz = diag(1,-1), sy = [[0,-i],[i,0]].
    Matrix2c H{cd{p.omega, 0.0}, cd{0.0, -u}, cd{0.0, u}, cd{-p.omega, 0.0}};
    Matrix2c c = commutator_i_half(H, rho);
    // M/4 (sz rho sz - rho): conjugation by sz flips the sign of the
    // off-diagonal entries.
    double q = 0.25 * p.M;
    return Matrix2c{
        c.m00,
        c.m01 + q * (-2.0 * rho.m01),
        c.m10 + q * (-2.0 * rho.m10),
        c.m11,
    };
}

Matrix2c superoperator_G(const DensityMatrix& rho, const PhysParams& p) {
    double s = std::sqrt(p.eta * p.M);
    double z = (rho.m00 - rho.m11).real(); // tr(sz rho)
    // sz rho + rho sz = diag(2 rho00, -2 rho11); the off-diagonals cancel.
    return Matrix2c{
        s * (1.0 - z) * rho.m00,
        s * (-z) * rho.m01,
        s * (-z) * rho.m10,
        s * (-(1.0 + z)) * rho.m11,
    };
}

VectorField3 pauli_components(const Matrix2c& a) {
    // tr(sx a) = a01 + a10; tr(sy a) = i(a01 - a10); tr(sz a) = a00 - a11.
    cd tx = a.m01 + a.m10;
    cd ty = cd{0.0, 1.0} * (a.m01 - a.m10);
    cd tz = a.m00 - a.m11;
    return VectorField3{tx.real(), ty.real(), tz.real()};
}

} // namespace qsme
