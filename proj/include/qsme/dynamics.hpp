#pragma once

// Vector fields of the coupled stochastic master equations in Bloch
// coordinates, plus the density-matrix superoperators they come from.
// The filter is driven by the same Wiener increment as the actual system;
// its drift sees the actual state only through the innovation factor
//   E(z, zhat) = sqrt(eta_hat M_hat) (sqrt(eta_hat M_hat) zhat - sqrt(eta M) z).

#include <complex>

#include "qsme/bloch.hpp"

namespace qsme {

// Actual-system physical parameters.
struct PhysParams {
    double omega = 0.0; // detuning, >= 0
    double eta = 0.0;   // measurement efficiency, (0,1]
    double M = 0.0;     // measurement strength, > 0
};

// Filter (design) parameters; may differ from the actual ones.
struct EstParams {
    double omega_hat = 0.0;
    double eta_hat = 0.0;
    double M_hat = 0.0;
};

void validate(const PhysParams& p);
void validate(const EstParams& e);

struct VectorField3 {
    double dx = 0.0;
    double dy = 0.0;
    double dz = 0.0;
};

double innovation_factor(double z, double z_hat, const PhysParams& p, const EstParams& e);

// Bloch-coordinate fields. u is the scalar feedback amplitude, constant over
// a step.
VectorField3 drift_actual(const BlochVector& b, double u, const PhysParams& p);
VectorField3 diffusion_actual(const BlochVector& b, const PhysParams& p);
VectorField3 drift_estimate(const CoupledState& s, double u, const PhysParams& p,
                            const EstParams& e);
VectorField3 diffusion_estimate(const BlochVector& b_hat, const EstParams& e);

// 2x2 complex matrix, row-major; used for superoperator cross-checks.
struct Matrix2c {
    std::complex<double> m00, m01, m10, m11;
};

// Lindblad-plus-control generator L^u(rho) built from (p.omega, p.M).
Matrix2c superoperator_L(const DensityMatrix& rho, double u, const PhysParams& p);
// Measurement back-action G(rho) built from (p.eta, p.M).
Matrix2c superoperator_G(const DensityMatrix& rho, const PhysParams& p);

// Bloch components (tr(sigma_x A), tr(sigma_y A), tr(sigma_z A)) of a
// traceless Hermitian matrix.
VectorField3 pauli_components(const Matrix2c& a);

} // namespace qsme
