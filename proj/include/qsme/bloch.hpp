#pragma once

// Qubit state representations and metrics. States live in the closed Bloch
// ball; the coupled state carries the actual system and the filter estimate
// side by side. Convention: target Excited is z = +1 (projector diag(1,0)),
// Ground is z = -1.

#include <array>
#include <complex>
#include <string>

namespace qsme {

inline constexpr double kBallSlack = 1e-12;

enum class Target { Excited, Ground };

Target target_from_string(const std::string& s);       // "excited" | "ground"
std::string to_string(Target t);

// z-coordinate of the target pole: +1 for Excited, -1 for Ground.
inline double target_pole(Target t) { return t == Target::Excited ? 1.0 : -1.0; }

struct BlochVector {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double norm2() const { return x * x + y * y + z * z; }
    bool in_ball(double slack = kBallSlack) const { return norm2() <= 1.0 + slack; }
};

// Hermitian 2x2 density matrix, row-major.
struct DensityMatrix {
    std::complex<double> m00, m01, m10, m11;
};

DensityMatrix bloch_to_density(const BlochVector& r);
BlochVector density_to_bloch(const DensityMatrix& rho);

// Pure target states.
BlochVector target_bloch(Target t);
DensityMatrix target_density(Target t);

// Uhlmann fidelity (squared convention): F = tr(r1 r2) + 2 sqrt(det r1 det r2).
double fidelity(const DensityMatrix& a, const DensityMatrix& b);
double fidelity(const BlochVector& a, const BlochVector& b);

// Bures distance d_B = sqrt(2 - 2 sqrt(F)).
double bures_distance(const BlochVector& a, const BlochVector& b);
double bures_to_target(const BlochVector& a, Target t);

struct CoupledState {
    BlochVector actual;
    BlochVector estimate;

    bool in_ball(double slack = kBallSlack) const {
        return actual.in_ball(slack) && estimate.in_ball(slack);
    }
};

// Product-space distance: sum of the component Bures distances.
double coupled_distance(const CoupledState& a, const CoupledState& b);
double coupled_distance_to_target(const CoupledState& s, Target t);

} // namespace qsme
