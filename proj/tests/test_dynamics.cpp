#include "doctest.h"

#include <cmath>

#include "qsme/dynamics.hpp"
#include "qsme/errors.hpp"
#include "qsme/rng.hpp"

using namespace qsme;

namespace {

const PhysParams kPhys{0.3, 0.3, 1.3};
const EstParams kEst{0.5, 0.5, 1.5};

BlochVector random_in_ball(rng::Xoshiro256pp& gen) {
    for (;;) {
        BlochVector b{2.0 * rng::uniform01(gen) - 1.0, 2.0 * rng::uniform01(gen) - 1.0,
                      2.0 * rng::uniform01(gen) - 1.0};
        if (b.norm2() <= 1.0) return b;
    }
}

void check_field(const VectorField3& got, double ex, double ey, double ez,
                 double tol = 1e-14) {
    CHECK(got.dx == doctest::Approx(ex).epsilon(tol));
    CHECK(got.dy == doctest::Approx(ey).epsilon(tol));
    CHECK(got.dz == doctest::Approx(ez).epsilon(tol));
}

} // namespace

TEST_CASE("parameter validation names the offending field") {
    CHECK_NOTHROW(validate(kPhys));
    CHECK_NOTHROW(validate(kEst));
    CHECK_NOTHROW(validate(PhysParams{0.0, 1.0, 0.1})); // omega = 0, eta = 1 allowed

    CHECK_THROWS_AS(validate(PhysParams{-0.1, 0.3, 1.3}), config_error);
    CHECK_THROWS_AS(validate(PhysParams{0.3, 0.0, 1.3}), config_error);
    CHECK_THROWS_AS(validate(PhysParams{0.3, 1.1, 1.3}), config_error);
    CHECK_THROWS_AS(validate(PhysParams{0.3, 0.3, 0.0}), config_error);
    CHECK_THROWS_AS(validate(EstParams{-1.0, 0.5, 1.5}), config_error);
    CHECK_THROWS_AS(validate(EstParams{0.5, -0.5, 1.5}), config_error);
    CHECK_THROWS_AS(validate(EstParams{0.5, 0.5, -1.5}), config_error);

    try {
        validate(PhysParams{0.3, 2.0, 1.3});
        FAIL("expected config_error");
    } catch (const config_error& err) {
        CHECK(std::string(err.what()).find("eta") != std::string::npos);
    }
}

TEST_CASE("innovation factor reference values") {
    // E(z, zhat) = sqrt(etah Mh) (sqrt(etah Mh) zhat - sqrt(eta M) z)
    CHECK(innovation_factor(-1.0, 1.0, kPhys, kEst) ==
          doctest::Approx(1.2908326913195982).epsilon(1e-14));
    CHECK(innovation_factor(0.0, 0.0, kPhys, kEst) == doctest::Approx(0.0));
    // matched parameters and matched state: innovation vanishes identically
    PhysParams same{0.3, 0.3, 1.3};
    EstParams hat_same{0.3, 0.3, 1.3};
    for (double z : {-1.0, -0.4, 0.0, 0.7, 1.0})
        CHECK(innovation_factor(z, z, same, hat_same) == 0.0);
}

TEST_CASE("actual drift and diffusion reference values") {
    check_field(drift_actual(BlochVector{1.0, 0.0, 0.0}, 0.0, kPhys), -0.65, 0.3, 0.0);
    check_field(diffusion_actual(BlochVector{1.0, 0.0, 0.0}, kPhys), 0.0, 0.0,
                0.6244997998398398);
    check_field(diffusion_actual(BlochVector{0.5, 0.0, 0.5}, kPhys),
                -0.15612494995995996, 0.0, 0.4683748498798799);
}

TEST_CASE("filter drift reference values") {
    check_field(drift_estimate(CoupledState{{0.0, 0.0, -1.0}, {0.0, 1.0, 0.0}}, 0.0,
                               kPhys, kEst),
                -0.5, -0.75, -0.5408326913195983);
    check_field(drift_estimate(CoupledState{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}}, 0.0,
                               kPhys, kEst),
                -0.5, -0.75, 0.0);
    check_field(drift_estimate(CoupledState{{0.3, -0.2, 0.4}, {0.1, 0.5, -0.6}}, 2.5,
                               kPhys, kEst),
                -1.7850200154083296, -0.12510007704164822, 0.1764531689778172);
}

TEST_CASE("filter diffusion has the actual form with hatted parameters") {
    rng::Xoshiro256pp gen(rng::derive_seed(42, 2, 10));
    PhysParams as_phys{kEst.omega_hat, kEst.eta_hat, kEst.M_hat};
    for (int i = 0; i < 1000; ++i) {
        BlochVector b = random_in_ball(gen);
        VectorField3 de = diffusion_estimate(b, kEst);
        VectorField3 da = diffusion_actual(b, as_phys);
        CHECK(de.dx == da.dx);
        CHECK(de.dy == da.dy);
        CHECK(de.dz == da.dz);
    }
}

TEST_CASE("poles are equilibria of the uncontrolled actual dynamics") {
    for (double pole : {1.0, -1.0}) {
        check_field(drift_actual(BlochVector{0.0, 0.0, pole}, 0.0, kPhys), 0.0, 0.0, 0.0);
        check_field(diffusion_actual(BlochVector{0.0, 0.0, pole}, kPhys), 0.0, 0.0, 0.0);
    }
}

TEST_CASE("matched filter at the true state reduces exactly to the actual drift") {
    EstParams matched{kPhys.omega, kPhys.eta, kPhys.M};
    rng::Xoshiro256pp gen(rng::derive_seed(42, 2, 11));
    for (int i = 0; i < 2000; ++i) {
        BlochVector b = random_in_ball(gen);
        double u = 20.0 * (rng::uniform01(gen) - 0.5);
        VectorField3 da = drift_actual(b, u, kPhys);
        VectorField3 de = drift_estimate(CoupledState{b, b}, u, kPhys, matched);
        // bit-for-bit: innovation is exactly zero and base terms share order
        CHECK(de.dx == da.dx);
        CHECK(de.dy == da.dy);
        CHECK(de.dz == da.dz);
    }
}

TEST_CASE("superoperators are trace-free and match the Bloch fields") {
    rng::Xoshiro256pp gen(rng::derive_seed(42, 2, 12));
    for (int i = 0; i < 10000; ++i) {
        BlochVector b = random_in_ball(gen);
        double u = 20.0 * (rng::uniform01(gen) - 0.5);
        DensityMatrix rho = bloch_to_density(b);

        Matrix2c lr = superoperator_L(rho, u, kPhys);
        Matrix2c gr = superoperator_G(rho, kPhys);
        CHECK(std::abs(lr.m00 + lr.m11) < 1e-13);
        CHECK(std::abs(gr.m00 + gr.m11) < 1e-13);

        VectorField3 lb = pauli_components(lr);
        VectorField3 da = drift_actual(b, u, kPhys);
        CHECK(std::abs(lb.dx - da.dx) < 1e-12);
        CHECK(std::abs(lb.dy - da.dy) < 1e-12);
        CHECK(std::abs(lb.dz - da.dz) < 1e-12);

        VectorField3 gb = pauli_components(gr);
        VectorField3 db = diffusion_actual(b, kPhys);
        CHECK(std::abs(gb.dx - db.dx) < 1e-12);
        CHECK(std::abs(gb.dy - db.dy) < 1e-12);
        CHECK(std::abs(gb.dz - db.dz) < 1e-12);
    }
}

TEST_CASE("back-action G reference images") {
    PhysParams unit{0.0, 1.0, 1.0};
    VectorField3 g = pauli_components(
        superoperator_G(bloch_to_density(BlochVector{0.0, 0.0, 0.5}), unit));
    check_field(g, 0.0, 0.0, 0.75);
    VectorField3 g0 = pauli_components(superoperator_G(bloch_to_density(BlochVector{}), kPhys));
    check_field(g0, 0.0, 0.0, 0.6244997998398398);
}

TEST_CASE("superoperator L preserves Hermiticity") {
    rng::Xoshiro256pp gen(rng::derive_seed(42, 2, 13));
    for (int i = 0; i < 1000; ++i) {
        BlochVector b = random_in_ball(gen);
        Matrix2c lr = superoperator_L(bloch_to_density(b), 3.0, kPhys);
        CHECK(std::abs(lr.m10 - std::conj(lr.m01)) < 1e-13);
        CHECK(std::abs(lr.m00.imag()) < 1e-13);
        CHECK(std::abs(lr.m11.imag()) < 1e-13);
    }
}
