#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <vector>

#include "qsme/analysis.hpp"
#include "qsme/errors.hpp"
#include "qsme/integrator.hpp"
#include "qsme/rng.hpp"

using namespace qsme;

namespace {

const PhysParams kPhys{0.3, 0.3, 1.3};
const EstParams kEst{0.5, 0.5, 1.5};
const CoupledState kIc{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}};

SdeConfig make_cfg(double dt, double t_final, std::int64_t stride, std::uint64_t seed) {
    SdeConfig cfg;
    cfg.dt = dt;
    cfg.t_final = t_final;
    cfg.record_stride = stride;
    cfg.seed = seed;
    return cfg;
}

double state_gap(const CoupledState& a, const CoupledState& b) {
    auto d = [](const BlochVector& p, const BlochVector& q) {
        return std::abs(p.x - q.x) + std::abs(p.y - q.y) + std::abs(p.z - q.z);
    };
    return d(a.actual, b.actual) + d(a.estimate, b.estimate);
}

} // namespace

TEST_CASE("config validation") {
    CHECK_NOTHROW(validate(make_cfg(1e-3, 10.0, 10, 0)));
    CHECK_NOTHROW(validate(make_cfg(1e-3, 0.0, 10, 0))); // t_final = 0 is a single record
    CHECK_THROWS_AS(validate(make_cfg(0.0, 10.0, 10, 0)), config_error);
    CHECK_THROWS_AS(validate(make_cfg(-1e-3, 10.0, 10, 0)), config_error);
    CHECK_THROWS_AS(validate(make_cfg(1e-3, -1.0, 10, 0)), config_error);
    CHECK_THROWS_AS(validate(make_cfg(0.5, 0.1, 10, 0)), config_error);
    CHECK_THROWS_AS(validate(make_cfg(1e-3, 10.0, 0, 0)), config_error);
}

TEST_CASE("n_steps requires a commensurate grid") {
    CHECK(n_steps(make_cfg(1e-3, 10.0, 10, 0)) == 10000);
    CHECK(n_steps(make_cfg(0.25, 1.0, 1, 0)) == 4);
    CHECK(n_steps(make_cfg(1e-3, 0.0, 10, 0)) == 0);
    CHECK_THROWS_AS(n_steps(make_cfg(0.0015, 0.01, 1, 0)), config_error);
}

TEST_CASE("radial projection clips only outside the ball") {
    BlochVector out = project(BlochVector{0.0, 1.2, 1.6});
    CHECK(out.x == doctest::Approx(0.0));
    CHECK(out.y == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(out.z == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(out.norm2() == doctest::Approx(1.0).epsilon(1e-14));

    BlochVector in{0.1, -0.2, 0.3};
    BlochVector same = project(in);
    CHECK(same.x == in.x);
    CHECK(same.y == in.y);
    CHECK(same.z == in.z);
}

TEST_CASE("frozen Euler-Maruyama step, driftless noise off") {
    CoupledState s1 = step(kIc, 0.0, 0.0, 1e-3, kPhys, kEst);
    CHECK(s1.actual.x == doctest::Approx(0.99935).epsilon(1e-15));
    CHECK(s1.actual.y == doctest::Approx(0.0003).epsilon(1e-15));
    CHECK(s1.actual.z == doctest::Approx(0.0));
    CHECK(s1.estimate.x == doctest::Approx(-0.0005).epsilon(1e-15));
    CHECK(s1.estimate.y == doctest::Approx(0.99925).epsilon(1e-15));
    CHECK(s1.estimate.z == doctest::Approx(0.0));
}

TEST_CASE("frozen Euler-Maruyama step with shared noise increment") {
    CoupledState s1 = step(kIc, 0.0, 0.02, 1e-3, kPhys, kEst);
    // both components move along z with their own diffusion scale, same dW
    CHECK(s1.actual.z == doctest::Approx(0.012489995996796796).epsilon(1e-15));
    CHECK(s1.estimate.z == doctest::Approx(0.017320508075688773).epsilon(1e-15));
    CHECK(s1.actual.x == doctest::Approx(0.99935).epsilon(1e-15));
    CHECK(s1.estimate.y == doctest::Approx(0.99925).epsilon(1e-15));
}

TEST_CASE("target pole pair is an exact equilibrium under the power law") {
    CoupledState pole{{0.0, 0.0, 1.0}, {0.0, 0.0, 1.0}};
    FeedbackLaw law = FeedbackLaw::power(Target::Excited, 10.0, 2.0);
    Trajectory traj = simulate(pole, kPhys, kEst, law, make_cfg(1e-3, 1.0, 100, 5));
    for (const CoupledState& s : traj.states) {
        CHECK(s.actual.z == 1.0);
        CHECK(s.actual.x == 0.0);
        CHECK(s.estimate.z == 1.0);
    }
    for (double u : traj.controls) CHECK(u == 0.0);
    for (double v : traj.lyapunov) CHECK(v == 0.0);
}

TEST_CASE("simulation is bit-reproducible for a fixed seed") {
    FeedbackLaw law = FeedbackLaw::power(Target::Excited, 10.0, 2.0);
    SdeConfig cfg = make_cfg(1e-3, 2.0, 10, 77);
    Trajectory a = simulate(kIc, kPhys, kEst, law, cfg);
    Trajectory b = simulate(kIc, kPhys, kEst, law, cfg);
    REQUIRE(a.states.size() == b.states.size());
    CHECK(a.noise_seed == 77);
    for (std::size_t i = 0; i < a.states.size(); ++i) {
        CHECK(state_gap(a.states[i], b.states[i]) == 0.0);
        CHECK(a.controls[i] == b.controls[i]);
        CHECK(a.lyapunov[i] == b.lyapunov[i]);
    }

    cfg.seed = 78;
    Trajectory c = simulate(kIc, kPhys, kEst, law, cfg);
    CHECK(state_gap(a.states.back(), c.states.back()) > 0.0);
}

TEST_CASE("simulate and simulate_with_noise agree on the same increments") {
    FeedbackLaw law = FeedbackLaw::power(Target::Excited, 10.0, 2.0);
    SdeConfig cfg = make_cfg(1e-3, 1.0, 10, 31);

    rng::GaussianStream stream(cfg.seed);
    std::vector<double> dW(static_cast<std::size_t>(n_steps(cfg)));
    for (double& w : dW) w = std::sqrt(cfg.dt) * stream.normal();

    Trajectory direct = simulate(kIc, kPhys, kEst, law, cfg);
    Trajectory replay = simulate_with_noise(kIc, kPhys, kEst, law, cfg, dW);
    REQUIRE(direct.states.size() == replay.states.size());
    for (std::size_t i = 0; i < direct.states.size(); ++i)
        CHECK(state_gap(direct.states[i], replay.states[i]) == 0.0);
}

TEST_CASE("noise sequence shorter than the grid is rejected") {
    FeedbackLaw law = FeedbackLaw::zero(Target::Excited);
    std::vector<double> dW(5, 0.0);
    CHECK_THROWS_AS(
        simulate_with_noise(kIc, kPhys, kEst, law, make_cfg(1e-3, 1.0, 10, 0), dW),
        config_error);
}

TEST_CASE("recording grid and stride divisibility") {
    FeedbackLaw law = FeedbackLaw::zero(Target::Excited);
    Trajectory traj = simulate(kIc, kPhys, kEst, law, make_cfg(1e-3, 1.0, 100, 3));
    REQUIRE(traj.times.size() == 11);
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        CHECK(traj.times[i] == doctest::Approx(0.1 * static_cast<double>(i)).epsilon(1e-12));

    CHECK_THROWS_AS(simulate(kIc, kPhys, kEst, law, make_cfg(1e-3, 1.0, 7, 0)),
                    config_error);
}

TEST_CASE("t_final = 0 yields the single initial record") {
    FeedbackLaw law = FeedbackLaw::power(Target::Excited, 10.0, 2.0);
    Trajectory traj = simulate(kIc, kPhys, kEst, law, make_cfg(1e-3, 0.0, 10, 0));
    REQUIRE(traj.times.size() == 1);
    CHECK(traj.times[0] == 0.0);
    CHECK(state_gap(traj.states[0], kIc) == 0.0);
    CHECK(traj.controls[0] == doctest::Approx(2.5));
}

TEST_CASE("recorded states stay physical and records are self-consistent") {
    FeedbackLaw law = FeedbackLaw::power(Target::Excited, 10.0, 2.0);
    Trajectory traj = simulate(kIc, kPhys, kEst, law, make_cfg(1e-3, 5.0, 10, 1));
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const CoupledState& s = traj.states[i];
        CHECK(s.actual.norm2() <= 1.0 + 1e-12);
        CHECK(s.estimate.norm2() <= 1.0 + 1e-12);
        CHECK(traj.controls[i] == feedback_u(law, s.estimate));
        CHECK(traj.lyapunov[i] == lyapunov_V(s, law.target));
        CHECK(traj.controls[i] >= 0.0);
        CHECK(traj.controls[i] <= 10.0);
    }
}

TEST_CASE("ill-conditioned ic is rejected") {
    FeedbackLaw law = FeedbackLaw::zero(Target::Excited);
    CoupledState outside{{1.1, 0.0, 0.0}, {0.0, 0.0, 0.0}};
    CHECK_THROWS_AS(simulate(outside, kPhys, kEst, law, make_cfg(1e-3, 1.0, 10, 0)),
                    config_error);
}

TEST_CASE("blowup raises integration_error with step and time") {
    // unbounded custom control and no projection drive the state to inf
    FeedbackLaw wild = FeedbackLaw::custom_law(
        Target::Excited, [](const BlochVector&) { return 1e308; }, "wild");
    SdeConfig cfg = make_cfg(0.5, 2.0, 1, 0);
    cfg.projection = Projection::None;
    try {
        simulate(kIc, kPhys, kEst, wild, cfg);
        FAIL("expected integration_error");
    } catch (const integration_error& err) {
        CHECK(err.step_index >= 1);
        CHECK(err.step_index <= 4);
        CHECK(err.time == doctest::Approx(0.5 * static_cast<double>(err.step_index)));
    }
}

TEST_CASE("strong refinement: halving dt shrinks the pathwise gap") {
    FeedbackLaw law = FeedbackLaw::power(Target::Excited, 10.0, 2.0);
    const double t_final = 1.0;
    const double dt_fine = 0.0025;
    const int n_fine = 400;
    double err_coarse = 0.0, err_mid = 0.0;

    for (int path = 0; path < 20; ++path) {
        rng::GaussianStream stream(rng::derive_seed(2026, 2, static_cast<std::uint64_t>(path)));
        std::vector<double> fine(n_fine), mid(n_fine / 2), coarse(n_fine / 4);
        for (double& w : fine) w = std::sqrt(dt_fine) * stream.normal();
        for (int i = 0; i < n_fine / 2; ++i) mid[i] = fine[2 * i] + fine[2 * i + 1];
        for (int i = 0; i < n_fine / 4; ++i) coarse[i] = mid[2 * i] + mid[2 * i + 1];

        Trajectory tf = simulate_with_noise(kIc, kPhys, kEst, law,
                                            make_cfg(dt_fine, t_final, n_fine, 0), fine);
        Trajectory tm = simulate_with_noise(kIc, kPhys, kEst, law,
                                            make_cfg(2 * dt_fine, t_final, n_fine / 2, 0), mid);
        Trajectory tc = simulate_with_noise(kIc, kPhys, kEst, law,
                                            make_cfg(4 * dt_fine, t_final, n_fine / 4, 0), coarse);
        err_coarse += state_gap(tc.states.back(), tf.states.back());
        err_mid += state_gap(tm.states.back(), tf.states.back());
    }
    CHECK(err_mid < err_coarse);
    CHECK(err_coarse / 20.0 < 0.2);
}
