#include "qsme/controller.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "qsme/errors.hpp"
#include "qsme/rng.hpp"

namespace qsme {

FeedbackLaw FeedbackLaw::power(Target t, double alpha, double beta) {
    if (!(alpha > 0.0)) throw config_error("alpha must be > 0");
    if (!(beta >= 1.0)) throw config_error("beta must be >= 1");
    FeedbackLaw law;
    law.target = t;
    law.alpha = alpha;
    law.beta = beta;
    law.kind = LawKind::Power;
    return law;
}

FeedbackLaw FeedbackLaw::zero(Target t) {
    FeedbackLaw law;
    law.target = t;
    law.kind = LawKind::Zero;
    return law;
}

FeedbackLaw FeedbackLaw::custom_law(Target t, std::function<double(const BlochVector&)> fn,
                                    std::string tag) {
    FeedbackLaw law;
    law.target = t;
    law.kind = LawKind::Custom;
    law.custom = std::move(fn);
    law.tag = std::move(tag);
    return law;
}

namespace {

// (1 -+ zhat)/2: the overlap deficit 1 - tr(rho_hat rho_target), computed in
// Bloch form without building matrices.
double deficit(Target t, double z_hat) {
    return t == Target::Excited ? 0.5 * (1.0 - z_hat) : 0.5 * (1.0 + z_hat);
}

} // namespace

double feedback_u(const FeedbackLaw& law, const BlochVector& b_hat) {
    switch (law.kind) {
        case LawKind::Zero:
            return 0.0;
        case LawKind::Custom:
            return law.custom ? law.custom(b_hat) : 0.0;
        case LawKind::Power:
            break;
    }
    return law.alpha * std::pow(deficit(law.target, b_hat.z), law.beta);
}

HypothesisReport validate_hypothesis_H(const FeedbackLaw& law) {
    HypothesisReport rep;
    const BlochVector target = target_bloch(law.target);
    const BlochVector antipode{0.0, 0.0, -target.z};

    rep.vanishes_at_target = feedback_u(law, target) == 0.0;
    rep.nonzero_at_antipode = std::abs(feedback_u(law, antipode)) > 0.0;

    if (law.kind == LawKind::Power) {
        // Analytic: |u| = alpha * deficit^beta identically, beta >= 1 > 1/2.
        rep.smooth_away_from_target = true;
        rep.growth_bound_ok = law.beta > 0.5;
        rep.c = law.alpha;
        rep.alpha_exp = law.beta;
    } else {
        // Numeric certification. Smoothness: central second differences of
        // u along z at interior points away from the target stay bounded.
        rep.smooth_away_from_target = true;
        const double h = 1e-5;
        rng::Xoshiro256pp gen(rng::derive_seed(0x51c0de, 2, 7));
        for (int i = 0; i < 1000 && rep.smooth_away_from_target; ++i) {
            double z = -0.9 + 1.8 * rng::uniform01(gen); // away from both poles
            double u0 = feedback_u(law, {0.0, 0.0, z - h});
            double u1 = feedback_u(law, {0.0, 0.0, z});
            double u2 = feedback_u(law, {0.0, 0.0, z + h});
            double second = (u2 - 2.0 * u1 + u0) / (h * h);
            if (!std::isfinite(second) || std::abs(second) > 1e6)
                rep.smooth_away_from_target = false;
        }
        // Growth bound: fit log|u| against log(deficit) on 1e4 points near
        // the target; require slope > 1/2 (and finite intercept).
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int n = 0;
        bool identically_zero = true;
        for (int i = 0; i < 10000; ++i) {
            double d = std::pow(10.0, -6.0 + 5.0 * (i + 0.5) / 10000.0); // 1e-6..1e-1
            double z = target.z - (target.z > 0 ? 1.0 : -1.0) * 2.0 * d;
            double u = std::abs(feedback_u(law, {0.0, 0.0, z}));
            if (u == 0.0) continue;
            identically_zero = false;
            double lx = std::log(d), ly = std::log(u);
            sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
            ++n;
        }
        if (identically_zero) {
            // u == 0 near the target satisfies any growth bound.
            rep.growth_bound_ok = true;
            rep.c = 0.0;
            rep.alpha_exp = std::numeric_limits<double>::infinity();
        } else if (n >= 3) {
            double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
            rep.alpha_exp = slope;
            rep.c = std::exp((sy - slope * sx) / n);
            rep.growth_bound_ok = slope > 0.5;
        } else {
            rep.growth_bound_ok = false;
        }
    }

    rep.ok = rep.vanishes_at_target && rep.nonzero_at_antipode &&
             rep.smooth_away_from_target && rep.growth_bound_ok;
    if (!rep.ok) {
        if (!rep.vanishes_at_target) rep.detail = "u(target) != 0";
        else if (!rep.nonzero_at_antipode) rep.detail = "u(antipode) == 0";
        else if (!rep.smooth_away_from_target) rep.detail = "u not C^1 away from target";
        else rep.detail = "growth bound exponent <= 1/2 near target";
    }
    return rep;
}

ParamConditionReport validate_param_condition(const PhysParams& p, const EstParams& e) {
    ParamConditionReport rep;
    rep.margin = 4.0 * p.eta * p.M - e.eta_hat * e.M_hat;
    rep.ok = e.eta_hat * e.M_hat < 4.0 * p.eta * p.M;
    return rep;
}

} // namespace qsme
