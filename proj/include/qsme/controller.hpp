#pragma once

// Feedback laws u(rho_hat) and their admissibility checks: the structural
// hypothesis on the controller (vanish at the target, act at the antipode,
// smooth growth bound) and the parameter condition eta_hat*M_hat < 4*eta*M.

#include <functional>
#include <string>

#include "qsme/bloch.hpp"
#include "qsme/dynamics.hpp"

namespace qsme {

enum class LawKind { Power, Zero, Custom };

struct FeedbackLaw {
    Target target = Target::Excited;
    double alpha = 0.0; // gain, > 0 for Power
    double beta = 0.0;  // exponent, >= 1 for Power
    LawKind kind = LawKind::Power;
    std::function<double(const BlochVector&)> custom; // used when kind == Custom
    std::string tag;                                  // label for Custom laws

    static FeedbackLaw power(Target t, double alpha, double beta);
    static FeedbackLaw zero(Target t);
    static FeedbackLaw custom_law(Target t, std::function<double(const BlochVector&)> fn,
                                  std::string tag);
};

// u evaluated at the estimate. Power: alpha*((1 -+ zhat)/2)^beta, the sign
// chosen so u vanishes at the target pole.
double feedback_u(const FeedbackLaw& law, const BlochVector& b_hat);

struct HypothesisReport {
    bool ok = false;
    bool vanishes_at_target = false;
    bool nonzero_at_antipode = false;
    bool smooth_away_from_target = false;
    bool growth_bound_ok = false;
    double c = 0.0;         // growth-bound constant
    double alpha_exp = 0.0; // growth-bound exponent (> 1/2 required)
    std::string detail;     // names the violated clause when !ok
};

// Structural check of the controller hypothesis: u(target) = 0,
// u(antipode) != 0, C^1 away from the target (finite differences at 10^3
// points), and |u| <= c * ((1 -+ zhat)/2)^alpha_exp with alpha_exp > 1/2
// certified analytically for Power and by sampling near the target otherwise.
HypothesisReport validate_hypothesis_H(const FeedbackLaw& law);

struct ParamConditionReport {
    bool ok = false;
    double margin = 0.0; // 4*eta*M - eta_hat*M_hat
};

ParamConditionReport validate_param_condition(const PhysParams& p, const EstParams& e);

} // namespace qsme
