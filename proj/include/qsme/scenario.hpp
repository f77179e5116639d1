#pragma once

// Scenario = one JSON document describing a run: physical and filter
// parameters, feedback law, initial condition, integration config, and the
// study knobs. Unknown keys are rejected; validation errors name the field.

#include <cstdint>
#include <string>

#include "json.hpp"

#include "qsme/controller.hpp"
#include "qsme/dynamics.hpp"
#include "qsme/integrator.hpp"

namespace qsme {

struct Scenario {
    PhysParams phys;
    EstParams est;
    FeedbackLaw law;
    CoupledState ic;
    SdeConfig sde;
    int n_traj = 10;
    double radius = 0.1;           // exit-time study ball radius
    double threshold = 0.05;       // convergence threshold (coupled distance)
    double window_start = -1.0;    // exponent fit window; <0 = default
    double window_end = -1.0;
};

// Bundled reference parameters: omega=0.3, eta=0.3, M=1.3, omega_hat=0.5,
// eta_hat=0.5, M_hat=1.5, alpha=10, beta=2, excited target,
// ic (1,0,0)/(0,1,0).
Scenario default_scenario();

// Throws config_error naming the offending field/key.
Scenario parse_scenario(const nlohmann::json& j);
Scenario load_scenario(const std::string& path);

void validate(const Scenario& s);

// Full resolved scenario (defaults filled), suitable for embedding in run
// summaries so outputs are self-describing and re-runnable.
nlohmann::json resolved_json(const Scenario& s);

} // namespace qsme
