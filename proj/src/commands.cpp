#include "qsme/commands.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "qsme/errors.hpp"
#include "qsme/io.hpp"
#include "qsme/rng.hpp"

namespace qsme {

using nlohmann::json;

namespace {

void append_row(std::string& out, std::initializer_list<double> vals) {
    bool first = true;
    for (double v : vals) {
        if (!first) out += ',';
        out += format_double(v);
        first = false;
    }
    out += '\n';
}

std::string strip_csv_ext(const std::string& path) {
    if (path.size() > 4 && path.compare(path.size() - 4, 4, ".csv") == 0)
        return path.substr(0, path.size() - 4);
    return path;
}

std::pair<double, double> scenario_window(const Scenario& sc) {
    if (sc.window_start >= 0.0 && sc.window_end > sc.window_start)
        return {sc.window_start, sc.window_end};
    return default_fit_window(sc.sde.t_final);
}

EnsembleOptions make_opts(const Scenario& sc, int threads) {
    EnsembleOptions opts;
    opts.threads = threads;
    opts.convergence_threshold = sc.threshold;
    auto [w0, w1] = scenario_window(sc);
    opts.fit_start = w0;
    opts.fit_end = w1;
    return opts;
}

void advisory_warnings(const Scenario& sc, std::ostream& log) {
    auto cond = validate_param_condition(sc.phys, sc.est);
    if (!cond.ok)
        log << "warning: eta_hat*M_hat >= 4*eta*M (margin " << cond.margin
            << "); the convergence guarantee does not apply\n";
    auto h = validate_hypothesis_H(sc.law);
    if (!h.ok) log << "warning: feedback law violates the controller hypothesis: "
                   << h.detail << "\n";
}

json exponent_references(const Scenario& sc) {
    json j;
    j["nu_av"] = nu_av(sc.phys, sc.est);
    j["nu_s"] = nu_s(sc.phys, sc.est);
    j["nu_av_alt"] = nu_av_alt(sc.phys, sc.est);
    j["nu_s_alt"] = nu_s_alt(sc.phys, sc.est);
    j["k_bound"] = k_bound(sc.phys, sc.est);
    return j;
}

double finite_median(std::vector<double> v) {
    std::erase_if(v, [](double x) { return !std::isfinite(x); });
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace

std::string trajectory_csv(const Trajectory& traj, Target target) {
    std::string out = "t,x,y,z,x_hat,y_hat,z_hat,u,V,dB_actual,dB_estimate\n";
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        const CoupledState& s = traj.states[k];
        append_row(out, {traj.times[k], s.actual.x, s.actual.y, s.actual.z, s.estimate.x,
                         s.estimate.y, s.estimate.z, traj.controls[k], traj.lyapunov[k],
                         bures_to_target(s.actual, target),
                         bures_to_target(s.estimate, target)});
    }
    return out;
}

std::string ensemble_csv(const EnsembleSummary& s) {
    std::string out = "t,mean_V,q10,q50,q90\n";
    for (std::size_t k = 0; k < s.times.size(); ++k)
        append_row(out, {s.times[k], s.mean_V[k], s.q10[k], s.q50[k], s.q90[k]});
    return out;
}

int cmd_simulate(const Scenario& sc, const std::string& out_path, std::ostream& log) {
    advisory_warnings(sc, log);
    Trajectory traj = simulate(sc.ic, sc.phys, sc.est, sc.law, sc.sde);
    write_text_file(out_path, trajectory_csv(traj, sc.law.target));
    log << "wrote " << out_path << " (" << traj.times.size()
        << " rows); terminal V = " << traj.lyapunov.back() << "\n";
    return 0;
}

int cmd_ensemble(const Scenario& sc, const std::string& out_base, int threads,
                 std::ostream& log) {
    advisory_warnings(sc, log);
    EnsembleSummary summary = run_ensemble(sc.ic, sc.phys, sc.est, sc.law, sc.sde,
                                           sc.n_traj, make_opts(sc, threads));
    const std::string base = strip_csv_ext(out_base);
    write_text_file(base + ".csv", ensemble_csv(summary));

    json j;
    j["scenario"] = resolved_json(sc);
    j["n_traj"] = summary.n_traj;
    j["convergence_fraction"] = summary.convergence_fraction;
    j["convergence_threshold"] = sc.threshold;
    j["per_traj_exponents"] = summary.per_traj_exponents;
    j["terminal_V"] = summary.terminal_V;
    j["n_failed"] = summary.n_failed;
    j["failed_indices"] = summary.failed_indices;
    j["references"] = exponent_references(sc);
    auto [w0, w1] = scenario_window(sc);
    try {
        ExponentReport fit = estimate_sample_exponent(summary.times, summary.mean_V, w0, w1);
        j["mean_curve_fit"] = {{"slope", fit.slope},
                               {"intercept", fit.intercept},
                               {"r_squared", fit.r_squared},
                               {"window", {fit.t_start, fit.t_end}},
                               {"n_points", fit.n_points}};
    } catch (const estimation_error&) {
        j["mean_curve_fit"] = nullptr;
    }
    write_text_file(base + ".json", j.dump(2) + "\n");
    log << "wrote " << base << ".csv and " << base
        << ".json; convergence_fraction = " << summary.convergence_fraction << "\n";
    return 0;
}

int cmd_exponent(const Scenario& sc, const std::string& out_path, int threads,
                 std::ostream& log) {
    advisory_warnings(sc, log);
    EnsembleSummary summary = run_ensemble(sc.ic, sc.phys, sc.est, sc.law, sc.sde,
                                           sc.n_traj, make_opts(sc, threads));
    auto [w0, w1] = scenario_window(sc);
    ExponentReport fit = estimate_sample_exponent(summary.times, summary.mean_V, w0, w1);

    json j;
    j["scenario"] = resolved_json(sc);
    j["window"] = {w0, w1};
    j["mean_curve"] = {{"slope", fit.slope},
                       {"intercept", fit.intercept},
                       {"r_squared", fit.r_squared},
                       {"n_points", fit.n_points}};
    j["per_traj"] = {{"slopes", summary.per_traj_exponents},
                     {"median", finite_median(summary.per_traj_exponents)}};
    j["references"] = exponent_references(sc);
    write_text_file(out_path, j.dump(2) + "\n");
    log << "mean-curve slope = " << fit.slope << " (nu_av = " << nu_av(sc.phys, sc.est)
        << ")\n";
    return 0;
}

int cmd_exit_time(const Scenario& sc, const std::string& out_path, int threads,
                  std::ostream& log) {
    advisory_warnings(sc, log);
    ExitTimeStudy study = exit_time_study(sc.law.target, sc.radius, sc.phys, sc.est,
                                          sc.law, sc.sde, sc.n_traj,
                                          make_opts(sc, threads));
    json j;
    j["scenario"] = resolved_json(sc);
    j["radius"] = study.radius;
    j["n_traj"] = study.n_traj;
    j["n_exit"] = study.n_exit;
    j["exit_fraction"] = study.exit_fraction;
    j["mean_exit_time"] = study.mean_exit_time;
    j["detection"] = "coupled distance to the center checked at recorded times";
    write_text_file(out_path, j.dump(2) + "\n");
    log << "exit_fraction = " << study.exit_fraction
        << ", mean_exit_time = " << study.mean_exit_time << "\n";
    return 0;
}

int cmd_check(const Scenario& sc, const std::string& out_path, int threads,
              std::ostream& log) {
    json checks = json::array();
    auto add = [&](const std::string& name, bool pass, json detail) {
        detail["name"] = name;
        detail["pass"] = pass;
        checks.push_back(detail);
        log << (pass ? "PASS " : "FAIL ") << name << "\n";
    };

    // Closed-form vs generic generator on random interior points.
    {
        rng::Xoshiro256pp gen(rng::derive_seed(sc.sde.seed, 2, 1));
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            CoupledState s{sample_ball(gen), sample_ball(gen)};
            if (s.actual.z > 0.95 || s.estimate.z > 0.95) {
                --i;
                continue;
            }
            double u = feedback_u(sc.law, s.estimate);
            worst = std::max(worst,
                             std::abs(generator_V_closed(s, u, sc.phys, sc.est) -
                                      generator_V_numeric(s, u, sc.phys, sc.est)));
        }
        add("generator_equality", worst < 1e-9, {{"max_abs_diff", worst}});
    }

    // Superoperator forms against the Bloch fields.
    {
        rng::Xoshiro256pp gen(rng::derive_seed(sc.sde.seed, 2, 2));
        double worst = 0.0;
        for (int i = 0; i < 10000; ++i) {
            BlochVector b = sample_ball(gen);
            double u = 20.0 * rng::uniform01(gen) - 10.0;
            DensityMatrix rho = bloch_to_density(b);
            VectorField3 lm = pauli_components(superoperator_L(rho, u, sc.phys));
            VectorField3 ld = drift_actual(b, u, sc.phys);
            VectorField3 gm = pauli_components(superoperator_G(rho, sc.phys));
            VectorField3 gd = diffusion_actual(b, sc.phys);
            for (double d : {lm.dx - ld.dx, lm.dy - ld.dy, lm.dz - ld.dz, gm.dx - gd.dx,
                             gm.dy - gd.dy, gm.dz - gd.dz})
                worst = std::max(worst, std::abs(d));
        }
        add("matrix_bloch_consistency", worst < 1e-12, {{"max_abs_diff", worst}});
    }

    // Zero-control martingale: E[z_T] = z_0.
    {
        SdeConfig cfg = sc.sde;
        cfg.t_final = 1.0;
        cfg.dt = 1e-3;
        cfg.record_stride = 100;
        EnsembleOptions opts;
        opts.threads = threads;
        MartingaleStat stat = martingale_check({{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}},
                                               sc.phys, sc.est, cfg, 2000, opts);
        double dev = std::abs(stat.mean_zT - stat.z0);
        add("martingale_zero_control", dev <= 3.0 * stat.std_error,
            {{"mean_zT", stat.mean_zT},
             {"z0", stat.z0},
             {"three_std_errors", 3.0 * stat.std_error}});
    }

    // Controller hypothesis and the parameter condition.
    {
        HypothesisReport h = validate_hypothesis_H(sc.law);
        add("hypothesis_H", h.ok,
            {{"c", h.c}, {"alpha_exp", h.alpha_exp}, {"detail", h.detail}});
        ParamConditionReport c = validate_param_condition(sc.phys, sc.est);
        add("param_condition", c.ok, {{"margin", c.margin}});
    }

    bool all_pass = true;
    for (const auto& c : checks) all_pass = all_pass && c.at("pass").get<bool>();

    if (!out_path.empty()) {
        json j;
        j["scenario"] = resolved_json(sc);
        j["checks"] = checks;
        j["all_pass"] = all_pass;
        write_text_file(out_path, j.dump(2) + "\n");
    }
    return all_pass ? 0 : 1;
}

} // namespace qsme
