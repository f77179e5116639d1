#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "qsme/commands.hpp"
#include "qsme/errors.hpp"
#include "qsme/scenario.hpp"

namespace {

struct Args {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    int threads = 0;
};

void add_common(CLI::App* sub, Args& args, bool config_required) {
    auto* cfg = sub->add_option("--config", args.config, "scenario JSON file");
    if (config_required) cfg->required();
    sub->add_option("--out", args.out, "output path");
    sub->add_option("--seed", args.seed, "override the scenario seed");
    sub->add_option("--threads", args.threads, "worker threads (0 = hardware)");
}

qsme::Scenario resolve(const Args& args) {
    qsme::Scenario sc =
        args.config.empty() ? qsme::default_scenario() : qsme::load_scenario(args.config);
    if (args.seed) sc.sde.seed = *args.seed;
    return sc;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"coupled stochastic master equation simulator for a monitored qubit"};
    app.require_subcommand(1);

    Args args;
    CLI::App* sim = app.add_subcommand("simulate", "one trajectory -> CSV");
    CLI::App* ens = app.add_subcommand("ensemble", "Monte Carlo summary -> CSV + JSON");
    CLI::App* expn = app.add_subcommand("exponent", "Lyapunov exponent fits -> JSON");
    CLI::App* exit_cmd =
        app.add_subcommand("exit-time", "exit-time study around the antipode pair -> JSON");
    CLI::App* check = app.add_subcommand("check", "run the invariant batteries");
    add_common(sim, args, true);
    add_common(ens, args, true);
    add_common(expn, args, true);
    add_common(exit_cmd, args, true);
    add_common(check, args, false);

    CLI11_PARSE(app, argc, argv);

    try {
        qsme::Scenario sc = resolve(args);
        if (sim->parsed())
            return qsme::cmd_simulate(sc, args.out.empty() ? "trajectory.csv" : args.out,
                                      std::cerr);
        if (ens->parsed())
            return qsme::cmd_ensemble(sc, args.out.empty() ? "ensemble" : args.out,
                                      args.threads, std::cerr);
        if (expn->parsed())
            return qsme::cmd_exponent(sc, args.out.empty() ? "exponent.json" : args.out,
                                      args.threads, std::cerr);
        if (exit_cmd->parsed())
            return qsme::cmd_exit_time(sc, args.out.empty() ? "exit_time.json" : args.out,
                                       args.threads, std::cerr);
        return qsme::cmd_check(sc, args.out, args.threads, std::cout);
    } catch (const qsme::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const qsme::integration_error& e) {
        std::cerr << "integration blowup at t = " << e.time << " (step " << e.step_index
                  << "): " << e.what() << "\n";
        return 3;
    } catch (const qsme::estimation_error& e) {
        std::cerr << "estimation error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
