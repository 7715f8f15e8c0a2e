// Command-line front end: run scenarios, sweep parameters, print blow-up
// criteria, or exercise the built-in self checks.
//
// Exit codes: 0 completed, 2 blow-up detected (a finding, not a failure),
// 3 resolution lost, 1 error.

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nlsp/nlsp.hpp"

namespace {

int status_exit_code(nlsp::RunStatus s) {
    switch (s) {
        case nlsp::RunStatus::completed: return 0;
        case nlsp::RunStatus::blow_up_detected: return 2;
        case nlsp::RunStatus::resolution_lost: return 3;
    }
    return 1;
}

void print_outcome(const nlsp::ExperimentReport& rep) {
    std::cout << "name: " << rep.spec.name << "\n";
    std::cout << "status: " << nlsp::to_string(rep.outcome.status) << "\n";
    std::cout << "t_final: " << nlsp::detail::fmt17(rep.outcome.t_final) << "\n";
    if (rep.outcome.status == nlsp::RunStatus::blow_up_detected)
        std::cout << "bracket: [" << nlsp::detail::fmt17(rep.outcome.bracket_lo) << ", "
                  << nlsp::detail::fmt17(rep.outcome.bracket_hi) << "]\n";
    if (!rep.csv_path.empty()) std::cout << "csv: " << rep.csv_path << "\n";
    if (!rep.verdict_path.empty()) std::cout << "verdicts: " << rep.verdict_path << "\n";
    if (!rep.oracle.empty())
        std::cout << "oracle_max_rel_diff: " << nlsp::detail::fmt17(rep.oracle_max_rel_diff)
                  << "\n";
}

std::vector<double> parse_values(const std::string& csv) {
    return nlsp::detail::parse_list(csv, 0);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Schrodinger laboratory for second-order polynomial potentials"};
    app.require_subcommand(1);

    std::string run_file, out_dir = "out";
    CLI::App* run_cmd = app.add_subcommand("run", "execute one scenario file");
    run_cmd->add_option("file", run_file, "scenario file")->required();
    run_cmd->add_option("--out", out_dir, "output directory");

    std::string sweep_file, sweep_param, sweep_out = "out";
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "run a one-parameter family");
    sweep_cmd->add_option("file", sweep_file, "scenario template file")->required();
    std::string param_spec;
    sweep_cmd->add_option("--param", param_spec, "key=v1,v2,... (e.g. potential.omega=1,2)")
        ->required();
    sweep_cmd->add_option("--out", sweep_out, "output directory");

    CLI::App* check_cmd = app.add_subcommand("check", "run the built-in invariant suite");

    std::string crit_file;
    CLI::App* crit_cmd = app.add_subcommand("criteria", "print the blow-up criteria report");
    crit_cmd->add_option("file", crit_file, "scenario file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            nlsp::ScenarioSpec spec = nlsp::parse_scenario_file(run_file);
            nlsp::ExperimentReport rep = nlsp::run_scenario(spec, out_dir);
            print_outcome(rep);
            return status_exit_code(rep.outcome.status);
        }
        if (sweep_cmd->parsed()) {
            const auto eq = param_spec.find('=');
            if (eq == std::string::npos || eq == 0)
                throw nlsp::config_error("--param expects key=v1,v2,...");
            const std::string key = param_spec.substr(0, eq);
            const std::vector<double> values = parse_values(param_spec.substr(eq + 1));
            nlsp::ScenarioSpec spec = nlsp::parse_scenario_file(sweep_file);
            auto reports = nlsp::sweep(spec, key, values, sweep_out);
            int worst = 0;
            for (std::size_t i = 0; i < reports.size(); ++i) {
                std::cout << "cell " << i << " (" << key << " = "
                          << nlsp::detail::fmt17(values[i]) << "): ";
                if (!reports[i].error.empty()) {
                    std::cout << "error: " << reports[i].error << "\n";
                    worst = std::max(worst, 1);
                } else {
                    std::cout << nlsp::to_string(reports[i].outcome.status) << "\n";
                    worst = std::max(worst, status_exit_code(reports[i].outcome.status));
                }
            }
            return worst;
        }
        if (check_cmd->parsed()) {
            return nlsp::run_self_checks(std::cout) ? 0 : 1;
        }
        if (crit_cmd->parsed()) {
            nlsp::ScenarioSpec spec = nlsp::parse_scenario_file(crit_file);
            const nlsp::Grid grid = nlsp::build_grid(spec);
            const nlsp::QuadraticPotential pot = nlsp::build_potential(spec);
            const nlsp::Nonlinearity nl = nlsp::build_nonlinearity(spec);
            const nlsp::WaveFunction u0 = nlsp::build_initial(spec, grid);
            const nlsp::BlowupCriteriaReport c = nlsp::blowup_criteria_report(u0, pot, nl);
            std::cout << "preconditions = " << (c.preconditions_hold ? 1 : 0) << "\n";
            std::cout << "free_energy = " << nlsp::detail::fmt17(c.free_energy) << "\n";
            std::cout << "position_term = " << nlsp::detail::fmt17(c.position_term) << "\n";
            std::cout << "rotation_term = " << nlsp::detail::fmt17(c.rotation_term) << "\n";
            std::cout << "free_blowup = " << (c.free_blowup ? 1 : 0) << "\n";
            std::cout << "harmonic_trap_blowup = " << (c.harmonic_trap_blowup ? 1 : 0) << "\n";
            std::cout << "harmonic_time_bound = " << nlsp::detail::fmt17(c.harmonic_time_bound)
                      << "\n";
            std::cout << "repulsive_one_sided = " << (c.repulsive_one_sided ? 1 : 0) << "\n";
            std::cout << "repulsive_two_sided = " << (c.repulsive_two_sided ? 1 : 0) << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
