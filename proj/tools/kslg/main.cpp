#include "kslg/app.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace kslg::app;

    CLI::App cli{"Chemotaxis-logistic toolkit: exponent algebra, simulation and checks"};
    cli.require_subcommand(1);

    ExponentsOptions ex;
    int ex_n = 0;
    std::string ex_s, ex_kappa, ex_alpha;
    auto* exponents = cli.add_subcommand("exponents", "Exponent admissibility, sets and region tables");
    exponents->add_option("--n", ex_n, "Spatial dimension")->required();
    exponents->add_option("--s", ex_s, "Integrability exponent of 1/mu");
    exponents->add_option("--kappa", ex_kappa, "Damping exponent");
    exponents->add_option("--alpha", ex_alpha, "Prototype exponent of mu = mu1 |x|^alpha");
    exponents->add_option("--mode", ex.mode, "general | prototype")->check(CLI::IsMember({"general", "prototype"}));
    exponents->add_option("--emit", ex.emit, "verdict | set | region-csv")
        ->check(CLI::IsMember({"verdict", "set", "region-csv"}));
    exponents->add_option("--steps", ex.steps, "Region lattice points per axis");
    exponents->add_option("--kappa-max", ex.kappa_max, "Region upper kappa");
    exponents->add_option("--param-max", ex.param_max, "Region upper alpha or s");
    exponents->add_option("--out", ex.out, "Region CSV destination");

    RunOptions run;
    std::uint64_t seed = 0;
    auto* run_cmd = cli.add_subcommand("run", "Simulate and write diagnostics");
    run_cmd->add_option("--config", run.config)->required();
    run_cmd->add_option("--out", run.out);
    auto* run_seed = run_cmd->add_option("--seed", seed);

    WeakcheckOptions wk;
    double wk_tol = 0.0;
    auto* weak = cli.add_subcommand("weakcheck", "Weak-form residuals of a recorded run");
    weak->add_option("--traj", wk.traj, "Output directory of `run`")->required();
    auto* weak_tol = weak->add_option("--tol", wk_tol, "Tolerance constant C_tol");
    weak->add_option("--out", wk.out);

    SweepOptions sw;
    int sw_levels = 0;
    auto* sweep = cli.add_subcommand("sweep", "Truncation parameter sweep");
    sweep->add_option("--config", sw.config)->required();
    auto* sweep_levels = sweep->add_option("--levels", sw_levels);
    sweep->add_option("--out", sw.out);
    sweep->add_flag("--wallclock", sw.wallclock, "Record run times");
    auto* sweep_seed = sweep->add_option("--seed", seed);

    RefineOptions rf;
    auto* refine = cli.add_subcommand("refine", "Grid refinement study");
    refine->add_option("--config", rf.config)->required();
    refine->add_option("--levels", rf.levels);
    refine->add_option("--out", rf.out);
    auto* refine_seed = refine->add_option("--seed", seed);

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = cli.exit(e);
        return code == 0 ? kExitPass : kExitUsage;
    }

    try {
        if (*exponents) {
            ex.n = ex_n;
            if (!ex_s.empty()) ex.s = ex_s;
            if (!ex_kappa.empty()) ex.kappa = ex_kappa;
            if (!ex_alpha.empty()) ex.alpha = ex_alpha;
            return exponents_command(ex, std::cout, std::cerr);
        }
        if (*run_cmd) {
            if (*run_seed) run.seed = seed;
            return run_command(run, std::cerr);
        }
        if (*weak) {
            if (*weak_tol) wk.tol = wk_tol;
            return weakcheck_command(wk, std::cerr);
        }
        if (*sweep) {
            if (*sweep_levels) sw.levels = sw_levels;
            if (*sweep_seed) sw.seed = seed;
            return sweep_command(sw, std::cerr);
        }
        if (*refine) {
            if (*refine_seed) rf.seed = seed;
            return refine_command(rf, std::cerr);
        }
    } catch (const std::exception& e) {
        std::cerr << "kslg: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
