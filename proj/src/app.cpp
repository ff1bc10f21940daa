#include "kslg/app.hpp"

#include "kslg/config.hpp"
#include "kslg/diagnostics.hpp"
#include "kslg/io.hpp"
#include "kslg/snapshot.hpp"
#include "kslg/study.hpp"
#include "kslg/weakcheck.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

namespace kslg::app {

namespace fs = std::filesystem;
using namespace exponents;

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

Rational rational_flag(const std::optional<std::string>& v, const char* name) {
    if (!v) throw UsageError(std::string("--") + name + " is required");
    try {
        return parse_rational(*v);
    } catch (const std::exception& e) {
        throw UsageError(std::string("--") + name + ": " + e.what());
    }
}

std::optional<AppConfig> load(const fs::path& path, std::optional<std::uint64_t> seed, std::ostream& err) {
    ConfigResult r = parse_config_file(path);
    for (const auto& e : r.errors) err << (e.line > 0 ? path.string() + ": " : "") << e.str() << "\n";
    if (!r.ok()) return std::nullopt;
    if (seed) r.config->problem.seed = *seed;
    return r.config;
}

std::string step_name(std::size_t step) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "step_%08zu.bin", step);
    return buf;
}

void print_set(std::ostream& out, const ExponentSet& set) {
    out << "p = " << to_string(set.p) << "\n"
        << "p_conj = " << to_string(set.p_conj) << "\n"
        << "kappa_conj = " << to_string(set.kappa_conj) << "\n"
        << "q = " << to_string(set.q) << "\n"
        << "r = " << to_string(set.r) << "\n"
        << "theta = " << to_string(set.theta) << "\n"
        << "gamma = " << to_string(set.gamma) << "\n"
        << "q_sup = " << to_string(set.q_sup) << "\n"
        << "r_sup = " << to_string(set.r_sup) << "\n"
        << "branch = " << to_string(set.branch) << "\n";
}

int exponents_impl(const ExponentsOptions& opt, std::ostream& out, std::ostream& err) {
    if (!opt.n) throw UsageError("--n is required");
    if (*opt.n < 2) throw UsageError("--n must be at least 2");
    const int n = *opt.n;
    std::string mode = opt.mode;
    if (mode.empty()) mode = (opt.alpha && !opt.s) ? "prototype" : "general";
    if (mode != "general" && mode != "prototype") throw UsageError("--mode must be general or prototype");
    const bool prototype = mode == "prototype";

    if (opt.emit == "region-csv") {
        if (opt.steps < 1 || opt.steps > 2000) throw UsageError("--steps must lie in [1, 2000]");
        const Rational kmax = rational_flag(opt.kappa_max, "kappa-max");
        const Rational pmax = rational_flag(opt.param_max, "param-max");
        if (!(kmax > 1) || !(pmax > 0)) throw UsageError("--kappa-max must exceed 1 and --param-max must be positive");
        io::CsvWriter csv({"n", "kappa", "alpha_or_s", "admissible"});
        for (int j = 1; j <= opt.steps; ++j) {
            Rational kappa = 1 + (kmax - 1) * Rational(j, opt.steps);
            kappa.canonicalize();
            for (int i = prototype ? 0 : 1; i <= opt.steps; ++i) {
                Rational x = pmax * Rational(i, opt.steps);
                x.canonicalize();
                const bool ok = kappa > (prototype ? prototype_kappa_threshold(n, x) : kappa_threshold(n, x));
                csv.row({std::to_string(n), to_string(kappa), to_string(x), ok ? "true" : "false"});
            }
        }
        if (opt.out.empty()) {
            out << csv.str();
        } else {
            io::atomic_write(opt.out, csv.str());
        }
        return kExitPass;
    }
    if (opt.emit != "verdict" && opt.emit != "set") throw UsageError("--emit must be verdict, set or region-csv");

    const Rational kappa = rational_flag(opt.kappa, "kappa");
    if (!(kappa > 1)) throw UsageError("--kappa must exceed 1");
    ParamConfig params;
    params.n = n;
    params.kappa = kappa;
    Rational threshold;
    if (prototype) {
        const Rational alpha = rational_flag(opt.alpha, "alpha");
        if (sgn(alpha) < 0) throw UsageError("--alpha must be nonnegative");
        params.alpha = alpha;
        threshold = prototype_kappa_threshold(n, alpha);
    } else {
        const Rational s = rational_flag(opt.s, "s");
        if (!(sgn(s) > 0)) throw UsageError("--s must be positive");
        params.s = s;
        threshold = kappa_threshold(n, s);
    }
    const bool admissible = kappa > threshold;

    if (opt.emit == "verdict") {
        out << (admissible ? "admissible" : "inadmissible") << ": kappa = " << to_string(kappa)
            << (admissible ? " > " : " <= ") << to_string(threshold) << " (" << mode << " threshold, n = " << n
            << ")\n";
        return admissible ? kExitPass : kExitVerdict;
    }
    if (!admissible) {
        err << "inadmissible: kappa = " << to_string(kappa) << " does not exceed " << to_string(threshold) << "\n";
        return kExitVerdict;
    }
    if (prototype) {
        const auto s = bridging_s(n, *params.alpha, kappa);
        if (!s) {
            err << "no admissible s found below n/alpha\n";
            return kExitVerdict;
        }
        params.s = *s;
        out << "s = " << to_string(*s) << "\n";
    }
    print_set(out, select_exponents(params));
    return kExitPass;
}

std::map<std::string, std::string> read_info(const fs::path& path) {
    std::map<std::string, std::string> info;
    std::istringstream in(io::read_file(path));
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find(" = ");
        if (eq != std::string::npos) info[line.substr(0, eq)] = line.substr(eq + 3);
    }
    return info;
}

}  // namespace

int exponents_command(const ExponentsOptions& opt, std::ostream& out, std::ostream& err) {
    try {
        return exponents_impl(opt, out, err);
    } catch (const UsageError& e) {
        err << "exponents: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ExponentError& e) {
        err << "exponents: " << e.what() << "\n";
        return kExitUsage;
    }
}

int run_command(const RunOptions& opt, std::ostream& err) {
    const auto app = load(opt.config, opt.seed, err);
    if (!app) return kExitUsage;

    const RunConfig cfg = app->problem.realize();
    const ExponentSet set = select_exponents(app->params);
    DiagnosticsAccumulator acc(cfg, FunctionalExponents::from(app->params, set));

    const fs::path snaps = opt.out / "snapshots";
    fs::create_directories(snaps);
    fs::remove(opt.out / "FAILED");
    io::atomic_write(opt.out / "config.ini", app->text);
    {
        std::ostringstream info;
        info << "kappa = " << to_string(app->params.kappa) << "\n"
             << "c_tol = " << io::format_double(app->c_tol) << "\n"
             << "T = " << io::format_double(cfg.T) << "\n";
        io::atomic_write(opt.out / "run_info.ini", info.str());
    }
    write_snapshot(opt.out / "coefficients.bin", cfg.coefficients.lambda_vals, cfg.coefficients.mu_vals, 0.0);

    std::size_t step = 0;
    bool last_written = false;
    const RunOutcome outcome = run(cfg, [&](const State& s, const StepInfo* info) {
        acc(s, info);
        last_written = step % app->output_every == 0;
        if (last_written) write_snapshot(snaps / step_name(step), s.u, s.v, s.t);
        ++step;
    });
    if (!last_written && step > 0) {
        write_snapshot(snaps / step_name(step - 1), outcome.final_state.u, outcome.final_state.v, outcome.final_state.t);
    }

    const DiagnosticsReport report = acc.report();
    io::atomic_write(opt.out / "diagnostics.csv", diagnostics_csv(report, app->output_every));
    io::atomic_write(opt.out / "fields_final.csv", fields_csv(outcome.final_state.u, outcome.final_state.v));
    const auto verdicts = all_checks(report, cfg, app->params, set, app->c_tol);
    io::atomic_write(opt.out / "verdicts.csv", verdicts_csv(verdicts));

    bool pass = true;
    for (const auto& v : verdicts) {
        if (!v.pass) err << "verdict failed: " << v.check << " value " << v.value << " bound " << v.bound << "\n";
        pass = pass && v.pass;
    }
    if (!outcome.completed) {
        io::atomic_write(opt.out / "FAILED", outcome.failure + "\n");
        err << "run stopped: " << outcome.failure << "\n";
        return kExitVerdict;
    }
    err << "run: " << outcome.steps << " steps to t = " << outcome.final_state.t << ", " << verdicts.size()
        << " verdicts, " << (pass ? "all pass" : "some failed") << "\n";
    return pass ? kExitPass : kExitVerdict;
}

int weakcheck_command(const WeakcheckOptions& opt, std::ostream& err) {
    Trajectory traj;
    double c_tol = 0.1;
    try {
        const auto info = read_info(opt.traj / "run_info.ini");
        if (!info.count("kappa") || !info.count("c_tol")) throw std::runtime_error("run_info.ini lacks kappa or c_tol");
        traj.kappa = to_double(parse_rational(info.at("kappa")));
        c_tol = std::stod(info.at("c_tol"));
        const Snapshot coeffs = read_snapshot(opt.traj / "coefficients.bin");
        traj.coefficients = CoefficientField::make(coeffs.u, coeffs.v);
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(opt.traj / "snapshots"))
            if (entry.path().extension() == ".bin") files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            Snapshot s = read_snapshot(f);
            traj.states.push_back(State{std::move(s.u), std::move(s.v), s.t});
        }
        std::sort(traj.states.begin(), traj.states.end(), [](const State& a, const State& b) { return a.t < b.t; });
        if (traj.states.size() < 2) throw std::runtime_error("need at least two snapshots");
        if (traj.states.front().t != 0.0) throw std::runtime_error("first snapshot is not the initial state");
        traj.validate();
    } catch (const std::exception& e) {
        err << "weakcheck: " << opt.traj.string() << ": " << e.what() << "\n";
        return kExitUsage;
    }
    if (opt.tol) {
        if (!(*opt.tol > 0.0)) {
            err << "weakcheck: --tol must be positive\n";
            return kExitUsage;
        }
        c_tol = *opt.tol;
    }

    const auto tests = weak_test_catalogue(traj.states.front().u.grid(), traj.states.back().t);
    std::vector<WeakRow> rows = mass_subsolution_check(traj, c_tol);
    for (auto&& part : {log_supersolution_check(traj, tests, c_tol), v_weak_check(traj, tests, c_tol)})
        rows.insert(rows.end(), part.begin(), part.end());
    io::atomic_write(opt.out.empty() ? opt.traj / "weakcheck.csv" : opt.out, weakcheck_csv(rows));

    std::size_t failed = 0;
    for (const auto& r : rows) {
        if (!r.pass) {
            ++failed;
            err << "weakcheck failed: " << r.relation << " " << r.test_id << " value " << r.value << " tol " << r.tol
                << "\n";
        }
    }
    err << "weakcheck: " << rows.size() << " rows over " << traj.states.size() << " snapshots, " << failed
        << " failed\n";
    return failed ? kExitVerdict : kExitPass;
}

int sweep_command(const SweepOptions& opt, std::ostream& err) {
    const auto app = load(opt.config, opt.seed, err);
    if (!app) return kExitUsage;
    SweepSpec spec;
    spec.params = app->params;
    spec.epsilon0 = app->epsilon0;
    spec.levels = opt.levels.value_or(app->sweep_levels);
    spec.sample_every = app->sample_every;
    try {
        spec.base = app->problem.realize();
        spec.validate();
    } catch (const std::exception& e) {
        err << "sweep: " << e.what() << "\n";
        return kExitUsage;
    }
    const SweepReport report = epsilon_sweep(spec);
    io::atomic_write(opt.out / "sweep.csv", sweep_csv(report, opt.wallclock));

    bool all_completed = true;
    for (const auto& e : report.entries) {
        if (!e.completed) {
            all_completed = false;
            err << "sweep: epsilon = " << e.epsilon << " failed: " << e.failure << "\n";
        }
    }
    for (int k : report.nonmonotone) err << "sweep: note: pair " << k << " grad v difference increased before the onset\n";
    if (report.onset) {
        err << "sweep: truncation inactive from k = " << *report.onset << "\n";
    } else {
        err << "sweep: truncation active for the whole schedule\n";
    }
    return all_completed ? kExitPass : kExitVerdict;
}

int refine_command(const RefineOptions& opt, std::ostream& err) {
    const auto app = load(opt.config, opt.seed, err);
    if (!app) return kExitUsage;
    if (opt.levels < 3) {
        err << "refine: --levels must be at least 3\n";
        return kExitUsage;
    }
    if (app->problem.time.policy != DtPolicy::fixed) {
        err << "refine: needs time.policy = fixed\n";
        return kExitUsage;
    }
    RefinementReport report;
    try {
        report = refinement_study(app->problem, opt.levels);
    } catch (const std::runtime_error& e) {
        err << "refine: " << e.what() << "\n";
        return kExitVerdict;
    }
    io::atomic_write(opt.out / "refinement.csv", refinement_csv(report));
    err << "refine: " << report.summary() << "\n";
    return report.passes() ? kExitPass : kExitVerdict;
}

}  // namespace kslg::app
