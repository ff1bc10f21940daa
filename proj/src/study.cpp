#include "kslg/study.hpp"

#include "kslg/io.hpp"
#include "kslg/parallel.hpp"
#include "kslg/weakcheck.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace kslg {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Field difference(const Field& a, const Field& b) {
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    return Field(a.grid(), std::move(d));
}

double lp_power(const Field& f, double p) {
    double s = 0.0;
    for (double x : f.values()) s += std::pow(std::abs(x), p);
    return s * f.grid().cell_volume();
}

bool same_levels(const Trajectory& a, const Trajectory& b) {
    if (a.states.size() != b.states.size()) return false;
    for (std::size_t n = 0; n < a.states.size(); ++n)
        if (a.states[n].t != b.states[n].t) return false;
    return true;
}

}  // namespace

SweepPair compare_trajectories(int k, const Trajectory& a, const Trajectory& b, double p_tilde, double kappa_tilde) {
    SweepPair pair{k, kNaN, kNaN};
    if (!same_levels(a, b)) return pair;
    const std::size_t N = a.states.size();
    std::vector<double> grad(N), mixed(N);
    for (std::size_t n = 0; n < N; ++n) {
        grad[n] = grad_sq_faces(difference(a.states[n].v, b.states[n].v));
        mixed[n] = std::pow(lp_power(difference(a.states[n].u, b.states[n].u), p_tilde), kappa_tilde / p_tilde);
    }
    double g = 0.0, m = 0.0;
    for (std::size_t n = 0; n + 1 < N; ++n) {
        const double half = 0.5 * (a.states[n + 1].t - a.states[n].t);
        g += half * (grad[n] + grad[n + 1]);
        m += half * (mixed[n] + mixed[n + 1]);
    }
    pair.grad_v_diff_L2 = std::sqrt(g);
    pair.u_diff_mixed = std::pow(m, 1.0 / kappa_tilde);
    return pair;
}

namespace {

std::string optional_number(double x) { return std::isnan(x) ? std::string() : io::format_double(x); }

}  // namespace

std::vector<double> SweepSpec::schedule() const {
    std::vector<double> eps;
    for (int k = 0; k <= levels; ++k) eps.push_back(std::ldexp(epsilon0, -k));
    return eps;
}

void SweepSpec::validate() const {
    base.validate();
    params.validate();
    if (base.time.policy != DtPolicy::fixed)
        throw std::invalid_argument("the epsilon sweep needs a fixed time step so runs share time levels");
    if (!(epsilon0 > 0.0 && epsilon0 <= 1.0)) throw std::invalid_argument("epsilon0 must lie in (0, 1]");
    if (levels < 0) throw std::invalid_argument("sweep levels must be nonnegative");
    if (sample_every == 0) throw std::invalid_argument("sample_every must be positive");
    if (std::abs(to_double(params.kappa) - base.kappa) > 1e-12 * base.kappa)
        throw std::invalid_argument("exponent parameters and run disagree on kappa");
}

bool SweepReport::tail_nonincreasing(int count) const {
    const int active = onset ? std::min<int>(*onset, static_cast<int>(pairs.size())) : static_cast<int>(pairs.size());
    if (count <= 0) return true;
    if (active < count) return false;
    for (int k = active - count + 1; k < active; ++k) {
        const double prev = pairs[k - 1].grad_v_diff_L2, cur = pairs[k].grad_v_diff_L2;
        if (std::isnan(prev) || std::isnan(cur) || cur > prev) return false;
    }
    return !std::isnan(pairs[active - count].grad_v_diff_L2);
}

SweepReport epsilon_sweep(const SweepSpec& spec) {
    spec.validate();
    SweepReport report;
    const auto set = exponents::select_exponents(spec.params);
    const auto mixed = exponents::mixed_norm_exponents(spec.params.kappa, set);
    report.p_tilde = mixed.p_tilde;
    report.kappa_tilde = mixed.kappa_tilde;

    const std::vector<double> eps = spec.schedule();
    report.entries.resize(eps.size());
    std::vector<Trajectory> trajectories(eps.size());
    parallel_for(eps.size(), worker_limit(), [&](std::size_t k) {
        RunConfig cfg = spec.base;
        cfg.truncation.epsilon = eps[k];
        TrajectoryRecorder recorder(cfg, spec.sample_every);
        const auto start = std::chrono::steady_clock::now();
        const RunOutcome out = run(cfg, std::ref(recorder));
        SweepEntry& e = report.entries[k];
        e.wallclock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        e.k = static_cast<int>(k);
        e.epsilon = eps[k];
        e.completed = out.completed;
        e.failure = out.failure;
        e.max_u = out.max_u;
        e.trunc_inactive = out.completed && eps[k] * out.max_u <= 1.0;
        if (out.completed) trajectories[k] = recorder.finish();
    });

    for (const auto& e : report.entries) {
        if (e.trunc_inactive) {
            report.onset = e.k;
            break;
        }
    }
    const double pt = to_double(mixed.p_tilde), kt = to_double(mixed.kappa_tilde);
    for (std::size_t k = 0; k + 1 < eps.size(); ++k) {
        const auto& a = report.entries[k];
        const auto& b = report.entries[k + 1];
        report.pairs.push_back(a.completed && b.completed
                                   ? compare_trajectories(static_cast<int>(k), trajectories[k], trajectories[k + 1], pt, kt)
                                   : SweepPair{static_cast<int>(k), kNaN, kNaN});
        trajectories[k] = Trajectory{};
    }
    for (std::size_t k = 1; k < report.pairs.size(); ++k) {
        if (report.onset && static_cast<int>(k) >= *report.onset) break;
        if (report.pairs[k].grad_v_diff_L2 > report.pairs[k - 1].grad_v_diff_L2) report.nonmonotone.push_back(static_cast<int>(k));
    }
    return report;
}

std::string sweep_csv(const SweepReport& report, bool with_wallclock) {
    io::CsvWriter csv({"k", "epsilon", "grad_v_diff_L2", "u_diff_mixed", "trunc_inactive", "wallclock_s"});
    for (const auto& e : report.entries) {
        const bool has_pair = static_cast<std::size_t>(e.k) < report.pairs.size();
        const SweepPair p = has_pair ? report.pairs[e.k] : SweepPair{e.k, kNaN, kNaN};
        csv.row({std::to_string(e.k), io::format_double(e.epsilon), optional_number(p.grad_v_diff_L2),
                 optional_number(p.u_diff_mixed), e.trunc_inactive ? "true" : "false",
                 io::format_double(with_wallclock ? e.wallclock_s : 0.0)});
    }
    return csv.str();
}

Field restrict_to(const Field& fine, const GridSpec& coarse) {
    const GridSpec& fg = fine.grid();
    if (fg.dim != coarse.dim || fg.extent != coarse.extent || fg.cells[0] != 2 * coarse.cells[0] ||
        (coarse.dim == 2 && fg.cells[1] != 2 * coarse.cells[1])) {
        throw std::invalid_argument("restrict_to: fine grid is not a twofold refinement of the coarse grid");
    }
    std::vector<double> out(coarse.cell_count());
    if (coarse.dim == 1) {
        for (int i = 0; i < coarse.cells[0]; ++i) out[i] = 0.5 * (fine[2 * i] + fine[2 * i + 1]);
    } else {
        for (int j = 0; j < coarse.cells[1]; ++j) {
            for (int i = 0; i < coarse.cells[0]; ++i) {
                out[coarse.index(i, j)] = 0.25 * (fine[fg.index(2 * i, 2 * j)] + fine[fg.index(2 * i + 1, 2 * j)] +
                                                  fine[fg.index(2 * i, 2 * j + 1)] + fine[fg.index(2 * i + 1, 2 * j + 1)]);
            }
        }
    }
    return Field(coarse, std::move(out));
}

bool RefinementReport::passes(double min_order) const { return exact || (monotone && observed_order >= min_order); }

std::string RefinementReport::summary() const {
    std::ostringstream os;
    if (exact) {
        os << "order: exact (differences below round-off)";
    } else {
        os << "observed order " << observed_order;
        if (!monotone) os << "; differences not monotone, under-resolved";
    }
    return os.str();
}

RefinementReport refinement_study(const ProblemSpec& problem, int levels) {
    if (levels < 3) throw std::invalid_argument("refinement study needs at least three levels");
    if (problem.time.policy != DtPolicy::fixed) throw std::invalid_argument("refinement study needs a fixed time step");

    RefinementReport report;
    report.levels.resize(levels);
    std::vector<RunConfig> configs;
    for (int l = 0; l < levels; ++l) configs.push_back(problem.refined(l).realize());
    parallel_for(levels, worker_limit(), [&](std::size_t l) {
        const RunOutcome out = run(configs[l]);
        RefinementLevel& lv = report.levels[l];
        lv.level = static_cast<int>(l);
        lv.grid = configs[l].grid;
        lv.dt = configs[l].time.dt;
        lv.completed = out.completed;
        lv.failure = out.failure;
        lv.u_final = out.final_state.u;
    });
    for (const auto& lv : report.levels) {
        if (!lv.completed) throw std::runtime_error("refinement level " + std::to_string(lv.level) + " failed: " + lv.failure);
    }

    double scale = 1.0;
    for (int l = 0; l + 1 < levels; ++l) {
        const Field& coarse = report.levels[l].u_final;
        const Field d = difference(coarse, restrict_to(report.levels[l + 1].u_final, coarse.grid()));
        report.differences.push_back(lp_power(d, 1.0));
        scale = std::max(scale, lp_power(coarse, 1.0));
    }
    report.exact = true;
    for (double d : report.differences) report.exact = report.exact && d <= 1e-12 * scale;
    for (std::size_t i = 0; i + 1 < report.differences.size(); ++i) {
        report.orders.push_back(std::log2(report.differences[i] / report.differences[i + 1]));
        report.monotone = report.monotone && report.differences[i + 1] < report.differences[i];
    }
    report.observed_order = report.orders.back();
    return report;
}

std::string refinement_csv(const RefinementReport& report) {
    io::CsvWriter csv({"level", "cells_x", "cells_y", "dt", "l1_diff_to_next", "order"});
    for (const auto& lv : report.levels) {
        const auto l = static_cast<std::size_t>(lv.level);
        csv.row({std::to_string(lv.level), std::to_string(lv.grid.cells[0]),
                 std::to_string(lv.grid.dim == 2 ? lv.grid.cells[1] : 1), io::format_double(lv.dt),
                 l < report.differences.size() ? optional_number(report.differences[l]) : "",
                 l < report.orders.size() ? optional_number(report.orders[l]) : ""});
    }
    return csv.str();
}

}  // namespace kslg
