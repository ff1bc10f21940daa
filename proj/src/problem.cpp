#include "kslg/problem.hpp"

namespace kslg {

RunConfig ProblemSpec::realize() const {
    grid.validate();
    RunConfig cfg;
    cfg.grid = grid;
    cfg.coefficients = CoefficientField::make(kslg::realize(lambda, grid, seed + 2), kslg::realize(mu, grid, seed + 3));
    cfg.kappa = kappa;
    cfg.truncation = truncation;
    cfg.chi = chi;
    cfg.u0 = kslg::realize(u0, grid, seed);
    cfg.v0 = kslg::realize(v0, grid, seed + 1);
    cfg.T = T;
    cfg.time = time;
    cfg.cg_tol = cg_tol;
    cfg.validate();
    return cfg;
}

ProblemSpec ProblemSpec::refined(int times) const {
    ProblemSpec out = *this;
    for (int i = 0; i < times; ++i) {
        out.grid.cells[0] *= 2;
        if (out.grid.dim == 2) out.grid.cells[1] *= 2;
        out.time.dt *= 0.5;
    }
    return out;
}

}  // namespace kslg
