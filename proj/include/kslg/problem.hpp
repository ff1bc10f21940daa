/// @file problem.hpp
/// @brief Grid-independent description of a run: field specs instead of
/// realized fields, so the same problem can be posed on refined grids.

#pragma once

#include "kslg/fieldspec.hpp"
#include "kslg/solver.hpp"

#include <cstdint>

namespace kslg {

struct ProblemSpec {
    GridSpec grid;
    FieldSpec lambda = FieldSpec::constant(1.0);
    FieldSpec mu = FieldSpec::constant(1.0);
    FieldSpec u0 = FieldSpec::constant(1.0);
    FieldSpec v0 = FieldSpec::constant(1.0);
    std::uint64_t seed = 1;  ///< u0 uses seed, v0 seed+1, lambda seed+2, mu seed+3
    double kappa = 2.0;
    TruncationSpec truncation;
    double chi = 1.0;
    double T = 1.0;
    TimeStepping time;
    double cg_tol = 1e-10;

    RunConfig realize() const;
    /// Cells doubled per axis and dt halved `times` times.
    ProblemSpec refined(int times) const;
};

}  // namespace kslg
