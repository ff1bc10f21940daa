/// @file fieldspec.hpp
/// @brief Closed-form and tabulated descriptions of initial data and
/// coefficients, realized on a grid by cell-center evaluation.
///
/// Text forms (whitespace separated):
///   constant c
///   gaussian amp width [x0 y0 [base]]     base + amp exp(-|x - x0|^2 / (2 width^2))
///   cosine base amp kx [ky]               base + amp cos(kx pi (x - x_lo)/Lx) cos(ky pi (y - y_lo)/Ly)
///   random lo hi                          iid uniform per cell, seeded
///   prototype mu1 alpha                   mu1 |x|^alpha
///   file path                             whitespace-separated cell values in storage order

#pragma once

#include "kslg/grid.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace kslg {

class FieldSpecError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct FieldSpec {
    enum class Kind { constant, gaussian, cosine, random, prototype, file };
    Kind kind = Kind::constant;
    std::vector<double> params;
    std::string path;

    static FieldSpec parse(std::string_view text);
    static FieldSpec constant(double c) { return {Kind::constant, {c}, {}}; }
    std::string str() const;
};

/// Portable uniform draw in [0, 1) from 53 high bits of a 64-bit word.
double unit_interval(std::uint64_t bits);

/// Evaluates the spec on `grid`. `seed` only matters for `random`.
Field realize(const FieldSpec& spec, const GridSpec& grid, std::uint64_t seed = 0);

}  // namespace kslg
