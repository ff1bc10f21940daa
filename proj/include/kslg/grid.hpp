/// @file grid.hpp
/// @brief Cell-centered uniform grid on an axis-aligned box centered at the
/// origin, cell-average fields, and the quadratures used throughout.

#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace kslg {

class GridError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// dim = 1 uses only axis 0; cells[1] and extent[1] are ignored and held at 1.
struct GridSpec {
    int dim = 1;
    std::array<int, 2> cells{4, 1};
    std::array<double, 2> extent{1.0, 1.0};

    static GridSpec line(int nx, double length);
    static GridSpec rectangle(int nx, int ny, double lx, double ly);

    /// Throws GridError unless dim is 1 or 2, every active axis has at least
    /// four cells and a positive finite extent.
    void validate() const;

    std::size_t cell_count() const;
    double spacing(int axis) const { return extent[axis] / cells[axis]; }
    double max_spacing() const;
    double cell_volume() const;
    double domain_volume() const;
    /// Measure of a face normal to `axis`.
    double face_area(int axis) const;

    std::size_t index(int i, int j = 0) const { return static_cast<std::size_t>(i) + static_cast<std::size_t>(cells[0]) * j; }
    std::array<double, 2> center(std::size_t index) const;
    /// Lower corner of the box (the box is centered at the origin).
    double lower(int axis) const { return -0.5 * extent[axis]; }

    bool operator==(const GridSpec&) const = default;
};

/// One scalar cell-average per cell of a grid.
class Field {
public:
    Field() = default;
    explicit Field(const GridSpec& grid, double value = 0.0);
    Field(const GridSpec& grid, std::vector<double> values);

    const GridSpec& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }

    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    bool all_finite() const;
    double min() const;
    double max() const;

    bool operator==(const Field&) const = default;

private:
    GridSpec grid_;
    std::vector<double> values_;
};

/// Sampled lambda(x), mu(x) >= 0 and lambda_sup = max |lambda| over cells.
struct CoefficientField {
    Field lambda_vals;
    Field mu_vals;
    double lambda_sup = 0.0;

    /// Validates mu >= 0, matching grids, finiteness; computes lambda_sup.
    static CoefficientField make(Field lambda, Field mu);
};

/// Evaluates f at every cell center.
Field sample(const GridSpec& grid, const std::function<double(double, double)>& f);

/// mu1 |x_c|^alpha at each cell center x_c.
Field sample_prototype_mu(const GridSpec& grid, double mu1, double alpha);

/// Sum of cell values times cell volume.
double integrate(const Field& f);

/// Face-difference quadrature of the integral of |grad f|^2 with zero-flux
/// closure: boundary faces contribute nothing.
double grad_sq_faces(const Field& f);

struct InteriorFace {
    int axis;
    std::size_t lo;  ///< cell on the negative side
    std::size_t hi;  ///< cell on the positive side
    std::array<double, 2> midpoint;
};

/// Visits every interior face in a fixed order: axis 0 faces row by row,
/// then axis 1 faces.
template <class Visitor>
void for_each_interior_face(const GridSpec& grid, Visitor&& visit) {
    const int nx = grid.cells[0];
    const int ny = grid.dim == 2 ? grid.cells[1] : 1;
    const double hx = grid.spacing(0);
    const double hy = grid.dim == 2 ? grid.spacing(1) : 0.0;
    const double x0 = grid.lower(0);
    const double y0 = grid.dim == 2 ? grid.lower(1) : 0.0;
    for (int j = 0; j < ny; ++j) {
        const double yc = grid.dim == 2 ? y0 + (j + 0.5) * hy : 0.0;
        for (int i = 0; i + 1 < nx; ++i) {
            visit(InteriorFace{0, grid.index(i, j), grid.index(i + 1, j), {x0 + (i + 1) * hx, yc}});
        }
    }
    if (grid.dim == 2) {
        for (int j = 0; j + 1 < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                visit(InteriorFace{1, grid.index(i, j), grid.index(i, j + 1), {x0 + (i + 0.5) * hx, y0 + (j + 1) * hy}});
            }
        }
    }
}

}  // namespace kslg
