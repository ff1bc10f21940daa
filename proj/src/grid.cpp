#include "kslg/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace kslg {

GridSpec GridSpec::line(int nx, double length) {
    GridSpec g;
    g.dim = 1;
    g.cells = {nx, 1};
    g.extent = {length, 1.0};
    g.validate();
    return g;
}

GridSpec GridSpec::rectangle(int nx, int ny, double lx, double ly) {
    GridSpec g;
    g.dim = 2;
    g.cells = {nx, ny};
    g.extent = {lx, ly};
    g.validate();
    return g;
}

void GridSpec::validate() const {
    if (dim != 1 && dim != 2) {
        throw GridError("grid dimension must be 1 or 2, got " + std::to_string(dim));
    }
    for (int axis = 0; axis < dim; ++axis) {
        if (cells[axis] < 4) {
            throw GridError("need at least 4 cells per axis, axis " + std::to_string(axis) + " has " +
                            std::to_string(cells[axis]));
        }
        if (!(extent[axis] > 0.0) || !std::isfinite(extent[axis])) {
            throw GridError("extent along axis " + std::to_string(axis) + " must be positive and finite");
        }
    }
    if (dim == 1 && (cells[1] != 1 || extent[1] != 1.0)) {
        throw GridError("1D grids carry cells[1] = 1 and extent[1] = 1");
    }
}

std::size_t GridSpec::cell_count() const {
    return static_cast<std::size_t>(cells[0]) * static_cast<std::size_t>(dim == 2 ? cells[1] : 1);
}

double GridSpec::max_spacing() const { return dim == 2 ? std::max(spacing(0), spacing(1)) : spacing(0); }

double GridSpec::cell_volume() const { return dim == 2 ? spacing(0) * spacing(1) : spacing(0); }

double GridSpec::domain_volume() const { return dim == 2 ? extent[0] * extent[1] : extent[0]; }

double GridSpec::face_area(int axis) const {
    if (dim == 1) return 1.0;
    return axis == 0 ? spacing(1) : spacing(0);
}

std::array<double, 2> GridSpec::center(std::size_t index) const {
    const int nx = cells[0];
    const int i = static_cast<int>(index % static_cast<std::size_t>(nx));
    const int j = static_cast<int>(index / static_cast<std::size_t>(nx));
    const double x = lower(0) + (i + 0.5) * spacing(0);
    const double y = dim == 2 ? lower(1) + (j + 0.5) * spacing(1) : 0.0;
    return {x, y};
}

Field::Field(const GridSpec& grid, double value) : grid_(grid), values_(grid.cell_count(), value) {}

Field::Field(const GridSpec& grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.cell_count()) {
        throw GridError("field has " + std::to_string(values_.size()) + " values, grid has " +
                        std::to_string(grid_.cell_count()) + " cells");
    }
}

bool Field::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double x) { return std::isfinite(x); });
}

double Field::min() const { return *std::min_element(values_.begin(), values_.end()); }

double Field::max() const { return *std::max_element(values_.begin(), values_.end()); }

CoefficientField CoefficientField::make(Field lambda, Field mu) {
    if (!(lambda.grid() == mu.grid())) {
        throw GridError("lambda and mu live on different grids");
    }
    if (!lambda.all_finite() || !mu.all_finite()) {
        throw GridError("coefficient fields must be finite");
    }
    if (mu.min() < 0.0) {
        throw GridError("mu must be nonnegative");
    }
    CoefficientField c;
    c.lambda_sup = 0.0;
    for (double x : lambda.values()) c.lambda_sup = std::max(c.lambda_sup, std::abs(x));
    c.lambda_vals = std::move(lambda);
    c.mu_vals = std::move(mu);
    return c;
}

Field sample(const GridSpec& grid, const std::function<double(double, double)>& f) {
    Field out(grid);
    for (std::size_t c = 0; c < out.size(); ++c) {
        const auto x = grid.center(c);
        out[c] = f(x[0], x[1]);
    }
    return out;
}

Field sample_prototype_mu(const GridSpec& grid, double mu1, double alpha) {
    if (!(mu1 > 0.0)) throw GridError("mu1 must be positive");
    if (!(alpha >= 0.0)) throw GridError("alpha must be nonnegative");
    return sample(grid, [&](double x, double y) {
        if (alpha == 0.0) return mu1;
        return mu1 * std::pow(std::hypot(x, y), alpha);
    });
}

double integrate(const Field& f) {
    double sum = 0.0;
    for (double x : f.values()) sum += x;
    return sum * f.grid().cell_volume();
}

double grad_sq_faces(const Field& f) {
    const GridSpec& g = f.grid();
    const std::array<double, 2> inv_h{1.0 / g.spacing(0), g.dim == 2 ? 1.0 / g.spacing(1) : 0.0};
    double sum = 0.0;
    for_each_interior_face(g, [&](const InteriorFace& face) {
        const double d = (f[face.hi] - f[face.lo]) * inv_h[face.axis];
        sum += d * d;
    });
    return sum * g.cell_volume();
}

}  // namespace kslg
