#pragma once

// Uniform 1-D/2-D node meshes. Unknowns live on nodes, energies on cells;
// boundary nodes carry Dirichlet data and are never modified.

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "suplab/exponent_space.hpp"

namespace suplab {

struct BoundaryTrace {
    std::string name;
    PointFunction eval;

    /// g(x) = offset + slope . x
    static BoundaryTrace affine(double offset, std::vector<double> slope);
    /// 1-D: linear in x with g(x0) = g0, g(x1) = g1.
    static BoundaryTrace endpoints(double x0, double x1, double g0, double g1);
};

struct MeshSpec {
    int dimension = 1;
    std::vector<double> lower{0.0};
    std::vector<double> upper{1.0};
    std::vector<int> cells{2};
    BoundaryTrace boundary = BoundaryTrace::affine(0.0, {1.0});

    static MeshSpec interval(double x0, double x1, int cells, double g0, double g1);
    static MeshSpec square(double lo, double hi, int cells_per_axis, BoundaryTrace g);

    /// Throws StructuralError unless cells >= 2 and extents > 0 on every axis.
    void validate() const;

    [[nodiscard]] double spacing(int axis) const { return (upper[axis] - lower[axis]) / cells[axis]; }
    [[nodiscard]] int nodes_along(int axis) const { return cells[axis] + 1; }
    [[nodiscard]] std::size_t node_count() const;
    [[nodiscard]] std::size_t cell_count() const;
    [[nodiscard]] std::vector<double> node_coord(std::size_t node) const;
    [[nodiscard]] bool on_boundary(std::size_t node) const;
};

/// Corner nodes of a cell and d(gradient component)/d(corner value).
struct CellStencil {
    std::array<std::size_t, 4> corners{};
    int corner_count = 0;
    // coeff[axis][k]
    std::array<std::array<double, 4>, 2> coeff{};
};

class DiscreteField {
public:
    DiscreteField(MeshSpec mesh, std::vector<double> nodes);

    [[nodiscard]] const MeshSpec& mesh() const noexcept { return mesh_; }
    [[nodiscard]] const GridPtr& cell_grid() const noexcept { return grid_; }
    [[nodiscard]] std::span<const double> nodes() const noexcept { return nodes_; }
    [[nodiscard]] std::span<const std::size_t> interior() const noexcept { return interior_; }
    [[nodiscard]] std::vector<double> interior_values() const;
    /// Writes interior node values in interior() order; boundary untouched.
    void set_interior(std::span<const double> values);

    [[nodiscard]] CellStencil stencil(std::size_t cell) const;

    /// Cell-center values (mean of corners).
    [[nodiscard]] GridFunction cell_values() const;

private:
    MeshSpec mesh_;
    GridPtr grid_;
    std::vector<double> nodes_;
    std::vector<std::size_t> interior_;
};

/// 1-D: forward difference across the cell; 2-D: edge differences averaged
/// over the cell. Exact for affine fields.
GridFunction gradient(const DiscreteField& u);

/// Linear (1-D) or transfinite (2-D) interpolation of the boundary trace.
DiscreteField interpolate_boundary(const MeshSpec& mesh);

}  // namespace suplab
