#include "suplab/discretize.hpp"

#include <cmath>
#include <sstream>

#include "suplab/errors.hpp"

namespace suplab {

BoundaryTrace BoundaryTrace::affine(double offset, std::vector<double> slope) {
    std::ostringstream os;
    os << "affine(" << offset;
    for (double s : slope) os << "," << s;
    os << ")";
    return {os.str(), [offset, slope](std::span<const double> x) {
                double v = offset;
                for (std::size_t i = 0; i < slope.size() && i < x.size(); ++i) v += slope[i] * x[i];
                return v;
            }};
}

BoundaryTrace BoundaryTrace::endpoints(double x0, double x1, double g0, double g1) {
    std::ostringstream os;
    os << "endpoints(" << g0 << "," << g1 << ")";
    return {os.str(), [=](std::span<const double> x) { return g0 + (g1 - g0) * (x[0] - x0) / (x1 - x0); }};
}

MeshSpec MeshSpec::interval(double x0, double x1, int cells, double g0, double g1) {
    return {1, {x0}, {x1}, {cells}, BoundaryTrace::endpoints(x0, x1, g0, g1)};
}

MeshSpec MeshSpec::square(double lo, double hi, int cells_per_axis, BoundaryTrace g) {
    return {2, {lo, lo}, {hi, hi}, {cells_per_axis, cells_per_axis}, std::move(g)};
}

void MeshSpec::validate() const {
    if (dimension != 1 && dimension != 2) throw StructuralError("MeshSpec: dimension must be 1 or 2");
    const auto d = static_cast<std::size_t>(dimension);
    if (lower.size() != d || upper.size() != d || cells.size() != d)
        throw StructuralError("MeshSpec: per-axis lists must match the dimension");
    for (std::size_t a = 0; a < d; ++a) {
        if (cells[a] < 2) throw StructuralError("MeshSpec: at least 2 cells per axis");
        if (!(upper[a] > lower[a])) throw StructuralError("MeshSpec: extents must be positive");
    }
    if (!boundary.eval) throw StructuralError("MeshSpec: missing boundary trace");
}

std::size_t MeshSpec::node_count() const {
    std::size_t n = 1;
    for (int a = 0; a < dimension; ++a) n *= static_cast<std::size_t>(nodes_along(a));
    return n;
}

std::size_t MeshSpec::cell_count() const {
    std::size_t n = 1;
    for (int a = 0; a < dimension; ++a) n *= static_cast<std::size_t>(cells[a]);
    return n;
}

std::vector<double> MeshSpec::node_coord(std::size_t node) const {
    if (dimension == 1) return {lower[0] + static_cast<double>(node) * spacing(0)};
    const auto nx = static_cast<std::size_t>(nodes_along(0));
    const auto i = node % nx;
    const auto j = node / nx;
    return {lower[0] + static_cast<double>(i) * spacing(0), lower[1] + static_cast<double>(j) * spacing(1)};
}

bool MeshSpec::on_boundary(std::size_t node) const {
    if (dimension == 1) return node == 0 || node == static_cast<std::size_t>(cells[0]);
    const auto nx = static_cast<std::size_t>(nodes_along(0));
    const auto i = node % nx;
    const auto j = node / nx;
    return i == 0 || j == 0 || i == static_cast<std::size_t>(cells[0]) || j == static_cast<std::size_t>(cells[1]);
}

DiscreteField::DiscreteField(MeshSpec mesh, std::vector<double> nodes)
    : mesh_(std::move(mesh)), nodes_(std::move(nodes)) {
    mesh_.validate();
    if (nodes_.size() != mesh_.node_count()) throw StructuralError("DiscreteField: node count mismatch");
    grid_ = Grid::uniform(mesh_.lower, mesh_.upper, mesh_.cells);
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
        if (!mesh_.on_boundary(k)) interior_.push_back(k);
    }
}

std::vector<double> DiscreteField::interior_values() const {
    std::vector<double> v(interior_.size());
    for (std::size_t k = 0; k < interior_.size(); ++k) v[k] = nodes_[interior_[k]];
    return v;
}

void DiscreteField::set_interior(std::span<const double> values) {
    if (values.size() != interior_.size()) throw StructuralError("set_interior: size mismatch");
    for (std::size_t k = 0; k < interior_.size(); ++k) nodes_[interior_[k]] = values[k];
}

CellStencil DiscreteField::stencil(std::size_t cell) const {
    CellStencil s;
    if (mesh_.dimension == 1) {
        const double h = mesh_.spacing(0);
        s.corner_count = 2;
        s.corners = {cell, cell + 1, 0, 0};
        s.coeff[0] = {-1.0 / h, 1.0 / h, 0.0, 0.0};
        return s;
    }
    const auto cx = static_cast<std::size_t>(mesh_.cells[0]);
    const auto nx = cx + 1;
    const auto i = cell % cx;
    const auto j = cell / cx;
    const double hx2 = 2.0 * mesh_.spacing(0);
    const double hy2 = 2.0 * mesh_.spacing(1);
    s.corner_count = 4;
    // (i,j), (i+1,j), (i,j+1), (i+1,j+1)
    s.corners = {j * nx + i, j * nx + i + 1, (j + 1) * nx + i, (j + 1) * nx + i + 1};
    s.coeff[0] = {-1.0 / hx2, 1.0 / hx2, -1.0 / hx2, 1.0 / hx2};
    s.coeff[1] = {-1.0 / hy2, -1.0 / hy2, 1.0 / hy2, 1.0 / hy2};
    return s;
}

GridFunction DiscreteField::cell_values() const {
    std::vector<double> v(mesh_.cell_count());
    for (std::size_t c = 0; c < v.size(); ++c) {
        const CellStencil s = stencil(c);
        double sum = 0.0;
        for (int k = 0; k < s.corner_count; ++k) sum += nodes_[s.corners[static_cast<std::size_t>(k)]];
        v[c] = sum / s.corner_count;
    }
    return GridFunction::scalar(grid_, std::move(v));
}

GridFunction gradient(const DiscreteField& u) {
    const int dim = u.mesh().dimension;
    const std::size_t cells = u.mesh().cell_count();
    std::vector<double> g(cells * static_cast<std::size_t>(dim), 0.0);
    for (std::size_t c = 0; c < cells; ++c) {
        const CellStencil s = u.stencil(c);
        for (int a = 0; a < dim; ++a) {
            double d = 0.0;
            for (int k = 0; k < s.corner_count; ++k) {
                const auto kk = static_cast<std::size_t>(k);
                d += s.coeff[static_cast<std::size_t>(a)][kk] * u.nodes()[s.corners[kk]];
            }
            g[c * static_cast<std::size_t>(dim) + static_cast<std::size_t>(a)] = d;
        }
    }
    return {u.cell_grid(), dim, std::move(g)};
}

DiscreteField interpolate_boundary(const MeshSpec& mesh) {
    mesh.validate();
    const auto& g = mesh.boundary.eval;
    std::vector<double> nodes(mesh.node_count());
    if (mesh.dimension == 1) {
        const double g0 = g(std::vector<double>{mesh.lower[0]});
        const double g1 = g(std::vector<double>{mesh.upper[0]});
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            const double s = static_cast<double>(k) / mesh.cells[0];
            nodes[k] = (1.0 - s) * g0 + s * g1;
        }
        return {mesh, std::move(nodes)};
    }
    const double x0 = mesh.lower[0], x1 = mesh.upper[0];
    const double y0 = mesh.lower[1], y1 = mesh.upper[1];
    auto at = [&](double x, double y) { return g(std::vector<double>{x, y}); };
    const double c00 = at(x0, y0), c10 = at(x1, y0), c01 = at(x0, y1), c11 = at(x1, y1);
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const auto xy = mesh.node_coord(k);
        if (mesh.on_boundary(k)) {
            nodes[k] = g(xy);
            continue;
        }
        const double s = (xy[0] - x0) / (x1 - x0);
        const double t = (xy[1] - y0) / (y1 - y0);
        nodes[k] = (1.0 - s) * at(x0, xy[1]) + s * at(x1, xy[1]) + (1.0 - t) * at(xy[0], y0) + t * at(xy[0], y1) -
                   ((1.0 - s) * (1.0 - t) * c00 + s * (1.0 - t) * c10 + (1.0 - s) * t * c01 + s * t * c11);
    }
    return {mesh, std::move(nodes)};
}

}  // namespace suplab
