#include <cmath>
#include <vector>

#include "doctest.h"
#include "suplab/discretize.hpp"
#include "suplab/energy.hpp"
#include "suplab/errors.hpp"

using namespace suplab;

TEST_SUITE("discretize") {
    TEST_CASE("mesh validation and indexing") {
        CHECK_THROWS(MeshSpec::interval(0.0, 1.0, 1, 0.0, 1.0).validate());
        CHECK_THROWS(MeshSpec::interval(1.0, 1.0, 4, 0.0, 1.0).validate());
        const MeshSpec sq = MeshSpec::square(0.0, 1.0, 3, BoundaryTrace::affine(0.0, {1.0, 0.0}));
        CHECK(sq.node_count() == 16);
        CHECK(sq.cell_count() == 9);
        CHECK(sq.on_boundary(0));
        CHECK_FALSE(sq.on_boundary(5));
        const auto xy = sq.node_coord(6);
        CHECK(xy[0] == doctest::Approx(2.0 / 3.0));
        CHECK(xy[1] == doctest::Approx(1.0 / 3.0));
    }

    TEST_CASE("affine fields have exact gradients") {
        const MeshSpec m = MeshSpec::interval(0.0, 2.0, 10, 1.0, -3.0);
        const GridFunction du = gradient(interpolate_boundary(m));
        for (std::size_t i = 0; i < du.size(); ++i) CHECK(du[i] == doctest::Approx(-2.0).epsilon(1e-14));

        const MeshSpec sq = MeshSpec::square(0.0, 1.0, 5, BoundaryTrace::affine(0.0, {1.0, 2.0}));
        const GridFunction d2 = gradient(interpolate_boundary(sq));
        for (std::size_t i = 0; i < d2.size(); ++i) {
            CHECK(d2.at(i)[0] == doctest::Approx(1.0).epsilon(1e-13));
            CHECK(d2.at(i)[1] == doctest::Approx(2.0).epsilon(1e-13));
        }
    }

    TEST_CASE("quadratic field gradients equal twice the cell midpoint") {
        const MeshSpec m = MeshSpec::interval(0.0, 1.0, 100, 0.0, 1.0);
        std::vector<double> nodes(m.node_count());
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            const double x = m.node_coord(k)[0];
            nodes[k] = x * x;
        }
        const DiscreteField u(m, nodes);
        const GridFunction du = gradient(u);
        for (std::size_t i = 0; i < du.size(); ++i)
            CHECK(du[i] == doctest::Approx(2.0 * u.cell_grid()->center(i)[0]).epsilon(1e-12));
    }

    TEST_CASE("gradient is linear") {
        const MeshSpec m = MeshSpec::square(0.0, 1.0, 4, BoundaryTrace::affine(0.0, {0.0, 0.0}));
        std::vector<double> a(m.node_count()), b(m.node_count()), c(m.node_count());
        for (std::size_t k = 0; k < a.size(); ++k) {
            a[k] = std::sin(1.0 + static_cast<double>(k));
            b[k] = std::cos(3.0 * static_cast<double>(k));
            c[k] = 2.0 * a[k] - 0.5 * b[k];
        }
        const GridFunction ga = gradient(DiscreteField(m, a)), gb = gradient(DiscreteField(m, b)),
                           gc = gradient(DiscreteField(m, c));
        for (std::size_t i = 0; i < ga.values().size(); ++i)
            CHECK(gc.values()[i] == doctest::Approx(2.0 * ga.values()[i] - 0.5 * gb.values()[i]).epsilon(1e-12));
    }

    TEST_CASE("boundary interpolation") {
        const DiscreteField lin = interpolate_boundary(MeshSpec::interval(0.0, 1.0, 8, 0.0, 1.0));
        for (std::size_t k = 0; k < lin.nodes().size(); ++k) CHECK(lin.nodes()[k] == doctest::Approx(k / 8.0));
        const DiscreteField zero = interpolate_boundary(MeshSpec::interval(0.0, 1.0, 8, 0.0, 0.0));
        for (double v : zero.nodes()) CHECK(v == 0.0);
        const MeshSpec sq = MeshSpec::square(0.0, 1.0, 6, BoundaryTrace::affine(0.0, {1.0, 0.0}));
        const DiscreteField u = interpolate_boundary(sq);
        for (std::size_t k = 0; k < sq.node_count(); ++k) CHECK(u.nodes()[k] == doctest::Approx(sq.node_coord(k)[0]));
    }

    TEST_CASE("interior slots round-trip") {
        const MeshSpec sq = MeshSpec::square(0.0, 1.0, 4, BoundaryTrace::affine(1.0, {0.0, 0.0}));
        DiscreteField u = interpolate_boundary(sq);
        CHECK(u.interior().size() == 9);
        std::vector<double> vals(9);
        for (std::size_t i = 0; i < 9; ++i) vals[i] = static_cast<double>(i);
        u.set_interior(vals);
        CHECK(u.interior_values() == vals);
        for (std::size_t k = 0; k < sq.node_count(); ++k)
            if (sq.on_boundary(k)) CHECK(u.nodes()[k] == 1.0);
    }

    TEST_CASE("affine data gives the slope as supremal value") {
        const MeshSpec sq = MeshSpec::square(0.0, 1.0, 8, BoundaryTrace::affine(0.5, {1.0, -0.5}));
        const DiscreteField u = interpolate_boundary(sq);
        const auto f = DensitySpec::weighted_norm(u.cell_grid(), CoefficientProfile::constant(1.0));
        CHECK(eval_supremal(f, u.cell_values(), gradient(u)) == doctest::Approx(std::hypot(1.0, 0.5)).epsilon(1e-13));
    }
}
