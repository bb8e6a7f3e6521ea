#include <cmath>
#include <vector>

#include "doctest.h"
#include "suplab/errors.hpp"
#include "suplab/measure_tools.hpp"
#include "suplab/property_suite.hpp"

using namespace suplab;

namespace {

GridPtr unit_cell() { return Grid::uniform_1d(0.0, 1.0, 1); }

}  // namespace

TEST_SUITE("measure_tools") {
    TEST_CASE("measure validation") {
        CHECK_THROWS_AS(DiscreteYoungMeasure(unit_cell(), {{{{1.0}, 0.4}, {{2.0}, 0.4}}}), StructuralError);
        CHECK_THROWS_AS(DiscreteYoungMeasure(unit_cell(), {{{{1.0}, 1.2}, {{2.0}, -0.2}}}), StructuralError);
        CHECK_THROWS_AS(DiscreteYoungMeasure(unit_cell(), {{{{1.0}, 0.5}, {{2.0, 1.0}, 0.5}}}), StructuralError);
        CHECK_THROWS_AS(DiscreteYoungMeasure(unit_cell(), {}), StructuralError);
    }

    TEST_CASE("barycenter closed forms") {
        const GridPtr g = Grid::uniform_1d(0.0, 1.0, 3);
        const DiscreteYoungMeasure mu(g, {{{{4.0}, 1.0}}, {{{2.0}, 0.5}, {{-2.0}, 0.5}}, {{{1.0}, 0.25}, {{3.0}, 0.75}}});
        const GridFunction b = barycenter(mu);
        CHECK(b[0] == doctest::Approx(4.0));
        CHECK(b[1] == doctest::Approx(0.0));
        CHECK(b[2] == doctest::Approx(2.5));
    }

    TEST_CASE("jensen closed forms") {
        const std::vector<Atom> sym{{{1.0}, 0.5}, {{-1.0}, 0.5}};
        const auto norm = [](std::span<const double> xi) { return std::abs(xi[0]); };
        CHECK(jensen_check(norm, sym).all_passed());

        const GridPtr g = unit_cell();
        const DensitySpec f = DensitySpec::weighted_norm(g, CoefficientProfile::constant(2.0));
        const std::vector<Atom> atoms{{{1.0}, 0.25}, {{3.0}, 0.75}};
        const std::vector<double> u{0.0};
        const RelationReport r = jensen_check(f, 0, u, atoms);
        CHECK(r.all_passed());
        CHECK(r.checks().front().slack == doctest::Approx(1.0));  // f(2.5) = 5 <= 6

        const auto negative = [](std::span<const double> xi) { return -std::abs(xi[0]); };
        CHECK_FALSE(jensen_check(negative, sym).all_passed());

        CHECK_THROWS_AS(jensen_check(annulus_density(2), 0, u, sym), PreconditionError);
    }

    TEST_CASE("jensen holds for every level-convex family on random atoms") {
        const RelationReport r = jensen_suite(1000, 42);
        for (const auto& c : r.checks()) {
            INFO(c.name << " " << c.detail);
            CHECK(c.passed);
        }
    }

    TEST_CASE("q-limit of two atoms") {
        const GridPtr g = unit_cell();
        const DensitySpec f = DensitySpec::weighted_norm(g, CoefficientProfile::constant(1.0));
        const DiscreteYoungMeasure mu(g, {{{{1.0}, 0.5}, {{3.0}, 0.5}}});
        const std::vector<double> q{2.0, 200.0};
        const QLimitTable t = young_q_limit(f, GridFunction::constant(g, 0.0), mu, q);
        CHECK(t.limit == doctest::Approx(3.0));
        CHECK(t.rows[0].value == doctest::Approx(std::sqrt(0.5 + 0.5 * 9.0)));
        const double closed = std::pow(0.5 + 0.5 * std::pow(3.0, 200.0), 1.0 / 200.0);
        CHECK(t.rows[1].value == doctest::Approx(closed).epsilon(1e-12));
        CHECK(t.rows[1].error / 3.0 < 0.02);
    }

    TEST_CASE("q-limit of single atoms") {
        const GridPtr g = Grid::uniform_1d(0.0, 1.0, 4);
        const DensitySpec f = DensitySpec::weighted_norm(g, CoefficientProfile::constant(1.0));
        const DiscreteYoungMeasure mu(g, {{{{2.0}, 1.0}}, {{{-2.0}, 1.0}}, {{{2.0}, 1.0}}, {{{2.0}, 1.0}}});
        for (const auto& row : young_q_limit(f, GridFunction::constant(g, 0.0), mu, default_q_schedule()).rows)
            CHECK(row.value == doctest::Approx(2.0).epsilon(1e-12));

        const GridPtr two = Grid::from_cells(1, {0.15, 0.65}, {0.3, 0.7});
        const DensitySpec f2 = DensitySpec::weighted_norm(two, CoefficientProfile::constant(1.0));
        const DiscreteYoungMeasure mu2(two, {{{{2.0}, 1.0}}, {{{5.0}, 1.0}}});
        const QLimitTable t = young_q_limit(f2, GridFunction::constant(two, 0.0), mu2, default_q_schedule());
        CHECK(t.limit == doctest::Approx(5.0));
        CHECK(t.final_error < 5.0 * 1e-3);
    }

    TEST_CASE("normalized q rows are nondecreasing") {
        const RelationReport r = q_limit_suite(9);
        for (const auto& c : r.checks()) {
            INFO(c.name << " " << c.detail);
            CHECK(c.passed);
        }
    }

    TEST_CASE("default q schedule") {
        const auto q = default_q_schedule();
        REQUIRE(q.size() == 10);
        CHECK(q.front() == 2.0);
        CHECK(q.back() == 1024.0);
    }
}
