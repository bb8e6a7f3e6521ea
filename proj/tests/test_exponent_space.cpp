#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "suplab/errors.hpp"
#include "suplab/exponent_space.hpp"
#include "suplab/random.hpp"

using namespace suplab;

namespace {

// Independent Luxemburg norm: direct long-double power sums and plain
// bisection on a fixed wide bracket.
long double brute_luxemburg(const std::vector<double>& w, const std::vector<double>& u, const std::vector<double>& p) {
    auto rho = [&](long double lambda) {
        long double s = 0.0L;
        for (std::size_t i = 0; i < u.size(); ++i) s += w[i] * std::pow(std::fabs(u[i]) / lambda, (long double)p[i]);
        return s;
    };
    long double lo = 1e-6L, hi = 1e6L;
    for (int k = 0; k < 400; ++k) {
        const long double mid = std::sqrt(lo * hi);
        (rho(mid) > 1.0L ? lo : hi) = mid;
    }
    return hi;
}

GridPtr halves() { return Grid::uniform_1d(0.0, 1.0, 2); }

ExponentField piecewise_p() { return ExponentField(halves(), {2.0, 4.0}); }

}  // namespace

TEST_SUITE("exponent_space") {
    TEST_CASE("grid weights and centers") {
        const GridPtr g = Grid::uniform_1d(0.0, 2.0, 4);
        CHECK(g->size() == 4);
        CHECK(g->total_measure() == doctest::Approx(2.0));
        CHECK(g->center(0)[0] == doctest::Approx(0.25));
        const std::vector<double> lo{0.0, 0.0}, hi{1.0, 2.0};
        const std::vector<int> n{2, 4};
        const GridPtr g2 = Grid::uniform(lo, hi, n);
        CHECK(g2->size() == 8);
        CHECK(g2->total_measure() == doctest::Approx(2.0));
        CHECK(g2->center(1)[0] == doctest::Approx(0.75));
        CHECK(g2->center(1)[1] == doctest::Approx(0.25));
    }

    TEST_CASE("exponent field rejects values below one and non-finite values") {
        CHECK_THROWS_AS(ExponentField(halves(), {0.5, 2.0}), StructuralError);
        CHECK_THROWS_AS(ExponentField(halves(), {2.0, std::numeric_limits<double>::infinity()}), StructuralError);
        CHECK_THROWS(ExponentField(halves(), {2.0}));
        const ExponentField p = piecewise_p();
        CHECK(p.p_minus() == 2.0);
        CHECK(p.p_plus() == 4.0);
    }

    TEST_CASE("modular closed forms") {
        const GridPtr g = Grid::uniform_1d(0.0, 3.0, 5);
        CHECK(modular(GridFunction::constant(g, 1.0), ExponentField::constant(g, 2.5)) == doctest::Approx(3.0));
        const GridPtr unit = Grid::uniform_1d(0.0, 1.0, 7);
        CHECK(modular(GridFunction::constant(unit, 2.0), ExponentField::constant(unit, 3.0)) == doctest::Approx(8.0));
        CHECK(modular(GridFunction::constant(halves(), 2.0), piecewise_p()) == doctest::Approx(10.0));
        CHECK(modular(GridFunction::constant(unit, 0.0), ExponentField::constant(unit, 3.0)) == 0.0);
    }

    TEST_CASE("modular overflow sentinel and log modular") {
        const GridPtr unit = Grid::uniform_1d(0.0, 1.0, 4);
        const GridFunction u = GridFunction::constant(unit, 10.0);
        const ExponentField p = ExponentField::constant(unit, 400.0);
        CHECK(modular(u, p) == std::numeric_limits<double>::infinity());
        CHECK(log_modular(u, p) == doctest::Approx(400.0 * std::log(10.0)));
        CHECK(log_modular(GridFunction::constant(unit, 0.0), p) == -std::numeric_limits<double>::infinity());
    }

    TEST_CASE("luxemburg norm closed forms") {
        const GridPtr unit = Grid::uniform_1d(0.0, 1.0, 9);
        CHECK(luxemburg_norm(GridFunction::constant(unit, 3.7), ExponentField::constant(unit, 5.0)) ==
              doctest::Approx(3.7).epsilon(1e-11));
        CHECK(luxemburg_norm(GridFunction::constant(halves(), 2.0), piecewise_p()) == doctest::Approx(2.0).epsilon(1e-11));
        CHECK(luxemburg_norm(GridFunction::constant(unit, 0.0), ExponentField::constant(unit, 5.0)) == 0.0);
    }

    TEST_CASE("luxemburg norm matches the long double oracle") {
        Rng rng(7);
        for (int k = 0; k < 50; ++k) {
            const int cells = rng.integer(3, 40);
            const GridPtr g = Grid::uniform_1d(0.0, rng.uniform(0.3, 3.0), cells);
            std::vector<double> u(static_cast<std::size_t>(cells)), p(u.size());
            for (std::size_t i = 0; i < u.size(); ++i) {
                u[i] = rng.uniform(-5.0, 5.0);
                p[i] = rng.uniform(1.0, 12.0);
            }
            const std::vector<double> w(g->weights().begin(), g->weights().end());
            const double got = luxemburg_norm(GridFunction::scalar(g, u), ExponentField(g, p));
            CHECK(got == doctest::Approx(static_cast<double>(brute_luxemburg(w, u, p))).epsilon(1e-10));
        }
    }

    TEST_CASE("luxemburg root solves a monotone equation") {
        const double root = luxemburg_root([](double l) { return 4.0 / (l * l); }, 0.1);
        CHECK(root == doctest::Approx(2.0).epsilon(1e-11));
    }

    TEST_CASE("norm-modular relations on closed-form fields") {
        const GridPtr unit = Grid::uniform_1d(0.0, 1.0, 6);
        const RelationReport ones = verify_norm_modular_relations(GridFunction::constant(unit, 1.0),
                                                                  ExponentField::from_profile(unit, [](auto x) {
                                                                      return 1.5 + x[0];
                                                                  }));
        CHECK(ones.all_passed());
        const GridFunction two = GridFunction::constant(halves(), 2.0);
        const RelationReport r = verify_norm_modular_relations(two, piecewise_p());
        CHECK(r.all_passed());
        CHECK(std::pow(10.0, 0.25) <= luxemburg_norm(two, piecewise_p()));
        CHECK(luxemburg_norm(two, piecewise_p()) <= std::pow(10.0, 0.5));
    }

    TEST_CASE("homogeneity, triangle inequality and constant-exponent consistency") {
        Rng rng(11);
        for (int k = 0; k < 100; ++k) {
            const int cells = rng.integer(16, 64);
            const GridPtr g = Grid::uniform_1d(0.0, 1.0, cells);
            std::vector<double> u(static_cast<std::size_t>(cells)), v(u.size()), p(u.size());
            for (std::size_t i = 0; i < u.size(); ++i) {
                u[i] = rng.uniform(-2.0, 2.0);
                v[i] = rng.uniform(-2.0, 2.0);
                p[i] = rng.uniform(1.0, 6.0);
            }
            const GridFunction fu = GridFunction::scalar(g, u), fv = GridFunction::scalar(g, v);
            const ExponentField pe(g, p);
            const double c = rng.uniform(-10.0, 10.0);
            CHECK(luxemburg_norm(fu.scaled(c), pe) == doctest::Approx(std::abs(c) * luxemburg_norm(fu, pe)).epsilon(1e-10));
            CHECK(luxemburg_norm(fu + fv, pe) <= luxemburg_norm(fu, pe) + luxemburg_norm(fv, pe) + 1e-12);
            const double q = p[0];
            CHECK(luxemburg_norm(fu, ExponentField::constant(g, q)) == doctest::Approx(lebesgue_norm(fu, q)).epsilon(1e-10));
        }
    }

    TEST_CASE("modular is monotone and strictly decreasing in lambda") {
        const GridPtr g = Grid::uniform_1d(0.0, 1.0, 10);
        const GridFunction u = GridFunction::from_function(g, [](auto x) { return std::sin(7.0 * x[0]); });
        const ExponentField p = ExponentField::from_profile(g, [](auto x) { return 2.0 + x[0]; });
        CHECK(modular(u, p) <= modular(u.scaled(1.5), p));
        double prev = std::numeric_limits<double>::infinity();
        for (double lambda = 0.05; lambda < 20.0; lambda *= 1.3) {
            const double rho = modular_scaled(u, p, lambda);
            CHECK(rho < prev);
            prev = rho;
        }
    }

    TEST_CASE("holder inequality closed forms and structural check") {
        const GridPtr unit = Grid::uniform_1d(0.0, 1.0, 4);
        const auto two = ExponentField::constant(unit, 2.0), one = ExponentField::constant(unit, 1.0);
        const RelationReport eq = holder_check(GridFunction::constant(unit, 1.0), GridFunction::constant(unit, 1.0), two,
                                               two, one);
        CHECK(eq.all_passed());
        const RelationReport cs = holder_check(GridFunction::constant(unit, 2.0), GridFunction::constant(unit, 3.0), two,
                                               two, one);
        CHECK(cs.all_passed());
        CHECK(cs.min_slack("holder s=1") == doctest::Approx(0.0).epsilon(1e-9));
        CHECK_THROWS_AS(holder_check(GridFunction::constant(unit, 1.0), GridFunction::constant(unit, 1.0), two, two, two),
                        StructuralError);

        Rng rng(3);
        std::vector<double> f(4), gv(4);
        for (int k = 0; k < 50; ++k) {
            for (std::size_t i = 0; i < 4; ++i) {
                f[i] = rng.uniform(-3.0, 3.0);
                gv[i] = rng.uniform(-3.0, 3.0);
            }
            CHECK(holder_check(GridFunction::scalar(unit, f), GridFunction::scalar(unit, gv),
                               ExponentField::constant(unit, 3.0), ExponentField::constant(unit, 1.5), one)
                      .all_passed());
        }
    }

    TEST_CASE("power identity") {
        const GridFunction two = GridFunction::constant(halves(), 2.0);
        CHECK(luxemburg_norm(two.abs_pow(2.0), piecewise_p().divided_by(2.0)) == doctest::Approx(4.0).epsilon(1e-10));
        CHECK_THROWS_AS(power_identity_check(two, piecewise_p(), 2.0), PreconditionError);
        const GridPtr unit = Grid::uniform_1d(0.0, 1.0, 64);
        CHECK(power_identity_check(GridFunction::constant(unit, 1.7), ExponentField::constant(unit, 4.0), 2.5).all_passed());
        Rng rng(5);
        std::vector<double> u(64);
        for (double& v : u) v = rng.uniform(-4.0, 4.0);
        CHECK(power_identity_check(GridFunction::scalar(unit, u), ExponentField::constant(unit, 5.0), 2.0).all_passed());
    }

    TEST_CASE("embedding bound") {
        const GridPtr unit = Grid::uniform_1d(0.0, 1.0, 8);
        const double c1 = embedding_constant(1.0, 2.0, 3.0, 5.0, 2.0);
        CHECK(c1 == doctest::Approx(std::sqrt(1.0 + 2.0 / 5.0)));
        CHECK(embedding_bound_check(GridFunction::constant(unit, 1.0), ExponentField::constant(unit, 3.0), 2.0, 2.0)
                  .all_passed());
        const GridFunction two = GridFunction::constant(halves(), 2.0);
        CHECK(embedding_constant(1.0, 2.0, 2.0, 4.0, 2.0) * luxemburg_norm(two, piecewise_p()) ==
              doctest::Approx(std::sqrt(1.5) * 2.0));
        CHECK(embedding_bound_check(two, piecewise_p(), 2.0, 2.0).all_passed());
        CHECK_THROWS_AS(embedding_bound_check(two, piecewise_p(), 3.0, 2.0), PreconditionError);
        CHECK_THROWS_AS(embedding_bound_check(two, piecewise_p(), 2.0, 1.5), PreconditionError);
    }

    TEST_CASE("exponent sequences") {
        CHECK_THROWS(ExponentSequence::scaled_profile(halves(), [](auto) { return 1.0; }, 1.0));
        const auto seq = ExponentSequence::scaled_profile(halves(), [](auto x) { return 2.0 + x[0]; }, 3.0);
        const std::vector<int> ns{2, 4, 8};
        CHECK(seq.check_conditions(ns).all_passed());
        const auto tight = ExponentSequence::scaled_profile(halves(), [](auto x) { return 1.0 + 8.0 * x[0]; }, 2.0);
        CHECK_FALSE(tight.check_conditions(ns).all_passed());
    }

    TEST_CASE("norm limit against closed forms and brute force") {
        const GridPtr unit = Grid::uniform_1d(0.0, 1.0, 32);
        const auto constant_seq = ExponentSequence::scaled_profile(unit, [](auto) { return 1.0; }, 2.0);
        const std::vector<int> ns{10, 20, 50, 100, 200};
        for (const auto& row : norm_limit_study(GridFunction::constant(unit, 0.8), constant_seq, ns))
            CHECK(row.error == doctest::Approx(0.0).epsilon(1e-11));

        const GridPtr fine = Grid::uniform_1d(0.0, 1.0, 400);
        const GridFunction x = GridFunction::from_function(fine, [](auto c) { return c[0]; });
        const auto seq = ExponentSequence::scaled_profile(fine, [](auto) { return 1.0; }, 2.0);
        const std::vector<double> w(fine->weights().begin(), fine->weights().end());
        const std::vector<double> xv(x.values().begin(), x.values().end());
        for (const auto& row : norm_limit_study(x, seq, ns)) {
            const std::vector<double> p(400, static_cast<double>(row.n));
            CHECK(row.norm == doctest::Approx(static_cast<double>(brute_luxemburg(w, xv, p))).epsilon(1e-10));
        }
        // Fine grid approaches the continuum value (1/(n+1))^(1/n) at n = 100.
        const auto rows = norm_limit_study(x, seq, std::vector<int>{100});
        CHECK(rows.front().norm == doctest::Approx(std::pow(1.0 / 101.0, 0.01)).epsilon(2e-3));
    }

    TEST_CASE("sobolev modular closed forms") {
        const GridPtr unit = Grid::uniform_1d(0.0, 1.0, 10);
        const auto p = ExponentField::constant(unit, 3.0);
        CHECK(sobolev_modular(GridFunction::constant(unit, 0.0), GridFunction::constant(unit, 0.0), p) == 0.0);
        CHECK(sobolev_modular(GridFunction::constant(unit, 1.0), GridFunction::constant(unit, 0.0), p) ==
              doctest::Approx(1.0));
        const GridPtr fine = Grid::uniform_1d(0.0, 1.0, 1000);
        const auto x = GridFunction::from_function(fine, [](auto c) { return c[0]; });
        CHECK(sobolev_modular(x, GridFunction::constant(fine, 1.0), ExponentField::constant(fine, 2.0)) ==
              doctest::Approx(4.0 / 3.0).epsilon(1e-6));
    }
}
