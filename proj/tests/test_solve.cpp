#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "suplab/errors.hpp"
#include "suplab/solve.hpp"

using namespace suplab;

namespace {

// Minimizer of sum_cells h (a_c (u_{k+1} - u_k) / h)^q in 1-D for a = 1/(1+x):
// a^q |u'|^{q-1} is constant, so u' = c (1+x)^{q/(q-1)}.
double euler_lagrange_inv_one_plus_x(double q, double x) {
    const double r = q / (q - 1.0);
    const auto antiderivative = [r](double t) { return (std::pow(1.0 + t, r + 1.0) - 1.0) / (r + 1.0); };
    return antiderivative(x) / antiderivative(1.0);
}

double sup_distance(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
    return d;
}

// Discrete weighted Laplace system for q = 2 in 1-D: minimize
// sum_c h a_c^2 ((u_{k+1} - u_k)/h)^2, solved by the Thomas algorithm.
std::vector<double> laplace_1d(const MeshSpec& m, const CoefficientProfile& a) {
    const int n = m.cells[0];
    const double h = m.spacing(0);
    std::vector<double> k(static_cast<std::size_t>(n));
    for (int c = 0; c < n; ++c) {
        const double ac = a(m.lower[0] + (c + 0.5) * h);
        k[static_cast<std::size_t>(c)] = ac * ac;
    }
    const double g0 = m.boundary.eval(std::vector<double>{m.lower[0]});
    const double g1 = m.boundary.eval(std::vector<double>{m.upper[0]});
    const std::size_t unknowns = static_cast<std::size_t>(n - 1);
    std::vector<double> lower(unknowns), diag(unknowns), upper(unknowns), rhs(unknowns, 0.0);
    for (std::size_t i = 0; i < unknowns; ++i) {
        diag[i] = k[i] + k[i + 1];
        lower[i] = -k[i];
        upper[i] = -k[i + 1];
    }
    rhs.front() += k.front() * g0;
    rhs.back() += k.back() * g1;
    for (std::size_t i = 1; i < unknowns; ++i) {
        const double w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    std::vector<double> x(unknowns);
    x.back() = rhs.back() / diag.back();
    for (std::size_t i = unknowns - 1; i-- > 0;) x[i] = (rhs[i] - upper[i] * x[i + 1]) / diag[i];
    std::vector<double> nodes{g0};
    nodes.insert(nodes.end(), x.begin(), x.end());
    nodes.push_back(g1);
    return nodes;
}

// Same for a = 1 in 2-D with the cell-averaged gradient: assemble the dense
// normal equations of sum_c w_c |G_c u|^2 over interior nodes.
std::vector<double> laplace_2d(const MeshSpec& m) {
    const DiscreteField base = interpolate_boundary(m);
    const auto interior = base.interior();
    std::vector<int> slot(m.node_count(), -1);
    for (std::size_t i = 0; i < interior.size(); ++i) slot[interior[i]] = static_cast<int>(i);
    const auto n = static_cast<Eigen::Index>(interior.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    const double hx = m.spacing(0), hy = m.spacing(1);
    const int nx = m.cells[0];
    for (int j = 0; j < m.cells[1]; ++j) {
        for (int i = 0; i < nx; ++i) {
            const std::size_t c[4] = {static_cast<std::size_t>(j * (nx + 1) + i), static_cast<std::size_t>(j * (nx + 1) + i + 1),
                                      static_cast<std::size_t>((j + 1) * (nx + 1) + i),
                                      static_cast<std::size_t>((j + 1) * (nx + 1) + i + 1)};
            const double rows[2][4] = {{-0.5 / hx, 0.5 / hx, -0.5 / hx, 0.5 / hx}, {-0.5 / hy, -0.5 / hy, 0.5 / hy, 0.5 / hy}};
            const double w = hx * hy;
            for (const auto& g : rows) {
                double fixed = 0.0;
                for (int k = 0; k < 4; ++k)
                    if (slot[c[k]] < 0) fixed += g[k] * base.nodes()[c[k]];
                for (int r = 0; r < 4; ++r) {
                    if (slot[c[r]] < 0) continue;
                    b(slot[c[r]]) -= w * g[r] * fixed;
                    for (int s = 0; s < 4; ++s)
                        if (slot[c[s]] >= 0) A(slot[c[r]], slot[c[s]]) += w * g[r] * g[s];
                }
            }
        }
    }
    const Eigen::VectorXd x = A.ldlt().solve(b);
    std::vector<double> nodes(base.nodes().begin(), base.nodes().end());
    for (std::size_t i = 0; i < interior.size(); ++i) nodes[interior[i]] = x(static_cast<Eigen::Index>(i));
    return nodes;
}

MeshSpec benchmark_mesh(int cells = 200) { return MeshSpec::interval(0.0, 1.0, cells, 0.0, 1.0); }

GridPtr cells_of(const MeshSpec& m) { return interpolate_boundary(m).cell_grid(); }

}  // namespace

TEST_SUITE("solve") {
    TEST_CASE("supremal oracle closed forms") {
        CHECK(supremal_oracle_1d(CoefficientProfile::constant(1.0), 0.0, 1.0, 0.0, 1.0) == doctest::Approx(1.0));
        CHECK(supremal_oracle_1d(CoefficientProfile::inv_one_plus_x(), 0.0, 1.0, 0.0, 1.0) ==
              doctest::Approx(2.0 / 3.0).epsilon(1e-14));
        CHECK(supremal_oracle_1d(CoefficientProfile::constant(2.0), 0.0, 1.0, 0.0, 1.0) == doctest::Approx(2.0));
        CHECK(supremal_oracle_1d(CoefficientProfile::piecewise(1.0, 2.0), 0.0, 1.0, 0.0, 1.0) ==
              doctest::Approx(4.0 / 3.0).epsilon(1e-14));
        CHECK(integrate_inverse(CoefficientProfile::inv_one_plus_x(), 0.0, 0.5) == doctest::Approx(0.625).epsilon(1e-14));
        CHECK(integrate_inverse(CoefficientProfile::linear(1.0, 1.0), 0.0, 1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-13));
    }

    TEST_CASE("oracle minimizers") {
        const auto bench = CoefficientProfile::inv_one_plus_x();
        for (double x : {0.0, 0.3, 0.77, 1.0})
            CHECK(oracle_minimizer_1d(bench, 0.0, 1.0, 0.0, 1.0, x) == doctest::Approx((2.0 / 3.0) * (x + x * x / 2.0)));
        const auto pw = CoefficientProfile::piecewise(1.0, 2.0);
        CHECK(oracle_minimizer_1d(pw, 0.0, 1.0, 0.0, 1.0, 0.25) == doctest::Approx(0.25 * 4.0 / 3.0));
        CHECK(oracle_minimizer_1d(pw, 0.0, 1.0, 0.0, 1.0, 0.75) == doctest::Approx(2.0 / 3.0 + 0.25 * 2.0 / 3.0));
        CHECK(oracle_minimizer_1d(bench, 0.0, 1.0, 1.0, 0.0, 1.0) == doctest::Approx(0.0));
    }

    TEST_CASE("settings validation") {
        SolverSettings s;
        CHECK(s.epsilons.size() == 6);
        CHECK(s.epsilons.back() == doctest::Approx(1e-6));
        s.shrink = 1.5;
        CHECK_THROWS_AS(s.validate(), PreconditionError);
        SolverSettings t;
        t.epsilons = {1e-3, 1e-2};
        CHECK_THROWS_AS(t.validate(), PreconditionError);
    }

    TEST_CASE("unsupported densities are rejected") {
        const MeshSpec m = benchmark_mesh(10);
        const GridPtr g = cells_of(m);
        const auto p = ExponentField::constant(g, 4.0);
        const auto aniso = DensitySpec::anisotropic(g, CoefficientProfile::constant(1.0), {1.0});
        CHECK_THROWS_AS(minimize_power(Functional::Fn, aniso, p, m, SolverSettings{}), PreconditionError);
    }

    TEST_CASE("affine data with constant coefficient stays affine") {
        const MeshSpec m = benchmark_mesh(50);
        const GridPtr g = cells_of(m);
        const auto f = DensitySpec::weighted_norm(g, CoefficientProfile::constant(1.0));
        for (double q : {2.0, 8.0, 32.0}) {
            const SolveResult r = minimize_power(Functional::Fn, f, ExponentField::constant(g, q), m, SolverSettings{});
            CHECK(r.objective == doctest::Approx(1.0).epsilon(1e-9));
            for (std::size_t k = 0; k < r.field.nodes().size(); ++k)
                CHECK(r.field.nodes()[k] == doctest::Approx(m.node_coord(k)[0]).epsilon(1e-7));
        }
        const MeshSpec sq = MeshSpec::square(0.0, 1.0, 8, BoundaryTrace::affine(0.0, {1.0, 0.0}));
        const GridPtr g2 = cells_of(sq);
        const auto f2 = DensitySpec::weighted_norm(g2, CoefficientProfile::constant(1.0));
        const SolveResult r2 = minimize_power(Functional::calFn, f2, ExponentField::constant(g2, 4.0), sq, SolverSettings{});
        for (std::size_t k = 0; k < sq.node_count(); ++k)
            CHECK(r2.field.nodes()[k] == doctest::Approx(sq.node_coord(k)[0]).epsilon(1e-7));
    }

    TEST_CASE("quadratic energy matches the Laplace system") {
        const MeshSpec m = benchmark_mesh(80);
        const GridPtr g = cells_of(m);
        const auto a = CoefficientProfile::inv_one_plus_x();
        const auto f = DensitySpec::weighted_norm(g, a);
        const SolveResult r = minimize_power(Functional::calFn, f, ExponentField::constant(g, 2.0), m, SolverSettings{});
        CHECK(sup_distance(r.field.nodes(), laplace_1d(m, a)) < 1e-6);

        const auto curved = BoundaryTrace{"x^2-y^2", [](std::span<const double> x) { return x[0] * x[0] - x[1] * x[1]; }};
        const MeshSpec sq = MeshSpec::square(0.0, 1.0, 10, curved);
        const GridPtr g2 = cells_of(sq);
        const auto f2 = DensitySpec::weighted_norm(g2, CoefficientProfile::constant(1.0));
        const SolveResult r2 = minimize_power(Functional::calFn, f2, ExponentField::constant(g2, 2.0), sq, SolverSettings{});
        CHECK(sup_distance(r2.field.nodes(), laplace_2d(sq)) < 1e-6);
    }

    TEST_CASE("constant exponent minimizers match the Euler-Lagrange closed form") {
        const MeshSpec m = benchmark_mesh(200);
        const GridPtr g = cells_of(m);
        const auto f = DensitySpec::weighted_norm(g, CoefficientProfile::inv_one_plus_x());
        for (double q : {4.0, 8.0, 32.0}) {
            const auto p = ExponentField::constant(g, q);
            std::vector<double> exact(m.node_count());
            for (std::size_t k = 0; k < exact.size(); ++k) exact[k] = euler_lagrange_inv_one_plus_x(q, m.node_coord(k)[0]);
            for (Functional fn : {Functional::Fn, Functional::calFn}) {
                const SolveResult r = minimize_power(fn, f, p, m, SolverSettings{});
                INFO("q=" << q << " " << to_string(fn));
                CHECK(sup_distance(r.field.nodes(), exact) < 0.01);
                CHECK_FALSE(r.stagnated);
            }
            const SolveResult r = minimize_power(Functional::Fn, f, p, m, SolverSettings{});
            const DiscreteField ex(m, exact);
            CHECK(r.objective <= eval_Fn(f, ex.cell_values(), gradient(ex), p) * (1.0 + 1e-9));
        }
    }

    TEST_CASE("objective traces are nonincreasing within each stage") {
        const MeshSpec m = benchmark_mesh(100);
        const GridPtr g = cells_of(m);
        const auto f = DensitySpec::weighted_norm(g, CoefficientProfile::inv_one_plus_x());
        const auto p = ExponentField::from_profile(g, [](auto x) { return 16.0 * (2.0 + std::sin(6.283185307179586 * x[0])); });
        for (Functional fn : {Functional::Fn, Functional::calFn}) {
            const SolveResult r = minimize_power(fn, f, p, m, SolverSettings{});
            CHECK(r.trace.size() == SolverSettings{}.epsilons.size());
            for (const StageTrace& s : r.trace)
                for (std::size_t i = 1; i < s.objective.size(); ++i)
                    CHECK(s.objective[i] <= s.objective[i - 1] + 1e-12 * std::abs(s.objective[i - 1]));
        }
    }

    TEST_CASE("continuation floor is adequate") {
        const MeshSpec m = benchmark_mesh(200);
        const GridPtr g = cells_of(m);
        const auto f = DensitySpec::weighted_norm(g, CoefficientProfile::inv_one_plus_x());
        const auto p = ExponentField::constant(g, 16.0);
        SolverSettings finer;
        finer.epsilons = SolverSettings::geometric_epsilons(1e-1, 5e-7, 0.5);
        const double a = minimize_power(Functional::Fn, f, p, m, SolverSettings{}).objective;
        const double b = minimize_power(Functional::Fn, f, p, m, finer).objective;
        CHECK(std::abs(a - b) / b < 1e-3);
    }

    TEST_CASE("steepest descent agrees with Newton on a small problem") {
        const MeshSpec m = benchmark_mesh(16);
        const GridPtr g = cells_of(m);
        const auto f = DensitySpec::weighted_norm(g, CoefficientProfile::inv_one_plus_x());
        const auto p = ExponentField::constant(g, 3.0);
        SolverSettings slow;
        slow.method = DescentMethod::steepest;
        slow.max_iterations = 20000;
        const SolveResult a = minimize_power(Functional::calFn, f, p, m, SolverSettings{});
        const SolveResult b = minimize_power(Functional::calFn, f, p, m, slow);
        CHECK(b.objective == doctest::Approx(a.objective).epsilon(1e-6));
    }

    TEST_CASE("huge exponents do not overflow the solver") {
        const MeshSpec m = benchmark_mesh(50);
        const GridPtr g = cells_of(m);
        const auto f = DensitySpec::weighted_norm(g, CoefficientProfile::constant(3.0));
        const auto p = ExponentField::constant(g, 900.0);
        const SolveResult r = minimize_power(Functional::calFn, f, p, m, SolverSettings{});
        CHECK(r.objective == std::numeric_limits<double>::infinity());
        CHECK(std::isfinite(r.log_objective));
        CHECK(r.log_objective == doctest::Approx(900.0 * std::log(3.0) - std::log(900.0)).epsilon(1e-6));
    }
}
