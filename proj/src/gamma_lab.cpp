#include "suplab/gamma_lab.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <sstream>

#include "suplab/errors.hpp"

namespace suplab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDichotomySmall = 1e-8;
constexpr double kDichotomyLarge = 1e8;

// Rows for different n are independent; run them concurrently and keep the
// schedule order.
template <typename F>
std::vector<StudyRow> map_rows(const std::vector<int>& n_values, F&& row_for) {
    std::vector<std::future<StudyRow>> futures;
    futures.reserve(n_values.size());
    for (int n : n_values) futures.push_back(std::async(std::launch::async, [&row_for, n] { return row_for(n); }));
    std::vector<StudyRow> rows;
    rows.reserve(futures.size());
    for (auto& f : futures) rows.push_back(f.get());
    std::stable_sort(rows.begin(), rows.end(), [](const StudyRow& a, const StudyRow& b) { return a.n < b.n; });
    return rows;
}

std::vector<double> column(const std::vector<StudyRow>& rows, double StudyRow::*member) {
    std::vector<double> v;
    v.reserve(rows.size());
    for (const auto& r : rows) v.push_back(r.*member);
    return v;
}

void require_schedule(const StudyConfig& cfg) {
    if (cfg.n_values.empty()) throw PreconditionError("study: empty n schedule");
    const RelationReport conditions = cfg.sequence().check_conditions(cfg.n_values);
    if (!conditions.all_passed())
        throw PreconditionError("study: exponent sequence violates " + conditions.failed().front().name);
}

double boundary_value(const MeshSpec& mesh, double x) { return mesh.boundary.eval(std::vector<double>{x}); }

// Affine coefficients (offset, sx, sy) of the 2-D trace, if it is affine on the boundary nodes.
std::optional<std::array<double, 3>> affine_trace(const MeshSpec& mesh) {
    const auto& g = mesh.boundary.eval;
    const double x0 = mesh.lower[0], x1 = mesh.upper[0], y0 = mesh.lower[1], y1 = mesh.upper[1];
    const double c00 = g(std::vector<double>{x0, y0});
    const double sx = (g(std::vector<double>{x1, y0}) - c00) / (x1 - x0);
    const double sy = (g(std::vector<double>{x0, y1}) - c00) / (y1 - y0);
    const std::array<double, 3> fit{c00 - sx * x0 - sy * y0, sx, sy};
    for (std::size_t k = 0; k < mesh.node_count(); ++k) {
        if (!mesh.on_boundary(k)) continue;
        const auto xy = mesh.node_coord(k);
        const double expect = fit[0] + fit[1] * xy[0] + fit[2] * xy[1];
        if (std::abs(g(xy) - expect) > 1e-12 * std::max(1.0, std::abs(expect))) return std::nullopt;
    }
    return fit;
}

}  // namespace

std::string to_string(StudyKind kind) {
    switch (kind) {
        case StudyKind::norm_gamma: return "norm_gamma";
        case StudyKind::integral_dichotomy: return "integral_dichotomy";
        case StudyKind::norm_limit: return "norm_limit";
        case StudyKind::constant_exponent: return "constant_exponent";
    }
    return "?";
}

double ExponentProfile::operator()(std::span<const double> x) const {
    if (kind == Kind::constant) return base;
    return base + amplitude * std::sin(2.0 * std::numbers::pi * x[0]);
}

std::string ExponentProfile::describe() const {
    std::ostringstream os;
    if (kind == Kind::constant) os << "const(" << base << ")";
    else os << base << "+" << amplitude << "*sin(2*pi*x1)";
    return os.str();
}

double ProbeFunction::operator()(std::span<const double> x) const {
    switch (kind) {
        case Kind::coordinate: return scale * x[0];
        case Kind::constant: return scale;
        case Kind::sine: return scale * std::sin(std::numbers::pi * x[0]);
    }
    return 0.0;
}

std::string ProbeFunction::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::coordinate: os << scale << "*x1"; break;
        case Kind::constant: os << scale; break;
        case Kind::sine: os << scale << "*sin(pi*x1)"; break;
    }
    return os.str();
}

ExponentSequence StudyConfig::sequence() const {
    return ExponentSequence::scaled_profile(grid(), [profile = profile](std::span<const double> x) { return profile(x); },
                                            beta);
}

std::vector<int> default_n_values(StudyKind kind) {
    switch (kind) {
        case StudyKind::norm_gamma:
        case StudyKind::constant_exponent: return {4, 8, 16, 32, 64};
        case StudyKind::integral_dichotomy: return {10, 20, 30, 40, 50, 100, 200, 400};
        case StudyKind::norm_limit: return {10, 20, 50, 100, 200};
    }
    return {};
}

bool eventually_nonincreasing(std::span<const double> values, double rel_tol) {
    if (values.size() < 2) return true;
    const std::size_t tail = std::max<std::size_t>(2, values.size() / 2);
    for (std::size_t i = values.size() - tail + 1; i < values.size(); ++i) {
        const double prev = values[i - 1];
        if (values[i] > prev + rel_tol * std::max(std::abs(prev), 1e-300)) return false;
    }
    return true;
}

double limit_oracle(const StudyConfig& cfg) {
    const DensitySpec& f = cfg.density;
    if (f.family() != DensityFamily::weighted_norm)
        throw PreconditionError("limit oracle: requires a weighted_norm density");
    const MeshSpec& mesh = cfg.mesh;
    if (mesh.dimension == 1) {
        const double x0 = mesh.lower[0], x1 = mesh.upper[0];
        return f.scale() *
               supremal_oracle_1d(f.profile(), x0, x1, boundary_value(mesh, x0), boundary_value(mesh, x1));
    }
    if (f.profile().kind != CoefficientProfile::Kind::constant)
        throw PreconditionError("limit oracle: 2-D studies need a constant coefficient");
    const auto fit = affine_trace(mesh);
    if (!fit) throw PreconditionError("limit oracle: 2-D studies need affine boundary data");
    return f.scale() * f.profile().value * std::hypot((*fit)[1], (*fit)[2]);
}

DiscreteField limit_minimizer(const StudyConfig& cfg) {
    const MeshSpec& mesh = cfg.mesh;
    if (mesh.dimension == 2) {
        if (!affine_trace(mesh)) throw PreconditionError("limit minimizer: 2-D studies need affine boundary data");
        return interpolate_boundary(mesh);
    }
    const double x0 = mesh.lower[0], x1 = mesh.upper[0];
    const double g0 = boundary_value(mesh, x0), g1 = boundary_value(mesh, x1);
    std::vector<double> nodes(mesh.node_count());
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        nodes[k] = oracle_minimizer_1d(cfg.density.profile(), x0, x1, g0, g1, mesh.node_coord(k)[0]);
    }
    nodes.front() = g0;
    nodes.back() = g1;
    return {mesh, std::move(nodes)};
}

StudyResult run_norm_gamma_study(const StudyConfig& cfg) {
    if (cfg.kind != StudyKind::norm_gamma && cfg.kind != StudyKind::constant_exponent)
        throw PreconditionError("run_norm_gamma_study: wrong study kind " + to_string(cfg.kind));
    require_schedule(cfg);
    const double oracle = limit_oracle(cfg);
    const ExponentSequence seq = cfg.sequence();
    const DiscreteField initial = interpolate_boundary(cfg.mesh);
    const GridFunction init_u = initial.cell_values();
    const GridFunction init_du = gradient(initial);

    // Any field with this boundary data has the same integral of each
    // gradient component (telescoping), so this lower-bounds ||Du||_1.
    double flux = 0.0;
    for (int a = 0; a < cfg.mesh.dimension; ++a) {
        double s = 0.0;
        for (std::size_t c = 0; c < init_du.size(); ++c) s += init_du.grid().weight(c) * init_du.at(c)[static_cast<std::size_t>(a)];
        flux = std::max(flux, std::abs(s));
    }
    const double m = init_du.grid().total_measure();
    const bool linear_growth = cfg.density.alpha() > 0.0 && cfg.density.gamma() == 1.0;

    StudyResult result;
    result.kind = cfg.kind;
    result.name = "norm_gamma";
    result.rows = map_rows(cfg.n_values, [&](int n) {
        const ExponentField p = seq(n);
        const SolveResult sol = minimize_power(Functional::Fn, cfg.density, p, initial, cfg.solver);
        StudyRow row;
        row.n = n;
        row.p_minus = p.p_minus();
        row.p_plus = p.p_plus();
        row.value = sol.objective;
        row.log_value = sol.log_objective;
        row.oracle = oracle;
        row.error = std::abs(sol.objective - oracle) / oracle;
        row.iterations = sol.iterations;
        row.residual = sol.residual;
        row.stagnated = sol.stagnated;
        row.lower_bound = linear_growth ? cfg.density.alpha() * flux /
                                              embedding_constant(m, 1.0, p.p_minus(), p.p_plus(), cfg.beta)
                                        : 0.0;
        row.upper_bound = eval_Fn(cfg.density, init_u, init_du, p) * (1.0 + 1e-6) + 1e-9;
        return row;
    });

    for (const StudyRow& r : result.rows) {
        const std::string tag = "[n=" + std::to_string(r.n) + "]";
        result.verdicts.add_leq("lower bound " + tag, r.lower_bound, r.value, 1e-9);
        result.verdicts.add_leq("upper bound " + tag, r.value, r.upper_bound, 0.0);
        result.verdicts.add("converged " + tag, !r.stagnated, r.residual);
    }
    const auto errors = column(result.rows, &StudyRow::error);
    result.verdicts.add("error eventually decreasing", eventually_nonincreasing(errors, 1e-9), 0.0);
    result.verdicts.add_leq("final error below threshold", errors.back(), cfg.threshold, 0.0);
    return result;
}

StudyResult run_integral_dichotomy_study(const StudyConfig& cfg) {
    if (cfg.kind != StudyKind::integral_dichotomy)
        throw PreconditionError("run_integral_dichotomy_study: wrong study kind " + to_string(cfg.kind));
    require_schedule(cfg);
    // The oracle minimizer has f = L* everywhere; rescale it so sup f = probe_scale.
    DiscreteField probe = limit_minimizer(cfg);
    {
        const double factor = cfg.probe_scale / limit_oracle(cfg);
        std::vector<double> nodes(probe.nodes().begin(), probe.nodes().end());
        for (double& v : nodes) v *= factor;
        probe = DiscreteField(cfg.mesh, std::move(nodes));
    }
    const GridFunction u = probe.cell_values();
    const GridFunction du = gradient(probe);
    const GridFunction dens = density_field(cfg.density, u, du);
    const double sup = dens.max_abs();
    if (std::abs(sup - 1.0) < cfg.delta) {
        throw PreconditionError("dichotomy: probe sup f = " + std::to_string(sup) + " lies within delta = " +
                                std::to_string(cfg.delta) + " of 1 (ill-posed)");
    }
    const ExponentSequence seq = cfg.sequence();
    StudyResult result;
    result.kind = cfg.kind;
    result.name = "integral_dichotomy";
    result.rows = map_rows(cfg.n_values, [&](int n) {
        const ExponentField p = seq(n);
        StudyRow row;
        row.n = n;
        row.p_minus = p.p_minus();
        row.p_plus = p.p_plus();
        row.value = calFn_of_field(dens, p);
        row.log_value = log_calFn_of_field(dens, p);
        row.oracle = sup;
        row.error = row.value;
        return row;
    });
    const StudyRow& last = result.rows.back();
    auto logs = column(result.rows, &StudyRow::log_value);
    if (sup < 1.0) {
        result.verdicts.add("calFn decreasing toward 0", eventually_nonincreasing(logs, 1e-12), 0.0);
        result.verdicts.add_leq("final calFn below 1e-8", last.value, kDichotomySmall, 0.0);
    } else {
        for (double& l : logs) l = -l;
        result.verdicts.add("calFn increasing toward inf", eventually_nonincreasing(logs, 1e-12), 0.0);
        result.verdicts.add("final calFn above 1e8 or overflow",
                            last.value == kInf || last.value > kDichotomyLarge, last.log_value - std::log(kDichotomyLarge));
    }
    return result;
}

StudyResult run_minimizer_convergence(const StudyConfig& cfg) {
    if (cfg.kind != StudyKind::constant_exponent)
        throw PreconditionError("run_minimizer_convergence: requires a constant_exponent study");
    if (cfg.mesh.dimension != 1) throw PreconditionError("run_minimizer_convergence: 1-D only");
    if (cfg.profile.kind != ExponentProfile::Kind::constant)
        throw PreconditionError("run_minimizer_convergence: exponent profile must be constant");
    require_schedule(cfg);
    const DiscreteField target = limit_minimizer(cfg);
    const double oracle = limit_oracle(cfg);
    const ExponentSequence seq = cfg.sequence();
    const DiscreteField initial = interpolate_boundary(cfg.mesh);

    StudyResult result;
    result.kind = cfg.kind;
    result.name = "minimizer_convergence";
    result.rows = map_rows(cfg.n_values, [&](int n) {
        const ExponentField p = seq(n);
        const SolveResult sol = minimize_power(Functional::Fn, cfg.density, p, initial, cfg.solver);
        double dist = 0.0;
        for (std::size_t k = 0; k < target.nodes().size(); ++k)
            dist = std::max(dist, std::abs(sol.field.nodes()[k] - target.nodes()[k]));
        StudyRow row;
        row.n = n;
        row.p_minus = p.p_minus();
        row.p_plus = p.p_plus();
        row.value = dist;
        row.oracle = oracle;
        row.error = dist;
        row.log_value = sol.log_objective;
        row.iterations = sol.iterations;
        row.residual = sol.residual;
        row.stagnated = sol.stagnated;
        return row;
    });
    for (const StudyRow& r : result.rows)
        result.verdicts.add("converged [n=" + std::to_string(r.n) + "]", !r.stagnated, r.residual);
    result.verdicts.add("distance eventually decreasing",
                        eventually_nonincreasing(column(result.rows, &StudyRow::error), 1e-9), 0.0);
    return result;
}

StudyResult run_norm_limit_study(const StudyConfig& cfg) {
    if (cfg.kind != StudyKind::norm_limit) throw PreconditionError("run_norm_limit_study: wrong study kind");
    require_schedule(cfg);
    const GridFunction u = GridFunction::from_function(cfg.grid(), [&](std::span<const double> x) { return cfg.probe(x); });
    StudyResult result;
    result.kind = cfg.kind;
    result.name = "norm_limit";
    for (const NormLimitRow& r : norm_limit_study(u, cfg.sequence(), cfg.n_values)) {
        StudyRow row;
        row.n = r.n;
        row.p_minus = r.p_minus;
        row.p_plus = r.p_plus;
        row.value = r.norm;
        row.oracle = r.sup;
        row.error = r.error;
        result.rows.push_back(row);
    }
    result.verdicts.add("error eventually decreasing",
                        eventually_nonincreasing(column(result.rows, &StudyRow::error), 1e-12), 0.0);
    return result;
}

}  // namespace suplab
