#include "suplab/exponent_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "suplab/errors.hpp"

namespace suplab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRelationTol = 1e-9;

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
    if (!a.same_as(b)) throw StructuralError(std::string(what) + ": grid mismatch");
}

void require_scalar(const GridFunction& u, const char* what) {
    if (!u.is_scalar()) throw StructuralError(std::string(what) + ": expected a scalar function");
}

// log-sum-exp over ln w_i + p_i ln|u_i| - p_i ln(lambda).
double log_modular_impl(const GridFunction& u, const ExponentField& p, double log_lambda) {
    const Grid& g = u.grid();
    double peak = -kInf;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double a = std::abs(u[i]);
        if (a == 0.0) continue;
        peak = std::max(peak, std::log(g.weight(i)) + p[i] * (std::log(a) - log_lambda));
    }
    if (peak == -kInf) return -kInf;
    double sum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double a = std::abs(u[i]);
        if (a == 0.0) continue;
        sum += std::exp(std::log(g.weight(i)) + p[i] * (std::log(a) - log_lambda) - peak);
    }
    return peak + std::log(sum);
}

}  // namespace

// ---------------------------------------------------------------- Grid

Grid::Grid(int dimension, std::vector<double> centers, std::vector<double> weights)
    : dimension_(dimension), centers_(std::move(centers)), weights_(std::move(weights)) {
    if (dimension_ < 1 || dimension_ > 2) throw StructuralError("Grid: dimension must be 1 or 2");
    if (weights_.empty()) throw StructuralError("Grid: at least one cell required");
    if (centers_.size() != weights_.size() * static_cast<std::size_t>(dimension_))
        throw StructuralError("Grid: centers/weights size mismatch");
    for (double w : weights_) {
        if (!(w > 0.0) || !std::isfinite(w)) throw StructuralError("Grid: weights must be positive");
    }
    total_measure_ = std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

GridPtr Grid::uniform(std::span<const double> lower, std::span<const double> upper,
                      std::span<const int> cells) {
    const auto dim = static_cast<int>(cells.size());
    if (lower.size() != cells.size() || upper.size() != cells.size())
        throw StructuralError("Grid::uniform: inconsistent axis counts");
    if (dim == 1) return uniform_1d(lower[0], upper[0], cells[0]);
    if (dim != 2) throw StructuralError("Grid::uniform: dimension must be 1 or 2");
    for (int a = 0; a < 2; ++a) {
        if (cells[a] < 1 || !(upper[a] > lower[a])) throw StructuralError("Grid::uniform: bad axis");
    }
    const double hx = (upper[0] - lower[0]) / cells[0];
    const double hy = (upper[1] - lower[1]) / cells[1];
    std::vector<double> centers;
    std::vector<double> weights;
    centers.reserve(2 * static_cast<std::size_t>(cells[0] * cells[1]));
    // x fastest
    for (int j = 0; j < cells[1]; ++j) {
        for (int i = 0; i < cells[0]; ++i) {
            centers.push_back(lower[0] + (i + 0.5) * hx);
            centers.push_back(lower[1] + (j + 0.5) * hy);
            weights.push_back(hx * hy);
        }
    }
    return GridPtr(new Grid(2, std::move(centers), std::move(weights)));
}

GridPtr Grid::uniform_1d(double x0, double x1, int cells) {
    if (cells < 1 || !(x1 > x0)) throw StructuralError("Grid::uniform_1d: bad extent or cell count");
    const double h = (x1 - x0) / cells;
    std::vector<double> centers(static_cast<std::size_t>(cells));
    for (int i = 0; i < cells; ++i) centers[static_cast<std::size_t>(i)] = x0 + (i + 0.5) * h;
    return GridPtr(new Grid(1, std::move(centers), std::vector<double>(static_cast<std::size_t>(cells), h)));
}

GridPtr Grid::from_cells(int dimension, std::vector<double> centers, std::vector<double> weights) {
    return GridPtr(new Grid(dimension, std::move(centers), std::move(weights)));
}

bool Grid::same_as(const Grid& other) const noexcept {
    return this == &other || (dimension_ == other.dimension_ && weights_ == other.weights_);
}

// ---------------------------------------------------------------- ExponentField

ExponentField::ExponentField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) throw StructuralError("ExponentField: null grid");
    if (values_.size() != grid_->size()) throw StructuralError("ExponentField: size mismatch");
    for (double v : values_) {
        if (!std::isfinite(v) || v < 1.0)
            throw StructuralError("ExponentField: exponents must be finite and >= 1, got " + std::to_string(v));
    }
    const auto [lo, hi] = std::minmax_element(values_.begin(), values_.end());
    p_minus_ = *lo;
    p_plus_ = *hi;
}

ExponentField ExponentField::constant(GridPtr grid, double value) {
    const auto n = grid ? grid->size() : 0;
    return {std::move(grid), std::vector<double>(n, value)};
}

ExponentField ExponentField::from_profile(GridPtr grid, const PointFunction& profile) {
    std::vector<double> v(grid->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = profile(grid->center(i));
    return {std::move(grid), std::move(v)};
}

ExponentField ExponentField::divided_by(double s) const {
    std::vector<double> v(values_);
    for (double& x : v) x /= s;
    return {grid_, std::move(v)};
}

// ---------------------------------------------------------------- ExponentSequence

ExponentSequence::ExponentSequence(Generator generator, double beta)
    : generator_(std::move(generator)), beta_(beta) {
    if (!(beta_ > 1.0)) throw PreconditionError("ExponentSequence: pn2 requires beta > 1");
}

ExponentSequence ExponentSequence::scaled_profile(GridPtr grid, PointFunction profile, double beta) {
    auto gen = [grid = std::move(grid), profile = std::move(profile)](int n) {
        return ExponentField::from_profile(grid, [&](std::span<const double> x) { return n * profile(x); });
    };
    return {std::move(gen), beta};
}

RelationReport ExponentSequence::check_conditions(std::span<const int> n_values) const {
    RelationReport report;
    double prev_minus = -kInf;
    double first_minus = kInf;
    double last_minus = -kInf;
    for (int n : n_values) {
        const ExponentField p = generator_(n);
        const std::string tag = "[n=" + std::to_string(n) + "]";
        report.add_leq("pn2 " + tag, p.p_plus(), beta_ * p.p_minus(), 1e-12);
        report.add("pn1 monotone " + tag, p.p_minus() >= prev_minus, p.p_minus() - prev_minus);
        prev_minus = p.p_minus();
        first_minus = std::min(first_minus, p.p_minus());
        last_minus = p.p_minus();
    }
    if (n_values.size() >= 2) {
        report.add("pn1 growth", last_minus > first_minus, last_minus - first_minus);
    }
    return report;
}

// ---------------------------------------------------------------- GridFunction

GridFunction::GridFunction(GridPtr grid, int components, std::vector<double> values)
    : grid_(std::move(grid)), components_(components), values_(std::move(values)) {
    if (!grid_) throw StructuralError("GridFunction: null grid");
    if (components_ < 1) throw StructuralError("GridFunction: components must be >= 1");
    if (values_.size() != grid_->size() * static_cast<std::size_t>(components_))
        throw StructuralError("GridFunction: values length != cells x components");
    for (double v : values_) {
        if (!std::isfinite(v)) throw StructuralError("GridFunction: non-finite entry");
    }
}

GridFunction GridFunction::scalar(GridPtr grid, std::vector<double> values) {
    return {std::move(grid), 1, std::move(values)};
}

GridFunction GridFunction::constant(GridPtr grid, double value) {
    const auto n = grid ? grid->size() : 0;
    return {std::move(grid), 1, std::vector<double>(n, value)};
}

GridFunction GridFunction::from_function(GridPtr grid, const PointFunction& fn) {
    std::vector<double> v(grid->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(grid->center(i));
    return {std::move(grid), 1, std::move(v)};
}

GridFunction GridFunction::magnitude() const {
    std::vector<double> m(size());
    for (std::size_t i = 0; i < size(); ++i) {
        double s = 0.0;
        for (double c : at(i)) s += c * c;
        m[i] = std::sqrt(s);
    }
    return scalar(grid_, std::move(m));
}

GridFunction GridFunction::scaled(double c) const {
    std::vector<double> v(values_);
    for (double& x : v) x *= c;
    return {grid_, components_, std::move(v)};
}

GridFunction GridFunction::abs_pow(double s) const {
    std::vector<double> v(values_);
    for (double& x : v) x = std::pow(std::abs(x), s);
    return {grid_, components_, std::move(v)};
}

double GridFunction::max_abs() const noexcept {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

GridFunction operator+(const GridFunction& a, const GridFunction& b) {
    require_same_grid(a.grid(), b.grid(), "operator+");
    if (a.components() != b.components()) throw StructuralError("operator+: component mismatch");
    std::vector<double> v(a.values().begin(), a.values().end());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += b.values()[i];
    return {a.grid_ptr(), a.components(), std::move(v)};
}

GridFunction operator*(const GridFunction& a, const GridFunction& b) {
    require_same_grid(a.grid(), b.grid(), "operator*");
    require_scalar(a, "operator*");
    require_scalar(b, "operator*");
    std::vector<double> v(a.values().begin(), a.values().end());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= b.values()[i];
    return GridFunction::scalar(a.grid_ptr(), std::move(v));
}

// ---------------------------------------------------------------- modular / norm

double modular_scaled(const GridFunction& u, const ExponentField& p, double lambda) {
    require_scalar(u, "modular");
    require_same_grid(u.grid(), p.grid(), "modular");
    const Grid& g = u.grid();
    const double log_lambda = std::log(lambda);
    double sum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double a = std::abs(u[i]);
        if (a == 0.0) continue;
        const double e = p[i] * (std::log(a) - log_lambda);
        if (e > kOverflowLogThreshold) return kInf;
        sum += g.weight(i) * std::exp(e);
    }
    return sum;
}

double modular(const GridFunction& u, const ExponentField& p) { return modular_scaled(u, p, 1.0); }

double log_modular(const GridFunction& u, const ExponentField& p) {
    require_scalar(u, "log_modular");
    require_same_grid(u.grid(), p.grid(), "log_modular");
    return log_modular_impl(u, p, 0.0);
}

double luxemburg_root(const std::function<double(double)>& rho, double lambda0) {
    if (!(lambda0 > 0.0) || !std::isfinite(lambda0)) throw PreconditionError("luxemburg_root: bad lambda0");
    double lo = lambda0;
    double hi = lambda0;
    constexpr int kMaxExpansions = 2200;
    if (rho(lambda0) <= 1.0) {
        int k = 0;
        do {
            hi = lo;
            lo *= 0.5;
            if (++k > kMaxExpansions) return 0.0;
        } while (rho(lo) <= 1.0);
    } else {
        int k = 0;
        do {
            lo = hi;
            hi *= 2.0;
            if (++k > kMaxExpansions) return kInf;
        } while (rho(hi) > 1.0);
    }
    while (hi - lo > kLuxemburgRelTol * hi) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (rho(mid) <= 1.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double luxemburg_norm(const GridFunction& u, const ExponentField& p) {
    require_scalar(u, "luxemburg_norm");
    require_same_grid(u.grid(), p.grid(), "luxemburg_norm");
    const double peak = u.max_abs();
    if (peak == 0.0) return 0.0;
    return luxemburg_root([&](double lambda) { return modular_scaled(u, p, lambda); }, peak);
}

double lebesgue_norm(const GridFunction& u, double q) {
    require_scalar(u, "lebesgue_norm");
    if (!(q >= 1.0)) throw PreconditionError("lebesgue_norm: q must be >= 1");
    const ExponentField pq = ExponentField::constant(u.grid_ptr(), q);
    const double lm = log_modular_impl(u, pq, 0.0);
    return lm == -kInf ? 0.0 : std::exp(lm / q);
}

// ---------------------------------------------------------------- relations

RelationReport verify_norm_modular_relations(const GridFunction& u, const ExponentField& p) {
    require_scalar(u, "verify_norm_modular_relations");
    require_same_grid(u.grid(), p.grid(), "verify_norm_modular_relations");
    RelationReport r;
    const double norm = luxemburg_norm(u, p);
    const double log_rho = log_modular(u, p);
    const double rho = std::exp(log_rho);
    const double log_norm = std::log(norm);
    const double pm = p.p_minus();
    const double pp = p.p_plus();
    const double m = u.grid().total_measure();

    // Three-way classification of ||u|| - 1 and rho - 1. The rho band is
    // widened by p^+ because d rho / d||u|| is at most p^+ rho near 1.
    auto classify = [](double x, double band) { return std::abs(x) <= band ? 0 : (x < 0 ? -1 : 1); };
    const int sn = classify(norm - 1.0, kRelationTol);
    const int sr = classify(rho - 1.0, kRelationTol * pp * std::max(1.0, rho));
    const double gap = std::abs(norm - 1.0);
    r.add("mod-1 (norm<=1 <=> rho<=1)", (sn <= 0) == (sr <= 0), gap);
    r.add("mod0 (norm<1 <=> rho<1)", (sn < 0) == (sr < 0), gap);
    r.add("mod3 (norm=1 <=> rho=1)", (sn == 0) == (sr == 0), gap);
    r.add("mod5 (norm>1 <=> rho>1)", (sn > 0) == (sr > 0), gap);

    if (norm <= 1.0) r.add_leq("mod-2 (rho<=norm)", rho, norm, kRelationTol);
    if (norm > 1.0) r.add_leq("mod-3 (norm<=rho)", norm, rho, kRelationTol);

    // Sandwich in log form: ln||u|| between ln(rho)/p^+ and ln(rho)/p^-.
    if (norm > 0.0) {
        const double a = log_rho / pm;
        const double b = log_rho / pp;
        r.add_leq("relaztotale lower", std::min(a, b), log_norm, kRelationTol);
        r.add_leq("relaztotale upper", log_norm, std::max(a, b), kRelationTol);
    }

    const double one_norm = luxemburg_norm(GridFunction::constant(u.grid_ptr(), 1.0), p);
    r.add_leq("mod4 (||1|| bound)", one_norm, std::max(std::pow(m, 1.0 / pm), std::pow(m, 1.0 / pp)),
              kRelationTol);

    if (sn > 0) {
        r.add_leq("mod1 lower (norm^p- <= rho)", pm * log_norm, log_rho, kRelationTol);
        r.add_leq("mod1 upper (rho <= norm^p+)", log_rho, pp * log_norm, kRelationTol);
    }
    if (sn < 0 && norm > 0.0) {
        r.add_leq("mod2 lower (norm^p+ <= rho)", pp * log_norm, log_rho, kRelationTol);
        r.add_leq("mod2 upper (rho <= norm^p-)", log_rho, pm * log_norm, kRelationTol);
    }
    return r;
}

RelationReport holder_check(const GridFunction& f, const GridFunction& g, const ExponentField& p,
                            const ExponentField& q, const ExponentField& s) {
    require_scalar(f, "holder_check");
    require_scalar(g, "holder_check");
    require_same_grid(f.grid(), g.grid(), "holder_check");
    require_same_grid(f.grid(), p.grid(), "holder_check");
    require_same_grid(f.grid(), q.grid(), "holder_check");
    require_same_grid(f.grid(), s.grid(), "holder_check");
    double ratio_p = 0.0;
    double ratio_q = 0.0;
    bool s_is_one = true;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (std::abs(1.0 / s[i] - (1.0 / p[i] + 1.0 / q[i])) > 1e-10)
            throw StructuralError("holder_check: 1/s != 1/p + 1/q at cell " + std::to_string(i));
        ratio_p = std::max(ratio_p, s[i] / p[i]);
        ratio_q = std::max(ratio_q, s[i] / q[i]);
        s_is_one = s_is_one && std::abs(s[i] - 1.0) <= 1e-12;
    }
    RelationReport r;
    const GridFunction fg = f * g;
    const double nf = luxemburg_norm(f, p);
    const double ng = luxemburg_norm(g, q);
    r.add_leq("holder", luxemburg_norm(fg, s), (ratio_p + ratio_q) * nf * ng, kRelationTol);
    if (s_is_one) {
        double integral = 0.0;
        for (std::size_t i = 0; i < fg.size(); ++i) integral += fg.grid().weight(i) * std::abs(fg[i]);
        r.add_leq("holder s=1", integral, (1.0 / p.p_minus() + 1.0 / q.p_minus()) * nf * ng, kRelationTol);
    }
    return r;
}

RelationReport power_identity_check(const GridFunction& u, const ExponentField& p, double s) {
    require_scalar(u, "power_identity_check");
    if (!(s > 1.0 && s < p.p_minus()))
        throw PreconditionError("power_identity_check: s must lie in (1, p^-)");
    const double lhs = std::pow(luxemburg_norm(u.abs_pow(s), p.divided_by(s)), 1.0 / s);
    const double rhs = luxemburg_norm(u, p);
    const double rel = std::abs(lhs - rhs) / std::max(rhs, std::numeric_limits<double>::min());
    RelationReport r;
    r.add("power identity", rhs == 0.0 ? lhs == 0.0 : rel <= 1e-8, 1e-8 - rel);
    return r;
}

double embedding_constant(double m, double q, double p_minus, double p_plus, double beta) {
    const double measure_factor =
        std::max(std::pow(m, 1.0 / q - 1.0 / p_minus), std::pow(m, beta * (1.0 / q - 1.0 / p_plus)));
    return measure_factor * std::pow(1.0 + (q / p_plus) * (beta - 1.0), 1.0 / q);
}

RelationReport embedding_bound_check(const GridFunction& u, const ExponentField& p, double q,
                                     double beta) {
    require_scalar(u, "embedding_bound_check");
    if (!(q >= 1.0 && q <= p.p_minus())) throw PreconditionError("embedding_bound_check: need 1 <= q <= p^-");
    if (p.p_plus() > beta * p.p_minus() * (1.0 + 1e-12))
        throw PreconditionError("embedding_bound_check: p^+ > beta p^-");
    const double c = embedding_constant(u.grid().total_measure(), q, p.p_minus(), p.p_plus(), beta);
    RelationReport r;
    r.add_leq("embedding", lebesgue_norm(u, q), c * luxemburg_norm(u, p), kRelationTol);
    return r;
}

std::vector<NormLimitRow> norm_limit_study(const GridFunction& u, const ExponentSequence& seq,
                                           std::span<const int> n_values) {
    require_scalar(u, "norm_limit_study");
    const double sup = u.max_abs();
    std::vector<NormLimitRow> rows;
    rows.reserve(n_values.size());
    for (int n : n_values) {
        const ExponentField p = seq(n);
        const double norm = luxemburg_norm(u, p);
        rows.push_back({n, p.p_minus(), p.p_plus(), norm, sup, std::abs(norm - sup)});
    }
    return rows;
}

double sobolev_modular(const GridFunction& u, const GridFunction& du, const ExponentField& p) {
    require_same_grid(u.grid(), du.grid(), "sobolev_modular");
    return modular(u.magnitude(), p) + modular(du.magnitude(), p);
}

double sobolev_norm(const GridFunction& u, const GridFunction& du, const ExponentField& p) {
    require_same_grid(u.grid(), du.grid(), "sobolev_norm");
    const GridFunction mu = u.magnitude();
    const GridFunction mdu = du.magnitude();
    const double peak = std::max(mu.max_abs(), mdu.max_abs());
    if (peak == 0.0) return 0.0;
    return luxemburg_root(
        [&](double lambda) { return modular_scaled(mu, p, lambda) + modular_scaled(mdu, p, lambda); }, peak);
}

}  // namespace suplab
