#include "suplab/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "suplab/errors.hpp"
#include "suplab/random.hpp"

namespace suplab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double euclid(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

std::string format_vec(std::span<const double> v) {
    std::ostringstream os;
    os.precision(6);
    os << '(';
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    os << ')';
    return os.str();
}

void check_fields(const DensitySpec& f, const GridFunction& u, const GridFunction& du) {
    if (!u.grid().same_as(f.grid()) || !du.grid().same_as(f.grid()))
        throw StructuralError("density evaluation: grid mismatch");
    if (u.components() != f.components() || du.components() != f.xi_dim())
        throw StructuralError("density evaluation: u/Du component mismatch");
}

}  // namespace

// ---------------------------------------------------------------- CoefficientProfile

double CoefficientProfile::operator()(double x1) const {
    switch (kind) {
        case Kind::constant: return value;
        case Kind::inv_one_plus_x: return 1.0 / (1.0 + x1);
        case Kind::piecewise: return x1 < split ? left : right;
        case Kind::linear: return value + slope * x1;
    }
    return value;
}

std::vector<double> CoefficientProfile::breakpoints(double x0, double x1) const {
    if (kind == Kind::piecewise && split > x0 && split < x1) return {split};
    return {};
}

std::string CoefficientProfile::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::constant: os << "const(" << value << ")"; break;
        case Kind::inv_one_plus_x: os << "1/(1+x)"; break;
        case Kind::piecewise: os << "piecewise(" << left << "|" << split << "|" << right << ")"; break;
        case Kind::linear: os << "linear(" << value << "+" << slope << "x)"; break;
    }
    return os.str();
}

std::string to_string(DensityFamily family) {
    switch (family) {
        case DensityFamily::weighted_norm: return "weighted_norm";
        case DensityFamily::shifted_norm: return "shifted_norm";
        case DensityFamily::anisotropic: return "anisotropic";
        case DensityFamily::custom: return "custom";
    }
    return "?";
}

std::string to_string(CustomRule rule) {
    switch (rule) {
        case CustomRule::capped_norm: return "capped_norm";
        case CustomRule::annulus: return "annulus";
        case CustomRule::power_norm: return "power_norm";
    }
    return "?";
}

// ---------------------------------------------------------------- DensitySpec

DensitySpec::DensitySpec(DensityFamily family, GridPtr grid, CoefficientProfile profile, int components)
    : family_(family), grid_(std::move(grid)), profile_(profile), components_(components) {
    if (!grid_) throw StructuralError("DensitySpec: null grid");
    if (components_ < 1) throw StructuralError("DensitySpec: components must be >= 1");
    coefficients_.resize(grid_->size());
    for (std::size_t i = 0; i < coefficients_.size(); ++i) coefficients_[i] = profile_(grid_->center(i));
}

DensitySpec DensitySpec::weighted_norm(GridPtr grid, CoefficientProfile a, int components) {
    return {DensityFamily::weighted_norm, std::move(grid), a, components};
}

DensitySpec DensitySpec::shifted_norm(GridPtr grid, std::vector<double> shift, int components) {
    DensitySpec f(DensityFamily::shifted_norm, std::move(grid), CoefficientProfile::constant(1.0), components);
    if (static_cast<int>(shift.size()) != f.xi_dim()) throw StructuralError("shifted_norm: shift length != xi dimension");
    f.shift_ = std::move(shift);
    return f;
}

DensitySpec DensitySpec::anisotropic(GridPtr grid, CoefficientProfile a, std::vector<double> axis_weights,
                                     int components) {
    DensitySpec f(DensityFamily::anisotropic, std::move(grid), a, components);
    if (static_cast<int>(axis_weights.size()) != f.xi_dim())
        throw StructuralError("anisotropic: axis weight count != xi dimension");
    f.axis_weights_ = std::move(axis_weights);
    return f;
}

DensitySpec DensitySpec::custom(GridPtr grid, CustomRule rule, CoefficientProfile a, double parameter,
                                bool level_convex, int components) {
    DensitySpec f(DensityFamily::custom, std::move(grid), a, components);
    f.rule_ = rule;
    f.parameter_ = parameter;
    f.level_convex_ = level_convex;
    return f;
}

DensitySpec& DensitySpec::with_growth(double alpha, double gamma) {
    if (!(alpha > 0.0) || !(gamma > 0.0)) throw PreconditionError("with_growth: alpha and gamma must be positive");
    alpha_ = alpha;
    gamma_ = gamma;
    return *this;
}

DensitySpec DensitySpec::scaled(double c) const {
    if (!(c > 0.0)) throw PreconditionError("DensitySpec::scaled: c must be positive");
    DensitySpec out(*this);
    out.scale_ *= c;
    return out;
}

double DensitySpec::raw(std::size_t cell, std::span<const double> /*u*/, std::span<const double> xi) const {
    const double a = coefficients_[cell];
    double v = 0.0;
    switch (family_) {
        case DensityFamily::weighted_norm: v = a * euclid(xi); break;
        case DensityFamily::shifted_norm: {
            double s = 0.0;
            for (std::size_t j = 0; j < xi.size(); ++j) s += (xi[j] - shift_[j]) * (xi[j] - shift_[j]);
            v = std::sqrt(s);
            break;
        }
        case DensityFamily::anisotropic: {
            for (std::size_t j = 0; j < xi.size(); ++j) v = std::max(v, axis_weights_[j] * std::abs(xi[j]));
            v *= a;
            break;
        }
        case DensityFamily::custom: {
            const double r = euclid(xi);
            switch (rule_) {
                case CustomRule::capped_norm: v = a * (std::min(r, 1.0) + 1e-6 * r); break;
                case CustomRule::annulus: v = a * std::abs(r - 1.0); break;
                case CustomRule::power_norm: v = std::pow(a * r, parameter_); break;
            }
            break;
        }
    }
    return scale_ * v;
}

bool DensitySpec::positively_homogeneous() const noexcept {
    switch (family_) {
        case DensityFamily::weighted_norm:
        case DensityFamily::anisotropic: return true;
        case DensityFamily::shifted_norm:
            return std::all_of(shift_.begin(), shift_.end(), [](double b) { return b == 0.0; });
        case DensityFamily::custom: return rule_ == CustomRule::power_norm && parameter_ == 1.0;
    }
    return false;
}

std::string DensitySpec::describe() const {
    std::ostringstream os;
    os << to_string(family_);
    if (family_ == DensityFamily::custom) os << ":" << to_string(rule_) << "(k=" << parameter_ << ")";
    if (family_ == DensityFamily::shifted_norm) os << " b=" << format_vec(shift_);
    else os << " a=" << profile_.describe();
    if (family_ == DensityFamily::anisotropic) os << " c=" << format_vec(axis_weights_);
    if (scale_ != 1.0) os << " scale=" << scale_;
    os << " alpha=" << alpha_ << " gamma=" << gamma_;
    return os.str();
}

// ---------------------------------------------------------------- evaluation

double eval_density(const DensitySpec& f, std::size_t cell, std::span<const double> u_val,
                    std::span<const double> xi) {
    if (static_cast<int>(xi.size()) != f.xi_dim()) throw StructuralError("eval_density: xi dimension mismatch");
    if (static_cast<int>(u_val.size()) != f.components()) throw StructuralError("eval_density: u dimension mismatch");
    if (cell >= f.grid().size()) throw StructuralError("eval_density: cell index out of range");
    const double v = f.raw(cell, u_val, xi);
    if (!(v >= 0.0) || !std::isfinite(v)) {
        throw ContractError("eval_density: " + f.describe() + " returned " + std::to_string(v) + " at cell " +
                            std::to_string(cell));
    }
    return v;
}

GridFunction density_field(const DensitySpec& f, const GridFunction& u, const GridFunction& du) {
    check_fields(f, u, du);
    std::vector<double> v(u.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = eval_density(f, i, u.at(i), du.at(i));
    return GridFunction::scalar(u.grid_ptr(), std::move(v));
}

double eval_supremal(const DensitySpec& f, const GridFunction& u, const GridFunction& du) {
    return density_field(f, u, du).max_abs();
}

double eval_Fn(const DensitySpec& f, const GridFunction& u, const GridFunction& du, const ExponentField& p) {
    return luxemburg_norm(density_field(f, u, du), p);
}

double log_calFn_of_field(const GridFunction& density, const ExponentField& p) {
    if (!density.grid().same_as(p.grid())) throw StructuralError("calFn: grid mismatch");
    const Grid& g = density.grid();
    double peak = -kInf;
    std::vector<double> terms(g.size(), -kInf);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (density[i] == 0.0) continue;
        terms[i] = std::log(g.weight(i)) - std::log(p[i]) + p[i] * std::log(density[i]);
        peak = std::max(peak, terms[i]);
    }
    if (peak == -kInf) return -kInf;
    double sum = 0.0;
    for (double t : terms) sum += std::exp(t - peak);
    return peak + std::log(sum);
}

double calFn_of_field(const GridFunction& density, const ExponentField& p) {
    if (!density.grid().same_as(p.grid())) throw StructuralError("calFn: grid mismatch");
    const Grid& g = density.grid();
    double sum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (density[i] == 0.0) continue;
        const double e = p[i] * std::log(density[i]);
        if (e > kOverflowLogThreshold) return kInf;
        sum += g.weight(i) / p[i] * std::exp(e);
    }
    return sum;
}

double eval_calFn(const DensitySpec& f, const GridFunction& u, const GridFunction& du, const ExponentField& p) {
    return calFn_of_field(density_field(f, u, du), p);
}

double log_calFn(const DensitySpec& f, const GridFunction& u, const GridFunction& du, const ExponentField& p) {
    return log_calFn_of_field(density_field(f, u, du), p);
}

// ---------------------------------------------------------------- probes

RelationReport level_convexity_probe(const DensitySpec& f, int trials, std::uint64_t seed) {
    Rng rng(seed);
    const auto dim = static_cast<std::size_t>(f.xi_dim());
    const auto comps = static_cast<std::size_t>(f.components());
    std::vector<double> u(comps), xi1(dim), xi2(dim), mid(dim);
    RelationReport report;
    int violations = 0;
    double worst = kInf;
    std::string worst_detail;
    for (int t = 0; t < trials; ++t) {
        const std::size_t cell = static_cast<std::size_t>(t) % f.grid().size();
        for (auto& c : u) c = rng.uniform(-2.0, 2.0);
        const double radius = (t % 2 == 0) ? 3.0 : rng.log_uniform(1e-2, 1e2);
        for (auto& c : xi1) c = rng.uniform(-radius, radius);
        for (auto& c : xi2) c = rng.uniform(-radius, radius);
        const double theta = rng.uniform();
        for (std::size_t j = 0; j < dim; ++j) mid[j] = theta * xi1[j] + (1.0 - theta) * xi2[j];
        const double lhs = f.raw(cell, u, mid);
        const double rhs = std::max(f.raw(cell, u, xi1), f.raw(cell, u, xi2));
        const double slack = rhs - lhs;
        if (slack < -1e-12 * std::max(1.0, std::abs(rhs))) {
            ++violations;
            if (slack < worst) {
                worst = slack;
                std::ostringstream os;
                os << "cell " << cell << " x=" << format_vec(f.grid().center(cell)) << " xi1=" << format_vec(xi1)
                   << " xi2=" << format_vec(xi2) << " theta=" << theta << " f(mid)=" << lhs << " max=" << rhs;
                worst_detail = os.str();
            }
        }
        worst = std::min(worst, slack);
    }
    report.add("H1 level convexity (" + std::to_string(trials) + " trials, " + std::to_string(violations) +
                   " violations)",
               violations == 0, worst, worst_detail);
    return report;
}

RelationReport growth_check(const DensitySpec& f, int trials, std::uint64_t seed) {
    if (!(f.alpha() > 0.0)) throw PreconditionError("growth_check: alpha not declared");
    Rng rng(seed);
    const auto dim = static_cast<std::size_t>(f.xi_dim());
    std::vector<double> u(static_cast<std::size_t>(f.components())), xi(dim);
    int violations = 0;
    double worst_rel = kInf;
    std::string worst_detail;
    for (int t = 0; t < trials; ++t) {
        const std::size_t cell = static_cast<std::size_t>(t) % f.grid().size();
        for (auto& c : u) c = rng.uniform(-2.0, 2.0);
        const double radius = rng.log_uniform(1e-3, 1e3);
        for (auto& c : xi) c = rng.uniform(-1.0, 1.0);
        const double r = euclid(xi);
        if (r == 0.0) continue;
        for (auto& c : xi) c *= radius / r;
        const double value = f.raw(cell, u, xi);
        const double bound = f.alpha() * std::pow(radius, f.gamma());
        const double rel = (value - bound) / bound;
        if (rel < -1e-12) {
            ++violations;
            if (rel < worst_rel) {
                std::ostringstream os;
                os << "cell " << cell << " x=" << format_vec(f.grid().center(cell)) << " |xi|=" << radius
                   << " f=" << value << " alpha|xi|^gamma=" << bound;
                worst_detail = os.str();
            }
        }
        worst_rel = std::min(worst_rel, rel);
    }
    RelationReport report;
    report.add("H2 growth (" + std::to_string(trials) + " trials, " + std::to_string(violations) + " violations)",
               violations == 0, worst_rel, worst_detail);
    return report;
}

}  // namespace suplab
