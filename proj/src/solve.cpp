#include "suplab/solve.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>

#include "suplab/errors.hpp"

namespace suplab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Vec = Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<double>;

// Smoothed density g(xi) = scale * a * sqrt(|xi - b|^2 + eps^2) with first
// and second derivatives in xi (dimension <= 2).
struct SmoothedValue {
    double g = 0.0;
    double grad[2] = {0.0, 0.0};
    double hess[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
};

class Objective {
public:
    Objective(Functional functional, const DensitySpec& f, const ExponentField& p, const DiscreteField& field)
        : functional_(functional), f_(f), p_(p), dim_(field.mesh().dimension) {
        const std::size_t cells = field.mesh().cell_count();
        stencils_.reserve(cells);
        for (std::size_t c = 0; c < cells; ++c) stencils_.push_back(field.stencil(c));
        slot_.assign(field.nodes().size(), -1);
        for (std::size_t k = 0; k < field.interior().size(); ++k) slot_[field.interior()[k]] = static_cast<long>(k);
        log_weight_.resize(cells);
        for (std::size_t c = 0; c < cells; ++c) {
            log_weight_[c] = std::log(field.cell_grid()->weight(c));
            if (functional_ == Functional::calFn) log_weight_[c] -= std::log(p_[c]);
        }
    }

    void set_epsilon(double eps) { eps_ = eps; }
    // Objective is sum_c exp(log_weight_c + p_c ln(g_c / lambda) - shift).
    void set_normalization(double lambda, double shift) {
        log_lambda_ = std::log(lambda);
        shift_ = shift;
    }

    SmoothedValue smoothed(std::size_t cell, const double* xi) const {
        SmoothedValue s;
        const double coef = f_.scale() * f_.coefficient(cell);
        double eta[2] = {0.0, 0.0};
        double r2 = eps_ * eps_;
        for (int a = 0; a < dim_; ++a) {
            eta[a] = xi[a] - (f_.family() == DensityFamily::shifted_norm ? f_.shift()[static_cast<std::size_t>(a)] : 0.0);
            r2 += eta[a] * eta[a];
        }
        const double r = std::sqrt(r2);
        s.g = coef * r;
        for (int a = 0; a < dim_; ++a) {
            s.grad[a] = coef * eta[a] / r;
            for (int b = 0; b < dim_; ++b) s.hess[a][b] = coef * ((a == b ? 1.0 / r : 0.0) - eta[a] * eta[b] / (r2 * r));
        }
        return s;
    }

    void cell_xi(std::size_t cell, std::span<const double> nodes, double* xi) const {
        const CellStencil& s = stencils_[cell];
        for (int a = 0; a < dim_; ++a) {
            double d = 0.0;
            for (int k = 0; k < s.corner_count; ++k) {
                const auto kk = static_cast<std::size_t>(k);
                d += s.coeff[static_cast<std::size_t>(a)][kk] * nodes[s.corners[kk]];
            }
            xi[a] = d;
        }
    }

    double log_term(std::size_t cell, double g) const {
        return log_weight_[cell] + p_[cell] * (std::log(g) - log_lambda_) - shift_;
    }

    /// Largest log term at the given nodes (for choosing the shift).
    double max_log_term(std::span<const double> nodes) const {
        double peak = -kInf;
        double xi[2];
        for (std::size_t c = 0; c < stencils_.size(); ++c) {
            cell_xi(c, nodes, xi);
            peak = std::max(peak, log_term(c, smoothed(c, xi).g) + shift_);
        }
        return peak;
    }

    /// Smoothed density field (for the Luxemburg normalization of Fn).
    GridFunction smoothed_field(const DiscreteField& field) const {
        std::vector<double> v(stencils_.size());
        double xi[2];
        for (std::size_t c = 0; c < v.size(); ++c) {
            cell_xi(c, field.nodes(), xi);
            v[c] = smoothed(c, xi).g;
        }
        return GridFunction::scalar(field.cell_grid(), std::move(v));
    }

    /// +inf when any term exceeds the overflow threshold.
    double value(std::span<const double> nodes) const {
        double sum = 0.0;
        double xi[2];
        for (std::size_t c = 0; c < stencils_.size(); ++c) {
            cell_xi(c, nodes, xi);
            const double lt = log_term(c, smoothed(c, xi).g);
            if (lt > kOverflowLogThreshold) return kInf;
            sum += std::exp(lt);
        }
        return sum;
    }

    double gradient(std::span<const double> nodes, Vec& grad, std::vector<Eigen::Triplet<double>>* hess) const {
        grad.setZero(static_cast<Eigen::Index>(unknowns()));
        if (hess) hess->clear();
        double sum = 0.0;
        double xi[2];
        for (std::size_t c = 0; c < stencils_.size(); ++c) {
            cell_xi(c, nodes, xi);
            const SmoothedValue s = smoothed(c, xi);
            const double phi = std::exp(log_term(c, s.g));
            sum += phi;
            const double p = p_[c];
            double dphi[2] = {0.0, 0.0};
            double h[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
            for (int a = 0; a < dim_; ++a) {
                dphi[a] = phi * p * s.grad[a] / s.g;
                for (int b = 0; b < dim_; ++b) {
                    h[a][b] = phi * p * ((p - 1.0) * s.grad[a] * s.grad[b] / (s.g * s.g) + s.hess[a][b] / s.g);
                }
            }
            const CellStencil& st = stencils_[c];
            for (int k = 0; k < st.corner_count; ++k) {
                const auto kk = static_cast<std::size_t>(k);
                const long ik = slot_[st.corners[kk]];
                if (ik < 0) continue;
                double gk = 0.0;
                for (int a = 0; a < dim_; ++a) gk += st.coeff[static_cast<std::size_t>(a)][kk] * dphi[a];
                grad[ik] += gk;
                if (!hess) continue;
                for (int l = 0; l < st.corner_count; ++l) {
                    const auto ll = static_cast<std::size_t>(l);
                    const long il = slot_[st.corners[ll]];
                    if (il < 0) continue;
                    double hkl = 0.0;
                    for (int a = 0; a < dim_; ++a) {
                        for (int b = 0; b < dim_; ++b) {
                            hkl += st.coeff[static_cast<std::size_t>(a)][kk] * h[a][b] *
                                   st.coeff[static_cast<std::size_t>(b)][ll];
                        }
                    }
                    hess->emplace_back(ik, il, hkl);
                }
            }
        }
        return sum;
    }

    [[nodiscard]] std::size_t unknowns() const {
        return static_cast<std::size_t>(std::count_if(slot_.begin(), slot_.end(), [](long s) { return s >= 0; }));
    }

private:
    Functional functional_;
    const DensitySpec& f_;
    const ExponentField& p_;
    int dim_;
    std::vector<CellStencil> stencils_;
    std::vector<long> slot_;
    std::vector<double> log_weight_;
    double eps_ = 0.0;
    double log_lambda_ = 0.0;
    double shift_ = 0.0;
};

// Newton direction with Levenberg damping fallback; steepest descent if all fails.
Vec newton_direction(const Vec& grad, std::vector<Eigen::Triplet<double>>& triplets, Eigen::Index n) {
    SpMat h(n, n);
    h.setFromTriplets(triplets.begin(), triplets.end());
    double diag_max = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) diag_max = std::max(diag_max, h.coeff(i, i));
    double mu = 0.0;
    for (int attempt = 0; attempt < 6; ++attempt) {
        SpMat m = h;
        if (mu > 0.0) {
            for (Eigen::Index i = 0; i < n; ++i) m.coeffRef(i, i) += mu;
        }
        Eigen::SimplicialLDLT<SpMat> solver(m);
        if (solver.info() == Eigen::Success) {
            Vec d = solver.solve(-grad);
            if (solver.info() == Eigen::Success && d.allFinite() && d.dot(grad) < 0.0) return d;
        }
        mu = (mu == 0.0) ? 1e-10 * std::max(diag_max, 1e-300) : mu * 100.0;
    }
    return -grad;
}

void apply(DiscreteField& field, const std::vector<double>& base, const Vec& dir, double t) {
    std::vector<double> x(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) x[i] = base[i] + t * dir[static_cast<Eigen::Index>(i)];
    field.set_interior(x);
}

void require_supported(const DensitySpec& f, const ExponentField& p, const DiscreteField& field) {
    if (f.family() != DensityFamily::weighted_norm && f.family() != DensityFamily::shifted_norm)
        throw PreconditionError("minimize_power: only weighted_norm and shifted_norm densities are smooth away from "
                                "the |xi| kink; got " + to_string(f.family()));
    if (f.components() != 1) throw PreconditionError("minimize_power: vector-valued u is evaluation-only");
    if (!f.grid().same_as(*field.cell_grid()) || !p.grid().same_as(*field.cell_grid()))
        throw StructuralError("minimize_power: density/exponent grid does not match the mesh cells");
    if (f.family() == DensityFamily::weighted_norm) {
        for (std::size_t c = 0; c < f.grid().size(); ++c) {
            if (!(f.coefficient(c) > 0.0)) throw PreconditionError("minimize_power: coefficient must be positive");
        }
    }
}

}  // namespace

std::string to_string(Functional functional) { return functional == Functional::Fn ? "Fn" : "calFn"; }
std::string to_string(DescentMethod method) { return method == DescentMethod::newton ? "newton" : "steepest"; }

std::vector<double> SolverSettings::geometric_epsilons(double start, double floor, double factor) {
    if (!(start > 0.0) || !(floor > 0.0) || !(factor > 0.0 && factor < 1.0) || floor > start)
        throw PreconditionError("geometric_epsilons: need start >= floor > 0 and factor in (0,1)");
    std::vector<double> eps;
    for (double e = start; e > floor * (1.0 + 1e-9); e *= factor) eps.push_back(e);
    eps.push_back(floor);
    return eps;
}

void SolverSettings::validate() const {
    if (epsilons.empty()) throw PreconditionError("SolverSettings: empty epsilon schedule");
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        if (!(epsilons[i] > 0.0)) throw PreconditionError("SolverSettings: epsilons must be positive");
        if (i > 0 && !(epsilons[i] < epsilons[i - 1]))
            throw PreconditionError("SolverSettings: epsilon schedule must be strictly decreasing");
    }
    if (!(shrink > 0.0 && shrink < 1.0)) throw PreconditionError("SolverSettings: shrink must lie in (0,1)");
    if (!(sufficient_decrease > 0.0 && sufficient_decrease <= 0.5))
        throw PreconditionError("SolverSettings: sufficient_decrease must lie in (0, 1/2]");
    if (!(initial_step > 0.0)) throw PreconditionError("SolverSettings: initial_step must be positive");
    if (max_iterations < 1 || max_backtracks < 1) throw PreconditionError("SolverSettings: iteration caps must be >= 1");
    if (!(tolerance >= 0.0)) throw PreconditionError("SolverSettings: tolerance must be nonnegative");
}

SolveResult minimize_power(Functional functional, const DensitySpec& f, const ExponentField& p,
                           const MeshSpec& mesh, const SolverSettings& settings) {
    return minimize_power(functional, f, p, interpolate_boundary(mesh), settings);
}

SolveResult minimize_power(Functional functional, const DensitySpec& f, const ExponentField& p,
                           DiscreteField initial, const SolverSettings& settings) {
    settings.validate();
    require_supported(f, p, initial);

    SolveResult result{std::move(initial), functional, 0.0, 0.0, 0, 0.0, false, {}, {}};
    DiscreteField& field = result.field;
    Objective obj(functional, f, p, field);
    const auto n = static_cast<Eigen::Index>(obj.unknowns());
    Vec grad(n);
    std::vector<Eigen::Triplet<double>> triplets;
    double step_hint = settings.initial_step;

    // Fn: normalize by the current smoothed Luxemburg norm so the objective
    // starts each iteration at exactly 1; a decrease below 1 then lowers the
    // norm. calFn: subtract the largest log term so nothing overflows.
    auto normalize = [&]() -> double {
        if (functional == Functional::Fn) {
            const double lambda = luxemburg_norm(obj.smoothed_field(field), p);
            obj.set_normalization(lambda, 0.0);
            return lambda;
        }
        obj.set_normalization(1.0, 0.0);
        const double shift = obj.max_log_term(field.nodes());
        obj.set_normalization(1.0, shift);
        return shift;
    };
    // Trace value in natural (Fn) or log (calFn) units at the current normalization.
    auto trace_value = [&](double norm_param, double scaled_value) {
        return functional == Functional::Fn ? norm_param : norm_param + std::log(scaled_value);
    };

    for (double eps : settings.epsilons) {
        obj.set_epsilon(eps);
        StageTrace stage;
        stage.epsilon = eps;
        double param = normalize();
        double current = obj.value(field.nodes());
        stage.objective.push_back(trace_value(param, current));
        if (n == 0) {
            result.trace.push_back(stage);
            continue;
        }

        for (int it = 0; it < settings.max_iterations; ++it) {
            const bool newton = settings.method == DescentMethod::newton;
            current = obj.gradient(field.nodes(), grad, newton ? &triplets : nullptr);
            stage.residual = grad.lpNorm<Eigen::Infinity>();
            const Vec dir = newton ? newton_direction(grad, triplets, n) : Vec(-grad);
            const double slope = grad.dot(dir);
            if (!(slope < 0.0) || -slope <= 1e-15 * current) break;

            const std::vector<double> base = field.interior_values();
            double t = newton ? 1.0 : step_hint;
            bool accepted = false;
            double trial = kInf;
            for (int bt = 0; bt < settings.max_backtracks; ++bt) {
                apply(field, base, dir, t);
                trial = obj.value(field.nodes());
                if (trial <= current + settings.sufficient_decrease * t * slope) {
                    accepted = true;
                    break;
                }
                t *= newton ? 0.5 : settings.shrink;
            }
            if (!accepted) {
                field.set_interior(base);
                stage.stagnated = true;
                result.stagnated = true;
                result.message = "line search failed at eps=" + std::to_string(eps) + " iteration " +
                                 std::to_string(it);
                break;
            }
            ++stage.iterations;
            if (!newton) step_hint = std::min(t / settings.shrink, 1e12);

            const double before = stage.objective.back();
            param = normalize();
            const double after_scaled = obj.value(field.nodes());
            stage.objective.push_back(trace_value(param, after_scaled));
            const double rel = functional == Functional::Fn ? (before - stage.objective.back()) / before
                                                            : (current - trial) / current;
            if (rel <= settings.tolerance) break;
        }
        result.iterations += stage.iterations;
        result.trace.push_back(stage);
    }

    if (n > 0) {
        normalize();
        obj.gradient(field.nodes(), grad, nullptr);
        result.residual = grad.lpNorm<Eigen::Infinity>();
    }

    const GridFunction u = field.cell_values();
    const GridFunction du = gradient(field);
    if (functional == Functional::Fn) {
        result.objective = eval_Fn(f, u, du, p);
        result.log_objective = std::log(result.objective);
    } else {
        const GridFunction dens = density_field(f, u, du);
        result.objective = calFn_of_field(dens, p);
        result.log_objective = log_calFn_of_field(dens, p);
    }
    return result;
}

// ---------------------------------------------------------------- 1-D oracle

double integrate_inverse(const CoefficientProfile& a, double x0, double x) {
    if (x == x0) return 0.0;
    std::vector<double> nodes{x0};
    for (double b : a.breakpoints(std::min(x0, x), std::max(x0, x))) nodes.push_back(b);
    nodes.push_back(x);
    if (x < x0) std::sort(nodes.begin(), nodes.end(), std::greater<>());
    auto inv = [&](double t) {
        const double v = a(t);
        if (!(v > 0.0)) throw PreconditionError("supremal oracle: coefficient must be positive");
        return 1.0 / v;
    };
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        const double lo = nodes[i];
        const double hi = nodes[i + 1];
        // Keep the integrand away from a jump located exactly at an endpoint.
        const double pad = 1e-15 * std::max(1.0, std::abs(hi - lo));
        const double sign = hi > lo ? 1.0 : -1.0;
        total += sign * boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
                            inv, std::min(lo, hi) + pad, std::max(lo, hi) - pad, 15, 1e-14);
    }
    return total;
}

double supremal_oracle_1d(const CoefficientProfile& a, double x0, double x1, double g0, double g1) {
    if (!(x1 > x0)) throw PreconditionError("supremal_oracle_1d: need x1 > x0");
    return std::abs(g1 - g0) / integrate_inverse(a, x0, x1);
}

double oracle_minimizer_1d(const CoefficientProfile& a, double x0, double x1, double g0, double g1, double x) {
    const double lstar = supremal_oracle_1d(a, x0, x1, g0, g1);
    const double sign = g1 >= g0 ? 1.0 : -1.0;
    return g0 + sign * lstar * integrate_inverse(a, x0, x);
}

}  // namespace suplab
