#pragma once

// Discrete variable-exponent Lebesgue machinery. A Grid is a finite measure
// space (cell centers with positive weights), so every modular/norm relation
// holds exactly on it, not just approximately.

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "suplab/report.hpp"

namespace suplab {

/// Any single modular term with log-magnitude above this turns the modular
/// into the +inf sentinel.
inline constexpr double kOverflowLogThreshold = 700.0;

/// Relative bracket width at which the Luxemburg bisection stops.
inline constexpr double kLuxemburgRelTol = 1e-12;

class Grid;
using GridPtr = std::shared_ptr<const Grid>;

class Grid {
public:
    /// Cell-centered uniform grid on the box [lower, upper], midpoint weights.
    static GridPtr uniform(std::span<const double> lower, std::span<const double> upper,
                           std::span<const int> cells);
    static GridPtr uniform_1d(double x0, double x1, int cells);
    static GridPtr from_cells(int dimension, std::vector<double> centers, std::vector<double> weights);

    [[nodiscard]] int dimension() const noexcept { return dimension_; }
    [[nodiscard]] std::size_t size() const noexcept { return weights_.size(); }
    [[nodiscard]] std::span<const double> center(std::size_t i) const {
        return {centers_.data() + i * static_cast<std::size_t>(dimension_),
                static_cast<std::size_t>(dimension_)};
    }
    [[nodiscard]] double weight(std::size_t i) const { return weights_[i]; }
    [[nodiscard]] std::span<const double> weights() const noexcept { return weights_; }
    [[nodiscard]] double total_measure() const noexcept { return total_measure_; }

    /// Same cell count, dimension and weights (bitwise).
    [[nodiscard]] bool same_as(const Grid& other) const noexcept;

private:
    Grid(int dimension, std::vector<double> centers, std::vector<double> weights);

    int dimension_;
    std::vector<double> centers_;
    std::vector<double> weights_;
    double total_measure_;
};

using PointFunction = std::function<double(std::span<const double>)>;

/// Sampled variable exponent p(x_i) with cached p^- and p^+.
class ExponentField {
public:
    ExponentField(GridPtr grid, std::vector<double> values);
    static ExponentField constant(GridPtr grid, double value);
    static ExponentField from_profile(GridPtr grid, const PointFunction& profile);

    [[nodiscard]] const Grid& grid() const noexcept { return *grid_; }
    [[nodiscard]] const GridPtr& grid_ptr() const noexcept { return grid_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] double p_minus() const noexcept { return p_minus_; }
    [[nodiscard]] double p_plus() const noexcept { return p_plus_; }

    /// Cell-wise p / s.
    [[nodiscard]] ExponentField divided_by(double s) const;

private:
    GridPtr grid_;
    std::vector<double> values_;
    double p_minus_;
    double p_plus_;
};

/// n -> p_n on a fixed grid, together with the declared ratio bound beta.
class ExponentSequence {
public:
    using Generator = std::function<ExponentField(int)>;

    ExponentSequence(Generator generator, double beta);

    /// p_n(x) = n * profile(x).
    static ExponentSequence scaled_profile(GridPtr grid, PointFunction profile, double beta);

    [[nodiscard]] ExponentField operator()(int n) const { return generator_(n); }
    [[nodiscard]] double beta() const noexcept { return beta_; }

    /// pn2 (p^+ <= beta p^-) per term and pn1 (p^- nondecreasing and growing)
    /// over the given prefix.
    [[nodiscard]] RelationReport check_conditions(std::span<const int> n_values) const;

private:
    Generator generator_;
    double beta_;
};

/// Cell-wise samples with `components` entries per cell.
class GridFunction {
public:
    GridFunction(GridPtr grid, int components, std::vector<double> values);
    static GridFunction scalar(GridPtr grid, std::vector<double> values);
    static GridFunction constant(GridPtr grid, double value);
    static GridFunction from_function(GridPtr grid, const PointFunction& fn);

    [[nodiscard]] const Grid& grid() const noexcept { return *grid_; }
    [[nodiscard]] const GridPtr& grid_ptr() const noexcept { return grid_; }
    [[nodiscard]] int components() const noexcept { return components_; }
    [[nodiscard]] std::size_t size() const noexcept { return grid_->size(); }
    [[nodiscard]] bool is_scalar() const noexcept { return components_ == 1; }

    [[nodiscard]] std::span<const double> at(std::size_t i) const {
        return {values_.data() + i * static_cast<std::size_t>(components_),
                static_cast<std::size_t>(components_)};
    }
    [[nodiscard]] double operator[](std::size_t i) const { return values_[i * static_cast<std::size_t>(components_)]; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

    /// Per-cell Euclidean magnitude as a scalar function.
    [[nodiscard]] GridFunction magnitude() const;
    [[nodiscard]] GridFunction scaled(double c) const;
    [[nodiscard]] GridFunction abs_pow(double s) const;
    [[nodiscard]] double max_abs() const noexcept;

private:
    GridPtr grid_;
    int components_;
    std::vector<double> values_;
};

GridFunction operator+(const GridFunction& a, const GridFunction& b);
GridFunction operator*(const GridFunction& a, const GridFunction& b);

/// sum_i w_i |u_i|^{p_i}, or +inf when a term exceeds the overflow threshold.
double modular(const GridFunction& u, const ExponentField& p);

/// modular(u / lambda, p) without forming u / lambda.
double modular_scaled(const GridFunction& u, const ExponentField& p, double lambda);

/// ln modular(u, p) via log-sum-exp; never overflows. -inf for u == 0.
double log_modular(const GridFunction& u, const ExponentField& p);

/// inf{lambda > 0 : rho(lambda) <= 1} for a strictly decreasing rho with
/// rho -> inf as lambda -> 0. Geometric bracket expansion from lambda0, then
/// bisection to kLuxemburgRelTol relative width.
double luxemburg_root(const std::function<double(double)>& rho, double lambda0);

double luxemburg_norm(const GridFunction& u, const ExponentField& p);

/// Weighted classical q-norm (sum_i w_i |u_i|^q)^{1/q}, q >= 1.
double lebesgue_norm(const GridFunction& u, double q);

/// mod-1 .. mod5, the min/max sandwich and the bound on ||1||.
RelationReport verify_norm_modular_relations(const GridFunction& u, const ExponentField& p);

RelationReport holder_check(const GridFunction& f, const GridFunction& g, const ExponentField& p,
                            const ExponentField& q, const ExponentField& s);

/// || |u|^s ||_{p/s}^{1/s} == ||u||_p, for 1 < s < p^-.
RelationReport power_identity_check(const GridFunction& u, const ExponentField& p, double s);

/// ||u||_q <= C(m, q, p^-, p^+, beta) ||u||_{p(.)} for 1 <= q <= p^-.
RelationReport embedding_bound_check(const GridFunction& u, const ExponentField& p, double q,
                                     double beta);

/// The constant C of embedding_bound_check.
double embedding_constant(double total_measure, double q, double p_minus, double p_plus, double beta);

struct NormLimitRow {
    int n;
    double p_minus;
    double p_plus;
    double norm;
    double sup;
    double error;
};

std::vector<NormLimitRow> norm_limit_study(const GridFunction& u, const ExponentSequence& seq,
                                           std::span<const int> n_values);

/// modular(|u|) + modular(|Du|) with cell-wise vector magnitudes.
double sobolev_modular(const GridFunction& u, const GridFunction& du, const ExponentField& p);
double sobolev_norm(const GridFunction& u, const GridFunction& du, const ExponentField& p);

}  // namespace suplab
