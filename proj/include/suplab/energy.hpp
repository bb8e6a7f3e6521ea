#pragma once

// Densities f(x, u, xi) satisfying (or probed for) level convexity in xi and
// the growth bound f >= alpha |xi|^gamma, plus the three discrete energies:
//   supremal   max_i f_i
//   F_n        || f ||_{p_n(.)}                (Luxemburg norm)
//   calF_n     sum_i w_i f_i^{p_i} / p_i

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "suplab/exponent_space.hpp"
#include "suplab/report.hpp"

namespace suplab {

/// Named closed-form coefficient a(x).
struct CoefficientProfile {
    enum class Kind { constant, inv_one_plus_x, piecewise, linear };

    Kind kind = Kind::constant;
    double value = 1.0;  // constant value, or intercept for linear
    double slope = 0.0;  // linear: value + slope * x1
    double left = 1.0;   // piecewise: left for x1 < split, right otherwise
    double right = 1.0;
    double split = 0.5;

    static CoefficientProfile constant(double c) { return {Kind::constant, c}; }
    static CoefficientProfile inv_one_plus_x() { return {Kind::inv_one_plus_x}; }
    static CoefficientProfile piecewise(double left, double right, double split = 0.5) {
        return {Kind::piecewise, 1.0, 0.0, left, right, split};
    }
    static CoefficientProfile linear(double intercept, double slope) { return {Kind::linear, intercept, slope}; }

    [[nodiscard]] double operator()(double x1) const;
    [[nodiscard]] double operator()(std::span<const double> x) const { return (*this)(x[0]); }
    /// Breakpoints inside (x0, x1) where the profile is not smooth.
    [[nodiscard]] std::vector<double> breakpoints(double x0, double x1) const;
    [[nodiscard]] std::string describe() const;
};

enum class DensityFamily { weighted_norm, shifted_norm, anisotropic, custom };

enum class CustomRule {
    capped_norm,  // a * (min(|xi|, 1) + 1e-6 |xi|)
    annulus,      // a * | |xi| - 1 |          (not level convex)
    power_norm,   // (a |xi|)^k, k = rule parameter
};

std::string to_string(DensityFamily family);
std::string to_string(CustomRule rule);

class DensitySpec {
public:
    /// scale * a(x) |xi|
    static DensitySpec weighted_norm(GridPtr grid, CoefficientProfile a, int components = 1);
    /// scale * |xi - b|, b constant
    static DensitySpec shifted_norm(GridPtr grid, std::vector<double> shift, int components = 1);
    /// scale * a(x) max_j c_j |xi_j|
    static DensitySpec anisotropic(GridPtr grid, CoefficientProfile a, std::vector<double> axis_weights,
                                   int components = 1);
    static DensitySpec custom(GridPtr grid, CustomRule rule, CoefficientProfile a, double parameter,
                              bool level_convex, int components = 1);

    DensitySpec& with_growth(double alpha, double gamma);
    [[nodiscard]] DensitySpec scaled(double c) const;

    [[nodiscard]] DensityFamily family() const noexcept { return family_; }
    [[nodiscard]] CustomRule rule() const noexcept { return rule_; }
    [[nodiscard]] double parameter() const noexcept { return parameter_; }
    [[nodiscard]] const Grid& grid() const noexcept { return *grid_; }
    [[nodiscard]] const GridPtr& grid_ptr() const noexcept { return grid_; }
    [[nodiscard]] int components() const noexcept { return components_; }
    [[nodiscard]] int xi_dim() const noexcept { return grid_->dimension() * components_; }
    [[nodiscard]] double alpha() const noexcept { return alpha_; }
    [[nodiscard]] double gamma() const noexcept { return gamma_; }
    [[nodiscard]] bool level_convex() const noexcept { return level_convex_; }
    [[nodiscard]] double scale() const noexcept { return scale_; }
    [[nodiscard]] const CoefficientProfile& profile() const noexcept { return profile_; }
    [[nodiscard]] double coefficient(std::size_t cell) const { return coefficients_[cell]; }
    [[nodiscard]] std::span<const double> shift() const noexcept { return shift_; }
    [[nodiscard]] std::span<const double> axis_weights() const noexcept { return axis_weights_; }

    /// f(x_cell, u, xi) without the nonnegativity contract.
    [[nodiscard]] double raw(std::size_t cell, std::span<const double> u, std::span<const double> xi) const;

    /// True when f(x, u, t xi) = t f(x, u, xi) for t > 0.
    [[nodiscard]] bool positively_homogeneous() const noexcept;

    [[nodiscard]] std::string describe() const;

private:
    DensitySpec(DensityFamily family, GridPtr grid, CoefficientProfile profile, int components);

    DensityFamily family_;
    CustomRule rule_ = CustomRule::capped_norm;
    GridPtr grid_;
    CoefficientProfile profile_;
    std::vector<double> coefficients_;
    std::vector<double> shift_;
    std::vector<double> axis_weights_;
    double parameter_ = 1.0;
    double scale_ = 1.0;
    double alpha_ = 0.0;
    double gamma_ = 1.0;
    bool level_convex_ = true;
    int components_;
};

/// Finite nonnegative value; ContractError on a negative evaluation.
double eval_density(const DensitySpec& f, std::size_t cell, std::span<const double> u_val,
                    std::span<const double> xi);

/// Cell-wise f(x_i, u_i, Du_i) as a scalar grid function.
GridFunction density_field(const DensitySpec& f, const GridFunction& u, const GridFunction& du);

double eval_supremal(const DensitySpec& f, const GridFunction& u, const GridFunction& du);
double eval_Fn(const DensitySpec& f, const GridFunction& u, const GridFunction& du, const ExponentField& p);
/// +inf sentinel when a term's log-magnitude exceeds kOverflowLogThreshold.
double eval_calFn(const DensitySpec& f, const GridFunction& u, const GridFunction& du, const ExponentField& p);
/// ln calF_n, finite whenever calF_n > 0.
double log_calFn(const DensitySpec& f, const GridFunction& u, const GridFunction& du, const ExponentField& p);

/// Integral-form energy of an already evaluated density field.
double calFn_of_field(const GridFunction& density, const ExponentField& p);
double log_calFn_of_field(const GridFunction& density, const ExponentField& p);

RelationReport level_convexity_probe(const DensitySpec& f, int trials, std::uint64_t seed);
RelationReport growth_check(const DensitySpec& f, int trials, std::uint64_t seed);

}  // namespace suplab
