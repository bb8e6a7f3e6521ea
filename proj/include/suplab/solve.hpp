#pragma once

// Minimization of the discrete power-law energies over interior nodes with
// fixed Dirichlet data, plus the closed-form 1-D supremal oracle.
//
// The kink of |xi| is handled by continuation: |xi| -> sqrt(|xi|^2 + eps^2)
// along a decreasing eps schedule, each stage warm-started from the last.

#include <string>
#include <vector>

#include "suplab/discretize.hpp"
#include "suplab/energy.hpp"
#include "suplab/exponent_space.hpp"

namespace suplab {

enum class Functional {
    Fn,     // || f(x, u, Du) ||_{p(.)}
    calFn,  // sum_i w_i f_i^{p_i} / p_i
};

enum class DescentMethod { newton, steepest };

std::string to_string(Functional functional);
std::string to_string(DescentMethod method);

struct SolverSettings {
    std::vector<double> epsilons = geometric_epsilons(1e-1, 1e-6, 0.1);
    DescentMethod method = DescentMethod::newton;
    double initial_step = 1.0;
    double shrink = 0.5;
    double sufficient_decrease = 1e-4;
    int max_backtracks = 60;
    /// Stage ends when the relative objective decrease of an accepted step
    /// falls below this.
    double tolerance = 1e-13;
    int max_iterations = 500;

    /// start, start*factor, ... down to (and including) floor.
    static std::vector<double> geometric_epsilons(double start, double floor, double factor);

    /// Throws PreconditionError on a non-decreasing schedule, shrink outside
    /// (0,1) or sufficient_decrease outside (0, 1/2].
    void validate() const;
};

struct StageTrace {
    double epsilon = 0.0;
    /// Smoothed objective after each accepted step (index 0: stage start).
    /// Fn stages record the smoothed Luxemburg norm; calFn stages record
    /// ln of the smoothed integral so huge exponents stay representable.
    std::vector<double> objective;
    int iterations = 0;
    double residual = 0.0;
    bool stagnated = false;
};

struct SolveResult {
    DiscreteField field;
    Functional functional = Functional::Fn;
    /// Unsmoothed F_n or calF_n of the final field (calF_n may be +inf).
    double objective = 0.0;
    /// ln of the unsmoothed objective.
    double log_objective = 0.0;
    int iterations = 0;
    /// ||gradient||_inf of the normalized smoothed objective at the end.
    double residual = 0.0;
    bool stagnated = false;
    std::string message;
    std::vector<StageTrace> trace;
};

/// Requires a weighted_norm or shifted_norm density with one component.
SolveResult minimize_power(Functional functional, const DensitySpec& f, const ExponentField& p,
                           const MeshSpec& mesh, const SolverSettings& settings);

/// Same, warm-started from `initial` (its boundary values are kept).
SolveResult minimize_power(Functional functional, const DensitySpec& f, const ExponentField& p,
                           DiscreteField initial, const SolverSettings& settings);

/// int_{x0}^{x} 1/a(t) dt by adaptive Gauss-Kronrod, split at breakpoints.
double integrate_inverse(const CoefficientProfile& a, double x0, double x);

/// min ess sup a |u'| over u with u(x0) = g0, u(x1) = g1:
/// |g1 - g0| / int_{x0}^{x1} 1/a.
double supremal_oracle_1d(const CoefficientProfile& a, double x0, double x1, double g0, double g1);

/// The minimizer attaining the oracle: g0 + sign(g1-g0) L* int_{x0}^{x} 1/a.
double oracle_minimizer_1d(const CoefficientProfile& a, double x0, double x1, double g0, double g1, double x);

}  // namespace suplab
