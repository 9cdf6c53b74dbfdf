#pragma once

#include "hml/expr.hpp"
#include "hml/grid.hpp"
#include "hml/hadamard.hpp"

#include <vector>

namespace hml {

/// Data of the two-order fractional Langevin boundary-value problem
///   D^beta (D^alpha - lambda) x(t) = f(t, x(t)),   1 < t < e,
///   (D^alpha - lambda) x(e) = 0,
///   I^{1-alpha} x(1+) = c0,
/// posed in the weighted space with norm sup (ln t)^gamma |x(t)|.
struct ProblemSpec {
    double alpha = 0.5;   ///< inner derivative order, in (0, 1]
    double beta = 0.5;    ///< outer derivative order, in (0, 1]
    double lambda = 1.0;  ///< friction coefficient, > 0 and <= kMittagLefflerZMax
    double c0 = 0.0;      ///< weighted initial value I^{1-alpha} x(1+)
    double gamma = 0.5;   ///< weight exponent of the solution space, in [0, 1)
    Expr f;               ///< forcing f(t, x)
};

/// Throws ParameterError when a field is outside its documented range or the
/// forcing expression is empty.
void validate_problem(const ProblemSpec& p);

/// Default solver mesh: n = 4096 cells at grading q = 3, which resolves both
/// the (ln t)^{alpha-1} mode at t = 1 and the kernel singularity at s = t.
GridPtr default_solver_grid();

/// f(t, x(t)) sampled on x's grid. The result carries the head exponent
/// p.gamma of the solution space; its weighted limit at t = 1 is
/// extrapolated from the first interior node (the limit exists under the
/// linear-growth hypothesis, and the extrapolation error is confined to the
/// first mesh cell). Evaluation failures rethrow EvalError with the node
/// location attached.
GridFunction compose_forcing(const ProblemSpec& p, const GridFunction& x);

/// The bracket of the Volterra representation:
///   g(s) = I^beta f(., x)(s) + A (ln s)^{beta-1},
///   A    = -(1/Gamma(beta)) integral_1^e (1 - ln tau)^{beta-1} f(tau, x(tau)) dtau/tau,
/// the unique combination for which (D^alpha - lambda) x vanishes at t = e.
/// By construction g(e) = 0 exactly (the two terms coincide at the right
/// endpoint before subtraction).
struct BracketField {
    GridFunction g;                ///< samples; head exponent 1 - beta when the mode is present
    double mode_coefficient = 0.0; ///< A, the (ln s)^{beta-1} mode amplitude
};

/// The bracket of x under problem p; assembles the order-beta weights for
/// x's grid on every call. Prefer LangevinOperator when applying repeatedly.
BracketField bracket_field(const ProblemSpec& p, const GridFunction& x, int threads = 1);

/// The solution operator of the Volterra representation,
///   (H x)(t) = c0 (ln t)^{alpha-1} E_{alpha,alpha}(lambda (ln t)^alpha)
///              + integral_1^t (ln t/s)^{alpha-1}
///                E_{alpha,alpha}(lambda (ln t/s)^alpha) g(s) ds/s,
/// with g the BracketField of x. Both quadrature-weight families are
/// assembled once at construction, so repeated applications cost one dense
/// triangular pass each. Applications are bitwise independent of the worker
/// count.
class LangevinOperator {
public:
    /// Validates p, assembles the inner (power, order beta) and outer
    /// (resolvent, order alpha) weights on `grid`.
    LangevinOperator(ProblemSpec p, GridPtr grid, int threads = 1);

    const ProblemSpec& problem() const { return p_; }
    const GridPtr& grid() const { return grid_; }

    /// The forcing-free term c0 (ln t)^{alpha-1} E_{alpha,alpha}(lambda (ln t)^alpha);
    /// its weighted limit at t = 1 is c0 / Gamma(alpha).
    const GridFunction& homogeneous() const { return homogeneous_; }

    BracketField bracket(const GridFunction& x) const;

    /// One application of H. The output's endpoint head is the homogeneous
    /// mode when c0 != 0 (weighted limit c0 / Gamma(alpha)); with c0 = 0 and
    /// alpha + beta < 1 the bracket mode's image (ln t)^{alpha+beta-1}
    /// becomes the head instead.
    GridFunction apply(const GridFunction& x) const;

private:
    ProblemSpec p_;
    GridPtr grid_;
    int threads_;
    VolterraWeights inner_;
    VolterraWeights outer_;
    GridFunction homogeneous_;
};

/// One-shot application of the solution operator on x's grid.
GridFunction apply_H(const ProblemSpec& p, const GridFunction& x, int threads = 1);

/// Outcome of the fixed-point iteration x_{k+1} = H x_k.
struct PicardResult {
    GridFunction solution;        ///< last iterate
    int iterations = 0;           ///< operator applications performed
    std::vector<double> history;  ///< step sizes d_k = ||x_{k+1} - x_k|| in the problem's weighted norm
    bool converged = false;       ///< true iff the last step size is <= tol
    double rate_estimate = 0.0;   ///< median of d_{k+1}/d_k over the last five steps (0 if fewer than two)
};

/// Picard iteration from the homogeneous term (which already carries the
/// correct (ln t)^{alpha-1} mode, so every iterate shares it exactly and the
/// step norms see only the forcing response). Stops at the first step with
/// d_k <= tol or after max_iter applications; running out of iterations sets
/// converged = false rather than throwing. A null grid selects
/// default_solver_grid().
PicardResult picard_solve(const ProblemSpec& p, double tol, int max_iter,
                          GridPtr grid = nullptr, int threads = 1);

/// A-posteriori diagnostics of a computed solution.
struct ResidualReport {
    /// sup over interior probe nodes (ln t in [0.2, 0.8]) of
    /// |D^beta((D^alpha - lambda) x) - f(., x)| with the finite-difference
    /// diagnostic derivatives. Before the outer derivative the bracket's
    /// (ln t)^{beta-1} mode (annihilated by D^beta) is subtracted and the
    /// first 0.1% of the log-interval is excluded, which keeps the inner
    /// derivative's endpoint noise out of the verdict without changing the
    /// measured quantity. Low-order; meaningful against coarse tolerances
    /// only.
    double ode_residual = 0.0;
    /// |g(e)| of the BracketField, the residual of (D^alpha - lambda)x(e) = 0.
    double right_boundary = 0.0;
    /// |(ln t_1)^{1-alpha} x(t_1) Gamma(alpha) - c0| at the first interior
    /// node, the weighted-limit form of the initial condition.
    double left_boundary = 0.0;
};

/// Always produces a report (never throws for in-range problems).
ResidualReport residual_report(const ProblemSpec& p, const GridFunction& x, int threads = 1);

} // namespace hml
