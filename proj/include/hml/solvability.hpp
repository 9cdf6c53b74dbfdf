#pragma once

#include <optional>

#include "hml/expr.hpp"
#include "hml/langevin.hpp"

namespace hml {

/// Where the growth constants in a GrowthBounds came from.
enum class BoundsProvenance {
    user_supplied,   ///< stated by the caller (problem file or API)
    auto_estimated,  ///< sampled from the forcing by estimate_bounds; advisory only
};

/// Growth data for the forcing f(t, x) on [1, e] x R.
///
/// Two independent hypotheses feed the certificates:
///   linear growth    |f(t, x)| <= L1*|x| + L2      (existence),
///   Lipschitz in x   |f(t, x) - f(t, y)| <= L*|x - y|  (uniqueness).
/// L1 and L2 travel as a pair; either the pair or L may be absent when the
/// caller does not know it, and the corresponding certificate is then
/// reported as not evaluated rather than failed.
struct GrowthBounds {
    std::optional<double> L1;
    std::optional<double> L2;
    std::optional<double> L;
    BoundsProvenance provenance = BoundsProvenance::user_supplied;
};

/// Outcome of one strict certificate inequality.
enum class Certificate {
    satisfied,      ///< the strict inequality holds with margin
    violated,       ///< the inequality fails with margin
    inconclusive,   ///< the product sits within 1e-12 of 1; too close to call
    not_evaluated,  ///< the required growth constants were not supplied
};

/// Everything certify() computes for a problem.
///
/// omega1 and omega2 are the two norm-estimate constants of the solution
/// operator; existence holds when L1*omega2 < 1 and uniqueness (contraction)
/// when L*omega2 < 1, both strictly. r_min = omega1 / (1 - L1*omega2) is the
/// radius of the invariant ball and is present exactly when the existence
/// certificate is satisfied. Fields tied to absent growth constants stay
/// empty.
struct SolvabilityReport {
    std::optional<double> omega1;
    double omega2 = 0.0;
    std::optional<double> L1_omega2;
    std::optional<double> L_omega2;
    std::optional<double> r_min;
    Certificate existence = Certificate::not_evaluated;
    Certificate uniqueness = Certificate::not_evaluated;
    BoundsProvenance provenance = BoundsProvenance::user_supplied;
};

/// omega1 = (|c0| + L2*B(alpha, 1+beta)/Gamma(1+beta)
///                + L2*B(alpha, beta)/Gamma(1+beta)) * E_{alpha,alpha}(lambda).
///
/// Requires b.L2; throws ParameterError when it is absent and propagates
/// special-function domain errors (e.g. Mittag-Leffler overflow).
double compute_omega1(const ProblemSpec& p, const GrowthBounds& b);

/// omega2 = B(beta, 1-gamma)/Gamma(beta)
///          * (B(alpha, 1+beta-gamma) + B(alpha, beta)) * E_{alpha,alpha}(lambda).
double compute_omega2(const ProblemSpec& p);

/// Evaluates both certificate inequalities for the problem under the given
/// growth constants. Supplying exactly one of L1/L2 is a ParameterError; a
/// wholly absent pair (or absent L) leaves the corresponding certificate
/// not_evaluated. Products within 1e-12 of the critical value 1 are reported
/// inconclusive: a float tie at the strict-inequality boundary decides nothing.
SolvabilityReport certify(const ProblemSpec& p, const GrowthBounds& b);

/// Empirical growth constants sampled on the lattice [1, e] x [-100, 100]
/// (at least 1000 samples; fewer is a ParameterError).
///
/// L is the largest finite-difference slope in x. (L1, L2) minimize the mean
/// envelope height L1*mean|x| + L2 over valid envelopes, where for each slope
/// the intercept is the smallest one that still dominates every sample;
/// the cost is convex piecewise-linear in L1 and is minimized by
/// golden-section search. The result is advisory (provenance
/// auto_estimated): a finite sample can only bound the constants from below.
GrowthBounds estimate_bounds(const Expr& f, int samples);

}  // namespace hml
