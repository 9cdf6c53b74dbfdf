#pragma once

#include "hml/grid.hpp"

#include <vector>

namespace hml {

/// Dense lower-triangular product-integration weights for a Volterra
/// operator in the log coordinate u = ln t:
///
///   (W phi)(u_i) = integral_0^{u_i} K(u_i - u) phi(u) du,  i = 1..n,
///
/// with one of two kernel families (no Gamma prefactors; callers scale):
///   power:           K(d) = d^{exponent-1}
///   Mittag-Leffler:  K(d) = d^{exponent-1} E_{exponent,exponent}(lambda d^exponent)
///
/// Discretization (per the scheme this artifact implements):
///   - power kernel integrates the piecewise-linear interpolant of phi with
///     exact first and second kernel moments per cell;
///   - ML kernel integrates the endpoint-average (piecewise-constant) value
///     of phi against the exact kernel primitive per cell.
/// The first cell [0, u_1] is special: when phi carries a u^{-s} head
/// (s = singular_exponent), the head is integrated exactly (power kernel and
/// every row-1 case) or against the cell-midpoint kernel value (ML kernel,
/// rows >= 2), and the bounded remainder is treated linearly. All weights are
/// nonnegative for lambda >= 0.
struct VolterraWeights {
    GridPtr grid;
    bool ml_family = false;
    double exponent = 0.0;          ///< mu > 0 (power) or alpha in (0,1] (ML)
    double lambda = 0.0;            ///< ML family only, >= 0
    double singular_exponent = 0.0; ///< s in [0,1)

    std::vector<std::size_t> row_offset; ///< row i occupies core[row_offset[i] .. +i)
    std::vector<double> core;            ///< coefficients of phi_1..phi_i per row
    std::vector<double> w_reg0;          ///< first-cell coefficient of phi_0 (regular phi)
    std::vector<double> w1x_reg;         ///< first-cell extra coefficient of phi_1 (regular phi)
    std::vector<double> w_sing;          ///< first-cell coefficient of weighted_v0 (singular phi)
    std::vector<double> w1x_sing;        ///< first-cell extra coefficient of phi_1 (singular phi)

    /// Quadrature value of row i (1 <= i <= n) applied to phi. phi must live
    /// on the same grid; a singular phi must have gamma == singular_exponent.
    double apply_row(int i, const GridFunction& phi) const;

    /// All rows. The output's endpoint head follows the kernel calculus:
    /// a u^{-s} input head becomes a u^{exponent-s} term, so the result is
    /// singular (with the mapped coefficient) iff s > exponent.
    GridFunction apply(const GridFunction& phi, int threads = 1) const;
};

/// Assemble weights for the power kernel d^{mu-1}, mu > 0.
VolterraWeights assemble_power_weights(const GridPtr& grid, double mu,
                                       double singular_exponent, int threads = 1);

/// Assemble weights for the resolvent kernel d^{alpha-1} E_{alpha,alpha}(lambda d^alpha),
/// alpha in (0, 1], lambda >= 0.
VolterraWeights assemble_ml_weights(const GridPtr& grid, double alpha, double lambda,
                                    double singular_exponent, int threads = 1);

/// Fractional integral of order mu with base point t = 1 in the Hadamard
/// (logarithmic) calculus:
///   (I^mu phi)(t) = (1/Gamma(mu)) integral_1^t (ln t/s)^{mu-1} phi(s) ds/s.
/// Assembles power weights for phi's head exponent and applies them.
GridFunction hadamard_integral(double mu, const GridFunction& phi, int threads = 1);

/// Raw weighted integral over the whole interval,
///   integral_1^e (1 - ln tau)^{mu-1} phi(tau) dtau/tau
/// (no Gamma prefactor). Identical bits to row n of the power weights.
double full_interval_integral(double mu, const GridFunction& phi);

/// Volterra resolvent operator of the constant-coefficient problem:
///   (R g)(t) = integral_1^t (ln t/s)^{alpha-1}
///              E_{alpha,alpha}(lambda (ln t/s)^alpha) g(s) ds/s.
GridFunction resolvent_apply(double alpha, double lambda, const GridFunction& phi,
                             int threads = 1);

/// Logarithmic derivative t d/dt = d/du, realized by second-order finite
/// differences on the nonuniform u-grid (exact for quadratics in u). When
/// phi is unbounded at t = 1 the two leftmost output values are one-sided
/// extrapolations and only interior nodes are meaningful. Diagnostic use.
GridFunction log_derivative(const GridFunction& phi);

/// Fractional derivative of order alpha in (0, 1):
///   D^alpha phi = (t d/dt) I^{1-alpha} phi,
/// the finite difference realized by log_derivative. Diagnostic accuracy:
/// second order away from the endpoints.
GridFunction hadamard_derivative(double alpha, const GridFunction& phi, int threads = 1);

} // namespace hml
