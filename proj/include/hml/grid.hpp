#pragma once

#include <functional>
#include <memory>
#include <vector>

namespace hml {

/// Graded mesh on the problem interval [1, e], stored in the log coordinate
/// u = ln t, u in [0, 1]. Nodes cluster symmetrically at both endpoints:
///   u_j = (1/2) (j / (n/2))^q          for j <= n/2,
///   u_j = 1 - u_{n-j}                  for j >  n/2  (exact mirror),
/// so integrable endpoint singularities of strength up to u^{-gamma} are
/// resolved at both t = 1 and t = e.
struct LogGrid {
    int n = 0;       ///< cell count; n+1 nodes, even, >= 16
    double q = 1.0;  ///< grading exponent, >= 1 (1 = uniform)
    std::vector<double> u; ///< log-coordinate nodes, u[0] = 0, u[n] = 1, strictly increasing
    std::vector<double> t; ///< t[j] = exp(u[j])
};

using GridPtr = std::shared_ptr<const LogGrid>;

/// Build a grid. Throws ParameterError unless n is even and >= 16,
/// 1 <= q <= 10, and the first cell does not collapse to zero width.
GridPtr make_grid(int n, double q);

/// A function sampled on a LogGrid, measured in the weighted sup norm
///   ||f|| = sup_{t in (1,e]} (ln t)^gamma |f(t)|.
///
/// `gamma` is the weight exponent under which this particular function is
/// bounded. Functions that blow up like (ln t)^{-gamma} at the left endpoint
/// carry `singular = true` and the finite limit
/// `weighted_v0 = lim_{t->1+} (ln t)^gamma f(t)`; `values[0]` is then only a
/// +-inf/0 sentinel and must not enter arithmetic. Regular functions store
/// their actual value at t = 1 in values[0].
struct GridFunction {
    GridPtr grid;
    std::vector<double> values; ///< size n+1
    double gamma = 0.0;
    bool singular = false;
    double weighted_v0 = 0.0;
};

/// Sample a plain (bounded at t=1) function of t on the grid.
GridFunction sample_regular(const GridPtr& grid, double gamma,
                            const std::function<double(double)>& f_of_t);

/// Build a function with a (ln t)^{-gamma} blow-up at t = 1: interior nodes
/// from `f_of_t`, node 0 described by the weighted limit `weighted_v0`.
GridFunction sample_singular(const GridPtr& grid, double gamma, double weighted_v0,
                             const std::function<double(double)>& f_of_t);

/// lim_{t->1+} (ln t)^{gamma_prime} f(t): 0 when the weight more than kills
/// the singularity, the stored limit when it matches exactly, +-infinity when
/// the function genuinely escapes the requested space.
double weighted_limit_at(const GridFunction& f, double gamma_prime);

/// Weighted sup norm of f under its own gamma. May return +infinity only via
/// weighted_limit_at (never from interior nodes).
double weighted_norm(const GridFunction& f);

/// Weighted sup norm of f measured under a different weight exponent.
double weighted_norm_at(const GridFunction& f, double gamma_prime);

/// sup_j (ln t_j)^{gamma_prime} |a_j - b_j| over interior nodes plus the
/// weighted limit of the difference at t = 1. Requires a and b on the same
/// grid. This is the metric used for fixed-point iteration steps.
double weighted_distance(const GridFunction& a, const GridFunction& b, double gamma_prime);

} // namespace hml
