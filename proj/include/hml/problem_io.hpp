#pragma once

#include <optional>
#include <string>

#include "hml/grid.hpp"
#include "hml/langevin.hpp"
#include "hml/solvability.hpp"

namespace hml {

/// Parsed contents of a problem file: the equation data plus optional growth
/// constants and an optional solver-grid override.
struct ProblemInput {
    ProblemSpec problem;
    GrowthBounds bounds;  ///< all constants absent when the file had no "bounds"
    std::optional<int> grid_n;
    std::optional<double> grid_q;
};

/// Parses the v1 problem JSON:
///
///   { "version": 1 (optional), "alpha": real, "beta": real, "lambda": real,
///     "c0": real, "gamma": real (optional, default 1 - alpha),
///     "f": expression string,
///     "bounds": { "L1": real, "L2": real, "L": real } (optional; L1 and L2
///                 travel as a pair, and at least one hypothesis is required),
///     "grid":   { "n": int, "q": real } (optional) }
///
/// Unknown keys anywhere are rejected (ParameterError), malformed JSON and
/// type mismatches are ParameterError, and a bad "f" raises ParseError with
/// the offending source span. Range validation of the numbers is left to the
/// solver entry points.
ProblemInput parse_problem_json(const std::string& text);

/// Reads the file at path ("-" means stdin) and parses it.
ProblemInput load_problem_file(const std::string& path);

/// Renders a solution as the v1 CSV: a version comment, an optional
/// "# warning: ..." comment, the header t,u,x,weighted_x, then one row per
/// grid node at 17 significant digits. weighted_x is (ln t)^gamma * x(t)
/// under the function's own weight exponent; on the first node it is the
/// stored weighted limit.
std::string solution_to_csv(const GridFunction& x, const std::string& warning = std::string());

/// Machine-readable report: keys mirror SolvabilityReport (version, omega1,
/// omega2, L1_omega2, L_omega2, r_min, existence_ok, uniqueness_ok,
/// provenance); absent quantities serialize as null.
std::string report_to_json(const SolvabilityReport& r);

/// Aligned human-readable report at 10 significant digits.
std::string report_to_text(const SolvabilityReport& r);

}  // namespace hml
