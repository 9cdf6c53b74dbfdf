#include "hml/solvability.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "hml/errors.hpp"
#include "hml/special_functions.hpp"

namespace hml {

namespace {

constexpr double kCertificateTie = 1e-12;

// E_{alpha,alpha}(lambda), the resolvent growth factor shared by both omegas.
double resolvent_value(const ProblemSpec& p) {
    return mittag_leffler(p.alpha, p.alpha, p.lambda).value;
}

void check_constant(const std::optional<double>& v, const char* name) {
    if (v && (!std::isfinite(*v) || *v < 0.0)) {
        throw ParameterError(std::string("growth constant ") + name +
                             " must be finite and nonnegative");
    }
}

}  // namespace

double compute_omega1(const ProblemSpec& p, const GrowthBounds& b) {
    validate_problem(p);
    if (!b.L2) {
        throw ParameterError("omega1 needs the linear-growth intercept L2");
    }
    check_constant(b.L2, "L2");
    const double gb1 = gamma_fn(p.beta + 1.0);
    const double coef = std::fabs(p.c0) +
                        *b.L2 * beta_fn(p.alpha, 1.0 + p.beta) / gb1 +
                        *b.L2 * beta_fn(p.alpha, p.beta) / gb1;
    return coef * resolvent_value(p);
}

double compute_omega2(const ProblemSpec& p) {
    validate_problem(p);
    const double coef = beta_fn(p.beta, 1.0 - p.gamma) / gamma_fn(p.beta) *
                        (beta_fn(p.alpha, 1.0 + p.beta - p.gamma) + beta_fn(p.alpha, p.beta));
    return coef * resolvent_value(p);
}

SolvabilityReport certify(const ProblemSpec& p, const GrowthBounds& b) {
    if (b.L1.has_value() != b.L2.has_value()) {
        throw ParameterError("the linear-growth constants L1 and L2 come as a pair");
    }
    check_constant(b.L1, "L1");
    check_constant(b.L2, "L2");
    check_constant(b.L, "L");

    SolvabilityReport r;
    r.provenance = b.provenance;
    r.omega2 = compute_omega2(p);

    if (b.L1) {
        r.omega1 = compute_omega1(p, b);
        const double prod = *b.L1 * r.omega2;
        r.L1_omega2 = prod;
        if (std::fabs(prod - 1.0) <= kCertificateTie) {
            r.existence = Certificate::inconclusive;
        } else if (prod < 1.0) {
            r.existence = Certificate::satisfied;
            r.r_min = *r.omega1 / (1.0 - prod);
        } else {
            r.existence = Certificate::violated;
        }
    }
    if (b.L) {
        const double prod = *b.L * r.omega2;
        r.L_omega2 = prod;
        if (std::fabs(prod - 1.0) <= kCertificateTie) {
            r.uniqueness = Certificate::inconclusive;
        } else {
            r.uniqueness = prod < 1.0 ? Certificate::satisfied : Certificate::violated;
        }
    }
    return r;
}

GrowthBounds estimate_bounds(const Expr& f, int samples) {
    if (f.empty()) {
        throw ParameterError("estimate_bounds needs a forcing expression");
    }
    if (samples < 1000) {
        throw ParameterError("estimate_bounds needs at least 1000 samples");
    }

    // Deterministic lattice on [1, e] x [-X, X] with nt * nx >= samples.
    const double X = 100.0;
    const int nt = std::max(8, static_cast<int>(std::lround(std::sqrt(samples / 4.0))));
    const int nx = (samples + nt - 1) / nt;

    std::vector<double> xs(static_cast<std::size_t>(nx));
    for (int j = 0; j < nx; ++j) {
        xs[static_cast<std::size_t>(j)] = -X + 2.0 * X * j / (nx - 1);
    }
    std::vector<double> fv(static_cast<std::size_t>(nt) * static_cast<std::size_t>(nx));
    for (int i = 0; i < nt; ++i) {
        const double t = 1.0 + (std::exp(1.0) - 1.0) * i / (nt - 1);
        for (int j = 0; j < nx; ++j) {
            const double x = xs[static_cast<std::size_t>(j)];
            try {
                fv[static_cast<std::size_t>(i) * static_cast<std::size_t>(nx) +
                   static_cast<std::size_t>(j)] = f.eval(t, x);
            } catch (const EvalError& e) {
                char buf[160];
                std::snprintf(buf, sizeof(buf),
                              "bound estimation failed at sample (t = %.17g, x = %.17g): ", t, x);
                throw EvalError(std::string(buf) + e.what(), e.span);
            }
        }
    }

    // Lipschitz estimate: largest finite-difference slope in x.
    double slope_max = 0.0;
    for (int i = 0; i < nt; ++i) {
        const double* row = fv.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(nx);
        for (int j = 0; j + 1 < nx; ++j) {
            const double dx = xs[static_cast<std::size_t>(j + 1)] - xs[static_cast<std::size_t>(j)];
            slope_max = std::max(slope_max, std::fabs(row[j + 1] - row[j]) / dx);
        }
    }

    // Envelope |f| <= L1*|x| + L2: for a given slope the tightest valid
    // intercept is max(|f| - L1*|x|); minimize the mean envelope height
    // L1*mean|x| + intercept(L1), convex piecewise-linear in L1.
    double mean_abs_x = 0.0;
    for (int j = 0; j < nx; ++j) {
        mean_abs_x += std::fabs(xs[static_cast<std::size_t>(j)]);
    }
    mean_abs_x /= nx;

    auto intercept = [&](double L1) {
        double m = 0.0;
        for (int i = 0; i < nt; ++i) {
            const double* row =
                fv.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(nx);
            for (int j = 0; j < nx; ++j) {
                m = std::max(m, std::fabs(row[j]) - L1 * std::fabs(xs[static_cast<std::size_t>(j)]));
            }
        }
        return m;
    };
    auto cost = [&](double L1) { return L1 * mean_abs_x + intercept(L1); };

    // Past the largest secant slope |f|/|x|, raising the slope only raises
    // the cost, so that slope brackets the minimizer.
    double hi = 0.0;
    for (int i = 0; i < nt; ++i) {
        const double* row = fv.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(nx);
        for (int j = 0; j < nx; ++j) {
            const double ax = std::fabs(xs[static_cast<std::size_t>(j)]);
            if (ax > 0.0) {
                hi = std::max(hi, std::fabs(row[j]) / ax);
            }
        }
    }

    double a = 0.0;
    double c = hi;
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double m1 = c - invphi * (c - a);
    double m2 = a + invphi * (c - a);
    double f1 = cost(m1);
    double f2 = cost(m2);
    for (int it = 0; it < 90 && c - a > 1e-14 * std::max(1.0, hi); ++it) {
        if (f1 <= f2) {
            c = m2;
            m2 = m1;
            f2 = f1;
            m1 = c - invphi * (c - a);
            f1 = cost(m1);
        } else {
            a = m1;
            m1 = m2;
            f1 = f2;
            m2 = a + invphi * (c - a);
            f2 = cost(m2);
        }
    }
    const double L1 = 0.5 * (a + c);

    GrowthBounds out;
    out.L1 = L1;
    out.L2 = intercept(L1);
    out.L = slope_max;
    out.provenance = BoundsProvenance::auto_estimated;
    return out;
}

}  // namespace hml
