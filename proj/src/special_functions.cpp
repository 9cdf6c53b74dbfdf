#include "hml/special_functions.hpp"
#include "hml/errors.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

namespace hml {

namespace {

// Lanczos approximation, g = 7, 9 coefficients (Godfrey's classic set, as
// tabulated in Numerical Recipes 3rd ed. and the Boost.Math documentation).
// Gives ~15 correct significant digits for real positive arguments.
constexpr double kLanczosG = 7.0;
constexpr double kLanczos[9] = {
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
};
constexpr double kSqrtTwoPi = 2.5066282746310005024;
constexpr double kLogSqrtTwoPi = 0.91893853320467274178;
const double kInvSqrtPi = 0.56418958354775628695;

void require_positive_finite(double x, const char* fn) {
    if (!std::isfinite(x) || x <= 0.0) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "%s: argument must be positive and finite, got %.17g", fn, x);
        throw DomainError(buf);
    }
}

double lanczos_sum(double xm1) {
    double a = kLanczos[0];
    for (int i = 1; i < 9; ++i) a += kLanczos[i] / (xm1 + i);
    return a;
}

} // namespace

double gamma_fn(double x) {
    require_positive_finite(x, "gamma_fn");
    if (x < 0.5) return gamma_fn(x + 1.0) / x;
    if (x > 20.0) {
        // The Lanczos error grows to ~1e-13 by x = 170; the recurrence
        // Gamma(x) = (x-1) Gamma(x-1) is exact in double for x < 2^52, so
        // walk down into the region where the approximation is ~1e-15.
        double prod = 1.0, y = x;
        while (y > 20.0) {
            y -= 1.0;
            prod *= y;
        }
        return prod * gamma_fn(y);
    }

    const double xm1 = x - 1.0;
    const double tmp = xm1 + kLanczosG + 0.5;
    const double a = lanczos_sum(xm1);
    const double p = xm1 + 0.5;
    // pow(tmp, p) overflows before exp(-tmp) can pull the product back into
    // range once p*log(tmp) passes ~709, so split the power in two there.
    if (p * std::log(tmp) < 700.0) {
        return kSqrtTwoPi * a * std::pow(tmp, p) * std::exp(-tmp);
    }
    const double half = std::pow(tmp, 0.5 * p);
    return kSqrtTwoPi * a * half * std::exp(-tmp) * half;
}

double log_gamma(double x) {
    require_positive_finite(x, "log_gamma");
    if (x < 0.5) return log_gamma(x + 1.0) - std::log(x);
    const double xm1 = x - 1.0;
    const double tmp = xm1 + kLanczosG + 0.5;
    return kLogSqrtTwoPi + (xm1 + 0.5) * std::log(tmp) - tmp + std::log(lanczos_sum(xm1));
}

double beta_fn(double m, double n) {
    require_positive_finite(m, "beta_fn");
    require_positive_finite(n, "beta_fn");
    return std::exp(log_gamma(m) + log_gamma(n) - log_gamma(m + n));
}

namespace {

// erf for |z| <= kErfSwitch: confluent series
//   erf(z) = (2/sqrt(pi)) z e^{-z^2} sum_k (2 z^2)^k / (1*3*...*(2k+1)),
// all terms positive, no cancellation.
double erf_series(double z) {
    const double s = 2.0 * z * z;
    double term = 1.0, sum = 1.0;
    for (int k = 0; k < 200; ++k) {
        term *= s / (2.0 * k + 3.0);
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return 2.0 * kInvSqrtPi * z * std::exp(-z * z) * sum;
}

// erfc for z > kErfSwitch: Legendre continued fraction
//   erfc(z) = e^{-z^2}/sqrt(pi) * 1/(z+ (1/2)/(z+ 1/(z+ (3/2)/(z+ ...)))),
// evaluated by the modified Lentz algorithm.
double erfc_fraction(double z) {
    const double tiny = 1e-300;
    double f = tiny, c = f, d = 0.0;
    for (int n = 1; n <= 300; ++n) {
        const double an = (n == 1) ? 1.0 : 0.5 * (n - 1);
        d = z + an * d;
        if (d == 0.0) d = tiny;
        c = z + an / c;
        if (c == 0.0) c = tiny;
        d = 1.0 / d;
        const double delta = c * d;
        f *= delta;
        if (std::fabs(delta - 1.0) < 1e-17) break;
    }
    return kInvSqrtPi * std::exp(-z * z) * f;
}

} // namespace

double erf(double z) {
    if (!std::isfinite(z)) throw DomainError("erf: argument must be finite");
    if (z < 0.0) return -erf(-z);
    if (z <= kErfSwitch) return erf_series(z);
    return 1.0 - erfc_fraction(z); // erfc < 2.2e-5 here: no cancellation
}

double erfc(double z) {
    if (!std::isfinite(z)) throw DomainError("erfc: argument must be finite");
    if (z < 0.0) return 2.0 - erfc(-z); // erfc(z) in (1,2): still cancellation-free
    if (z <= kErfSwitch) return 1.0 - erf_series(z);
    return erfc_fraction(z);
}

EvalResult mittag_leffler(double alpha, double beta, double z) {
    require_positive_finite(alpha, "mittag_leffler (alpha)");
    require_positive_finite(beta, "mittag_leffler (beta)");
    if (!std::isfinite(z) || std::fabs(z) > kMittagLefflerZMax) {
        char buf[128];
        std::snprintf(buf, sizeof buf,
                      "mittag_leffler: |z| must be finite and <= %g, got %.17g",
                      kMittagLefflerZMax, z);
        throw DomainError(buf);
    }

    EvalResult r;
    if (z == 0.0) {
        r.value = std::exp(-log_gamma(beta));
        r.terms_used = 1;
        r.truncation_bound = 0.0;
        return r;
    }

    const double log_abs_z = std::log(std::fabs(z));
    const bool negative = z < 0.0;

    // Neumaier-compensated forward summation of t_k = z^k / Gamma(alpha k + beta).
    double sum = 0.0, comp = 0.0, sum_abs = 0.0;
    double prev_abs = 0.0, last_abs = 0.0;
    int small_streak = 0;
    int k = 0;
    const int k_max = 4000;
    for (; k < k_max; ++k) {
        const double log_term = k * log_abs_z - log_gamma(alpha * k + beta);
        if (log_term > 700.0) {
            throw DomainError("mittag_leffler: series term overflows double range "
                              "(value not representable)");
        }
        const double abs_term = std::exp(log_term);
        const double term = (negative && (k & 1)) ? -abs_term : abs_term;

        const double t = sum + term;
        if (std::fabs(sum) >= std::fabs(term))
            comp += (sum - t) + term;
        else
            comp += (term - t) + sum;
        sum = t;
        sum_abs += abs_term;

        prev_abs = last_abs;
        last_abs = abs_term;
        const double scale = std::fabs(sum + comp);
        if (abs_term <= 1e-17 * (scale > 0.0 ? scale : 1.0)) {
            if (++small_streak >= 3) { ++k; break; }
        } else {
            small_streak = 0;
        }
    }

    const double value = sum + comp;
    if (!std::isfinite(value)) {
        throw DomainError("mittag_leffler: sum overflowed double range");
    }
    if (small_streak < 3) {
        throw DomainError("mittag_leffler: series did not converge within term budget");
    }

    // Rounding-noise guard: eps * (terms) * sum|t_k| estimates accumulated
    // roundoff; refuse if it could exceed 1e-12 relative to the result.
    const double eps = std::numeric_limits<double>::epsilon();
    if (eps * static_cast<double>(k) * sum_abs > 1e-12 * std::fmax(1.0, std::fabs(value))) {
        throw DomainError("mittag_leffler: catastrophic cancellation, relative accuracy "
                          "cannot be guaranteed");
    }

    // Tail bound from the last computed term and the observed decay ratio.
    double ratio = (prev_abs > 0.0) ? last_abs / prev_abs : 0.0;
    if (ratio > 0.9) ratio = 0.9;
    r.truncation_bound = last_abs * ratio / (1.0 - ratio);
    r.value = value;
    r.terms_used = k;
    if (r.truncation_bound > 1e-14 * std::fmax(1.0, std::fabs(value))) {
        throw DomainError("mittag_leffler: truncation bound exceeds accuracy contract");
    }
    return r;
}

double ml_kernel_primitive(double alpha, double lambda, double delta) {
    if (!(alpha > 0.0) || alpha > 1.0 || !std::isfinite(alpha))
        throw DomainError("ml_kernel_primitive: alpha must lie in (0, 1]");
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw DomainError("ml_kernel_primitive: lambda must be >= 0 and finite");
    if (!(delta >= 0.0) || !std::isfinite(delta))
        throw DomainError("ml_kernel_primitive: delta must be >= 0 and finite");
    if (delta == 0.0) return 0.0;
    const double da = std::pow(delta, alpha);
    return da * mittag_leffler(alpha, alpha + 1.0, lambda * da).value;
}

MLSeries::MLSeries(double alpha, double beta, double y_max) {
    require_positive_finite(alpha, "MLSeries (alpha)");
    require_positive_finite(beta, "MLSeries (beta)");
    if (!(y_max >= 0.0) || !std::isfinite(y_max))
        throw DomainError("MLSeries: y_max must be >= 0 and finite");

    // Truncation order: first K past the term peak with
    // y_max^K / Gamma(alpha K + beta) < 1e-20, so the neglected tail is far
    // below double rounding for every y in [0, y_max].
    const double log_y = (y_max > 0.0) ? std::log(y_max) : -1e30;
    int K = 0;
    for (;; ++K) {
        if (K > 700) {
            throw DomainError("MLSeries: required order exceeds 700 terms; "
                              "E_{alpha,beta}(y_max) is outside double range");
        }
        const double log_term = K * log_y - log_gamma(alpha * K + beta);
        if (log_term > 700.0) {
            throw DomainError("MLSeries: series terms overflow double range for this y_max");
        }
        const double log_next = (K + 1) * log_y - log_gamma(alpha * (K + 1) + beta);
        if (log_term < -46.0 && log_next < log_term) break; // past peak, tail < 1e-20
    }
    coeff_.resize(static_cast<size_t>(K) + 1);
    for (int j = 0; j <= K; ++j) {
        coeff_[static_cast<size_t>(K - j)] = std::exp(-log_gamma(alpha * j + beta));
    }
}

double MLSeries::eval(double y) const {
    double s = 0.0;
    for (double c : coeff_) s = s * y + c;
    return s;
}

} // namespace hml
