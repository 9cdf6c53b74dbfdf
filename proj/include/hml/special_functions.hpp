#pragma once

#include <vector>

namespace hml {

/// Largest |z| accepted by mittag_leffler(). Beyond this the series needs
/// thousands of terms and the result usually is not representable anyway.
inline constexpr double kMittagLefflerZMax = 50.0;

/// Switch point between the erf Taylor/confluent series (|z| <= switch) and
/// the erfc continued fraction (|z| > switch). Single source of truth for
/// both erf() and erfc().
inline constexpr double kErfSwitch = 2.5;

/// Gamma function for real x > 0 (Lanczos approximation, g = 7, 9 terms).
/// Throws DomainError for non-positive or non-finite x.
double gamma_fn(double x);

/// Natural log of Gamma(x) for x > 0. Same domain rules as gamma_fn.
double log_gamma(double x);

/// Euler Beta B(m, n) = Gamma(m) Gamma(n) / Gamma(m + n) for m, n > 0,
/// evaluated through log_gamma so moderate arguments cannot overflow.
/// Symmetric in (m, n) bit-for-bit.
double beta_fn(double m, double n);

/// Error function, any finite real z.
double erf(double z);

/// Complementary error function 1 - erf(z), any finite real z. Computed
/// directly (no cancellation) for large |z|.
double erfc(double z);

/// Result of a Mittag-Leffler evaluation.
struct EvalResult {
    double value = 0.0;
    int terms_used = 0;
    /// Rigorous-in-practice bound on the neglected series tail. Always
    /// <= 1e-14 * max(1, |value|) on return; if that cannot be achieved the
    /// call throws instead of returning.
    double truncation_bound = 0.0;
};

/// Two-parameter Mittag-Leffler function E_{alpha,beta}(z) by compensated
/// Taylor summation.
///
/// Preconditions: alpha > 0, beta > 0, |z| <= kMittagLefflerZMax, all finite.
/// Throws DomainError when the value overflows double range or when rounding
/// noise in an alternating sum would exceed 1e-12 relative (never returns a
/// silently inaccurate number).
EvalResult mittag_leffler(double alpha, double beta, double z);

/// Exact primitive of the resolvent kernel:
///   integral_0^delta s^{alpha-1} E_{alpha,alpha}(lambda s^alpha) ds
///     = delta^alpha * E_{alpha,alpha+1}(lambda delta^alpha).
/// Preconditions: alpha in (0,1], lambda >= 0, delta >= 0.
double ml_kernel_primitive(double alpha, double lambda, double delta);

/// Precomputed-coefficient evaluator for E_{alpha,beta}(y) on a fixed
/// y-range [0, y_max], y >= 0. The reciprocal-Gamma coefficients are
/// computed once; eval() is then a plain Horner pass, which is what makes
/// dense quadrature-weight assembly affordable. Same series as
/// mittag_leffler, same accuracy regime (positive terms only).
class MLSeries {
public:
    MLSeries(double alpha, double beta, double y_max);

    double eval(double y) const;
    int terms() const { return static_cast<int>(coeff_.size()); }

private:
    std::vector<double> coeff_; // coeff_[k] = 1 / Gamma(alpha k + beta), high index first
};

} // namespace hml
