#include "hml/hadamard.hpp"
#include "hml/errors.hpp"
#include "hml/special_functions.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <thread>

namespace hml {

namespace {

int clamp_threads(int threads) {
    if (threads == 1) return 1;
    if (threads < 1) {
        const unsigned hw = std::thread::hardware_concurrency();
        threads = (hw == 0) ? 1 : static_cast<int>(hw);
    }
    return std::min(threads, 8);
}

/// Run fn(row) for rows first..last (inclusive) across `threads` workers.
/// Row i costs O(i), so split boundaries follow sqrt(work) to balance load;
/// every row is computed wholly inside one worker, which keeps results
/// bit-identical for any thread count.
template <typename Fn>
void parallel_rows(int first, int last, int threads, const Fn& fn) {
    const int n_rows = last - first + 1;
    threads = std::min(clamp_threads(threads), n_rows);
    if (threads <= 1) {
        for (int i = first; i <= last; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    int begin = first;
    for (int k = 1; k <= threads; ++k) {
        const double frac = std::sqrt(static_cast<double>(k) / threads);
        int end = (k == threads) ? last : first - 1 + static_cast<int>(frac * n_rows);
        if (end < begin) end = begin;
        if (end > last) end = last;
        pool.emplace_back([begin, end, &fn] {
            for (int i = begin; i <= end; ++i) fn(i);
        });
        begin = end + 1;
        if (begin > last) break;
    }
    for (auto& th : pool) th.join();
}

void validate_common(const GridPtr& grid, double singular_exponent) {
    if (!grid) throw ParameterError("assemble weights: null grid");
    if (!(singular_exponent >= 0.0) || !(singular_exponent < 1.0)) {
        char buf[96];
        std::snprintf(buf, sizeof buf,
                      "assemble weights: singular exponent must lie in [0, 1), got %.17g",
                      singular_exponent);
        throw ParameterError(buf);
    }
}

/// Binomial coefficients of (1 - y)^{mu-1} = sum_k c_k y^k, shared by the
/// cell-moment series and the first-cell head integral. 96 terms cover
/// y <= 1/2 to full double precision with room to spare.
struct KernelSeries {
    double mu = 0.0;
    std::array<double, 96> c{};

    explicit KernelSeries(double mu_) : mu(mu_) {
        c[0] = 1.0;
        for (std::size_t k = 1; k < c.size(); ++k)
            c[k] = c[k - 1] * (static_cast<double>(k) - mu) / static_cast<double>(k);
    }

    /// Cell moments of the kernel over [0, h] at distance A from the kernel
    /// endpoint (A = U - u_left, r = h/A <= 1/2):
    ///   M0 = integral (A - x)^{mu-1} dx        = A^mu  * sum c_k r^{k+1}/(k+1)
    ///   M1 = integral (A - x)^{mu-1} x dx      = A^{mu+1} sum c_k r^{k+2}/(k+2)
    /// Direct evaluation of these moments subtracts nearly equal powers and
    /// loses up to log2(A/h) bits, which the series form avoids entirely.
    void moments(double A, double A_mu, double r, double& M0, double& M1) const {
        double s0 = 0.0, s1 = 0.0, rk = 1.0;
        for (std::size_t k = 0; k < c.size(); ++k) {
            const double t0 = c[k] * rk / (static_cast<double>(k) + 1.0);
            const double t1 = c[k] * rk / (static_cast<double>(k) + 2.0);
            s0 += t0;
            s1 += t1;
            if (std::fabs(t0) < 1e-17 * std::fabs(s0)) break;
            rk *= r;
        }
        M0 = A_mu * r * s0;
        M1 = A_mu * A * (r * r) * s1;
    }

    /// J(U, w) = integral_0^w (U - u)^{mu-1} u^{-s} du, exact up to series
    /// truncation. For w == U this is the Beta closed form; for w < U the
    /// series converges geometrically in r = w/U (the graded mesh keeps
    /// r <= 1/2 whenever w < U).
    double head_integral(double U, double w, double s) const {
        if (w == U) return std::pow(U, mu - s) * beta_fn(mu, 1.0 - s);
        const double r = w / U;
        double sum = 0.0, rk = 1.0;
        for (std::size_t k = 0; k < c.size(); ++k) {
            const double term = c[k] * rk / (static_cast<double>(k) + 1.0 - s);
            sum += term;
            if (std::fabs(term) < 1e-17 * std::fabs(sum)) break;
            rk *= r;
        }
        return std::pow(U, mu - 1.0) * std::pow(w, 1.0 - s) * sum;
    }
};

/// First-cell weights of one quadrature row.
struct RowFirstCell {
    double reg0 = 0.0;    // multiplies phi(0) when phi is bounded
    double x1_reg = 0.0;  // multiplies phi(u_1) when phi is bounded
    double sing = 0.0;    // multiplies the weighted head value of a u^{-s} head
    double x1_sing = 0.0; // multiplies phi(u_1) in the singular variant
};

/// Moments of one cell [0, h] of the kernel (A - x)^{mu-1}: series form for
/// h << A (cancellation-free), direct primitives otherwise (safe subtraction
/// because A_r <= A/2 there).
inline void cell_moments(const KernelSeries& ks, double mu, double A, double D, double A_r,
                         double D_r, double h, double& M0, double& M1) {
    const double r = h / A;
    if (r <= 0.5) {
        ks.moments(A, D, r, M0, M1);
    } else {
        M0 = (D - D_r) / mu;
        M1 = A * M0 - (A * D - A_r * D_r) / (mu + 1.0);
    }
}

/// Assemble row i of the raw power-kernel weights (kernel (U - u)^{mu-1},
/// U = u_i) into w[0..i-1] and return the first-cell weights. Shared by
/// assemble_power_weights and full_interval_integral so that the full
/// integral is bit-identical to applying row n.
RowFirstCell power_row(const std::vector<double>& u, int i, const KernelSeries& ks, double s,
                       double* w) {
    const double mu = ks.mu;
    const double U = u[static_cast<size_t>(i)];
    const double u1 = u[1];
    RowFirstCell fc;

    double A_l = U, D_l = std::pow(U, mu);
    {
        const double A_r = U - u1;
        const double D_r = std::pow(A_r, mu);
        double M0, M1;
        cell_moments(ks, mu, A_l, D_l, A_r, D_r, u1, M0, M1);
        const double w1 = M1 / u1;
        fc.reg0 = M0 - w1;
        fc.x1_reg = w1;
        const double J = ks.head_integral(U, u1, s);
        fc.sing = J - std::pow(u1, -s) * w1;
        fc.x1_sing = w1;
        A_l = A_r;
        D_l = D_r;
    }
    for (int j = 1; j < i; ++j) {
        const double A_r = U - u[static_cast<size_t>(j) + 1];
        const double D_r = std::pow(A_r, mu);
        const double h = u[static_cast<size_t>(j) + 1] - u[static_cast<size_t>(j)];
        double M0, M1;
        cell_moments(ks, mu, A_l, D_l, A_r, D_r, h, M0, M1);
        const double t1 = M1 / h;
        w[j - 1] += M0 - t1;
        w[j] += t1;
        A_l = A_r;
        D_l = D_r;
    }
    return fc;
}

void scale_head(GridFunction& out, const VolterraWeights& w, const GridFunction& phi,
                double head_factor) {
    // Kernel calculus at the left endpoint: a u^{-s} head with coefficient
    // c maps to c * head_factor * u^{exponent-s} (+ lower-order terms that
    // vanish). Decide the output head from the exponent difference.
    const double s = phi.singular ? phi.gamma : 0.0;
    const double c = phi.singular ? phi.weighted_v0 : 0.0;
    const double e_out = s - w.exponent;
    if (phi.singular && e_out > 0.0) {
        out.singular = true;
        out.gamma = e_out;
        out.weighted_v0 = c * head_factor;
        out.values[0] = (out.weighted_v0 == 0.0)
                            ? 0.0
                            : std::copysign(std::numeric_limits<double>::infinity(),
                                            out.weighted_v0);
    } else if (phi.singular && e_out == 0.0) {
        out.singular = false;
        out.gamma = 0.0;
        out.values[0] = c * head_factor;
    } else {
        out.singular = false;
        out.gamma = 0.0;
        out.values[0] = 0.0;
    }
}

} // namespace

double VolterraWeights::apply_row(int i, const GridFunction& phi) const {
    if (!phi.grid || phi.grid != grid)
        throw ParameterError("VolterraWeights: phi must live on the grid the weights were built for");
    if (i < 1 || i > grid->n) throw ParameterError("VolterraWeights: row index out of range");
    if (phi.singular && phi.gamma != singular_exponent) {
        char buf[120];
        std::snprintf(buf, sizeof buf,
                      "VolterraWeights: weights were assembled for head exponent %.17g "
                      "but phi has %.17g",
                      singular_exponent, phi.gamma);
        throw ParameterError(buf);
    }
    const double* w = core.data() + row_offset[static_cast<size_t>(i)];
    double acc = 0.0;
    for (int j = 1; j <= i; ++j) acc += w[j - 1] * phi.values[static_cast<size_t>(j)];
    if (phi.singular) {
        acc += w_sing[static_cast<size_t>(i)] * phi.weighted_v0 +
               w1x_sing[static_cast<size_t>(i)] * phi.values[1];
    } else {
        acc += w_reg0[static_cast<size_t>(i)] * phi.values[0] +
               w1x_reg[static_cast<size_t>(i)] * phi.values[1];
    }
    return acc;
}

GridFunction VolterraWeights::apply(const GridFunction& phi, int threads) const {
    GridFunction out;
    out.grid = grid;
    out.values.assign(grid->u.size(), 0.0);

    // Head factor: B(mu, 1-s) for the power kernel; the ML kernel picks up
    // Gamma(1-s)/Gamma(alpha+1-s) = B(alpha,1-s)/Gamma(alpha) from the
    // leading series term.
    const double s = phi.singular ? phi.gamma : 0.0;
    const double head_factor =
        ml_family ? gamma_fn(1.0 - s) / gamma_fn(exponent + 1.0 - s)
                  : beta_fn(exponent, 1.0 - s);
    scale_head(out, *this, phi, head_factor);

    parallel_rows(1, grid->n, threads,
                  [&](int i) { out.values[static_cast<size_t>(i)] = apply_row(i, phi); });
    return out;
}

VolterraWeights assemble_power_weights(const GridPtr& grid, double mu,
                                       double singular_exponent, int threads) {
    validate_common(grid, singular_exponent);
    if (!(mu > 0.0) || !std::isfinite(mu)) {
        char buf[80];
        std::snprintf(buf, sizeof buf, "assemble_power_weights: mu must be positive, got %.17g", mu);
        throw ParameterError(buf);
    }

    const int n = grid->n;
    const std::vector<double>& u = grid->u;
    VolterraWeights W;
    W.grid = grid;
    W.ml_family = false;
    W.exponent = mu;
    W.singular_exponent = singular_exponent;
    {
        std::size_t off = 0;
        W.row_offset.resize(static_cast<size_t>(n) + 1, 0);
        for (int i = 1; i <= n; ++i) {
            W.row_offset[static_cast<size_t>(i)] = off;
            off += static_cast<size_t>(i);
        }
        W.core.assign(off, 0.0);
    }
    W.w_reg0.assign(static_cast<size_t>(n) + 1, 0.0);
    W.w1x_reg.assign(static_cast<size_t>(n) + 1, 0.0);
    W.w_sing.assign(static_cast<size_t>(n) + 1, 0.0);
    W.w1x_sing.assign(static_cast<size_t>(n) + 1, 0.0);

    const double s = singular_exponent;
    const KernelSeries ks(mu);
    parallel_rows(1, n, threads, [&](int i) {
        const RowFirstCell fc =
            power_row(u, i, ks, s, W.core.data() + W.row_offset[static_cast<size_t>(i)]);
        W.w_reg0[static_cast<size_t>(i)] = fc.reg0;
        W.w1x_reg[static_cast<size_t>(i)] = fc.x1_reg;
        W.w_sing[static_cast<size_t>(i)] = fc.sing;
        W.w1x_sing[static_cast<size_t>(i)] = fc.x1_sing;
    });
    return W;
}

VolterraWeights assemble_ml_weights(const GridPtr& grid, double alpha, double lambda,
                                    double singular_exponent, int threads) {
    validate_common(grid, singular_exponent);
    if (!(alpha > 0.0) || alpha > 1.0) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "assemble_ml_weights: alpha must lie in (0, 1], got %.17g",
                      alpha);
        throw ParameterError(buf);
    }
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw ParameterError("assemble_ml_weights: lambda must be >= 0 and finite");
    }

    // Reciprocal-Gamma series for the kernel value and its primitive.
    // Both throw if E_{alpha,*}(lambda) is not double-representable.
    const MLSeries kernel_series(alpha, alpha, lambda);
    const MLSeries primitive_series(alpha, alpha + 1.0, lambda);

    const int n = grid->n;
    const std::vector<double>& u = grid->u;
    VolterraWeights W;
    W.grid = grid;
    W.ml_family = true;
    W.exponent = alpha;
    W.lambda = lambda;
    W.singular_exponent = singular_exponent;
    {
        std::size_t off = 0;
        W.row_offset.resize(static_cast<size_t>(n) + 1, 0);
        for (int i = 1; i <= n; ++i) {
            W.row_offset[static_cast<size_t>(i)] = off;
            off += static_cast<size_t>(i);
        }
        W.core.assign(off, 0.0);
    }
    W.w_reg0.assign(static_cast<size_t>(n) + 1, 0.0);
    W.w1x_reg.assign(static_cast<size_t>(n) + 1, 0.0);
    W.w_sing.assign(static_cast<size_t>(n) + 1, 0.0);
    W.w1x_sing.assign(static_cast<size_t>(n) + 1, 0.0);

    const double s = singular_exponent;
    const double u1 = u[1];

    auto P = [&](double d) { // exact kernel primitive
        if (d <= 0.0) return 0.0;
        const double da = std::pow(d, alpha);
        return da * primitive_series.eval(lambda * da);
    };
    auto K = [&](double d) { // kernel value
        return std::pow(d, alpha - 1.0) * kernel_series.eval(lambda * std::pow(d, alpha));
    };

    // Row 1 is fully exact: with y = lambda u1^alpha,
    //   integral_0^{u1} K(u1-u) u^{-p} du
    //     = Gamma(1-p) u1^{alpha-p} E_{alpha, alpha+1-p}(y)   for p < 1,
    // applied with p = 0 (constant part), p = -1 (linear part, Gamma(2) = 1)
    // and p = s (singular head).
    {
        const double y1 = lambda * std::pow(u1, alpha);
        const double P0 = P(u1);
        const double P1 = std::pow(u1, alpha + 1.0) * mittag_leffler(alpha, alpha + 2.0, y1).value;
        const double w1 = P1 / u1;
        W.w_reg0[1] = P0 - w1;
        W.w1x_reg[1] = w1;
        const double J = gamma_fn(1.0 - s) * std::pow(u1, alpha - s) *
                         mittag_leffler(alpha, alpha + 1.0 - s, y1).value;
        W.w_sing[1] = J - std::pow(u1, -s) * w1;
        W.w1x_sing[1] = w1;
    }

    parallel_rows(2, n, threads, [&](int i) {
        const double U = u[static_cast<size_t>(i)];
        double* w = W.core.data() + W.row_offset[static_cast<size_t>(i)];

        double P_l = P(U); // primitive at the left edge of the current cell
        // first cell j = 0:
        {
            const double P_r = P(U - u1);
            const double C0 = P_l - P_r;
            W.w_reg0[static_cast<size_t>(i)] = 0.5 * C0;
            W.w1x_reg[static_cast<size_t>(i)] = 0.5 * C0;
            // head x kernel frozen at the cell midpoint
            const double Kmid = K(U - 0.5 * u1);
            const double u1_1ms = std::pow(u1, 1.0 - s);
            W.w_sing[static_cast<size_t>(i)] = Kmid * u1_1ms * (1.0 / (1.0 - s) - 0.5);
            W.w1x_sing[static_cast<size_t>(i)] = Kmid * 0.5 * u1;
            P_l = P_r;
        }
        for (int j = 1; j < i; ++j) {
            const double P_r = P(U - u[static_cast<size_t>(j) + 1]);
            const double C = P_l - P_r;
            w[j - 1] += 0.5 * C;
            w[j] += 0.5 * C;
            P_l = P_r;
        }
    });
    return W;
}

GridFunction hadamard_integral(double mu, const GridFunction& phi, int threads) {
    if (!phi.grid) throw ParameterError("hadamard_integral: empty grid function");
    const double s = phi.singular ? phi.gamma : 0.0;
    const VolterraWeights W = assemble_power_weights(phi.grid, mu, s, threads);
    GridFunction out = W.apply(phi, threads);
    const double inv_gamma = std::exp(-log_gamma(mu));
    for (double& v : out.values) v *= inv_gamma;
    out.weighted_v0 *= inv_gamma;
    return out;
}

double full_interval_integral(double mu, const GridFunction& phi) {
    if (!phi.grid) throw ParameterError("full_interval_integral: empty grid function");
    if (!(mu > 0.0) || !std::isfinite(mu))
        throw ParameterError("full_interval_integral: mu must be positive");
    const double s = phi.singular ? phi.gamma : 0.0;

    // Row n of the raw power weights *is* this integral (u_n = 1).
    // Assembling just that row keeps the call O(n), and reusing power_row
    // plus the apply_row accumulation order makes the result bit-identical
    // to assemble_power_weights(...).apply_row(n, phi).
    const int n = phi.grid->n;
    std::vector<double> row(static_cast<size_t>(n), 0.0);
    const KernelSeries ks(mu);
    const RowFirstCell fc = power_row(phi.grid->u, n, ks, s, row.data());
    double acc = 0.0;
    for (int j = 1; j <= n; ++j) acc += row[static_cast<size_t>(j) - 1] * phi.values[static_cast<size_t>(j)];
    if (phi.singular)
        acc += fc.sing * phi.weighted_v0 + fc.x1_sing * phi.values[1];
    else
        acc += fc.reg0 * phi.values[0] + fc.x1_reg * phi.values[1];
    return acc;
}

GridFunction resolvent_apply(double alpha, double lambda, const GridFunction& phi, int threads) {
    if (!phi.grid) throw ParameterError("resolvent_apply: empty grid function");
    const double s = phi.singular ? phi.gamma : 0.0;
    const VolterraWeights W = assemble_ml_weights(phi.grid, alpha, lambda, s, threads);
    return W.apply(phi, threads);
}

GridFunction log_derivative(const GridFunction& f) {
    if (!f.grid) throw ParameterError("log_derivative: empty grid function");
    const GridPtr& g = f.grid;
    const int n = g->n;
    const std::vector<double>& u = g->u;
    GridFunction out;
    out.grid = g;
    out.gamma = 0.0;
    out.values.assign(static_cast<size_t>(n) + 1, 0.0);

    auto one_sided = [&](int a, int b, int c, double at) {
        // derivative at `at` from the quadratic through nodes a < b < c
        const double ua = u[static_cast<size_t>(a)], ub = u[static_cast<size_t>(b)],
                     uc = u[static_cast<size_t>(c)];
        const double fa = f.values[static_cast<size_t>(a)], fb = f.values[static_cast<size_t>(b)],
                     fc = f.values[static_cast<size_t>(c)];
        const double wa = (2.0 * at - ub - uc) / ((ua - ub) * (ua - uc));
        const double wb = (2.0 * at - ua - uc) / ((ub - ua) * (ub - uc));
        const double wc = (2.0 * at - ua - ub) / ((uc - ua) * (uc - ub));
        return wa * fa + wb * fb + wc * fc;
    };

    const int first_centered = f.singular ? 2 : 1;
    for (int j = first_centered; j <= n - 1; ++j) {
        const double hl = u[static_cast<size_t>(j)] - u[static_cast<size_t>(j) - 1];
        const double hr = u[static_cast<size_t>(j) + 1] - u[static_cast<size_t>(j)];
        const double fm = f.values[static_cast<size_t>(j) - 1];
        const double f0 = f.values[static_cast<size_t>(j)];
        const double fp = f.values[static_cast<size_t>(j) + 1];
        out.values[static_cast<size_t>(j)] =
            -hr / (hl * (hl + hr)) * fm + (hr - hl) / (hl * hr) * f0 +
            hl / (hr * (hl + hr)) * fp;
    }
    if (f.singular) {
        out.values[0] = one_sided(1, 2, 3, u[0]);
        out.values[1] = one_sided(1, 2, 3, u[1]);
    } else {
        out.values[0] = one_sided(0, 1, 2, u[0]);
    }
    out.values[static_cast<size_t>(n)] = one_sided(n - 2, n - 1, n, u[static_cast<size_t>(n)]);
    return out;
}

GridFunction hadamard_derivative(double alpha, const GridFunction& phi, int threads) {
    if (!phi.grid) throw ParameterError("hadamard_derivative: empty grid function");
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw ParameterError("hadamard_derivative: alpha must lie in (0, 1)");
    const GridFunction psi = hadamard_integral(1.0 - alpha, phi, threads);
    return log_derivative(psi);
}

} // namespace hml
