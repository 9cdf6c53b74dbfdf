#include "hml/grid.hpp"
#include "hml/errors.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace hml {

namespace {

void require_same_grid(const GridFunction& a, const GridFunction& b, const char* op) {
    if (!a.grid || !b.grid || a.grid != b.grid) {
        throw ParameterError(std::string(op) + ": operands must live on the same grid instance");
    }
}

void require_valid_weight(double gamma, const char* op) {
    if (!(gamma >= 0.0) || !(gamma < 1.0)) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "%s: weight exponent must lie in [0, 1), got %.17g", op, gamma);
        throw ParameterError(buf);
    }
}

} // namespace

GridPtr make_grid(int n, double q) {
    if (n < 16 || n % 2 != 0) {
        char buf[80];
        std::snprintf(buf, sizeof buf, "make_grid: n must be even and >= 16, got %d", n);
        throw ParameterError(buf);
    }
    if (!(q >= 1.0) || !(q <= 10.0)) {
        char buf[80];
        std::snprintf(buf, sizeof buf, "make_grid: q must lie in [1, 10], got %.17g", q);
        throw ParameterError(buf);
    }

    auto g = std::make_shared<LogGrid>();
    g->n = n;
    g->q = q;
    g->u.resize(static_cast<size_t>(n) + 1);
    g->t.resize(static_cast<size_t>(n) + 1);
    const int m = n / 2;
    for (int j = 0; j <= m; ++j) {
        g->u[static_cast<size_t>(j)] = 0.5 * std::pow(static_cast<double>(j) / m, q);
    }
    for (int j = m + 1; j <= n; ++j) {
        g->u[static_cast<size_t>(j)] = 1.0 - g->u[static_cast<size_t>(n - j)];
    }
    if (g->u[1] <= 0.0) {
        throw ParameterError("make_grid: first cell underflowed to zero width (q too large for n)");
    }
    for (int j = 0; j < n; ++j) {
        if (!(g->u[static_cast<size_t>(j)] < g->u[static_cast<size_t>(j) + 1])) {
            throw ParameterError("make_grid: nodes are not strictly increasing");
        }
    }
    for (int j = 0; j <= n; ++j) {
        g->t[static_cast<size_t>(j)] = std::exp(g->u[static_cast<size_t>(j)]);
    }
    return g;
}

GridFunction sample_regular(const GridPtr& grid, double gamma,
                            const std::function<double(double)>& f_of_t) {
    if (!grid) throw ParameterError("sample_regular: null grid");
    require_valid_weight(gamma, "sample_regular");
    GridFunction f;
    f.grid = grid;
    f.gamma = gamma;
    f.values.resize(grid->u.size());
    for (size_t j = 0; j < grid->u.size(); ++j) f.values[j] = f_of_t(grid->t[j]);
    return f;
}

GridFunction sample_singular(const GridPtr& grid, double gamma, double weighted_v0,
                             const std::function<double(double)>& f_of_t) {
    if (!grid) throw ParameterError("sample_singular: null grid");
    require_valid_weight(gamma, "sample_singular");
    if (!std::isfinite(weighted_v0))
        throw ParameterError("sample_singular: weighted_v0 must be finite");
    GridFunction f;
    f.grid = grid;
    f.gamma = gamma;
    f.singular = true;
    f.weighted_v0 = weighted_v0;
    f.values.resize(grid->u.size());
    f.values[0] = (weighted_v0 == 0.0)
                      ? 0.0
                      : std::copysign(std::numeric_limits<double>::infinity(), weighted_v0);
    for (size_t j = 1; j < grid->u.size(); ++j) f.values[j] = f_of_t(grid->t[j]);
    return f;
}

double weighted_limit_at(const GridFunction& f, double gamma_prime) {
    if (!f.grid) throw ParameterError("weighted_limit_at: empty grid function");
    const double own = f.singular ? f.gamma : 0.0;
    const double head = f.singular ? f.weighted_v0 : f.values[0];
    if (gamma_prime > own) return 0.0;
    if (gamma_prime == own) return head;
    if (head == 0.0) return 0.0;
    return std::copysign(std::numeric_limits<double>::infinity(), head);
}

double weighted_norm_at(const GridFunction& f, double gamma_prime) {
    if (!f.grid) throw ParameterError("weighted_norm_at: empty grid function");
    require_valid_weight(gamma_prime, "weighted_norm_at");
    double norm = std::fabs(weighted_limit_at(f, gamma_prime));
    for (size_t j = 1; j < f.values.size(); ++j) {
        const double w = std::pow(f.grid->u[j], gamma_prime);
        norm = std::fmax(norm, w * std::fabs(f.values[j]));
    }
    return norm;
}

double weighted_norm(const GridFunction& f) { return weighted_norm_at(f, f.gamma); }

namespace {

// lim_{u->0+} u^{gamma_prime} * c u^{-e} for a single head term.
double head_limit(double gamma_prime, double e, double c) {
    if (gamma_prime > e || c == 0.0) return 0.0;
    if (gamma_prime == e) return c;
    return std::copysign(std::numeric_limits<double>::infinity(), c);
}

} // namespace

double weighted_distance(const GridFunction& a, const GridFunction& b, double gamma_prime) {
    require_same_grid(a, b, "weighted_distance");
    require_valid_weight(gamma_prime, "weighted_distance");

    // Head terms must be combined before the limit: two functions sharing the
    // same blow-up coefficient have a difference that is *less* singular.
    const double ea = a.singular ? a.gamma : 0.0, ca = a.singular ? a.weighted_v0 : a.values[0];
    const double eb = b.singular ? b.gamma : 0.0, cb = b.singular ? b.weighted_v0 : b.values[0];
    double limit;
    if (ea == eb) {
        limit = head_limit(gamma_prime, ea, ca - cb);
    } else {
        const double l1 = head_limit(gamma_prime, ea, ca);
        const double l2 = head_limit(gamma_prime, eb, cb);
        limit = l1 - l2;
        if (std::isnan(limit)) limit = (ea > eb) ? l1 : -l2; // stronger exponent dominates
    }

    double norm = std::fabs(limit);
    for (size_t j = 1; j < a.values.size(); ++j) {
        const double w = std::pow(a.grid->u[j], gamma_prime);
        norm = std::fmax(norm, w * std::fabs(a.values[j] - b.values[j]));
    }
    return norm;
}

} // namespace hml
