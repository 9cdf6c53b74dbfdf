// Acceptance gate: eight end-to-end behavioral criteria for the solver
// artifact, printed one PASS/FAIL line each. The binary exits nonzero when
// any criterion fails; the notes under a failing line say what was measured.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "hml/errors.hpp"
#include "hml/expr.hpp"
#include "hml/grid.hpp"
#include "hml/hadamard.hpp"
#include "hml/langevin.hpp"
#include "hml/problem_io.hpp"
#include "hml/solvability.hpp"
#include "hml/special_functions.hpp"
#include "support/adaptive_simpson.hpp"

namespace {

using hml::GridFunction;
using hml::GridPtr;
using hml::ProblemSpec;

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;
};

void notef(Outcome& o, const char* fmt, ...) {
    char buf[512];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof(buf), fmt, args);
    va_end(args);
    o.notes.emplace_back(buf);
}

void failf(Outcome& o, const char* fmt, ...) {
    char buf[512];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof(buf), fmt, args);
    va_end(args);
    o.pass = false;
    o.notes.emplace_back(buf);
}

double urand(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// ---- shared fixtures -------------------------------------------------------

// Worked-example data: alpha = 1/2, beta = 3/4, lambda = 1, gamma = 1/4,
// c0 = 1, with the two published forcings.
ProblemSpec uniqueness_problem() {
    ProblemSpec p;
    p.alpha = 0.5;
    p.beta = 0.75;
    p.lambda = 1.0;
    p.c0 = 1.0;
    p.gamma = 0.25;
    p.f = hml::parse_expression("abs(x)/((99+t^2)*(1+abs(x)))");
    return p;
}

ProblemSpec existence_problem() {
    ProblemSpec p = uniqueness_problem();
    p.f = hml::parse_expression("sin((1/81)*abs(x))+1/(1+t)^2");
    return p;
}

GridFunction zero_function(const GridPtr& g) {
    GridFunction x;
    x.grid = g;
    x.values.assign(g->u.size(), 0.0);
    return x;
}

GridFunction regular_from_u(const GridPtr& g, const std::function<double(double)>& f_of_u) {
    GridFunction phi;
    phi.grid = g;
    phi.values.resize(g->u.size());
    for (std::size_t j = 0; j < g->u.size(); ++j) phi.values[j] = f_of_u(g->u[j]);
    return phi;
}

GridFunction power_head_from_u(const GridPtr& g, double s, double coeff) {
    GridFunction phi;
    phi.grid = g;
    phi.gamma = s;
    phi.singular = true;
    phi.weighted_v0 = coeff;
    phi.values.resize(g->u.size());
    phi.values[0] = (coeff == 0.0)
                        ? 0.0
                        : std::copysign(std::numeric_limits<double>::infinity(), coeff);
    for (std::size_t j = 1; j < g->u.size(); ++j) phi.values[j] = coeff * std::pow(g->u[j], -s);
    return phi;
}

GridFunction random_ball_element(const GridPtr& g, double gamma, double radius,
                                 std::mt19937_64& rng) {
    std::vector<double> a(4);
    double scale = 0.0;
    for (double& c : a) {
        c = 2.0 * urand(rng) - 1.0;
        scale += std::fabs(c);
    }
    const double amp = radius * (0.2 + 0.8 * urand(rng)) / scale;
    auto s = [a](double u) {
        return a[0] * std::cos(M_PI * u) + a[1] * std::cos(2.0 * M_PI * u) +
               a[2] * std::cos(3.0 * M_PI * u) + a[3] * std::cos(4.0 * M_PI * u);
    };
    return hml::sample_singular(g, gamma, amp * s(0.0), [&](double t) {
        const double u = std::log(t);
        return amp * std::pow(u, -gamma) * s(u);
    });
}

struct RunResult {
    int exit_code;
    std::string output;
};

RunResult run_shell(const std::string& command) {
    FILE* pipe = popen(command.c_str(), "r");
    if (pipe == nullptr) return {127, ""};
    std::string out;
    char buf[512];
    while (std::fgets(buf, sizeof(buf), pipe) != nullptr) out += buf;
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : 128, out};
}

double rel_err(double got, double want) {
    return std::fabs(got - want) / std::fabs(want);
}

// ---- criterion 1: published-decimal reproduction ---------------------------

Outcome criterion_repro() {
    Outcome o;
    const std::string cli = LANGEVIN_CLI_PATH;
    const RunResult strict = run_shell(cli + " repro-paper 2>/dev/null >/dev/null");
    if (strict.exit_code != 0) {
        failf(o, "repro-paper exits %d at the pinned 5e-9: three of the five published",
              strict.exit_code);
        notef(o, "decimals embed a low-precision erfc(-1) and disagree with their own");
        notef(o, "closed form by ~1e-7 relative (computed E_{1/2,1/2}(1) = 5.57316966431004,");
        notef(o, "printed 5.573170227). No correct evaluation can match them at 5e-9.");
        const RunResult loose =
            run_shell(cli + " repro-paper --tolerance 2e-7 2>/dev/null >/dev/null");
        if (loose.exit_code == 0) {
            notef(o, "All five quantities match at --tolerance 2e-7 and the two Beta");
            notef(o, "coefficients already match at 5e-9, isolating the reference misprint.");
        } else {
            notef(o, "mismatch persists at 2e-7 (exit %d): implementation defect, not a",
                  loose.exit_code);
            notef(o, "reference misprint -- investigate.");
        }
    }
    return o;
}

// ---- criterion 2: Mittag-Leffler identities --------------------------------

Outcome criterion_ml_identities() {
    Outcome o;
    std::mt19937_64 rng(424242);
    std::uniform_real_distribution<double> ua(0.2, 2.2), ub(0.3, 2.5), uz(-5.0, 5.0);
    int accepted = 0;
    double worst_rec = 0.0;
    while (accepted < 200) {
        const double a = ua(rng), b = ub(rng), z = uz(rng);
        double lhs = 0.0, rhs = 0.0;
        try {
            lhs = hml::mittag_leffler(a, b, z).value;
            rhs = 1.0 / hml::gamma_fn(b) + z * hml::mittag_leffler(a, b + a, z).value;
        } catch (const hml::DomainError&) {
            continue;  // outside the accuracy-guaranteed domain: redraw
        }
        ++accepted;
        const double rel = std::fabs(lhs - rhs) / std::fmax(1.0, std::fabs(lhs));
        worst_rec = std::fmax(worst_rec, rel);
        if (rel > 1e-10) {
            failf(o, "recurrence off by %.2e at a=%.4f b=%.4f z=%.4f", rel, a, b, z);
        }
    }

    // grid stays inside the accuracy-guaranteed domain: further left the
    // alternating series trips the cancellation guard by design
    double worst_id = 0.0;
    for (double z : {-1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0}) {
        const double got = hml::mittag_leffler(0.5, 1.0, z).value;
        const double want = std::exp(z * z) * hml::erfc(-z);
        const double rel = rel_err(got, want);
        worst_id = std::fmax(worst_id, rel);
        if (rel > 1e-10) failf(o, "erfc identity off by %.2e at z=%.2f", rel, z);
    }
    notef(o, "200 recurrence draws, worst %.2e; 7 erfc identities, worst %.2e",
          worst_rec, worst_id);
    return o;
}

// ---- criterion 3: kernel quadrature closed forms ---------------------------

std::array<double, 4> quadrature_errors(int n, double b, double ga) {
    const GridPtr g = hml::make_grid(n, 3.0);
    const hml::VolterraWeights W = hml::assemble_power_weights(g, b, ga, 4);
    const GridFunction head = power_head_from_u(g, ga, 1.0);
    const GridFunction one = regular_from_u(g, [](double) { return 1.0; });
    const double want_head = hml::beta_fn(b, 1.0 - ga);
    std::array<double, 4> e{};
    for (int i : {n / 2, n}) {
        const double U = g->u[static_cast<std::size_t>(i)];
        e[0] = std::fmax(e[0], rel_err(W.apply_row(i, head), std::pow(U, b - ga) * want_head));
        e[1] = std::fmax(e[1], rel_err(W.apply_row(i, one), std::pow(U, b) / b));
    }
    e[2] = rel_err(hml::full_interval_integral(b, head), want_head);
    e[3] = rel_err(hml::full_interval_integral(b, one), 1.0 / b);
    return e;
}

Outcome criterion_quadrature() {
    Outcome o;
    double worst_fine = 0.0;
    double min_order = 1e9;
    auto check_pair = [&](double b, double ga, const char* label) {
        const std::array<double, 4> coarse = quadrature_errors(512, b, ga);
        const std::array<double, 4> fine = quadrature_errors(4096, b, ga);
        for (std::size_t k = 0; k < 4; ++k) {
            worst_fine = std::fmax(worst_fine, fine[k]);
            if (fine[k] > 1e-6) {
                failf(o, "%s: closed form %zu off by %.2e at n=4096 (order %.2f, exponent %.2f)",
                      label, k + 1, fine[k], b, ga);
            }
            if (coarse[k] > 1e-12) {  // constants integrate exactly; no order observable
                const double order =
                    std::log(coarse[k] / std::fmax(fine[k], 1e-15)) / std::log(8.0);
                min_order = std::fmin(min_order, order);
                if (order < 1.5) {
                    failf(o, "%s: closed form %zu converges at order %.2f < 1.5", label, k + 1,
                          order);
                }
            }
        }
    };

    // the worked-example triple, then 10 random triples; identities are
    // exercised at both fractional orders of each triple. The head exponent
    // stays <= 0.30: the pinned grading q = 3 sustains second-order accuracy
    // only while q(1 - gamma) >= 2, and the 1e-6 budget at n = 4096 is
    // measured to break near gamma = 0.32.
    check_pair(0.75, 0.25, "fixed triple");
    check_pair(0.5, 0.25, "fixed triple");
    std::mt19937_64 rng(7777);
    for (int trial = 0; trial < 10; ++trial) {
        const double alpha = 0.3 + 0.7 * urand(rng);
        const double beta = 0.4 + 0.6 * urand(rng);
        const double ga = 0.05 + 0.25 * urand(rng);
        char label[64];
        std::snprintf(label, sizeof(label), "triple %d", trial);
        check_pair(beta, ga, label);
        check_pair(alpha, ga, label);
    }
    notef(o, "worst closed-form error %.2e (bound 1e-6), min order %.2f (bound 1.5)",
          worst_fine, min_order);
    return o;
}

// ---- criterion 4: operator vs nested adaptive quadrature -------------------

Outcome criterion_operator_oracle() {
    Outcome o;
    ProblemSpec p;
    p.alpha = 0.5;
    p.beta = 0.5;
    p.lambda = 0.5;
    p.c0 = 0.0;
    p.gamma = 0.25;
    p.f = hml::parse_expression("1");

    const int n = 4096;
    const GridPtr g = hml::make_grid(n, 3.0);
    const GridFunction got = hml::apply_H(p, zero_function(g), 4);

    const double gb = hml::gamma_fn(p.beta);
    auto f_of_u = [&](double u) { return p.f.eval(std::exp(u), 0.0); };
    auto inner = [&](double u) {
        const std::function<double(double)> iw = [&](double w) {
            return f_of_u(u - std::pow(w, 1.0 / p.beta)) / p.beta;
        };
        return testsupport::adaptive_simpson(iw, 0.0, std::pow(u, p.beta), 1e-10);
    };
    const std::function<double(double)> full_w = [&](double w) {
        return f_of_u(1.0 - std::pow(w, 1.0 / p.beta)) / p.beta;
    };
    const double mode = -testsupport::adaptive_simpson(full_w, 0.0, 1.0, 1e-10) / gb;
    auto h_of = [&](double u) { return std::pow(u, 1.0 - p.beta) * inner(u) / gb + mode; };
    auto kernel = [&](double d) {
        return std::pow(d, p.alpha - 1.0) *
               hml::mittag_leffler(p.alpha, p.alpha, p.lambda * std::pow(d, p.alpha)).value;
    };
    auto oracle = [&](double U) {
        const std::function<double(double)> left = [&](double v) {
            const double u = std::pow(v, 1.0 / p.beta);
            return kernel(U - u) * h_of(u) / p.beta;
        };
        const std::function<double(double)> right = [&](double w) {
            const double u = U - std::pow(w, 1.0 / p.alpha);
            const double ml = hml::mittag_leffler(p.alpha, p.alpha, p.lambda * w).value;
            return ml * std::pow(u, p.beta - 1.0) * h_of(u) / p.alpha;
        };
        return testsupport::adaptive_simpson(left, 0.0, std::pow(0.5 * U, p.beta), 1e-9) +
               testsupport::adaptive_simpson(right, 0.0, std::pow(0.5 * U, p.alpha), 1e-9);
    };

    double worst = 0.0;
    for (int j : {n / 4, 5 * n / 16, 3 * n / 8, 7 * n / 16, n / 2, 5 * n / 8, 3 * n / 4, n}) {
        const double U = g->u[static_cast<std::size_t>(j)];
        const double rel = rel_err(got.values[static_cast<std::size_t>(j)], oracle(U));
        worst = std::fmax(worst, rel);
        if (rel > 1e-4) failf(o, "probe u=%.4f off by %.2e (bound 1e-4)", U, rel);
    }
    notef(o, "8 probes, worst relative error %.2e (bound 1e-4)", worst);
    return o;
}

// ---- criterion 5: contraction behavior -------------------------------------

Outcome criterion_contraction() {
    Outcome o;
    const ProblemSpec p = uniqueness_problem();
    hml::GrowthBounds b;
    b.L = 0.01;
    const hml::SolvabilityReport cert = hml::certify(p, b);
    const double l_om2 = *cert.L_omega2;

    const hml::PicardResult r = hml::picard_solve(p, 1e-10, 60, nullptr, 4);
    if (!r.converged) failf(o, "iteration did not converge on the default grid");
    if (r.rate_estimate > 0.3057114966 + 0.05) {
        failf(o, "median late-step ratio %.6f exceeds %.6f", r.rate_estimate,
              0.3057114966 + 0.05);
    }

    hml::GrowthBounds eb;
    eb.L1 = 1.0 / 81.0;
    eb.L2 = 0.25;
    const double radius = *hml::certify(existence_problem(), eb).r_min;

    const GridPtr g = hml::make_grid(1024, 3.0);
    const hml::LangevinOperator H(p, g, 4);
    std::mt19937_64 rng(2024);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const GridFunction x = random_ball_element(g, p.gamma, radius, rng);
        const GridFunction y = random_ball_element(g, p.gamma, radius, rng);
        const double dxy = hml::weighted_distance(x, y, p.gamma);
        const double dhxy = hml::weighted_distance(H.apply(x), H.apply(y), p.gamma);
        const double factor = dhxy / dxy;
        worst = std::fmax(worst, factor);
        if (factor > l_om2 + 0.02) {
            failf(o, "pair %d contracts at %.6f > L*omega2 + 0.02 = %.6f", trial, factor,
                  l_om2 + 0.02);
        }
    }
    notef(o, "iteration rate %.4g (bound %.4g); worst pairwise factor %.4g (bound %.4g)",
          r.rate_estimate, 0.3057114966 + 0.05, worst, l_om2 + 0.02);
    return o;
}

// ---- criterion 6: ball stability -------------------------------------------

Outcome criterion_ball() {
    Outcome o;
    const ProblemSpec p = existence_problem();
    hml::GrowthBounds b;
    b.L1 = 1.0 / 81.0;
    b.L2 = 0.25;
    const hml::SolvabilityReport cert = hml::certify(p, b);
    if (cert.existence != hml::Certificate::satisfied || !cert.r_min) {
        failf(o, "existence certificate did not evaluate to satisfied");
        return o;
    }
    const double r = *cert.r_min;

    const GridPtr g = hml::make_grid(1024, 3.0);
    const hml::LangevinOperator H(p, g, 4);
    std::mt19937_64 rng(555);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const GridFunction x = random_ball_element(g, p.gamma, r, rng);
        // outputs carry the homogeneous (ln t)^{alpha-1} mode, so their norm
        // is taken under the weight 1 - alpha >= gamma that keeps it finite
        const double norm = hml::weighted_norm_at(H.apply(x), 1.0 - p.alpha);
        worst = std::fmax(worst, norm);
        if (norm > r + 1e-6) {
            failf(o, "sample %d leaves the ball: ||Hx|| = %.8f > r + 1e-6 = %.8f", trial, norm,
                  r + 1e-6);
        }
    }
    notef(o, "r = %.6f from the certificate; worst ||Hx|| = %.6f over 10 samples", r, worst);
    return o;
}

// ---- criterion 7: boundary and residual checks ------------------------------

Outcome criterion_residuals() {
    Outcome o;

    // right boundary: the bracket vanishes at t = e for arbitrary data
    const ProblemSpec p = uniqueness_problem();
    const GridPtr g = hml::make_grid(512, 3.0);
    std::mt19937_64 rng(7);
    const GridFunction x = random_ball_element(g, p.gamma, 5.0, rng);
    const hml::BracketField br = hml::bracket_field(p, x);
    const double right = std::fabs(br.g.values.back());
    if (right > 1e-10) failf(o, "bracket at the right endpoint is %.2e > 1e-10", right);

    // homogeneous case: weighted left limit and the interior ODE residual
    ProblemSpec hom = uniqueness_problem();
    hom.f = hml::parse_expression("0");
    const hml::PicardResult sol = hml::picard_solve(hom, 1e-12, 10, hml::make_grid(2048, 3.0), 4);
    const hml::ResidualReport rep = hml::residual_report(hom, sol.solution, 4);
    if (rep.left_boundary > 1e-3) {
        failf(o, "left boundary misses c0/Gamma(alpha) by %.2e > 1e-3", rep.left_boundary);
    }
    if (rep.ode_residual > 1e-2) {
        failf(o, "interior ODE residual %.2e > 1e-2", rep.ode_residual);
    }
    notef(o, "bracket(e) = %.2e; left boundary %.2e (bound 1e-3); ODE residual %.2e (bound 1e-2)",
          right, rep.left_boundary, rep.ode_residual);
    return o;
}

// ---- criterion 8: CSV determinism -------------------------------------------

Outcome criterion_determinism() {
    Outcome o;
    const char* problem = R"json({
  "alpha": 0.5, "beta": 0.75, "lambda": 1.0, "c0": 1.0, "gamma": 0.25,
  "f": "abs(x)/((99+t^2)*(1+abs(x)))",
  "grid": {"n": 512, "q": 3.0}
})json";
    const std::string path = "/tmp/hml_acceptance_problem.json";
    {
        std::ofstream out(path, std::ios::binary);
        out << problem;
    }
    const std::string cli = LANGEVIN_CLI_PATH;
    auto solve_to = [&](const std::string& out, const std::string& extra) {
        return run_shell(cli + " solve " + path + " " + extra + " --out " + out +
                         " >/dev/null 2>/dev/null");
    };
    const RunResult a = solve_to("/tmp/hml_acc_a.csv", "");
    const RunResult b = solve_to("/tmp/hml_acc_b.csv", "");
    const RunResult c = solve_to("/tmp/hml_acc_c.csv", "--threads 4");
    if (a.exit_code != 0 || b.exit_code != 0 || c.exit_code != 0) {
        failf(o, "solve exits (%d, %d, %d), expected all 0", a.exit_code, b.exit_code,
              c.exit_code);
        return o;
    }
    auto slurp = [](const char* file) {
        std::ifstream in(file, std::ios::binary);
        return std::string((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
    };
    const std::string ca = slurp("/tmp/hml_acc_a.csv");
    const std::string cb = slurp("/tmp/hml_acc_b.csv");
    const std::string cc = slurp("/tmp/hml_acc_c.csv");
    if (ca.empty() || ca != cb) failf(o, "repeat runs differ or are empty");
    if (ca != cc) failf(o, "worker counts 1 and 4 produce different bytes");
    notef(o, "3 runs, %zu bytes each, byte-identical", ca.size());
    return o;
}

}  // namespace

int main() {
    struct Entry {
        const char* name;
        double budget_seconds;  // 0 = no budget pinned
        Outcome (*fn)();
    };
    const Entry entries[] = {
        {"published-decimal reproduction via repro-paper at 5e-9", 1.0, criterion_repro},
        {"Mittag-Leffler recurrence and erfc identities at 1e-10", 1.0, criterion_ml_identities},
        {"kernel quadrature closed forms at 1e-6, order >= 1.5", 10.0, criterion_quadrature},
        {"operator matches nested adaptive quadrature at 1e-4", 30.0, criterion_operator_oracle},
        {"contraction rate and pairwise factor within bounds", 60.0, criterion_contraction},
        {"growth-bound ball is invariant under the operator", 60.0, criterion_ball},
        {"boundary values and interior ODE residual", 0.0, criterion_residuals},
        {"byte-identical CSV across runs and worker counts", 0.0, criterion_determinism},
    };

    int failures = 0;
    int index = 0;
    for (const Entry& e : entries) {
        ++index;
        const auto start = std::chrono::steady_clock::now();
        Outcome o = e.fn();
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (e.budget_seconds > 0.0 && secs > e.budget_seconds) {
            failf(o, "runtime %.2f s exceeds the %.0f s budget", secs, e.budget_seconds);
        }
        std::printf("criterion %d/8: %-55s %s  (%.2f s)\n", index, e.name,
                    o.pass ? "PASS" : "FAIL", secs);
        for (const std::string& n : o.notes) std::printf("    %s\n", n.c_str());
        if (!o.pass) ++failures;
    }
    std::printf("\nacceptance: %d/8 criteria pass\n", 8 - failures);
    return failures == 0 ? 0 : 1;
}
