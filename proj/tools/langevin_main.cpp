#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "hml/errors.hpp"
#include "hml/expr.hpp"
#include "hml/grid.hpp"
#include "hml/langevin.hpp"
#include "hml/problem_io.hpp"
#include "hml/solvability.hpp"
#include "hml/special_functions.hpp"

namespace {

// Exit codes are a stable contract: 0 ok, 1 usage/parse/validation,
// 2 certificate or reproduction failure, 3 inconclusive or not evaluable,
// 4 iteration did not converge.
constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kCertificateFail = 2;
constexpr int kInconclusive = 3;
constexpr int kNoConvergence = 4;

int run_check(const std::string& path, bool as_json, bool estimate) {
    hml::ProblemInput in = hml::load_problem_file(path);
    if (estimate) {
        in.bounds = hml::estimate_bounds(in.problem.f, 100000);
    }
    const hml::SolvabilityReport r = hml::certify(in.problem, in.bounds);
    std::fputs((as_json ? hml::report_to_json(r) : hml::report_to_text(r)).c_str(), stdout);

    bool any = false;
    bool violated = false;
    bool tie = false;
    for (hml::Certificate c : {r.existence, r.uniqueness}) {
        if (c == hml::Certificate::not_evaluated) continue;
        any = true;
        violated = violated || c == hml::Certificate::violated;
        tie = tie || c == hml::Certificate::inconclusive;
    }
    if (!any) return kInconclusive;
    if (violated) return kCertificateFail;
    return tie ? kInconclusive : kOk;
}

int run_solve(const std::string& path, double tol, int max_iter, const std::string& out,
              int threads) {
    const hml::ProblemInput in = hml::load_problem_file(path);

    if (in.bounds.L) {
        const hml::SolvabilityReport r = hml::certify(in.problem, in.bounds);
        if (r.uniqueness != hml::Certificate::satisfied) {
            std::fprintf(stderr,
                         "warning: uniqueness is not certified (L*omega2 = %.10g); the iteration "
                         "may not contract\n",
                         *r.L_omega2);
        }
    } else {
        std::fprintf(stderr,
                     "warning: no Lipschitz bound supplied; uniqueness is not certified\n");
    }

    hml::GridPtr grid;  // empty selects the solver default
    if (in.grid_n) {
        grid = hml::make_grid(*in.grid_n, *in.grid_q);
    }
    const hml::PicardResult res = hml::picard_solve(in.problem, tol, max_iter, grid, threads);
    const hml::ResidualReport rr = hml::residual_report(in.problem, res.solution, threads);

    std::printf("converged     = %s\n", res.converged ? "yes" : "no");
    std::printf("iterations    = %d\n", res.iterations);
    std::printf("final step    = %.10g\n", res.history.empty() ? 0.0 : res.history.back());
    std::printf("rate          = %.10g\n", res.rate_estimate);
    std::printf("x(e)          = %.10g\n", res.solution.values.back());
    std::printf("residual ode  = %.10g\n", rr.ode_residual);
    std::printf("residual g(e) = %.10g\n", rr.right_boundary);
    std::printf("residual c0   = %.10g\n", rr.left_boundary);

    const std::string csv = hml::solution_to_csv(
        res.solution, res.converged ? std::string() : "iteration did not converge to tolerance");
    std::ofstream file(out, std::ios::binary);
    if (!file) {
        throw hml::ParameterError("cannot write CSV to " + out);
    }
    file << csv;
    std::printf("csv           = %s\n", out.c_str());

    return res.converged ? kOk : kNoConvergence;
}

int run_ml(double alpha, double beta, double z) {
    const hml::EvalResult r = hml::mittag_leffler(alpha, beta, z);
    std::printf("E_{%.10g,%.10g}(%.10g) = %.10g\n", alpha, beta, z, r.value);
    std::printf("terms used       = %d\n", static_cast<int>(r.terms_used));
    std::printf("truncation bound = %.10g\n", r.truncation_bound);
    return kOk;
}

int run_repro(double tolerance, bool as_json) {
    hml::ProblemSpec p;
    p.alpha = 0.5;
    p.beta = 0.75;
    p.lambda = 1.0;
    p.c0 = 1.0;
    p.gamma = 0.25;
    p.f = hml::parse_expression("0");

    const double ml = hml::mittag_leffler(0.5, 0.5, 1.0).value;
    const double om2 = hml::compute_omega2(p);
    // Closed form of the same number through the erfc path.
    const double closed = 1.0 / std::sqrt(M_PI) + std::exp(1.0) * hml::erfc(-1.0);
    const double consistency = std::fabs(ml - closed) / closed;

    struct Row {
        const char* name;
        double computed;
        double reference;
    };
    const Row rows[] = {
        {"E_{1/2,1/2}(1)", ml, 5.573170227},
        {"existence coefficient", om2 / ml / 81.0, 0.06772116862},
        {"L1*omega2", om2 / 81.0, 0.3774216007},
        {"uniqueness coefficient", om2 / ml / 100.0, 0.05485414658},
        {"L*omega2", om2 / 100.0, 0.3057114966},
    };

    bool all_match = true;
    if (as_json) {
        nlohmann::ordered_json j;
        j["version"] = 1;
        j["tolerance"] = tolerance;
        j["rows"] = nlohmann::ordered_json::array();
        for (const Row& row : rows) {
            const double rel = std::fabs(row.computed - row.reference) / std::fabs(row.reference);
            const bool pass = rel <= tolerance;
            all_match = all_match && pass;
            nlohmann::ordered_json rj;
            rj["name"] = row.name;
            rj["computed"] = row.computed;
            rj["reference"] = row.reference;
            rj["rel_diff"] = rel;
            rj["pass"] = pass;
            j["rows"].push_back(rj);
        }
        j["internal_consistency_rel"] = consistency;
        j["all_match"] = all_match;
        std::printf("%s\n", j.dump(2).c_str());
    } else {
        std::printf("%-24s %-22s %-14s %-10s %s\n", "quantity", "computed", "reference",
                    "rel.diff", "status");
        for (const Row& row : rows) {
            const double rel = std::fabs(row.computed - row.reference) / std::fabs(row.reference);
            const bool pass = rel <= tolerance;
            all_match = all_match && pass;
            std::printf("%-24s %-22.17g %-14.10g %-10.2e %s\n", row.name, row.computed,
                        row.reference, rel, pass ? "ok" : "MISMATCH");
        }
        std::printf("internal consistency (series vs closed erfc form): rel diff %.2e\n",
                    consistency);
        if (!all_match && consistency <= 1e-12) {
            std::printf(
                "note: the computed values agree with each other to machine precision; the\n"
                "      mismatching reference decimals embed a low-precision erfc(-1). Rerun\n"
                "      with --tolerance 2e-7 to compare at the reference's actual precision.\n");
        }
    }
    return all_match ? kOk : kCertificateFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Langevin boundary-value solver on [1, e] with two fractional derivatives of "
        "logarithmic (Hadamard) type"};
    app.require_subcommand(1);

    std::string check_path;
    bool check_json = false;
    bool check_estimate = false;
    CLI::App* check =
        app.add_subcommand("check", "evaluate the existence/uniqueness certificates");
    check->add_option("path", check_path, "problem JSON file, or - for stdin")->required();
    check->add_flag("--json", check_json, "machine-readable report");
    check->add_flag("--estimate", check_estimate,
                    "sample growth constants from f, replacing any file-supplied bounds "
                    "(advisory; the report is marked auto-estimated)");

    std::string solve_path;
    std::string solve_out = "solution.csv";
    double tol = 1e-10;
    int max_iter = 50;
    int threads = 1;
    CLI::App* solve = app.add_subcommand("solve", "run the fixed-point iteration and write a CSV");
    solve->add_option("path", solve_path, "problem JSON file, or - for stdin")->required();
    solve->add_option("--tol", tol, "stopping tolerance in the weighted norm")
        ->capture_default_str();
    solve->add_option("--max-iter", max_iter, "iteration cap")->capture_default_str();
    solve->add_option("--out", solve_out, "CSV output path")->capture_default_str();
    solve->add_option("--threads", threads, "worker threads for weight assembly")
        ->capture_default_str();

    double ml_alpha = 0.0;
    double ml_beta = 0.0;
    double ml_z = 0.0;
    CLI::App* ml = app.add_subcommand("ml", "evaluate the two-parameter Mittag-Leffler function");
    ml->add_option("alpha", ml_alpha, "first parameter")->required();
    ml->add_option("beta", ml_beta, "second parameter")->required();
    ml->add_option("z", ml_z, "argument")->required();

    double repro_tol = 5e-9;
    bool repro_json = false;
    CLI::App* repro = app.add_subcommand(
        "repro-paper", "recompute the published worked-example constants and compare");
    repro->add_option("--tolerance", repro_tol, "relative match tolerance")
        ->capture_default_str();
    repro->add_flag("--json", repro_json, "machine-readable comparison table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (check->parsed()) return run_check(check_path, check_json, check_estimate);
        if (solve->parsed()) return run_solve(solve_path, tol, max_iter, solve_out, threads);
        if (ml->parsed()) return run_ml(ml_alpha, ml_beta, ml_z);
        if (repro->parsed()) return run_repro(repro_tol, repro_json);
    } catch (const hml::ParameterError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const hml::DomainError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    }
    return kUsage;
}
