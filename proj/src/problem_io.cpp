#include "hml/problem_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>

#include "json.hpp"

#include "hml/errors.hpp"
#include "hml/expr.hpp"

namespace hml {

namespace {

using json = nlohmann::ordered_json;

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const char* where) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* key : allowed) {
            if (item.key() == key) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw ParameterError("unknown key \"" + item.key() + "\" in " + where);
        }
    }
}

double number_field(const json& obj, const char* key, const char* where) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
        throw ParameterError(std::string(where) + " is missing \"" + key + "\"");
    }
    if (!it->is_number()) {
        throw ParameterError("\"" + std::string(key) + "\" must be a number");
    }
    return it->get<double>();
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt10(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

const char* certificate_name(Certificate c) {
    switch (c) {
        case Certificate::satisfied: return "satisfied";
        case Certificate::violated: return "violated";
        case Certificate::inconclusive: return "inconclusive";
        case Certificate::not_evaluated: return "not-evaluated";
    }
    return "not-evaluated";
}

const char* provenance_name(BoundsProvenance p) {
    return p == BoundsProvenance::user_supplied ? "user-supplied" : "auto-estimated";
}

json optional_number(const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
}

}  // namespace

ProblemInput parse_problem_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParameterError(std::string("problem file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) {
        throw ParameterError("problem file must be a JSON object");
    }
    reject_unknown_keys(
        j, {"version", "alpha", "beta", "lambda", "c0", "gamma", "f", "bounds", "grid"},
        "problem file");

    if (j.contains("version")) {
        const json& v = j["version"];
        if (!v.is_number_integer() || v.get<long long>() != 1) {
            throw ParameterError("unsupported problem file version (expected 1)");
        }
    }

    ProblemInput in;
    in.problem.alpha = number_field(j, "alpha", "problem file");
    in.problem.beta = number_field(j, "beta", "problem file");
    in.problem.lambda = number_field(j, "lambda", "problem file");
    in.problem.c0 = number_field(j, "c0", "problem file");
    in.problem.gamma = j.contains("gamma") ? number_field(j, "gamma", "problem file")
                                           : 1.0 - in.problem.alpha;

    const auto f = j.find("f");
    if (f == j.end()) {
        throw ParameterError("problem file is missing \"f\"");
    }
    if (!f->is_string()) {
        throw ParameterError("\"f\" must be an expression string");
    }
    in.problem.f = parse_expression(f->get<std::string>());

    if (j.contains("bounds")) {
        const json& b = j["bounds"];
        if (!b.is_object()) {
            throw ParameterError("\"bounds\" must be an object");
        }
        reject_unknown_keys(b, {"L1", "L2", "L"}, "\"bounds\"");
        if (b.contains("L1")) in.bounds.L1 = number_field(b, "L1", "\"bounds\"");
        if (b.contains("L2")) in.bounds.L2 = number_field(b, "L2", "\"bounds\"");
        if (b.contains("L")) in.bounds.L = number_field(b, "L", "\"bounds\"");
        if (in.bounds.L1.has_value() != in.bounds.L2.has_value()) {
            throw ParameterError("the linear-growth constants L1 and L2 come as a pair");
        }
        if (!in.bounds.L1 && !in.bounds.L) {
            throw ParameterError("\"bounds\" must supply L1 and L2, or L");
        }
    }

    if (j.contains("grid")) {
        const json& g = j["grid"];
        if (!g.is_object()) {
            throw ParameterError("\"grid\" must be an object");
        }
        reject_unknown_keys(g, {"n", "q"}, "\"grid\"");
        const auto n = g.find("n");
        if (n == g.end()) {
            throw ParameterError("\"grid\" is missing \"n\"");
        }
        if (!n->is_number_integer()) {
            throw ParameterError("\"n\" must be an integer");
        }
        const long long nv = n->get<long long>();
        if (nv < 2 || nv > (1LL << 26)) {
            throw ParameterError("\"n\" is out of range");
        }
        in.grid_n = static_cast<int>(nv);
        in.grid_q = number_field(g, "q", "\"grid\"");
    }

    return in;
}

ProblemInput load_problem_file(const std::string& path) {
    std::string text;
    if (path == "-") {
        text.assign(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
    } else {
        std::ifstream file(path);
        if (!file) {
            throw ParameterError("cannot read problem file: " + path);
        }
        text.assign(std::istreambuf_iterator<char>(file), std::istreambuf_iterator<char>());
    }
    return parse_problem_json(text);
}

std::string solution_to_csv(const GridFunction& x, const std::string& warning) {
    if (!x.grid) {
        throw ParameterError("solution_to_csv needs a grid-backed function");
    }
    const LogGrid& g = *x.grid;
    std::string out = "# langevin solution csv v1\n";
    if (!warning.empty()) {
        out += "# warning: " + warning + "\n";
    }
    out += "t,u,x,weighted_x\n";
    for (int j = 0; j <= g.n; ++j) {
        const std::size_t k = static_cast<std::size_t>(j);
        double wx;
        if (j == 0) {
            wx = x.singular ? x.weighted_v0 : (x.gamma == 0.0 ? x.values[0] : 0.0);
        } else {
            wx = std::pow(g.u[k], x.gamma) * x.values[k];
        }
        out += fmt17(g.t[k]) + "," + fmt17(g.u[k]) + "," + fmt17(x.values[k]) + "," + fmt17(wx) +
               "\n";
    }
    return out;
}

std::string report_to_json(const SolvabilityReport& r) {
    json j;
    j["version"] = 1;
    j["omega1"] = optional_number(r.omega1);
    j["omega2"] = r.omega2;
    j["L1_omega2"] = optional_number(r.L1_omega2);
    j["L_omega2"] = optional_number(r.L_omega2);
    j["r_min"] = optional_number(r.r_min);
    j["existence_ok"] = certificate_name(r.existence);
    j["uniqueness_ok"] = certificate_name(r.uniqueness);
    j["provenance"] = provenance_name(r.provenance);
    return j.dump(2) + "\n";
}

std::string report_to_text(const SolvabilityReport& r) {
    auto line = [](const char* label, const std::string& value) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%-12s= %s\n", label, value.c_str());
        return std::string(buf);
    };
    auto num = [&](const std::optional<double>& v) {
        return v ? fmt10(*v) : std::string("not evaluated");
    };
    std::string out;
    out += line("omega1", num(r.omega1));
    out += line("omega2", fmt10(r.omega2));
    out += line("L1*omega2", num(r.L1_omega2));
    out += line("L*omega2", num(r.L_omega2));
    out += line("r_min", num(r.r_min));
    out += line("existence", certificate_name(r.existence));
    out += line("uniqueness", certificate_name(r.uniqueness));
    out += line("bounds", provenance_name(r.provenance));
    return out;
}

}  // namespace hml
