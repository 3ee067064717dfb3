#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rmono/io.hpp"
#include "rmono/oracle.hpp"
#include "rmono/parallel.hpp"

namespace {

using namespace rmono;

constexpr int kExitAdmissible = 0;
constexpr int kExitInadmissible = 1;
constexpr int kExitInvalidInput = 2;
constexpr int kExitNumericalFailure = 3;

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open file '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

ProblemDocument problem_from_flags(int r, const std::vector<int>& orders,
                                   const std::vector<double>& norms, double tolerance) {
    nlohmann::json j{{"r", r}, {"orders", orders}, {"norms", norms}};
    if (tolerance > 0.0) j["tolerance"] = tolerance;
    return problem_from_json(j);
}

std::string human_verdict(const ProblemDocument& p, const Verdict& v) {
    std::ostringstream os;
    if (v.admissible) {
        os << "admissible, ";
        switch (v.type) {
            case SplineType::Type1: os << "Type 1"; break;
            case SplineType::Type2: os << "Type 2"; break;
            case SplineType::Type3: os << "Type 3"; break;
            case SplineType::None: os << "spline witness (unclassified)"; break;
        }
        if (v.witness) {
            os << ", knots [";
            for (std::size_t i = 0; i < v.witness->knots.size(); ++i)
                os << (i ? ", " : "") << fmt6(v.witness->knots[i]);
            os << "]";
            if (v.witness->constant > 0.0) os << ", C = " << fmt6(v.witness->constant);
        }
    } else {
        const int b = v.binding_stage;
        os << "inadmissible at order " << p.orders[b];
        if (b >= 0 && b < static_cast<int>(v.margins.size()))
            os << ": need >= " << fmt6(p.norms[b] - v.margins[b]);
    }
    if (v.certainty == Certainty::BoundaryAtTolerance) os << " (boundary at tolerance)";
    return os.str();
}

int run_check(const ProblemDocument& p, bool as_json) {
    try {
        Verdict v = decide(OrderSpec(p.r, p.orders), NormTargets(p.norms), p.config);
        if (as_json)
            std::cout << to_json(v).dump(2) << "\n";
        else
            std::cout << human_verdict(p, v) << "\n";
        return v.admissible ? kExitAdmissible : kExitInadmissible;
    } catch (const numerical_failure& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumericalFailure;
    }
}

int run_scan(const ProblemDocument& p, int vary, const std::string& range) {
    double lo = 0.0, hi = 0.0;
    int steps = 0;
    char colon1 = 0, colon2 = 0;
    std::istringstream rs(range);
    if (!(rs >> lo >> colon1 >> hi >> colon2 >> steps) || colon1 != ':' || colon2 != ':' ||
        steps < 2 || !(hi >= lo) || !(lo > 0.0))
        throw std::invalid_argument("--range must be lo:hi:steps with positive lo <= hi, steps >= 2");
    if (vary < 0 || vary >= static_cast<int>(p.orders.size()))
        throw std::invalid_argument("--vary index out of range");

    std::vector<std::string> rows(steps);
    parallel_for(steps, [&](std::int64_t i) {
        const double value = lo + (hi - lo) * static_cast<double>(i) / (steps - 1);
        std::vector<double> norms = p.norms;
        norms[vary] = value;
        std::ostringstream os;
        os << nlohmann::json(value).dump() << ",";
        try {
            Verdict v = decide(OrderSpec(p.r, p.orders), NormTargets(norms), p.config);
            os << (v.admissible ? "1" : "0") << ",";
            os << (v.admissible ? to_string(v.type) : "-") << ",";
            os << nlohmann::json(v.margins[vary]).dump();
        } catch (const std::exception&) {
            os << "error,error,nan";
        }
        rows[i] = os.str();
    });

    std::cout << "value,admissible,type,margin\n";
    for (const auto& row : rows) std::cout << row << "\n";
    return kExitAdmissible;
}

int run_selftest(int trials, std::uint64_t seed) {
    SuiteReport rep = comparison_suite(trials, 6, 5, seed);
    std::cout << rep.summary();
    return rep.failures == 0 ? 0 : 1;
}

int run_eval(const std::string& spline_path, bool norms_flag, int order, double at,
             bool at_set) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(spline_path));
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("spline document: ") + e.what());
    }
    MonotoneSpline x = monotone_from_json(j);
    if (norms_flag) {
        for (int k = 0; k <= x.r; ++k)
            std::cout << k << " " << nlohmann::json(x.norm(k)).dump() << "\n";
        return 0;
    }
    if (order < 0 || order > x.r) throw std::invalid_argument("--order must lie in [0, r]");
    if (!at_set) throw std::invalid_argument("--at T or --norms is required");
    std::cout << nlohmann::json(x.eval_derivative(order, at)).dump() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Admissibility of derivative norm vectors for r-monotone functions"};
    app.require_subcommand(1);

    // Shared problem flags.
    int r = 0;
    std::vector<int> orders;
    std::vector<double> norms;
    double tolerance = -1.0;
    std::string problem_file;

    auto add_problem_flags = [&](CLI::App* cmd) {
        cmd->add_option("--r", r, "highest derivative order r");
        cmd->add_option("--orders", orders, "constrained orders, comma separated")
            ->delimiter(',');
        cmd->add_option("--norms", norms, "norm targets, comma separated")->delimiter(',');
        cmd->add_option("--tolerance", tolerance, "equality tolerance (relative)");
        cmd->add_option("file", problem_file, "problem document (JSON)");
    };

    bool as_json = false;
    CLI::App* check = app.add_subcommand("check", "decide one problem instance");
    add_problem_flags(check);
    check->add_flag("--json", as_json, "structured output");

    int vary = 0;
    std::string range;
    CLI::App* scan = app.add_subcommand("scan", "sweep one norm target, emit CSV");
    add_problem_flags(scan);
    scan->add_option("--vary", vary, "index of the order to sweep")->required();
    scan->add_option("--range", range, "lo:hi:steps")->required();

    int trials = 200;
    std::uint64_t seed = 0;
    CLI::App* selftest = app.add_subcommand("selftest", "run the property suites");
    selftest->add_option("--trials", trials, "number of random trials");
    selftest->add_option("--seed", seed, "base seed");

    std::string spline_path;
    bool norms_flag = false;
    int order = 0;
    double at = 0.0;
    CLI::App* eval = app.add_subcommand("eval", "evaluate a spline document");
    eval->add_option("--spline", spline_path, "spline document (JSON)")->required();
    eval->add_flag("--norms", norms_flag, "print all derivative norms");
    eval->add_option("--order", order, "derivative order k");
    CLI::Option* at_opt = eval->add_option("--at", at, "evaluation point t <= 0");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitInvalidInput;
    }

    try {
        if (check->parsed() || scan->parsed()) {
            ProblemDocument p = problem_file.empty()
                                    ? problem_from_flags(r, orders, norms, tolerance)
                                    : parse_problem(read_file(problem_file));
            if (!problem_file.empty() && tolerance > 0.0)
                p.config.equality_tolerance = tolerance;
            return check->parsed() ? run_check(p, as_json) : run_scan(p, vary, range);
        }
        if (selftest->parsed()) return run_selftest(trials, seed);
        if (eval->parsed())
            return run_eval(spline_path, norms_flag, order, at, at_opt->count() > 0);
    } catch (const numerical_failure& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumericalFailure;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalidInput;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumericalFailure;
    }
    return kExitInvalidInput;
}
