#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#ifndef RMONO_CLI_PATH
#error "RMONO_CLI_PATH must point at the CLI binary"
#endif

namespace {

struct RunResult {
    int exit_code;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

RunResult run_cli(const std::string& args) {
    const std::string out_path = "cli_stdout.tmp";
    const std::string err_path = "cli_stderr.tmp";
    const std::string cmd =
        std::string(RMONO_CLI_PATH) + " " + args + " > " + out_path + " 2> " + err_path;
    const int raw = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = (raw == -1) ? -1 : WEXITSTATUS(raw);
    r.out = slurp(out_path);
    r.err = slurp(err_path);
    std::remove(out_path.c_str());
    std::remove(err_path.c_str());
    return r;
}

int count_lines(const std::string& text) {
    int n = 0;
    for (char c : text)
        if (c == '\n') ++n;
    return n;
}

}  // namespace

TEST_CASE("check: admissible instance") {
    RunResult r = run_cli("check --r 2 --orders 0,1,2 --norms 0.7,1,1");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("admissible, Type 1") != std::string::npos);
    CHECK(r.out.find("1.2") != std::string::npos);
    CHECK(r.out.find("0.2") != std::string::npos);
}

TEST_CASE("check: inadmissible instance names the binding order and bound") {
    RunResult r = run_cli("check --r 2 --orders 0,1,2 --norms 0.3,1,1");
    CHECK(r.exit_code == 1);
    CHECK(r.out.find("inadmissible at order 0") != std::string::npos);
    CHECK(r.out.find("need >= 0.5") != std::string::npos);
}

TEST_CASE("check: invalid input exits 2 with a field-precise message") {
    RunResult r = run_cli("check --r 2 --orders 2,1 --norms 1,1");
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("orders") != std::string::npos);
}

TEST_CASE("check: structured output round-trips") {
    RunResult r = run_cli("check --r 2 --orders 0,1,2 --norms 0.7,1,1 --json");
    CHECK(r.exit_code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("admissible").get<bool>());
    CHECK(j.at("type").get<std::string>() == "Type1");
    CHECK(j.contains("witness"));
    // Lossless numeric round-trip: re-serialization is identical.
    CHECK(nlohmann::json::parse(j.dump()).dump() == j.dump());
}

TEST_CASE("scan: boundary flip appears in the CSV") {
    RunResult r = run_cli("scan --r 2 --orders 0,1,2 --norms 0.5,1,1 --vary 0 --range 0.3:0.7:5");
    CHECK(r.exit_code == 0);
    std::istringstream lines(r.out);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "value,admissible,type,margin");
    std::vector<std::string> rows;
    while (std::getline(lines, line)) rows.push_back(line);
    REQUIRE(rows.size() == 5);
    CHECK(rows[0].find(",0,") != std::string::npos);  // 0.3 inadmissible
    CHECK(rows[1].find(",0,") != std::string::npos);  // 0.4 inadmissible
    CHECK(rows[2].find(",1,Type2") != std::string::npos);
    CHECK(rows[3].find(",1,Type1") != std::string::npos);
    CHECK(rows[4].find(",1,Type1") != std::string::npos);
}

TEST_CASE("scan: endpoints-only range produces two rows") {
    RunResult r = run_cli("scan --r 2 --orders 0,1,2 --norms 0.6,1,1 --vary 0 --range 0.6:0.7:2");
    CHECK(r.exit_code == 0);
    CHECK(count_lines(r.out) == 3);  // header + 2 rows
}

TEST_CASE("scan: malformed range exits 2") {
    RunResult r = run_cli("scan --r 2 --orders 0,1,2 --norms 0.6,1,1 --vary 0 --range 0.7:0.6:1");
    CHECK(r.exit_code == 2);
}

TEST_CASE("eval: norms of a spline document") {
    const std::string path = "eval_spline.tmp.json";
    {
        std::ofstream out(path);
        out << R"({"r":2,"l":1.0,"knots":[1.0],"constant":0})";
    }
    RunResult r = run_cli("eval --spline " + path + " --norms");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("0 0.5") != std::string::npos);
    CHECK(r.out.find("1 1") != std::string::npos);
    RunResult v = run_cli("eval --spline " + path + " --order 0 --at -0.5");
    CHECK(v.exit_code == 0);
    CHECK(v.out.find("0.125") != std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("selftest: small run exits cleanly") {
    RunResult r = run_cli("selftest --trials 8 --seed 3");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("failures: 0") != std::string::npos);
}

TEST_CASE("check: problem document file input") {
    const std::string path = "problem.tmp.json";
    {
        std::ofstream out(path);
        out << R"({"r":3,"orders":[0,1,2,3],"norms":[1.0,0.5,1.0,1.0]})";
    }
    RunResult r = run_cli("check " + path);
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("Type 3") != std::string::npos);
    std::remove(path.c_str());
}
