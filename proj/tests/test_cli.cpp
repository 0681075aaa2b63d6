// End-to-end checks of the command-line tool: every subcommand is run as a
// subprocess against the shipped scenario fixtures, asserting on exit codes,
// stdout/stderr text, and emitted JSON/CSV/SVG artifacts.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "nonbayes/json_io.hpp"

namespace {

namespace fs = std::filesystem;
using nonbayes::json;

struct RunResult {
    int status = -1;
    std::string out;
};

/// Runs the CLI with the given arguments, capturing stdout. stderr is
/// silenced unless the caller folds it in with "2>&1".
RunResult run_cli(const std::string& args, bool merge_stderr = false) {
    const std::string cmd = std::string(NONBAYES_CLI_PATH) + " " + args +
                            (merge_stderr ? " 2>&1" : " 2>/dev/null");
    RunResult result;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buffer[4096];
    std::size_t got = 0;
    while ((got = fread(buffer, 1, sizeof buffer, pipe)) > 0)
        result.out.append(buffer, got);
    const int rc = pclose(pipe);
    result.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    return result;
}

std::string scenario(const std::string& name) {
    return std::string(NONBAYES_SCENARIO_DIR) + "/" + name;
}

fs::path temp_file(const std::string& name) {
    return fs::temp_directory_path() / ("nonbayes_cli_test_" + name);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::string> csv_rows(const std::string& text) {
    std::vector<std::string> rows;
    std::string::size_type pos = 0;
    while (pos < text.size()) {
        const auto end = text.find("\r\n", pos);
        if (end == std::string::npos) break;
        rows.push_back(text.substr(pos, end - pos));
        pos = end + 2;
    }
    return rows;
}

} // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("classify reports reactions and the verdict") {
    const RunResult shrink =
        run_cli("classify --scenario " + scenario("binary_shrink.json"));
    CHECK(shrink.status == 0);
    CHECK(shrink.out.find("underreacts to information: true") !=
          std::string::npos);
    CHECK(shrink.out.find("verdict: unexploitable") != std::string::npos);

    const RunResult grether =
        run_cli("classify --scenario " + scenario("binary_grether.json"));
    CHECK(grether.status == 0);
    CHECK(grether.out.find("overreacts to information: true") !=
          std::string::npos);
    CHECK(grether.out.find("verdict: exploitable") != std::string::npos);
}

TEST_CASE("classify writes a machine-readable report") {
    const fs::path out = temp_file("classify.json");
    const RunResult r = run_cli("classify --scenario " +
                                scenario("binary_shrink.json") + " --out " +
                                out.string());
    CHECK(r.status == 0);
    const json doc = json::parse(slurp(out));
    REQUIRE(doc.contains("realizations"));
    CHECK(doc["verdict"] == "unexploitable");
    CHECK(doc["underreacts"] == true);
    fs::remove(out);
}

TEST_CASE("exploit emits an exact contract for an exploitable scenario") {
    const RunResult r =
        run_cli("exploit --scenario " + scenario("binary_stretch.json"));
    REQUIRE(r.status == 0);
    const json contract = json::parse(r.out);
    CHECK(std::abs(contract["achieved_payoff"].get<double>() + 1.0) <= 1e-9);
    CHECK(contract["predicted_takers"][0] == "H");
    CHECK(contract["certificate"]["beta"].get<double>() ==
          doctest::Approx(0.5303300858899107).epsilon(1e-12));
    // --k overrides the scenario's target.
    const RunResult r4 = run_cli("exploit --k 4 --scenario " +
                                 scenario("binary_stretch.json"));
    REQUIRE(r4.status == 0);
    CHECK(std::abs(json::parse(r4.out)["achieved_payoff"].get<double>() +
                   4.0) <= 4e-9);
}

TEST_CASE("exploit refuses safe and undecided scenarios with exit 3") {
    const RunResult safe = run_cli(
        "exploit --scenario " + scenario("binary_shrink.json"), true);
    CHECK(safe.status == 3);
    CHECK(safe.out.find("unexploitable") != std::string::npos);

    const RunResult open = run_cli(
        "exploit --scenario " + scenario("ternary_unknown.json"), true);
    CHECK(open.status == 3);
    CHECK(open.out.find("unknown") != std::string::npos);
}

TEST_CASE("exploit validates its inputs") {
    CHECK(run_cli("exploit --scenario /missing.json").status == 2);
    CHECK(run_cli("exploit --k 0 --scenario " +
                  scenario("binary_stretch.json"))
              .status == 2);
    CHECK(run_cli("exploit --k -1 --scenario " +
                  scenario("binary_stretch.json"))
              .status == 2);
}

TEST_CASE("simulate agrees with the analytic payoff") {
    const fs::path out = temp_file("simulate.json");
    const RunResult r = run_cli(
        "simulate --trials 50000 --seed 7 --self-check --out " + out.string() +
        " --scenario " + scenario("binary_bayes.json"));
    CHECK(r.status == 0);
    const json doc = json::parse(slurp(out));
    CHECK(doc["analytic"].get<double>() == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(doc["consistent"] == true);
    CHECK(doc["trials"] == 50000);
    fs::remove(out);
}

TEST_CASE("simulate is deterministic per seed") {
    const std::string cmd = "simulate --trials 20000 --seed 123 --scenario " +
                            scenario("binary_random_segment.json");
    const RunResult a = run_cli(cmd);
    const RunResult b = run_cli(cmd);
    CHECK(a.status == 0);
    CHECK(a.out == b.out);
}

TEST_CASE("simulate validates its inputs") {
    // binary_stretch carries no decision problem.
    CHECK(run_cli("simulate --scenario " + scenario("binary_stretch.json"))
              .status == 2);
    CHECK(run_cli("simulate --trials 0 --scenario " +
                  scenario("binary_bayes.json"))
              .status == 2);
}

TEST_CASE("a constructed contract survives an end-to-end simulation") {
    // Build the contract, graft it onto the scenario as its decision problem,
    // then Monte Carlo the result and demand 4-sigma agreement with -K.
    const RunResult built =
        run_cli("exploit --scenario " + scenario("binary_stretch.json"));
    REQUIRE(built.status == 0);
    const json contract = json::parse(built.out);

    const json original = json::parse(slurp(scenario("binary_stretch.json")));
    json merged;
    merged["environment"] = original["environment"];
    merged["rule"] = original["rule"];
    merged["decision_problem"] = contract["problem"];
    const fs::path path = temp_file("merged_scenario.json");
    std::ofstream(path) << merged.dump(2);

    const fs::path out = temp_file("merged_result.json");
    const RunResult sim =
        run_cli("simulate --trials 150000 --seed 11 --self-check --out " +
                out.string() + " --scenario " + path.string());
    CHECK(sim.status == 0);
    const json doc = json::parse(slurp(out));
    CHECK(std::abs(doc["analytic"].get<double>() + 1.0) <= 1e-9);
    CHECK(doc["consistent"] == true);
    fs::remove(path);
    fs::remove(out);
}

TEST_CASE("verify runs suites and honors the self-test") {
    const RunResult ok = run_cli("verify theorem1 --trials 150 --seed 3");
    CHECK(ok.status == 0);
    CHECK(ok.out.find("pass") != std::string::npos);

    const RunResult selftest = run_cli("verify --self-test", true);
    CHECK(selftest.status == 4);
    CHECK(selftest.out.find("FAIL") != std::string::npos);

    CHECK(run_cli("verify nosuchsuite").status == 2);
    CHECK(run_cli("verify").status == 2);
}

TEST_CASE("verify writes its report as JSON") {
    const fs::path out = temp_file("verify.json");
    const RunResult r =
        run_cli("verify plausibility --trials 200 --seed 5 --out " +
                out.string());
    CHECK(r.status == 0);
    const json doc = json::parse(slurp(out));
    CHECK(doc["suite"] == "plausibility");
    CHECK(doc["trials"] == 200);
    CHECK(doc["passed"] == true);
    fs::remove(out);
}

TEST_CASE("sweep emits an RFC-4180 CSV over the grid") {
    const fs::path out = temp_file("sweep.csv");
    const RunResult r =
        run_cli("sweep --param beta --grid 0.25,0.5,1,2,4 --out " +
                out.string() + " --scenario " + scenario("binary_grether.json"));
    CHECK(r.status == 0);
    const std::string text = slurp(out);
    const std::vector<std::string> rows = csv_rows(text);
    REQUIRE(rows.size() == 6);
    CHECK(rows[0] ==
          "param,value,reaction_H,reaction_L,lambda_H,lambda_L,verdict,"
          "achieved_loss,ex_ante_payoff");
    // Below beta = 1 the agent underreacts; strictly above she overreacts and
    // the verdict flips to exploitable with the achieved loss filled in.
    CHECK(rows[1].find("under") != std::string::npos);
    CHECK(rows[3].find("bayesian") != std::string::npos);
    CHECK(rows[3].find("unexploitable") != std::string::npos);
    CHECK(rows[4].find("over") != std::string::npos);
    CHECK(rows[4].find(",exploitable,1,") != std::string::npos);
    CHECK(rows[5].find(",exploitable,1,") != std::string::npos);
    fs::remove(out);
}

TEST_CASE("sweep draws the simplex when it is drawable") {
    const fs::path svg = temp_file("sweep.svg");
    const RunResult r = run_cli(
        "sweep --param beta --grid 0.5,2 --svg " + svg.string() +
        " --scenario " + scenario("binary_grether.json"));
    CHECK(r.status == 0);
    const std::string body = slurp(svg);
    CHECK(body.rfind("<svg", 0) == 0);
    CHECK(body.find("</svg>") != std::string::npos);
    fs::remove(svg);

    // Four states cannot be drawn; the sweep still runs and says why.
    const fs::path skipped = temp_file("skipped.svg");
    const RunResult warn = run_cli(
        "sweep --param lambda --grid 0.2,0.8 --svg " + skipped.string() +
        " --scenario " + scenario("quad_shrink.json"), true);
    CHECK(warn.status == 0);
    CHECK(warn.out.find("SVG skipped") != std::string::npos);
    CHECK_FALSE(fs::exists(skipped));
}

TEST_CASE("sweep validates parameters against the rule") {
    CHECK(run_cli("sweep --param lambda --grid 1 --scenario " +
                  scenario("binary_grether.json"))
              .status == 2);
    CHECK(run_cli("sweep --param beta --grid , --scenario " +
                  scenario("binary_grether.json"))
              .status == 2);
    CHECK(run_cli("sweep --param beta --grid abc --scenario " +
                  scenario("binary_grether.json"))
              .status == 2);
    CHECK(run_cli("sweep --param beta --grid 0.5 --metric bogus --scenario " +
                  scenario("binary_grether.json"))
              .status == 2);
    // Range violations surface as input errors, too.
    CHECK(run_cli("sweep --param lambda --grid 1.5 --scenario " +
                  scenario("binary_shrink.json"))
              .status == 2);
}

TEST_CASE("bare invocations print usage and fail") {
    CHECK(run_cli("").status == 2);
    CHECK(run_cli("--help").status == 0);
    CHECK(run_cli("frobnicate").status == 2);
}

TEST_SUITE_END();
