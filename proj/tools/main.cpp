// Command-line front end: classify a scenario's updating rule, build exploit
// contracts, Monte Carlo a scenario timeline, run the verification suites,
// and sweep a rule parameter into CSV/SVG reports.
//
// Exit codes: 0 success, 2 bad input, 3 not exploitable (or uncharacterized),
// 4 verification failure.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "nonbayes/errors.hpp"
#include "nonbayes/exploit.hpp"
#include "nonbayes/harness.hpp"
#include "nonbayes/json_io.hpp"
#include "svg_figure.hpp"

namespace nb = nonbayes;

namespace {

constexpr int kOk = 0;
constexpr int kBadInput = 2;
constexpr int kNotExploitable = 3;
constexpr int kVerifyFailed = 4;

std::string scenario_rule_kind(const nb::ScenarioRule& rule) {
    if (const auto* det = std::get_if<nb::DeterministicRule>(&rule))
        return nb::rule_kind(*det);
    return std::holds_alternative<nb::RandomRule>(rule) ? "random"
                                                        : "confirmatory";
}

void write_json_file(const std::string& path, const nb::json& j) {
    std::ofstream out(path);
    if (!out)
        throw nb::Error(nb::Errc::ParseError, "cannot write '" + path + "'");
    out << j.dump(2) << "\n";
}

std::string describe_status(const nb::ExploitabilityStatus& status) {
    std::string text = nb::verdict_name(status.verdict);
    if (status.recipe)
        text += std::string(" via ") + nb::recipe_name(*status.recipe);
    if (!status.reason.empty()) text += " — " + status.reason;
    return text;
}

// ---- classify ---------------------------------------------------------------

int run_classify(const std::string& scenario_path,
                 const std::string& out_path) {
    const nb::Scenario sc = nb::load_scenario(scenario_path);
    const nb::PosteriorSystem sys = nb::posterior_system(sc.env);
    const auto outcomes = nb::outcome_system(sc.rule, sc.env);

    nb::json doc;
    doc["rule"] = scenario_rule_kind(sc.rule);
    nb::json rows = nb::json::array();

    bool any_over = false;
    bool all_under = true;
    std::printf("rule: %s\n", scenario_rule_kind(sc.rule).c_str());
    for (std::size_t s = 0; s < sc.env.realizations(); ++s) {
        const std::string& label = sc.env.signals.label(s);
        nb::json row;
        row["label"] = label;
        row["marginal"] = sys.marginals[s];
        nb::json outs = nb::json::array();
        for (std::size_t k = 0; k < outcomes[s].size(); ++k) {
            const nb::WeightedBelief& o = outcomes[s][k];
            const nb::Reaction r =
                nb::classify_reaction(sc.env, o.posterior, s);
            all_under = all_under && (r.tag == nb::ReactionTag::Bayesian ||
                                      r.tag == nb::ReactionTag::Under);
            any_over = any_over || r.tag == nb::ReactionTag::Over;

            std::string head = label;
            if (outcomes[s].size() > 1)
                head += " outcome " + std::to_string(k + 1) + "/" +
                        std::to_string(outcomes[s].size()) +
                        " (prob " + std::to_string(o.probability) + ")";
            else
                head += " (p=" + std::to_string(sys.marginals[s]) + ")";
            if (r.lambda)
                std::printf("%-36s %s  lambda=%.6g  residual=%.2e\n",
                            head.c_str(), nb::reaction_name(r.tag), *r.lambda,
                            r.residual);
            else
                std::printf("%-36s %s  residual=%.2e\n", head.c_str(),
                            nb::reaction_name(r.tag), r.residual);

            nb::json entry;
            entry["probability"] = o.probability;
            entry["tag"] = nb::reaction_name(r.tag);
            if (r.lambda) entry["lambda"] = *r.lambda;
            entry["residual"] = r.residual;
            outs.push_back(std::move(entry));
        }
        row["outcomes"] = std::move(outs);
        rows.push_back(std::move(row));
    }
    doc["realizations"] = std::move(rows);

    const bool over_all = any_over && [&] {
        for (std::size_t s = 0; s < sc.env.realizations(); ++s)
            for (const nb::WeightedBelief& o : outcomes[s]) {
                const nb::ReactionTag tag =
                    nb::classify_reaction(sc.env, o.posterior, s).tag;
                if (tag != nb::ReactionTag::Bayesian &&
                    tag != nb::ReactionTag::Over)
                    return false;
            }
        return true;
    }();
    const nb::ExploitabilityStatus status =
        nb::exploitability_status(sc.env, sc.rule);

    std::printf("underreacts to information: %s\n",
                all_under ? "true" : "false");
    std::printf("overreacts to information: %s\n", over_all ? "true" : "false");
    std::printf("verdict: %s\n", describe_status(status).c_str());

    doc["underreacts"] = all_under;
    doc["overreacts"] = over_all;
    doc["verdict"] = nb::verdict_name(status.verdict);
    if (status.recipe) doc["recipe"] = nb::recipe_name(*status.recipe);
    if (status.realization)
        doc["realization"] = sc.env.signals.label(*status.realization);
    if (!status.reason.empty()) doc["reason"] = status.reason;
    if (!out_path.empty()) write_json_file(out_path, doc);
    return kOk;
}

// ---- exploit ----------------------------------------------------------------

int run_exploit(const std::string& scenario_path, std::optional<double> k_flag,
                double epsilon, const std::string& out_path) {
    const nb::Scenario sc = nb::load_scenario(scenario_path);
    const double target = k_flag ? *k_flag : sc.target_loss.value_or(1.0);
    if (!(target > 0.0))
        throw nb::Error(nb::Errc::InvalidParameter,
                        "target loss K must be positive");

    const nb::ExploitabilityStatus status =
        nb::exploitability_status(sc.env, sc.rule);
    if (status.verdict != nb::Verdict::Exploitable) {
        std::fprintf(stderr, "verdict: %s\n", describe_status(status).c_str());
        return kNotExploitable;
    }

    const nb::ExploitContract contract =
        nb::build_exploit(sc.env, sc.rule, target, epsilon);
    const nb::json doc = nb::to_json(contract, sc.env);
    std::printf("%s\n", doc.dump(2).c_str());
    std::fprintf(stderr, "achieved ex ante payoff %.12f (target %.12f)\n",
                 contract.achieved_payoff, -target);
    if (!out_path.empty()) write_json_file(out_path, doc);
    return kOk;
}

// ---- simulate ---------------------------------------------------------------

int run_simulate(const std::string& scenario_path, std::size_t trials,
                 std::uint64_t seed, bool self_check,
                 const std::string& out_path) {
    const nb::Scenario sc = nb::load_scenario(scenario_path);
    if (!sc.dp)
        throw nb::Error(nb::Errc::InvalidParameter,
                        "scenario has no decision problem to simulate");
    const nb::SimulationResult r =
        nb::simulate_payoff(sc.env, sc.rule, *sc.dp, trials, seed);
    std::printf("trials:          %zu\n", r.trials);
    std::printf("empirical mean:  %.9f\n", r.empirical_mean);
    std::printf("standard error:  %.9f\n", r.standard_error);
    std::printf("analytic payoff: %.9f\n", r.analytic);
    if (!out_path.empty()) write_json_file(out_path, nb::to_json(r));
    if (self_check && !r.consistent()) {
        std::fprintf(stderr,
                     "self-check failed: empirical mean is more than 4 "
                     "standard errors from the analytic value\n");
        return kVerifyFailed;
    }
    return kOk;
}

// ---- verify -----------------------------------------------------------------

void print_report(const nb::TrialReport& report) {
    std::printf("suite:      %s\n", report.suite.c_str());
    std::printf("trials:     %zu\n", report.trials);
    std::printf("resamples:  %zu\n", report.resamples);
    std::printf("borderline: %zu\n", report.borderline);
    std::printf("extreme:    %.6e\n", report.extreme);
    std::printf("result:     %s\n", report.passed() ? "pass" : "FAIL");
    for (const nb::TrialFailure& f : report.failures)
        std::printf("  seed %llu: %s\n", (unsigned long long)f.trial,
                    f.summary.c_str());
}

int run_verify(const std::string& suite, std::size_t trials,
               std::uint64_t seed, bool self_test,
               const std::string& out_path) {
    nb::TrialReport report;
    if (self_test) {
        report = nb::theorem1_selftest(seed);
    } else {
        using Runner = nb::TrialReport (*)(std::size_t, std::uint64_t);
        struct Entry {
            Runner run;
            std::size_t default_trials;
        };
        static const std::map<std::string, Entry> suites = {
            {"plausibility", {nb::bayes_plausibility_suite, 10000}},
            {"theorem1", {nb::theorem1_suite, 10000}},
            {"lemma1", {nb::lemma1_suite, 1000}},
            {"prop2", {nb::prop2_bruteforce_check, 1000}},
            {"pruning", {nb::pruning_suite, 10000}},
            {"confirmatory", {nb::confirmatory_suite, 1000}},
            {"grether", {nb::grether_reduction_suite, 1000}},
            {"random_safety", {nb::random_segment_safety_suite, 2000}},
            {"geometry", {nb::geometry_oracle_suite, 12}},
        };
        if (suite == "montecarlo") {
            report = nb::monte_carlo_suite(20, trials ? trials : 1000000, seed);
        } else {
            const auto it = suites.find(suite);
            if (it == suites.end())
                throw nb::Error(nb::Errc::InvalidParameter,
                                "unknown suite '" + suite + "'");
            report = it->second.run(trials ? trials : it->second.default_trials,
                                    seed);
        }
    }
    print_report(report);
    if (!out_path.empty()) write_json_file(out_path, nb::to_json(report));
    return report.passed() ? kOk : kVerifyFailed;
}

// ---- sweep ------------------------------------------------------------------

std::string csv_quote(const std::string& cell) {
    if (cell.find_first_of(",\"\r\n") == std::string::npos) return cell;
    std::string quoted = "\"";
    for (const char c : cell) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

std::string num_cell(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

/// Returns a copy of the rule with the swept parameter set everywhere.
nb::ScenarioRule apply_sweep_value(const nb::ScenarioRule& rule,
                                   const std::string& param, double value) {
    if (const auto* det = std::get_if<nb::DeterministicRule>(&rule)) {
        nb::DeterministicRule out = *det;
        bool ok = false;
        std::visit(
            [&](auto& r) {
                using T = std::decay_t<decltype(r)>;
                if constexpr (std::is_same_v<T, nb::ShrinkRule> ||
                              std::is_same_v<T, nb::StretchRule>) {
                    if (param == "lambda") {
                        r.lambda = nb::PerRealization(value);
                        ok = true;
                    }
                } else if constexpr (std::is_same_v<T,
                                                    nb::GretherTwoStateRule> ||
                                     std::is_same_v<T,
                                                    nb::PowerDistortionRule>) {
                    if (param == "beta") {
                        r.beta = value;
                        ok = true;
                    }
                } else if constexpr (std::is_same_v<
                                         T, nb::ExtremeBeliefAversionRule>) {
                    if (param == "epsilon") {
                        r.epsilon = value;
                        ok = true;
                    }
                }
            },
            out);
        if (!ok)
            throw nb::Error(nb::Errc::InvalidParameter,
                            "rule kind does not expose parameter '" + param +
                                "'");
        return out;
    }
    if (const auto* bias = std::get_if<nb::ConfirmatoryBias>(&rule)) {
        if (param != "q")
            throw nb::Error(nb::Errc::InvalidParameter,
                            "confirmatory rules sweep parameter 'q' only");
        if (value < 0.0 || value > 1.0)
            throw nb::Error(nb::Errc::InvalidParameter,
                            "q must lie in [0, 1]");
        nb::ConfirmatoryBias out = *bias;
        out.q = nb::PerRealization(value);
        return out;
    }
    throw nb::Error(nb::Errc::InvalidParameter,
                    "random rules have no sweepable scalar parameter");
}

int run_sweep(const std::string& scenario_path, const std::string& param,
              const std::string& grid_text, const std::string& metric,
              double target, const std::string& out_path,
              const std::string& svg_path) {
    static const std::vector<std::string> metrics = {
        "exploit_status", "achieved_loss", "reaction_lambda",
        "ex_ante_payoff"};
    if (std::find(metrics.begin(), metrics.end(), metric) == metrics.end())
        throw nb::Error(nb::Errc::InvalidParameter,
                        "unknown metric '" + metric + "'");

    std::vector<double> grid;
    {
        std::stringstream ss(grid_text);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item.empty()) continue;
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(item, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != item.size())
                throw nb::Error(nb::Errc::ParseError,
                                "grid entry '" + item + "' is not a number");
            grid.push_back(v);
        }
    }
    if (grid.empty())
        throw nb::Error(nb::Errc::InvalidParameter, "sweep grid is empty");

    const nb::Scenario sc = nb::load_scenario(scenario_path);
    const bool deterministic =
        std::holds_alternative<nb::DeterministicRule>(sc.rule);
    if (metric == "reaction_lambda" && !deterministic)
        throw nb::Error(nb::Errc::InvalidParameter,
                        "reaction_lambda applies to deterministic rules only");
    if (metric == "ex_ante_payoff" && !sc.dp)
        throw nb::Error(nb::Errc::InvalidParameter,
                        "ex_ante_payoff needs a decision problem");

    const std::size_t m = sc.env.realizations();
    std::vector<std::string> header = {"param", "value"};
    for (std::size_t s = 0; s < m; ++s)
        header.push_back("reaction_" + sc.env.signals.label(s));
    for (std::size_t s = 0; s < m; ++s)
        header.push_back("lambda_" + sc.env.signals.label(s));
    header.push_back("verdict");
    header.push_back("achieved_loss");
    if (sc.dp) header.push_back("ex_ante_payoff");

    std::vector<std::vector<std::string>> rows;
    std::vector<nb::fig::Snapshot> snapshots;
    std::optional<nb::Hyperplane> last_plane;

    for (const double value : grid) {
        const nb::ScenarioRule swept = apply_sweep_value(sc.rule, param, value);
        if (const auto* det = std::get_if<nb::DeterministicRule>(&swept))
            nb::validate_rule(*det, sc.env); // range violations are input errors

        std::vector<std::string> row = {param, num_cell(value)};
        nb::fig::Snapshot snap{value, {}};

        if (const auto* det = std::get_if<nb::DeterministicRule>(&swept)) {
            const std::vector<nb::Belief> distorted =
                nb::distorted_posteriors(*det, sc.env);
            std::vector<std::string> lambdas;
            for (std::size_t s = 0; s < m; ++s) {
                const nb::Reaction r =
                    nb::classify_reaction(sc.env, distorted[s], s);
                row.push_back(nb::reaction_name(r.tag));
                lambdas.push_back(r.lambda ? num_cell(*r.lambda) : "");
                snap.points.push_back(distorted[s]);
            }
            row.insert(row.end(), lambdas.begin(), lambdas.end());
        } else {
            // Random-style rules have no single per-realization reaction.
            for (std::size_t s = 0; s < 2 * m; ++s) row.emplace_back();
            const auto outcomes = nb::outcome_system(swept, sc.env);
            for (const auto& list : outcomes)
                for (const nb::WeightedBelief& o : list)
                    snap.points.push_back(o.posterior);
        }

        const nb::ExploitabilityStatus status =
            nb::exploitability_status(sc.env, swept);
        row.push_back(nb::verdict_name(status.verdict));
        if (status.verdict == nb::Verdict::Exploitable) {
            const nb::ExploitContract contract =
                nb::build_exploit(sc.env, swept, target);
            row.push_back(num_cell(-contract.achieved_payoff));
            last_plane = contract.certificate;
        } else {
            row.emplace_back();
        }
        if (sc.dp)
            row.push_back(
                num_cell(nb::ex_ante_payoff(sc.env, swept, *sc.dp)));

        rows.push_back(std::move(row));
        snapshots.push_back(std::move(snap));
    }

    // RFC-4180: CRLF separators, quoted cells where needed, header mandatory.
    std::ostringstream csv;
    for (std::size_t c = 0; c < header.size(); ++c)
        csv << (c ? "," : "") << csv_quote(header[c]);
    csv << "\r\n";
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
            csv << (c ? "," : "") << csv_quote(row[c]);
        csv << "\r\n";
    }
    if (out_path.empty()) {
        std::fputs(csv.str().c_str(), stdout);
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out)
            throw nb::Error(nb::Errc::ParseError,
                            "cannot write '" + out_path + "'");
        out << csv.str();
        std::printf("wrote %zu rows to %s (metric: %s)\n", rows.size(),
                    out_path.c_str(), metric.c_str());
    }

    if (!svg_path.empty()) {
        if (sc.env.states() <= 3) {
            nb::fig::write_simplex_figure(svg_path, sc.env, snapshots,
                                          last_plane);
        } else {
            std::fprintf(stderr,
                         "warning: SVG skipped — only 2- or 3-state simplexes "
                         "are drawable\n");
        }
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Screening imperfectly Bayesian agents: classification, "
                 "exploit construction, simulation, verification, sweeps"};
    app.require_subcommand(1);

    std::string scenario_path, out_path, svg_path;
    std::string suite, param, grid_text;
    std::string metric = "exploit_status";
    std::optional<double> k_flag;
    double epsilon = 0.0;
    double sweep_target = 1.0;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    bool self_check = false, self_test = false;

    CLI::App* classify = app.add_subcommand(
        "classify", "Classify each realization's distorted posterior");
    classify->add_option("--scenario", scenario_path, "Scenario JSON file")
        ->required();
    classify->add_option("--out", out_path, "Write the report as JSON");

    CLI::App* exploit = app.add_subcommand(
        "exploit", "Construct a decision problem achieving payoff -K");
    exploit->add_option("--scenario", scenario_path, "Scenario JSON file")
        ->required();
    exploit->add_option("--k", k_flag,
                        "Target loss K (default: scenario's, else 1)");
    exploit->add_option("--epsilon", epsilon,
                        "Strict-preference premium for confirmatory exploits");
    exploit->add_option("--out", out_path, "Write the contract as JSON");

    CLI::App* simulate = app.add_subcommand(
        "simulate", "Monte Carlo the scenario's full timeline");
    simulate->add_option("--scenario", scenario_path, "Scenario JSON file")
        ->required();
    simulate->add_option("--trials", trials, "Sample count (default 1000000)");
    simulate->add_option("--seed", seed, "RNG seed");
    simulate->add_flag("--self-check", self_check,
                       "Exit 4 unless empirical and analytic payoffs agree "
                       "within 4 standard errors");
    simulate->add_option("--out", out_path, "Write the result as JSON");

    CLI::App* verify =
        app.add_subcommand("verify", "Run a randomized verification suite");
    verify->add_option("name", suite, "Suite name");
    verify->add_option("--suite", suite, "Suite name (same as positional)");
    verify->add_option("--trials", trials,
                       "Trial count (suite-specific default)");
    verify->add_option("--seed", seed, "RNG seed");
    verify->add_flag("--self-test", self_test,
                     "Run the planted-mutant harness check (expected exit 4)");
    verify->add_option("--out", out_path, "Write the report as JSON");

    CLI::App* sweep = app.add_subcommand(
        "sweep", "Evaluate a rule across a parameter grid; emit CSV/SVG");
    sweep->add_option("--scenario", scenario_path, "Scenario JSON file")
        ->required();
    sweep->add_option("--param", param, "Parameter: beta, lambda, epsilon, q")
        ->required();
    sweep->add_option("--grid", grid_text, "Comma-separated values")
        ->required();
    sweep->add_option("--metric", metric,
                      "exploit_status | achieved_loss | reaction_lambda | "
                      "ex_ante_payoff");
    sweep->add_option("--k", sweep_target, "Target loss for achieved_loss");
    sweep->add_option("--out", out_path, "CSV path (default: stdout)");
    sweep->add_option("--svg", svg_path, "Simplex figure path (n <= 3)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kBadInput;
    }

    try {
        if (app.got_subcommand(classify))
            return run_classify(scenario_path, out_path);
        if (app.got_subcommand(exploit))
            return run_exploit(scenario_path, k_flag, epsilon, out_path);
        if (app.got_subcommand(simulate)) {
            // An explicit --trials 0 is an input error, not "use the default".
            const std::size_t n =
                simulate->count("--trials") ? trials : 1000000;
            return run_simulate(scenario_path, n, seed, self_check, out_path);
        }
        if (app.got_subcommand(verify)) {
            if (!self_test && suite.empty())
                throw nb::Error(nb::Errc::InvalidParameter,
                                "verify needs a suite name (or --self-test)");
            return run_verify(suite, trials, seed, self_test, out_path);
        }
        if (app.got_subcommand(sweep))
            return run_sweep(scenario_path, param, grid_text, metric,
                             sweep_target, out_path, svg_path);
    } catch (const nb::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kBadInput;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kBadInput;
    }
    return kBadInput;
}
