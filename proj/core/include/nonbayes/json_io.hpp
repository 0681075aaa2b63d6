#pragma once

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "nonbayes/belief.hpp"
#include "nonbayes/decision.hpp"
#include "nonbayes/exploit.hpp"
#include "nonbayes/geometry.hpp"
#include "nonbayes/harness.hpp"
#include "nonbayes/rules.hpp"

namespace nonbayes {

/// Key order is meaningful for environments (realization order follows the
/// "likelihoods" object), so everything rides on ordered_json.
using json = nlohmann::ordered_json;

/// A self-contained experiment: environment, updating rule, and optionally a
/// decision problem and a target loss for exploit construction.
struct Scenario {
    Environment env;
    ScenarioRule rule;
    std::optional<DecisionProblem> dp;
    std::optional<double> target_loss;
};

json to_json(const Environment& env);
json to_json(const ScenarioRule& rule);
json to_json(const DecisionProblem& dp);
json to_json(const Hyperplane& plane);
json to_json(const HullCertificate& cert);
json to_json(const ExploitContract& contract, const Environment& env);
json to_json(const Scenario& scenario);
json to_json(const TrialReport& report);
json to_json(const SimulationResult& result);

/// Structural problems (missing keys, wrong types) throw ParseError naming
/// the offending field; semantic problems keep their domain error codes.
Environment environment_from_json(const json& j);
ScenarioRule scenario_rule_from_json(const json& j);
DecisionProblem decision_problem_from_json(const json& j);
Hyperplane hyperplane_from_json(const json& j);
Scenario scenario_from_json(const json& j);

/// Reads and fully validates a scenario file: parse, then check that every
/// cross-reference (rule labels, payoff dimensions) resolves against the
/// environment.
Scenario load_scenario(const std::string& path);

} // namespace nonbayes
