#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nonbayes/belief.hpp"
#include "nonbayes/rules.hpp"

namespace nonbayes {

/// A menu entry with one payoff per state, u(a, theta).
struct Action {
    std::string label;
    Vec payoffs;

    Action(std::string label_in, Vec payoffs_in);
};

/// A finite menu of actions. The outside option (payoff 0 in every state) is
/// always available and never listed.
struct DecisionProblem {
    std::vector<Action> actions;

    DecisionProblem() = default;
    explicit DecisionProblem(std::vector<Action> actions_in); // unique labels
};

/// Expected payoff of the action at the given belief: payoffs . belief.
double action_value(const Action& action, const Belief& belief);

/// The agent maximizes expected value at her distorted belief; the principal
/// breaks ties (within 1e-12 of the maximum) in his own favor by minimizing
/// the agent's value at the true posterior `bayes`, then by label order with
/// the outside option last. Returns the chosen action's index, or nullopt for
/// the outside option.
std::optional<std::size_t> agent_best_response(const DecisionProblem& dp,
                                               const Belief& distorted,
                                               const Belief& bayes);

/// One row of the agent's complete contingent plan.
struct ChoiceEntry {
    std::size_t realization = 0;
    std::size_t outcome = 0;               // support-point index within s
    double probability = 0.0;              // p_s times the outcome weight
    std::optional<std::size_t> action;     // nullopt = outside option
    double distorted_value = 0.0;          // value at the believed posterior
    double true_value = 0.0;               // value at the Bayesian posterior x_s
};

/// Choices for every (realization, support point) pair, in model order.
using AgentChoice = std::vector<ChoiceEntry>;

AgentChoice agent_choices(const Environment& env, const ScenarioRule& rule,
                          const DecisionProblem& dp);

/// The agent's ex ante expected payoff: the probability-weighted sum of
/// true_value over her contingent plan (states, realizations, and rule
/// randomness integrated out).
double ex_ante_payoff(const Environment& env, const ScenarioRule& rule,
                      const DecisionProblem& dp);

} // namespace nonbayes
