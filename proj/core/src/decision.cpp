#include "nonbayes/decision.hpp"

#include <cmath>

#include "nonbayes/errors.hpp"

namespace nonbayes {

namespace {

constexpr double kTieWindow = 1e-12;

} // namespace

Action::Action(std::string label_in, Vec payoffs_in)
    : label(std::move(label_in)), payoffs(std::move(payoffs_in)) {
    if (payoffs.empty())
        throw Error(Errc::InvalidParameter,
                    "action '" + label + "' has no payoffs");
    for (double u : payoffs)
        if (!std::isfinite(u))
            throw Error(Errc::InvalidParameter,
                        "non-finite payoff in action '" + label + "'");
}

DecisionProblem::DecisionProblem(std::vector<Action> actions_in)
    : actions(std::move(actions_in)) {
    for (std::size_t i = 0; i < actions.size(); ++i)
        for (std::size_t j = i + 1; j < actions.size(); ++j)
            if (actions[i].label == actions[j].label)
                throw Error(Errc::InvalidParameter,
                            "duplicate action label '" + actions[i].label + "'");
}

double action_value(const Action& action, const Belief& belief) {
    if (action.payoffs.size() != belief.size())
        throw Error(Errc::DimensionMismatch,
                    "action '" + action.label + "' has " +
                        std::to_string(action.payoffs.size()) +
                        " payoffs for a " + std::to_string(belief.size()) +
                        "-state belief");
    return dot(action.payoffs, belief.coords());
}

std::optional<std::size_t> agent_best_response(const DecisionProblem& dp,
                                               const Belief& distorted,
                                               const Belief& bayes) {
    double max_distorted = 0.0; // the outside option's value
    std::vector<double> values(dp.actions.size());
    for (std::size_t i = 0; i < dp.actions.size(); ++i) {
        values[i] = action_value(dp.actions[i], distorted);
        max_distorted = std::max(max_distorted, values[i]);
    }

    std::optional<std::size_t> best;
    double best_bayes = 0.0;
    for (std::size_t i = 0; i < dp.actions.size(); ++i) {
        if (values[i] < max_distorted - kTieWindow) continue;
        const double bv = action_value(dp.actions[i], bayes);
        if (!best || bv < best_bayes ||
            (bv == best_bayes && dp.actions[i].label < dp.actions[*best].label)) {
            best = i;
            best_bayes = bv;
        }
    }
    if (!best) return std::nullopt; // no action competes with the outside option
    // The outside option only wins when it is both agent-optimal and strictly
    // better for the principal; exact ties go to the action.
    if (0.0 >= max_distorted - kTieWindow && best_bayes > 0.0)
        return std::nullopt;
    return best;
}

AgentChoice agent_choices(const Environment& env, const ScenarioRule& rule,
                          const DecisionProblem& dp) {
    for (const auto& a : dp.actions)
        if (a.payoffs.size() != env.states())
            throw Error(Errc::DimensionMismatch,
                        "action '" + a.label + "' dimension mismatch");

    const auto outcomes = outcome_system(rule, env);
    AgentChoice plan;
    for (std::size_t s = 0; s < env.realizations(); ++s) {
        const double p_s = realization_marginal(env, s);
        const Belief x_s = bayes_posterior(env, s);
        for (std::size_t k = 0; k < outcomes[s].size(); ++k) {
            const WeightedBelief& o = outcomes[s][k];
            ChoiceEntry entry;
            entry.realization = s;
            entry.outcome = k;
            entry.probability = p_s * o.probability;
            entry.action = agent_best_response(dp, o.posterior, x_s);
            if (entry.action) {
                entry.distorted_value =
                    action_value(dp.actions[*entry.action], o.posterior);
                entry.true_value = action_value(dp.actions[*entry.action], x_s);
            }
            plan.push_back(std::move(entry));
        }
    }
    return plan;
}

double ex_ante_payoff(const Environment& env, const ScenarioRule& rule,
                      const DecisionProblem& dp) {
    double total = 0.0;
    for (const ChoiceEntry& entry : agent_choices(env, rule, dp))
        total += entry.probability * entry.true_value;
    return total;
}

} // namespace nonbayes
