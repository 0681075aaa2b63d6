#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nonbayes/decision.hpp"
#include "nonbayes/geometry.hpp"
#include "nonbayes/rules.hpp"

namespace nonbayes {

/// A constructed decision problem that drives the agent's ex ante expected
/// payoff to exactly -target_loss, together with the geometric witness it was
/// built from.
struct ExploitContract {
    DecisionProblem problem;
    double target_loss = 0.0;
    std::vector<std::size_t> predicted_takers; // realization indices
    double achieved_payoff = 0.0;              // recomputed independently
    Hyperplane certificate;
};

/// Single-action contract for a distorted posterior that escapes the convex
/// hull of the Bayesian posteriors: payoffs lambda * (alpha_theta - beta)
/// along a strict separator. Every taker's true posterior sits on the far
/// side, so each taker loses; lambda scales the total to -K.
ExploitContract build_overreaction_exploit(const Environment& env,
                                           const DeterministicRule& rule,
                                           std::size_t s, double target_loss);

/// Binary-signal variant for posteriors that stay inside the hull but leave
/// the prior--posterior segment (skipping the prior): separates x-hat_s from
/// conv{x_s, mu} instead of the full hull.
ExploitContract build_skip_exploit(const Environment& env,
                                   const DeterministicRule& rule, std::size_t s,
                                   double target_loss);

/// Contract against a confirmatory agent with some q_s < 1: a single action
/// priced on the hyperplane exposing the misread-target posterior. Correct
/// readers of the target break even (or gain epsilon); misreaders take the
/// same action while their true posterior sits strictly below the plane.
/// epsilon = 0 relies on principal-preferred tie-breaking; epsilon > 0 makes
/// the take strict and must stay below an internally computed cap.
ExploitContract build_confirmatory_exploit(const Environment& env,
                                           const ConfirmatoryBias& bias,
                                           double target_loss,
                                           double epsilon = 0.0);

enum class Verdict { Exploitable, Unexploitable, Unknown };
enum class ExploitRecipe { HullEscape, BinarySkip, Confirmatory };

const char* verdict_name(Verdict v);
const char* recipe_name(ExploitRecipe r);

struct ExploitabilityStatus {
    Verdict verdict = Verdict::Unknown;
    std::optional<ExploitRecipe> recipe;    // when Exploitable
    std::optional<std::size_t> realization; // witnessing realization
    std::string reason;
};

/// The decidable cases: any hull-escaping posterior is exploitable; full
/// underreaction is safe; a binary signal without underreaction is
/// exploitable via the prior-skipping construction; everything else is
/// honestly Unknown.
ExploitabilityStatus exploitability_status(const Environment& env,
                                           const DeterministicRule& rule);

/// Extension covering random rules: a support point outside the hull is
/// exploitable by the same separator argument; supports confined to the
/// prior--posterior segments are safe; a confirmatory bias with any
/// misreading is exploitable.
ExploitabilityStatus exploitability_status(const Environment& env,
                                           const ScenarioRule& rule);

/// Dispatches to the construction named by exploitability_status. Throws
/// NotOutsideHull when the verdict is Unexploitable or Unknown.
ExploitContract build_exploit(const Environment& env, const ScenarioRule& rule,
                              double target_loss, double epsilon = 0.0);

/// Removes every action that would be attractive at some type's Bayesian
/// posterior (value > 1e-12) while being weakly unattractive at her distorted
/// posterior (value <= 1e-12). Such actions never help an underreacting
/// agent, so pruning can only lower her payoff.
DecisionProblem prune_dagger_actions(const Environment& env,
                                     const DeterministicRule& rule,
                                     const DecisionProblem& dp);

} // namespace nonbayes
