#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nonbayes/belief.hpp"

namespace nonbayes {

/// Per-realization scalar parameter (e.g. a shrink weight). Values may be
/// given per label, with an optional fallback for labels not listed.
struct PerRealization {
    std::map<std::string, double> by_label;
    std::optional<double> fallback;

    PerRealization() = default;
    explicit PerRealization(double everywhere) : fallback(everywhere) {}
    explicit PerRealization(std::map<std::string, double> m)
        : by_label(std::move(m)) {}

    /// Throws MissingRealization when the label has no value and no fallback.
    double at(const std::string& label) const;
};

// ---- Deterministic updating rules ------------------------------------------

struct BayesianRule {};

/// x-hat = lambda * mu + (1 - lambda) * x_s, lambda in [0,1].
struct ShrinkRule {
    PerRealization lambda;
};

/// x-hat = mu + (1 + lambda)(x_s - mu), lambda >= 0. Overshooting off the
/// simplex is an error (LeftSimplex), never a clamp.
struct StretchRule {
    PerRealization lambda;
};

/// Two-state power distortion x -> x^beta / (x^beta + (1-x)^beta).
struct GretherTwoStateRule {
    double beta = 1.0;
};

/// Coordinatewise power-normalization x-hat(theta) proportional to
/// x_s(theta)^beta. Multi-state generalization of the two-state rule above.
struct PowerDistortionRule {
    double beta = 1.0;
};

/// Bayes updating from a wrong full-support prior nu instead of mu.
struct MisspecifiedPriorRule {
    Belief perceived_prior;
};

/// Smallest shrink toward the prior that keeps every coordinate of the
/// posterior inside [epsilon, 1 - epsilon].
struct ExtremeBeliefAversionRule {
    double epsilon = 0.0;
};

/// Explicit posterior per realization label, for hand-built scenarios and
/// brute-force comparisons.
struct TabularRule {
    std::map<std::string, Belief> posteriors;
};

using DeterministicRule =
    std::variant<BayesianRule, ShrinkRule, StretchRule, GretherTwoStateRule,
                 PowerDistortionRule, MisspecifiedPriorRule,
                 ExtremeBeliefAversionRule, TabularRule>;

/// Short kind tag ("bayes", "shrink", ...) used in reports and JSON.
std::string rule_kind(const DeterministicRule& rule);

// ---- Random rules -----------------------------------------------------------

struct WeightedBelief {
    Belief posterior;
    double probability = 0.0;
};

/// Finite-support random posterior per realization. Support lists validate
/// on insertion: nonempty, probabilities in [0,1] summing to 1 within 1e-10.
class RandomRule {
public:
    void set(const std::string& label, std::vector<WeightedBelief> outcomes);
    bool has(const std::string& label) const;
    const std::vector<WeightedBelief>& at(const std::string& label) const;
    const std::map<std::string, std::vector<WeightedBelief>>& support() const {
        return support_;
    }

private:
    std::map<std::string, std::vector<WeightedBelief>> support_;
};

/// Misreads realization s with probability 1 - q_s, updating as if the
/// error-target realization had occurred instead. Targets default to the
/// prior-confirming realization (the other realization whose Bayesian
/// posterior puts the most mass on the prior's modal state).
struct ConfirmatoryBias {
    PerRealization q{1.0}; // probability each realization is read correctly
    std::map<std::string, std::string> error_target;
};

/// The realization a confirmatory agent mistakes s for when no explicit
/// target is configured.
std::size_t default_error_target(const Environment& env, std::size_t s);

/// Expands a confirmatory bias into its equivalent RandomRule over the
/// environment's Bayesian posteriors.
RandomRule compile_confirmatory(const ConfirmatoryBias& bias,
                                const Environment& env);

/// Any rule a scenario can carry.
using ScenarioRule = std::variant<DeterministicRule, RandomRule, ConfirmatoryBias>;

// ---- Application ------------------------------------------------------------

/// Checks parameter ranges and label cross-references against an environment.
void validate_rule(const DeterministicRule& rule, const Environment& env);

/// The distorted posterior x-hat_s for a deterministic rule.
Belief apply_deterministic(const DeterministicRule& rule, const Environment& env,
                           std::size_t s);

/// All distorted posteriors in realization order.
std::vector<Belief> distorted_posteriors(const DeterministicRule& rule,
                                         const Environment& env);

/// The stored finite distribution for realization s.
const std::vector<WeightedBelief>& apply_random(const RandomRule& rule,
                                                const Environment& env,
                                                std::size_t s);

/// Per-realization outcome lists for any rule kind: deterministic rules give
/// a single unit-mass outcome, random rules their stored support, and a
/// confirmatory bias its compiled support.
std::vector<std::vector<WeightedBelief>> outcome_system(const ScenarioRule& rule,
                                                        const Environment& env);

// ---- Free-standing distortion formulas ---------------------------------------

/// Two-state closed form x^beta / (x^beta + (1-x)^beta) on both coordinates.
Belief grether_two_state(const Belief& x, double beta);

/// Coordinatewise power-normalization for any dimension.
Belief power_distortion(const Belief& x, double beta);

// ---- Reaction classification --------------------------------------------------

enum class ReactionTag {
    Bayesian,     // x-hat equals the Bayesian posterior
    Under,        // on the segment [x_s, mu]
    Over,         // on the line, overshooting past x_s away from the prior
    SkipsPrior,   // on the line, beyond the prior
    OutsideHull,  // off the line and outside conv of all Bayesian posteriors
    Degenerate,   // uninformative realization (x_s = mu) distorted elsewhere
    Unclassified, // off the line but inside the hull
};

const char* reaction_name(ReactionTag tag);

/// lambda's meaning depends on the tag: Under stores the shrink weight in
/// [0,1]; Over stores the parameter of x_s = lambda*mu + (1-lambda)*x-hat in
/// (0,1); SkipsPrior stores the raw segment coordinate (> 1). residual is the
/// distance from the mu--x_s line (0 when the tag came from the line fit).
struct Reaction {
    ReactionTag tag = ReactionTag::Bayesian;
    std::optional<double> lambda;
    double residual = 0.0;
};

/// Classifies one distorted posterior against realization s's geometry.
Reaction classify_reaction(const Environment& env, const Belief& posterior,
                           std::size_t s);

/// True iff every realization classifies as Bayesian or Under.
bool underreacts_to_information(const Environment& env,
                                const DeterministicRule& rule);

// ---- Systematic-distortion check ----------------------------------------------

struct SystematicReport {
    std::size_t trials = 0;
    std::size_t mismatches = 0;
    double worst_gap = 0.0; // largest output difference over shared posteriors
    bool systematic() const { return mismatches == 0; }
};

/// Samples environment pairs engineered to share a Bayesian posterior at one
/// realization (labels "a"/"b") and checks the rule maps the shared posterior
/// to the same distorted posterior in both. Rules whose output depends on
/// more than x_s (shrink, stretch, misspecified prior, extreme belief
/// aversion) fail this in general; power-type rules pass.
SystematicReport systematic_consistency_check(const DeterministicRule& rule,
                                              std::size_t trials,
                                              std::uint64_t seed);

} // namespace nonbayes
