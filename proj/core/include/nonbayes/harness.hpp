#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nonbayes/belief.hpp"
#include "nonbayes/decision.hpp"
#include "nonbayes/rules.hpp"

namespace nonbayes {

/// One failed trial: which substream produced it and what went wrong.
struct TrialFailure {
    std::uint64_t trial = 0;
    std::string summary;
};

/// Outcome of a randomized property suite. `failures` empty means the suite
/// passed (the Monte Carlo suite tolerates its documented one-in-twenty
/// excursion before recording anything). `extreme` is the suite's worst
/// observed value: minimum payoff, maximum error, and so on per suite.
struct TrialReport {
    std::string suite;
    std::size_t trials = 0;
    std::size_t resamples = 0;  // draws rejected for conditioning reasons
    std::size_t borderline = 0; // near-indifference samples excluded
    std::vector<TrialFailure> failures;
    double extreme = 0.0;
    bool passed() const { return failures.empty(); }
};

/// Samples an environment within the standing assumptions: interior prior
/// (mass >= 0.01), marginals >= 0.01, affinely independent posteriors at
/// pivot 1e-6. Realizations are labeled "s1".."sm". Requires 2 <= m <= n <= 8;
/// throws SamplingExhausted after 10,000 rejections.
Environment random_environment(std::size_t n, std::size_t m,
                               std::uint64_t seed);

/// k actions labeled "a1".."ak" with payoffs uniform in [-range, range].
DecisionProblem random_decision_problem(std::size_t n, std::size_t k,
                                        double range, std::uint64_t seed);

/// Underreaction is never exploitable: random (environment, shrink rule,
/// decision problem) triples must never earn less than the outside option.
TrialReport theorem1_suite(std::size_t trials, std::uint64_t seed);

/// Hull-escaping posteriors are exploitable exactly: random stretch rules
/// that leave the hull, contracts for K in {0.5, 1, 10, 1000}, payoff -K
/// within 1e-9 * max(1, K).
TrialReport lemma1_suite(std::size_t trials, std::uint64_t seed);

/// Binary-signal equivalence: the exploitability verdict must agree with an
/// independent brute-force search for a negative-payoff single action over
/// the gauge circle (10,000 angles plus refinement near taker-set changes).
/// Samples within 1e-6 of indifference are excluded and counted.
TrialReport prop2_bruteforce_check(std::size_t trials, std::uint64_t seed);

/// Removing never-helpful actions cannot raise an underreacting agent's
/// payoff.
TrialReport pruning_suite(std::size_t trials, std::uint64_t seed);

/// Any misreading probability yields an exact -K contract; all-correct
/// controls must refuse with the no-misreading error.
TrialReport confirmatory_suite(std::size_t trials, std::uint64_t seed);

/// Marginal-weighted Bayesian posteriors average back to the prior.
TrialReport bayes_plausibility_suite(std::size_t trials, std::uint64_t seed);

/// The two-state closed form matches the coordinatewise power rule to 1e-12
/// (and is the identity at beta = 1 to 1e-15).
TrialReport grether_reduction_suite(std::size_t trials, std::uint64_t seed);

/// Random rules supported on the prior-posterior segments are safe.
TrialReport random_segment_safety_suite(std::size_t trials,
                                        std::uint64_t seed);

/// Hull membership against an interval check (2 states) and a dense
/// barycentric grid (3 states, step 1e-3, slack 2e-3).
TrialReport geometry_oracle_suite(std::size_t trials, std::uint64_t seed);

/// Empirical means of fixed scenarios vs. the analytic payoff; one
/// 4-standard-error excursion across the batch is tolerated.
TrialReport monte_carlo_suite(std::size_t scenarios, std::size_t samples,
                              std::uint64_t seed);

/// Mutation check of theorem1_suite's assertion: plants an overreacting rule
/// together with its own exploit contract and reports the (expected)
/// violation. A report with no failures means the harness is broken.
TrialReport theorem1_selftest(std::uint64_t seed);

/// Monte Carlo estimate of the ex ante payoff by sampling the full timeline:
/// state, realization, rule randomness, choice, realized payoff.
struct SimulationResult {
    std::size_t trials = 0;
    double empirical_mean = 0.0;
    double standard_error = 0.0;
    double analytic = 0.0;
    bool consistent() const {
        const double slack = 4.0 * standard_error + 1e-12;
        return empirical_mean >= analytic - slack &&
               empirical_mean <= analytic + slack;
    }
};

SimulationResult simulate_payoff(const Environment& env, const ScenarioRule& rule,
                                 const DecisionProblem& dp, std::size_t trials,
                                 std::uint64_t seed);

} // namespace nonbayes
