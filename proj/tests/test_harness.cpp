#include <cmath>

#include "doctest.h"
#include "nonbayes/exploit.hpp"
#include "nonbayes/harness.hpp"
#include "support.hpp"

using namespace nonbayes;
using testsupport::binary_symmetric;
using testsupport::code_of;

namespace {

constexpr std::uint64_t kSeed = 20260825;

} // namespace

TEST_SUITE_BEGIN("harness");

TEST_CASE("random environments respect the standing assumptions") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const Environment env = random_environment(4, 3, seed);
        CHECK(env.states() == 4);
        CHECK(env.realizations() == 3);
        for (std::size_t theta = 0; theta < 4; ++theta)
            CHECK(env.prior[theta] >= 0.01 - 1e-12);
        for (std::size_t s = 0; s < 3; ++s)
            CHECK(realization_marginal(env, s) >= 0.01 - 1e-12);
        CHECK(posterior_system(env).independent);
    }
}

TEST_CASE("random environments are reproducible") {
    const Environment a = random_environment(3, 2, 17);
    const Environment b = random_environment(3, 2, 17);
    CHECK(a.prior.coords() == b.prior.coords());
    for (std::size_t s = 0; s < 2; ++s)
        CHECK(a.signals.row(s) == b.signals.row(s));
}

TEST_CASE("environment sampler rejects impossible shapes") {
    CHECK(code_of([] { random_environment(1, 1, 0); }) ==
          Errc::InvalidParameter);
    CHECK(code_of([] { random_environment(4, 5, 0); }) ==
          Errc::InvalidParameter);
    CHECK(code_of([] { random_environment(9, 2, 0); }) ==
          Errc::InvalidParameter);
}

TEST_CASE("random decision problems honor their envelope") {
    const DecisionProblem dp = random_decision_problem(3, 4, 2.5, 23);
    REQUIRE(dp.actions.size() == 4);
    CHECK(dp.actions[0].label == "a1");
    CHECK(dp.actions[3].label == "a4");
    for (const Action& a : dp.actions) {
        REQUIRE(a.payoffs.size() == 3);
        for (double u : a.payoffs) {
            CHECK(u >= -2.5);
            CHECK(u <= 2.5);
        }
    }
    CHECK(code_of([] { random_decision_problem(3, 0, 1.0, 0); }) ==
          Errc::InvalidParameter);
    CHECK(code_of([] { random_decision_problem(3, 2, 0.0, 0); }) ==
          Errc::InvalidParameter);
}

TEST_CASE("property suites pass at smoke scale with a pinned seed") {
    const TrialReport plaus = bayes_plausibility_suite(100, kSeed);
    CHECK(plaus.passed());
    CHECK(plaus.extreme <= 1e-10);

    const TrialReport safe = theorem1_suite(100, kSeed);
    CHECK(safe.passed());
    CHECK(safe.extreme >= -1e-9);

    const TrialReport exact = lemma1_suite(25, kSeed);
    CHECK(exact.passed());

    const TrialReport agree = prop2_bruteforce_check(25, kSeed);
    CHECK(agree.passed());

    CHECK(pruning_suite(50, kSeed).passed());
    CHECK(confirmatory_suite(25, kSeed).passed());
    CHECK(grether_reduction_suite(100, kSeed).passed());
    CHECK(random_segment_safety_suite(50, kSeed).passed());
    CHECK(geometry_oracle_suite(10, kSeed).passed());
}

TEST_CASE("suite reports are deterministic given the seed") {
    const TrialReport a = theorem1_suite(50, 31);
    const TrialReport b = theorem1_suite(50, 31);
    CHECK(a.trials == b.trials);
    CHECK(a.extreme == b.extreme);
    CHECK(a.failures.size() == b.failures.size());
    const TrialReport c = lemma1_suite(10, 5);
    const TrialReport d = lemma1_suite(10, 5);
    CHECK(c.extreme == d.extreme);
    CHECK(c.resamples == d.resamples);
}

TEST_CASE("monte carlo batch matches analytic values at smoke scale") {
    const TrialReport mc = monte_carlo_suite(20, 20000, kSeed);
    CHECK(mc.trials == 20);
    CHECK(mc.passed());
}

TEST_CASE("the self-test plants a counterexample and must catch it") {
    const TrialReport report = theorem1_selftest(kSeed);
    CHECK_FALSE(report.passed());
    REQUIRE(report.failures.size() == 1);
    // The planted contract drives the payoff to exactly -1.
    CHECK(report.extreme == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("simulation estimates agree with the analytic payoff") {
    const Environment env = binary_symmetric();
    const ScenarioRule rule{DeterministicRule{BayesianRule{}}};
    const DecisionProblem dp({Action("bet", {1.0, -1.0})});
    const SimulationResult sim = simulate_payoff(env, rule, dp, 40000, 7);
    CHECK(sim.trials == 40000);
    CHECK(sim.analytic == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(sim.consistent());
    CHECK(sim.standard_error > 0.0);
    // Same seed, same estimate; different seed, almost surely different.
    const SimulationResult again = simulate_payoff(env, rule, dp, 40000, 7);
    CHECK(again.empirical_mean == sim.empirical_mean);
    const SimulationResult other = simulate_payoff(env, rule, dp, 40000, 8);
    CHECK(other.empirical_mean != sim.empirical_mean);
}

TEST_CASE("simulation refuses an empty sample") {
    const Environment env = binary_symmetric();
    const ScenarioRule rule{DeterministicRule{BayesianRule{}}};
    const DecisionProblem dp({Action("bet", {1.0, -1.0})});
    CHECK(code_of([&] { simulate_payoff(env, rule, dp, 0, 7); }) ==
          Errc::InvalidParameter);
}

TEST_CASE("consistency window is four standard errors") {
    SimulationResult r;
    r.trials = 100;
    r.analytic = 0.0;
    r.standard_error = 0.01;
    r.empirical_mean = 0.039;
    CHECK(r.consistent());
    r.empirical_mean = 0.041;
    CHECK_FALSE(r.consistent());
}

TEST_SUITE_END();
