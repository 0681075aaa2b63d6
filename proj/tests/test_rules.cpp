#include <cmath>

#include "doctest.h"
#include "nonbayes/rules.hpp"
#include "support.hpp"

using namespace nonbayes;
using testsupport::binary_symmetric;
using testsupport::code_of;
using testsupport::ternary_peaked;

TEST_SUITE_BEGIN("rules");

TEST_CASE("per-realization parameters resolve label, then fallback") {
    PerRealization p;
    p.by_label["H"] = 0.3;
    p.fallback = 0.7;
    CHECK(p.at("H") == 0.3);
    CHECK(p.at("L") == 0.7);
    PerRealization bare(std::map<std::string, double>{{"H", 0.3}});
    CHECK(code_of([&] { bare.at("L"); }) == Errc::MissingRealization);
}

TEST_CASE("deterministic rules produce the documented posteriors") {
    const Environment env = binary_symmetric();
    auto first = [&](const DeterministicRule& rule, std::size_t s) {
        return apply_deterministic(rule, env, s)[0];
    };
    CHECK(first(BayesianRule{}, 0) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(first(ShrinkRule{PerRealization{0.5}}, 0) ==
          doctest::Approx(0.65).epsilon(1e-13));
    CHECK(first(StretchRule{PerRealization{0.5}}, 0) ==
          doctest::Approx(0.95).epsilon(1e-13));
    CHECK(first(GretherTwoStateRule{2.0}, 0) ==
          doctest::Approx(16.0 / 17.0).epsilon(1e-14));
    CHECK(first(PowerDistortionRule{2.0}, 0) ==
          doctest::Approx(16.0 / 17.0).epsilon(1e-14));
    // Perceived prior (0.4, 0.6): 0.4*0.8 / (0.4*0.8 + 0.6*0.2) = 8/11.
    CHECK(first(MisspecifiedPriorRule{Belief({0.4, 0.6})}, 0) ==
          doctest::Approx(8.0 / 11.0).epsilon(1e-13));
    TabularRule table;
    table.posteriors.emplace("H", Belief({0.7, 0.3}));
    table.posteriors.emplace("L", Belief({0.2, 0.8}));
    CHECK(first(table, 0) == doctest::Approx(0.7));
}

TEST_CASE("extreme belief aversion shrinks only as far as needed") {
    const Environment env = binary_symmetric();
    // Cap 0.25: x_H = 0.8 must come down to 0.75, the smallest shrink.
    const Belief capped =
        apply_deterministic(ExtremeBeliefAversionRule{0.25}, env, 0);
    CHECK(capped[0] == doctest::Approx(0.75).epsilon(1e-12));
    // Cap 0.1: (0.8, 0.2) already satisfies it, so nothing moves.
    const Belief kept =
        apply_deterministic(ExtremeBeliefAversionRule{0.1}, env, 0);
    CHECK(kept[0] == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("stretch overshoot is an error, not a clamp") {
    const Environment env = binary_symmetric();
    // mu + 4 (x_H - mu) has first coordinate 1.7.
    CHECK(code_of([&] {
              apply_deterministic(StretchRule{PerRealization{3.0}}, env, 0);
          }) == Errc::LeftSimplex);
}

TEST_CASE("validate_rule rejects out-of-range parameters") {
    const Environment binary = binary_symmetric();
    const Environment ternary = ternary_peaked();
    CHECK(code_of([&] {
              validate_rule(ShrinkRule{PerRealization{1.5}}, binary);
          }) == Errc::InvalidParameter);
    CHECK(code_of([&] {
              validate_rule(StretchRule{PerRealization{-0.2}}, binary);
          }) == Errc::InvalidParameter);
    CHECK(code_of([&] {
              validate_rule(GretherTwoStateRule{2.0}, ternary);
          }) == Errc::DimensionMismatch);
    CHECK(code_of([&] {
              validate_rule(ExtremeBeliefAversionRule{0.6}, binary);
          }) == Errc::InvalidParameter);
    CHECK(code_of([&] {
              validate_rule(MisspecifiedPriorRule{Belief({0.4, 0.6})}, ternary);
          }) == Errc::DimensionMismatch);
    TabularRule missing;
    missing.posteriors.emplace("H", Belief({0.7, 0.3}));
    CHECK(code_of([&] { validate_rule(missing, binary); }) ==
          Errc::MissingRealization);
    CHECK_NOTHROW(validate_rule(ShrinkRule{PerRealization{0.5}}, binary));
}

TEST_CASE("rule kinds") {
    CHECK(rule_kind(BayesianRule{}) == "bayes");
    CHECK(rule_kind(StretchRule{}) == "stretch");
    CHECK(rule_kind(TabularRule{}) == "table");
}

TEST_CASE("two-state power form matches the general rule and fixes beta=1") {
    const Belief x({0.8, 0.2});
    const Belief g = grether_two_state(x, 2.0);
    CHECK(g[0] == doctest::Approx(16.0 / 17.0).epsilon(1e-15));
    const Belief p = power_distortion(x, 2.0);
    CHECK(std::abs(g[0] - p[0]) <= 1e-14);
    const Belief id = grether_two_state(x, 1.0);
    CHECK(std::abs(id[0] - 0.8) <= 1e-15);
}

TEST_CASE("random rule support validates on insertion") {
    RandomRule rule;
    rule.set("H", {{Belief({0.8, 0.2}), 0.6}, {Belief({0.5, 0.5}), 0.4}});
    CHECK(rule.has("H"));
    CHECK_FALSE(rule.has("L"));
    CHECK(rule.at("H").size() == 2);
    CHECK(code_of([&] {
              RandomRule bad;
              bad.set("H", {{Belief({0.8, 0.2}), 0.6}});
          }) == Errc::NotADistribution);
    CHECK(code_of([&] {
              RandomRule bad;
              bad.set("H", {});
          }) == Errc::InvalidParameter);
}

TEST_CASE("confirmatory default target confirms the prior's modal state") {
    const Environment env = binary_symmetric();
    CHECK(default_error_target(env, 0) == 1);
    CHECK(default_error_target(env, 1) == 0);
    // With three realizations the target is the one whose posterior puts the
    // most mass on the prior's modal state (ties keep the lowest index).
    const Environment ternary = ternary_peaked();
    CHECK(default_error_target(ternary, 1) == 0);
    CHECK(default_error_target(ternary, 2) == 0);
    CHECK(default_error_target(ternary, 0) == 1);
}

TEST_CASE("confirmatory bias compiles to a random rule over posteriors") {
    const Environment env = binary_symmetric();
    ConfirmatoryBias bias;
    bias.q.by_label["L"] = 0.5;
    bias.q.fallback = 1.0;
    const RandomRule compiled = compile_confirmatory(bias, env);
    const auto& at_H = compiled.at("H");
    REQUIRE(at_H.size() == 1);
    CHECK(at_H[0].probability == doctest::Approx(1.0));
    CHECK(at_H[0].posterior[0] == doctest::Approx(0.8).epsilon(1e-13));
    const auto& at_L = compiled.at("L");
    REQUIRE(at_L.size() == 2);
    // Half the time L is read correctly, half the time it is taken for H.
    double correct = 0.0, misread = 0.0;
    for (const auto& o : at_L) {
        if (std::abs(o.posterior[0] - 0.2) < 1e-12) correct += o.probability;
        if (std::abs(o.posterior[0] - 0.8) < 1e-12) misread += o.probability;
    }
    CHECK(correct == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(misread == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("outcome systems normalize every rule kind") {
    const Environment env = binary_symmetric();
    const auto det =
        outcome_system(ScenarioRule{DeterministicRule{BayesianRule{}}}, env);
    REQUIRE(det.size() == 2);
    REQUIRE(det[0].size() == 1);
    CHECK(det[0][0].probability == 1.0);

    ConfirmatoryBias bias;
    bias.q.by_label["L"] = 0.5;
    bias.q.fallback = 1.0;
    const auto conf = outcome_system(ScenarioRule{bias}, env);
    REQUIRE(conf.size() == 2);
    CHECK(conf[1].size() == 2);
}

TEST_CASE("reaction classification on the prior-posterior line") {
    const Environment env = binary_symmetric();
    Reaction r = classify_reaction(env, Belief({0.8, 0.2}), 0);
    CHECK(r.tag == ReactionTag::Bayesian);
    r = classify_reaction(env, Belief({0.65, 0.35}), 0);
    CHECK(r.tag == ReactionTag::Under);
    CHECK(*r.lambda == doctest::Approx(0.5).epsilon(1e-12));
    r = classify_reaction(env, Belief({0.95, 0.05}), 0);
    CHECK(r.tag == ReactionTag::Over);
    CHECK(*r.lambda == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    r = classify_reaction(env, Belief({0.2, 0.8}), 0);
    CHECK(r.tag == ReactionTag::SkipsPrior);
    CHECK(*r.lambda == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("reaction classification off the line") {
    const Environment env = ternary_peaked();
    // Inside the posterior hull but off the s1 line: honestly unclassified.
    const Reaction off = classify_reaction(env, Belief({0.4, 0.4, 0.2}), 0);
    CHECK(off.tag == ReactionTag::Unclassified);
    CHECK(off.residual > 1e-8);
    // Far outside the hull (no Bayesian posterior puts 0.9 on one state).
    const Reaction out = classify_reaction(env, Belief({0.05, 0.9, 0.05}), 0);
    CHECK(out.tag == ReactionTag::OutsideHull);
}

TEST_CASE("uninformative realizations classify as degenerate when distorted") {
    const Environment flat(
        Belief({0.5, 0.5}),
        SignalModel({"a", "b"}, {{0.5, 0.5}, {0.5, 0.5}}));
    CHECK(classify_reaction(flat, Belief({0.6, 0.4}), 0).tag ==
          ReactionTag::Degenerate);
    CHECK(classify_reaction(flat, Belief({0.5, 0.5}), 0).tag ==
          ReactionTag::Bayesian);
}

TEST_CASE("underreaction aggregates across realizations") {
    const Environment env = binary_symmetric();
    CHECK(underreacts_to_information(env, ShrinkRule{PerRealization{0.5}}));
    CHECK(underreacts_to_information(env, BayesianRule{}));
    CHECK_FALSE(
        underreacts_to_information(env, StretchRule{PerRealization{0.5}}));
}

TEST_CASE("systematic consistency separates posterior-only rules") {
    const SystematicReport power =
        systematic_consistency_check(PowerDistortionRule{2.0}, 200, 99);
    CHECK(power.systematic());
    CHECK(power.trials == 200);
    const SystematicReport shrink =
        systematic_consistency_check(ShrinkRule{PerRealization{0.5}}, 200, 99);
    CHECK_FALSE(shrink.systematic());
    CHECK(shrink.worst_gap > 1e-6);
}

TEST_SUITE_END();
