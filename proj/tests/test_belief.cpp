#include <cmath>

#include "doctest.h"
#include "nonbayes/belief.hpp"
#include "nonbayes/errors.hpp"
#include "support.hpp"

using namespace nonbayes;
using testsupport::binary_symmetric;
using testsupport::code_of;
using testsupport::ternary_peaked;

TEST_SUITE_BEGIN("belief");

TEST_CASE("belief construction validates mass and range") {
    CHECK_NOTHROW(Belief({0.25, 0.75}));
    CHECK(code_of([] { Belief({0.5, 0.6}); }) == Errc::NotADistribution);
    CHECK(code_of([] { Belief({1.2, -0.2}); }) == Errc::NotADistribution);
    CHECK(code_of([] { Belief({1.0}); }) == Errc::NotADistribution);
}

TEST_CASE("belief clamps slack-sized noise") {
    const Belief b({1.0 + 5e-13, -5e-13});
    CHECK(b[0] == 1.0);
    CHECK(b[1] == 0.0);
    CHECK_FALSE(b.interior());
    CHECK(Belief({0.3, 0.7}).interior(0.2));
}

TEST_CASE("signal model validates per-state columns") {
    CHECK_NOTHROW(SignalModel({"a", "b"}, {{0.7, 0.1}, {0.3, 0.9}}));
    // Column for state 0 sums to 0.9.
    CHECK(code_of([] {
              SignalModel({"a", "b"}, {{0.6, 0.1}, {0.3, 0.9}});
          }) == Errc::RowNotDistribution);
    CHECK(code_of([] {
              SignalModel({"a"}, {{0.6, 0.1}, {0.3, 0.9}});
          }) == Errc::DimensionMismatch);
}

TEST_CASE("label lookup") {
    const Environment env = binary_symmetric();
    CHECK(env.signals.index_of("H") == 0);
    CHECK(env.signals.index_of("L") == 1);
    CHECK(code_of([&] { env.signals.index_of("M"); }) ==
          Errc::MissingRealization);
    CHECK(env.signals.label(1) == "L");
    CHECK(env.signals.likelihood(0, 0) == 0.8);
}

TEST_CASE("raw environment factory names the violated assumption") {
    const std::vector<std::string> labels{"H", "L"};
    const Matrix rows{{0.8, 0.2}, {0.2, 0.8}};
    CHECK(code_of([&] {
              validate_environment({0.6, 0.6}, labels, rows);
          }) == Errc::NonSimplexPrior);
    CHECK(code_of([&] {
              validate_environment({1.0, 0.0}, labels, rows);
          }) == Errc::ZeroSupportPrior);
    CHECK(code_of([&] {
              validate_environment({0.5, 0.5}, labels, {{0.6, 0.2}, {0.3, 0.8}});
          }) == Errc::RowNotDistribution);
    // Realization "B" can never occur under this prior/kernel pair.
    CHECK(code_of([&] {
              validate_environment({0.5, 0.5}, {"A", "B"},
                                   {{1.0, 1.0}, {0.0, 0.0}});
          }) == Errc::ZeroProbabilityRealization);
    CHECK_NOTHROW(validate_environment({0.5, 0.5}, labels, rows));
}

TEST_CASE("bayes posterior and marginal, two states") {
    const Environment env = binary_symmetric();
    CHECK(realization_marginal(env, 0) == doctest::Approx(0.5).epsilon(1e-15));
    const Belief xH = bayes_posterior(env, 0);
    CHECK(xH[0] == doctest::Approx(0.8).epsilon(1e-15));
    const Belief xL = bayes_posterior(env, 1);
    CHECK(xL[0] == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("bayes posterior, three states") {
    const Environment env = ternary_peaked();
    const Belief x1 = bayes_posterior(env, 0);
    CHECK(x1[0] == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(x1[1] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(x1[2] == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("posterior system satisfies plausibility by construction") {
    const Environment env = ternary_peaked();
    const PosteriorSystem sys = posterior_system(env);
    REQUIRE(sys.posteriors.size() == 3);
    CHECK(sys.independent);
    double mass = 0.0;
    Vec recon(3, 0.0);
    for (std::size_t s = 0; s < 3; ++s) {
        mass += sys.marginals[s];
        for (std::size_t theta = 0; theta < 3; ++theta)
            recon[theta] += sys.marginals[s] * sys.posteriors[s][theta];
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-14));
    for (std::size_t theta = 0; theta < 3; ++theta)
        CHECK(recon[theta] ==
              doctest::Approx(env.prior[theta]).epsilon(1e-12));
}

TEST_CASE("dependent posteriors are reported as such") {
    // Three realizations over two states: posteriors are collinear.
    const Environment env(Belief({0.5, 0.5}),
                          SignalModel({"a", "b", "c"},
                                      {{0.5, 0.1}, {0.3, 0.3}, {0.2, 0.6}}));
    CHECK_FALSE(posterior_system(env).independent);
}

TEST_SUITE_END();
