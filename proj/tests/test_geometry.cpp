#include <cmath>

#include "doctest.h"
#include "nonbayes/geometry.hpp"
#include "support.hpp"

using namespace nonbayes;
using testsupport::code_of;

namespace {

const double kRoot2 = std::sqrt(2.0);

std::vector<Belief> binary_generators() {
    return {Belief({0.8, 0.2}), Belief({0.2, 0.8})};
}

std::vector<Belief> ternary_generators() {
    return {Belief({0.6, 0.2, 0.2}), Belief({0.2, 0.6, 0.2}),
            Belief({0.2, 0.2, 0.6})};
}

} // namespace

TEST_SUITE_BEGIN("geometry");

TEST_CASE("hyperplane evaluation and canonical gauge") {
    const Hyperplane raw{{2.0, 0.0}, 1.0};
    const Hyperplane g = raw.gauged();
    CHECK(g.alpha[0] == doctest::Approx(1.0 / kRoot2).epsilon(1e-14));
    CHECK(g.alpha[1] == doctest::Approx(-1.0 / kRoot2).epsilon(1e-14));
    // The gauged plane crosses the simplex where the raw one did: x0 = 0.5.
    CHECK(g.evaluate(Vec{0.5, 0.5}) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(g.evaluate(Belief({0.8, 0.2})) > 0.0);
    // A constant normal is parallel to the simplex and cannot be gauged.
    CHECK(code_of([] { Hyperplane{{1.0, 1.0}, 0.5}.gauged(); }) ==
          Errc::InvalidParameter);
}

TEST_CASE("affine independence") {
    CHECK(affinely_independent(binary_generators()));
    CHECK(affinely_independent({Belief({0.5, 0.5})}));
    CHECK(affinely_independent(ternary_generators()));
    // Any three points on the two-state simplex line are dependent.
    CHECK_FALSE(affinely_independent(
        {Belief({0.8, 0.2}), Belief({0.2, 0.8}), Belief({0.5, 0.5})}));
    CHECK(code_of([] { affinely_independent({}); }) == Errc::EmptyPointSet);
}

TEST_CASE("projection onto an interval hull") {
    const Projection proj =
        project_to_hull({0.9, 0.1}, binary_generators());
    CHECK(proj.distance == doctest::Approx(std::sqrt(0.02)).epsilon(1e-12));
    CHECK(proj.point[0] == doctest::Approx(0.8).epsilon(1e-12));
    REQUIRE(proj.weights.size() == 2);
    CHECK(proj.weights[0] == doctest::Approx(1.0).epsilon(1e-12));
    // Interior query projects onto itself.
    const Projection inside = project_to_hull({0.5, 0.5}, binary_generators());
    CHECK(inside.distance == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("outside certificate carries a symmetric-margin separator") {
    const Belief query({0.9, 0.1});
    const auto gens = binary_generators();
    const HullCertificate cert = hull_membership(query, gens);
    REQUIRE(cert.side == HullCertificate::Side::Outside);
    CHECK(cert.projection.distance ==
          doctest::Approx(std::sqrt(0.02)).epsilon(1e-12));
    CHECK(cert.margin ==
          doctest::Approx(std::sqrt(0.02) / 2.0).epsilon(1e-12));
    CHECK(cert.separator.alpha[0] == doctest::Approx(1.0 / kRoot2).epsilon(1e-12));
    CHECK(cert.separator.beta == doctest::Approx(0.7 / kRoot2).epsilon(1e-12));
    // Query strictly on the positive side, every generator on the negative.
    CHECK(cert.separator.evaluate(query) >= cert.margin - 1e-12);
    for (const Belief& g : gens)
        CHECK(cert.separator.evaluate(g) <= -cert.margin + 1e-12);
}

TEST_CASE("inside certificate reconstructs the query") {
    const Belief query({0.55, 0.45});
    const auto gens = binary_generators();
    const HullCertificate cert = hull_membership(query, gens);
    REQUIRE(cert.side == HullCertificate::Side::Inside);
    REQUIRE(cert.weights.size() == gens.size());
    Vec recon(2, 0.0);
    double mass = 0.0;
    for (std::size_t i = 0; i < gens.size(); ++i) {
        CHECK(cert.weights[i] >= -1e-12);
        mass += cert.weights[i];
        recon = axby(1.0, recon, cert.weights[i], gens[i].coords());
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(l2_dist(recon, query.coords()) <= 1e-9);
}

TEST_CASE("three-state membership") {
    const auto gens = ternary_generators();
    const double third = 1.0 / 3.0;
    CHECK(hull_membership(Belief({third, third, third}), gens).side ==
          HullCertificate::Side::Inside);
    const HullCertificate out =
        hull_membership(Belief({0.9, 0.05, 0.05}), gens);
    REQUIRE(out.side == HullCertificate::Side::Outside);
    CHECK(out.margin > 0.0);
    CHECK(out.separator.evaluate(Belief({0.9, 0.05, 0.05})) >=
          out.margin - 1e-12);
    for (const Belief& g : gens)
        CHECK(out.separator.evaluate(g) <= -out.margin + 1e-12);
    // A vertex itself is a member.
    CHECK(hull_membership(gens[0], gens).side == HullCertificate::Side::Inside);
}

TEST_CASE("exposing hyperplane touches its vertex and excludes the rest") {
    const auto gens = binary_generators();
    const Hyperplane expo = exposing_hyperplane(gens, 0);
    CHECK(expo.alpha[0] == doctest::Approx(1.0 / kRoot2).epsilon(1e-12));
    CHECK(expo.beta == doctest::Approx(0.6 / kRoot2).epsilon(1e-12));
    CHECK(expo.evaluate(gens[0]) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(expo.evaluate(gens[1]) < 0.0);

    const auto tern = ternary_generators();
    for (std::size_t i = 0; i < tern.size(); ++i) {
        const Hyperplane plane = exposing_hyperplane(tern, i);
        CHECK(std::abs(plane.evaluate(tern[i])) <= 1e-10);
        for (std::size_t j = 0; j < tern.size(); ++j)
            if (j != i) CHECK(plane.evaluate(tern[j]) < -1e-6);
    }
}

TEST_CASE("exposing hyperplane requires affine independence") {
    CHECK(code_of([] {
              exposing_hyperplane({Belief({0.8, 0.2}), Belief({0.2, 0.8}),
                                   Belief({0.5, 0.5})},
                                  0);
          }) == Errc::AffineDependence);
}

TEST_SUITE_END();
