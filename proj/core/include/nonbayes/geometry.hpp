#pragma once

#include <cstddef>
#include <vector>

#include "nonbayes/belief.hpp"
#include "nonbayes/numeric.hpp"

namespace nonbayes {

/// Hyperplane {x : alpha . x = beta} through belief space. The canonical
/// gauge used everywhere in this library is sum(alpha) = 0 and |alpha|_2 = 1,
/// which pins down (alpha, beta) uniquely up to sign on the simplex's
/// affine hull.
struct Hyperplane {
    Vec alpha;
    double beta = 0.0;

    /// alpha . x - beta (positive side / negative side of the plane).
    double evaluate(const Vec& x) const;
    double evaluate(const Belief& x) const;

    /// Returns the same plane re-expressed in the canonical gauge. Throws
    /// InvalidParameter when alpha is (numerically) constant, because such a
    /// plane is parallel to the simplex and cannot separate beliefs.
    Hyperplane gauged(double tol = 1e-12) const;
};

/// Nearest point of conv(points) to a query, with the convex weights that
/// realize it.
struct Projection {
    Vec point;       // argmin over the hull
    double distance = 0.0;
    Vec weights;     // convex weights over the input points
};

/// Outcome of a hull-membership test. Inside certificates carry convex
/// weights reconstructing the query; Outside certificates carry a separating
/// hyperplane with a symmetric margin: alpha . query - beta >= margin and
/// alpha . p - beta <= -margin for every generator p.
struct HullCertificate {
    enum class Side { Inside, Outside };
    Side side = Side::Inside;
    Vec weights;          // Inside only
    Hyperplane separator; // Outside only
    double margin = 0.0;  // Outside only
    Projection projection;
};

/// True when the points are affinely independent (differences from the first
/// point have full rank at the given pivot threshold).
bool affinely_independent(const std::vector<Belief>& points,
                          double pivot_tol = 1e-9);

/// Exact projection of `query` onto conv(points) by enumerating faces
/// (subsets of generators) and solving each equality-constrained least
/// squares problem. Intended for the small point sets this library works
/// with (the subset count is exponential in the number of generators).
Projection project_to_hull(const Vec& query, const std::vector<Belief>& points);

/// Membership test with certificate. Queries within 1e-9 of the hull count
/// as Inside.
HullCertificate hull_membership(const Belief& query,
                                const std::vector<Belief>& points);

/// For affinely independent generators, the face-exposing hyperplane that
/// touches points[index] and keeps every other generator strictly on the
/// negative side: alpha . points[index] = beta, alpha . points[j] < beta.
/// Returned in the canonical gauge. Throws AffineDependence when the system
/// is degenerate.
Hyperplane exposing_hyperplane(const std::vector<Belief>& points,
                               std::size_t index);

} // namespace nonbayes
