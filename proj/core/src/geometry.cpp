#include "nonbayes/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nonbayes/errors.hpp"

namespace nonbayes {

namespace {

constexpr double kInsideDistance = 1e-9;
constexpr double kWeightSlack = 1e-12;
constexpr std::size_t kMaxGenerators = 16;

} // namespace

double Hyperplane::evaluate(const Vec& x) const { return dot(alpha, x) - beta; }

double Hyperplane::evaluate(const Belief& x) const {
    return evaluate(x.coords());
}

Hyperplane Hyperplane::gauged(double tol) const {
    // Subtracting a constant from alpha shifts alpha . x by that constant for
    // every x on the simplex's affine hull (sum x = 1), so beta shifts along
    // with it and the plane's trace on the simplex is unchanged.
    double mean = 0.0;
    for (double a : alpha) mean += a;
    mean /= static_cast<double>(alpha.size());
    Vec centered(alpha.size());
    for (std::size_t i = 0; i < alpha.size(); ++i) centered[i] = alpha[i] - mean;
    const double scale = norm2(centered);
    if (scale <= tol)
        throw Error(Errc::InvalidParameter,
                    "hyperplane is parallel to the simplex");
    for (double& a : centered) a /= scale;
    return {std::move(centered), (beta - mean) / scale};
}

bool affinely_independent(const std::vector<Belief>& points, double pivot_tol) {
    if (points.empty())
        throw Error(Errc::EmptyPointSet, "no points to test");
    // More than n points in the (n-1)-simplex can never be independent.
    if (points.size() > points[0].size()) return false;
    if (points.size() == 1) return true;
    Matrix diffs;
    diffs.reserve(points.size() - 1);
    for (std::size_t i = 1; i < points.size(); ++i)
        diffs.push_back(axby(1.0, points[i].coords(), -1.0, points[0].coords()));
    return rank_with_threshold(std::move(diffs), pivot_tol) == points.size() - 1;
}

Projection project_to_hull(const Vec& query, const std::vector<Belief>& points) {
    if (points.empty())
        throw Error(Errc::EmptyPointSet, "projection needs generators");
    if (points.size() > kMaxGenerators)
        throw Error(Errc::InvalidParameter,
                    "too many hull generators for exhaustive projection");
    for (const auto& p : points)
        if (p.size() != query.size())
            throw Error(Errc::DimensionMismatch,
                        "generator dimension differs from query");

    const std::size_t m = points.size();
    Matrix gram(m, Vec(m, 0.0));
    Vec cross(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        cross[i] = dot(points[i].coords(), query);
        for (std::size_t j = 0; j <= i; ++j) {
            gram[i][j] = dot(points[i].coords(), points[j].coords());
            gram[j][i] = gram[i][j];
        }
    }

    Projection best;
    best.distance = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> subset;
    // Every face of the hull is spanned by some subset of generators, so the
    // global minimizer shows up as the best subset whose equality-constrained
    // least squares solution has nonnegative weights.
    for (std::size_t mask = 1; mask < (std::size_t{1} << m); ++mask) {
        subset.clear();
        for (std::size_t i = 0; i < m; ++i)
            if (mask & (std::size_t{1} << i)) subset.push_back(i);
        const std::size_t k = subset.size();

        Vec w;
        if (k == 1) {
            w = {1.0};
        } else {
            // KKT system for min |sum_j w_j p_j - q|^2 subject to sum w = 1.
            Matrix kkt(k + 1, Vec(k + 1, 0.0));
            Vec rhs(k + 1, 0.0);
            for (std::size_t a = 0; a < k; ++a) {
                for (std::size_t b = 0; b < k; ++b)
                    kkt[a][b] = 2.0 * gram[subset[a]][subset[b]];
                kkt[a][k] = 1.0;
                kkt[k][a] = 1.0;
                rhs[a] = 2.0 * cross[subset[a]];
            }
            rhs[k] = 1.0;
            auto sol = solve_linear(std::move(kkt), std::move(rhs));
            if (!sol) continue; // degenerate face; a sub-face covers it
            w.assign(sol->begin(), sol->begin() + static_cast<long>(k));
        }

        if (std::any_of(w.begin(), w.end(),
                        [](double x) { return x < -kWeightSlack; }))
            continue;

        Vec candidate(query.size(), 0.0);
        double total = 0.0;
        for (std::size_t a = 0; a < k; ++a) {
            const double wa = std::max(w[a], 0.0);
            total += wa;
            for (std::size_t c = 0; c < candidate.size(); ++c)
                candidate[c] += wa * points[subset[a]][c];
        }
        for (double& c : candidate) c /= total;

        const double d = l2_dist(candidate, query);
        if (d < best.distance) {
            best.distance = d;
            best.point = candidate;
            best.weights.assign(m, 0.0);
            for (std::size_t a = 0; a < k; ++a)
                best.weights[subset[a]] = std::max(w[a], 0.0) / total;
        }
    }
    return best;
}

HullCertificate hull_membership(const Belief& query,
                                const std::vector<Belief>& points) {
    HullCertificate cert;
    cert.projection = project_to_hull(query.coords(), points);

    if (cert.projection.distance <= kInsideDistance) {
        cert.side = HullCertificate::Side::Inside;
        cert.weights = cert.projection.weights;
        return cert;
    }

    cert.side = HullCertificate::Side::Outside;
    const double d = cert.projection.distance;
    Vec alpha = axby(1.0 / d, query.coords(), -1.0 / d, cert.projection.point);
    const Vec midpoint =
        axby(0.5, query.coords(), 0.5, cert.projection.point);
    cert.separator = Hyperplane{alpha, dot(alpha, midpoint)}.gauged();
    cert.margin = d / 2.0;
    return cert;
}

Hyperplane exposing_hyperplane(const std::vector<Belief>& points,
                               std::size_t index) {
    if (points.empty())
        throw Error(Errc::EmptyGenerators, "no generators to expose");
    if (index >= points.size())
        throw Error(Errc::IndexOutOfRange,
                    "exposed index " + std::to_string(index));
    const std::size_t n = points[0].size();
    const std::size_t m = points.size();

    // Unknowns (alpha, beta). Rows: touch the exposed point, push every other
    // generator to level -1, and pin the gauge sum(alpha) = 0.
    Matrix a(m + 1, Vec(n + 1, 0.0));
    Vec rhs(m + 1, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t c = 0; c < n; ++c) a[j][c] = points[j][c];
        a[j][n] = -1.0;
        rhs[j] = (j == index) ? 0.0 : -1.0;
    }
    for (std::size_t c = 0; c < n; ++c) a[m][c] = 1.0;

    auto sol = solve_min_norm(a, rhs, 1e-9);
    if (!sol)
        throw Error(Errc::AffineDependence,
                    "generators admit no exposing hyperplane");
    Vec alpha(sol->begin(), sol->begin() + static_cast<long>(n));
    Hyperplane plane = Hyperplane{std::move(alpha), (*sol)[n]}.gauged();

    // The min-norm solve can silently return a least squares compromise when
    // the constraints are inconsistent, so re-check the separation it claims.
    if (std::abs(plane.evaluate(points[index])) > 1e-9)
        throw Error(Errc::AffineDependence,
                    "exposing hyperplane misses its target point");
    for (std::size_t j = 0; j < m; ++j)
        if (j != index && plane.evaluate(points[j]) >= -1e-12)
            throw Error(Errc::AffineDependence,
                        "exposing hyperplane fails strict separation");
    return plane;
}

} // namespace nonbayes
