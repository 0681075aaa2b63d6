#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace nonbayes {

using Vec = std::vector<double>;
using Matrix = std::vector<Vec>;

double dot(const Vec& a, const Vec& b);
double norm2(const Vec& a);
double l2_dist(const Vec& a, const Vec& b);
double linf_dist(const Vec& a, const Vec& b);

/// a*x + b*y, componentwise.
Vec axby(double a, const Vec& x, double b, const Vec& y);

/// Gaussian elimination with partial pivoting on a square system.
/// Returns nullopt when the largest available pivot falls below pivot_tol.
std::optional<Vec> solve_linear(Matrix a, Vec b, double pivot_tol = 1e-12);

/// Minimum-norm solution of a (possibly underdetermined) consistent system
/// A x = b, computed as x = A^T (A A^T)^{-1} b. Returns nullopt when A A^T
/// is singular at pivot_tol, which also flags inconsistent systems built
/// from affinely dependent rows.
std::optional<Vec> solve_min_norm(const Matrix& a, const Vec& b,
                                  double pivot_tol = 1e-12);

/// Row-echelon rank with an explicit pivot threshold.
std::size_t rank_with_threshold(Matrix a, double pivot_tol);

/// Deterministic RNG wrapper. All randomness in the library flows through
/// explicit seeds; uniform deviates are generated from raw 64-bit draws so
/// results do not depend on implementation-defined std distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    /// Independent stream for trial `index` of a suite seeded with
    /// `master_seed`. Streams can be consumed in any order.
    static Rng substream(std::uint64_t master_seed, std::uint64_t index);

    std::uint64_t next();
    double uniform01(); // [0, 1)
    double uniform(double lo, double hi);
    std::size_t index(std::size_t count); // {0, ..., count-1}
    double exponential();                 // rate 1
    Vec dirichlet_flat(std::size_t n);    // uniform on the simplex
    std::size_t categorical(const Vec& weights);

private:
    std::mt19937_64 engine_;
};

} // namespace nonbayes
