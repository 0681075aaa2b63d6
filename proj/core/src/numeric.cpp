#include "nonbayes/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "nonbayes/errors.hpp"

namespace nonbayes {

double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

double l2_dist(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

double linf_dist(const Vec& a, const Vec& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

Vec axby(double a, const Vec& x, double b, const Vec& y) {
    Vec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = a * x[i] + b * y[i];
    return out;
}

std::optional<Vec> solve_linear(Matrix a, Vec b, double pivot_tol) {
    const std::size_t n = a.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (std::abs(a[pivot][col]) <= pivot_tol) return std::nullopt;
        std::swap(a[pivot], a[col]);
        std::swap(b[pivot], b[col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    Vec x(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
        x[i] = s / a[i][i];
    }
    return x;
}

std::optional<Vec> solve_min_norm(const Matrix& a, const Vec& b,
                                  double pivot_tol) {
    const std::size_t rows = a.size();
    if (rows == 0) return std::nullopt;
    const std::size_t cols = a[0].size();
    Matrix gram(rows, Vec(rows, 0.0));
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < rows; ++j) gram[i][j] = dot(a[i], a[j]);
    auto y = solve_linear(std::move(gram), b, pivot_tol);
    if (!y) return std::nullopt;
    Vec x(cols, 0.0);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t c = 0; c < cols; ++c) x[c] += (*y)[i] * a[i][c];
    return x;
}

std::size_t rank_with_threshold(Matrix a, double pivot_tol) {
    const std::size_t rows = a.size();
    if (rows == 0) return 0;
    const std::size_t cols = a[0].size();
    std::size_t rank = 0;
    for (std::size_t col = 0; col < cols && rank < rows; ++col) {
        std::size_t pivot = rank;
        for (std::size_t r = rank + 1; r < rows; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (std::abs(a[pivot][col]) <= pivot_tol) continue;
        std::swap(a[pivot], a[rank]);
        for (std::size_t r = rank + 1; r < rows; ++r) {
            const double f = a[r][col] / a[rank][col];
            for (std::size_t c = col; c < cols; ++c) a[r][c] -= f * a[rank][c];
        }
        ++rank;
    }
    return rank;
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace

Rng::Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    engine_.seed(splitmix64(s));
}

Rng Rng::substream(std::uint64_t master_seed, std::uint64_t index) {
    std::uint64_t s = master_seed;
    const std::uint64_t a = splitmix64(s);
    std::uint64_t t = index + 0x632BE59BD9B4E019ull;
    const std::uint64_t b = splitmix64(t);
    return Rng(a ^ (b + 0x9E3779B97F4A7C15ull * (index + 1)));
}

std::uint64_t Rng::next() { return engine_(); }

double Rng::uniform01() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
}

std::size_t Rng::index(std::size_t count) {
    if (count == 0) throw Error(Errc::InvalidParameter, "index over empty range");
    // Rejection keeps the draw exactly uniform.
    const std::uint64_t bound = count;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v = next();
    while (v >= limit) v = next();
    return static_cast<std::size_t>(v % bound);
}

double Rng::exponential() {
    double u = uniform01();
    while (u <= 0.0) u = uniform01();
    return -std::log(u);
}

Vec Rng::dirichlet_flat(std::size_t n) {
    Vec v(n);
    double total = 0.0;
    for (auto& x : v) {
        x = exponential();
        total += x;
    }
    for (auto& x : v) x /= total;
    return v;
}

std::size_t Rng::categorical(const Vec& weights) {
    const double u = uniform01();
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (u < acc) return i;
    }
    return weights.size() - 1;
}

const char* errc_name(Errc code) {
    switch (code) {
    case Errc::NonSimplexPrior: return "NonSimplexPrior";
    case Errc::ZeroSupportPrior: return "ZeroSupportPrior";
    case Errc::RowNotDistribution: return "RowNotDistribution";
    case Errc::ZeroProbabilityRealization: return "ZeroProbabilityRealization";
    case Errc::NotADistribution: return "NotADistribution";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::MissingRealization: return "MissingRealization";
    case Errc::InvalidParameter: return "InvalidParameter";
    case Errc::LeftSimplex: return "LeftSimplex";
    case Errc::EmptyPointSet: return "EmptyPointSet";
    case Errc::EmptyGenerators: return "EmptyGenerators";
    case Errc::AffineDependence: return "AffineDependence";
    case Errc::NotOutsideHull: return "NotOutsideHull";
    case Errc::NoMisreading: return "NoMisreading";
    case Errc::SamplingExhausted: return "SamplingExhausted";
    case Errc::ConstructionFailed: return "ConstructionFailed";
    case Errc::ParseError: return "ParseError";
    }
    return "UnknownError";
}

} // namespace nonbayes
