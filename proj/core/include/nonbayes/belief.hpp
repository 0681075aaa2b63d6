#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "nonbayes/numeric.hpp"

namespace nonbayes {

/// A point in the probability simplex over n >= 2 states. Construction
/// validates: every coordinate in [0,1] (absolute slack 1e-12, then clamped)
/// and total mass 1 within 1e-10.
class Belief {
public:
    explicit Belief(Vec coords);

    std::size_t size() const { return coords_.size(); }
    double operator[](std::size_t i) const { return coords_[i]; }
    const Vec& coords() const { return coords_; }

    /// True when every coordinate is at least `floor`.
    bool interior(double floor = 1e-9) const;

private:
    Vec coords_;
};

/// Conditional signal distribution pi(s | theta). Stored realization-major:
/// row s holds pi(s | theta) for every state theta. For each state the column
/// must sum to 1 within 1e-10 and entries must lie in [0,1].
class SignalModel {
public:
    SignalModel(std::vector<std::string> labels, Matrix likelihoods);

    std::size_t realizations() const { return likelihoods_.size(); }
    std::size_t states() const { return states_; }
    const std::string& label(std::size_t s) const;
    /// Index of the realization carrying `label`; throws MissingRealization.
    std::size_t index_of(const std::string& label) const;
    double likelihood(std::size_t s, std::size_t theta) const;
    const Vec& row(std::size_t s) const;

private:
    std::vector<std::string> labels_;
    Matrix likelihoods_; // [realization][state]
    std::size_t states_ = 0;
};

/// Prior plus signal structure. Validation requires a strictly interior
/// prior (every state mass >= 1e-9) and every realization reachable
/// (marginal probability > 1e-9), so Bayes updates are always well posed.
struct Environment {
    Belief prior;
    SignalModel signals;

    Environment(Belief prior_in, SignalModel signals_in);

    std::size_t states() const { return prior.size(); }
    std::size_t realizations() const { return signals.realizations(); }
};

/// Re-validates an already-built environment; throws nonbayes::Error with the
/// specific violated condition.
void validate_environment(const Environment& env);

/// Builds an Environment from raw arrays, reporting the first violated
/// modeling assumption by name: NonSimplexPrior, ZeroSupportPrior,
/// RowNotDistribution, or ZeroProbabilityRealization.
Environment validate_environment(const Vec& prior,
                                 const std::vector<std::string>& labels,
                                 const Matrix& likelihoods);

/// P(s) = sum_theta mu(theta) pi(s | theta).
double realization_marginal(const Environment& env, std::size_t s);

/// Posterior mu(theta | s) by Bayes' rule.
Belief bayes_posterior(const Environment& env, std::size_t s);

/// All realizations' marginals and Bayesian posteriors, in model order.
/// Marginals sum to 1 and satisfy Bayes plausibility sum_s P(s) x_s = mu by
/// construction.
struct PosteriorSystem {
    Vec marginals;
    std::vector<Belief> posteriors;
    bool independent = false; // posteriors pass the affine-independence test
};

PosteriorSystem posterior_system(const Environment& env);

} // namespace nonbayes
