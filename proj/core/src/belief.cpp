#include "nonbayes/belief.hpp"

#include <algorithm>
#include <cmath>

#include "nonbayes/errors.hpp"
#include "nonbayes/geometry.hpp"

namespace nonbayes {

namespace {

constexpr double kCoordSlack = 1e-12;
constexpr double kSumTol = 1e-10;
constexpr double kInteriorFloor = 1e-9;

} // namespace

Belief::Belief(Vec coords) : coords_(std::move(coords)) {
    if (coords_.size() < 2)
        throw Error(Errc::NotADistribution,
                    "a belief needs at least two states");
    double sum = 0.0;
    for (double& c : coords_) {
        if (!std::isfinite(c) || c < -kCoordSlack || c > 1.0 + kCoordSlack)
            throw Error(Errc::NotADistribution,
                        "coordinate outside [0,1]: " + std::to_string(c));
        c = std::clamp(c, 0.0, 1.0);
        sum += c;
    }
    if (std::abs(sum - 1.0) > kSumTol)
        throw Error(Errc::NotADistribution,
                    "coordinates sum to " + std::to_string(sum));
}

bool Belief::interior(double floor) const {
    return std::all_of(coords_.begin(), coords_.end(),
                       [floor](double c) { return c >= floor; });
}

SignalModel::SignalModel(std::vector<std::string> labels, Matrix likelihoods)
    : labels_(std::move(labels)), likelihoods_(std::move(likelihoods)) {
    if (likelihoods_.empty())
        throw Error(Errc::InvalidParameter, "signal model has no realizations");
    if (labels_.size() != likelihoods_.size())
        throw Error(Errc::DimensionMismatch,
                    "label count does not match realization count");
    states_ = likelihoods_[0].size();
    if (states_ < 2)
        throw Error(Errc::InvalidParameter,
                    "signal model needs at least two states");
    for (const auto& row : likelihoods_)
        if (row.size() != states_)
            throw Error(Errc::DimensionMismatch,
                        "ragged likelihood matrix");
    for (std::size_t i = 0; i < labels_.size(); ++i)
        for (std::size_t j = i + 1; j < labels_.size(); ++j)
            if (labels_[i] == labels_[j])
                throw Error(Errc::InvalidParameter,
                            "duplicate realization label '" + labels_[i] + "'");
    // Each state's conditional distribution over realizations must be a
    // probability vector (columns of the realization-major storage).
    for (std::size_t theta = 0; theta < states_; ++theta) {
        double sum = 0.0;
        for (std::size_t s = 0; s < likelihoods_.size(); ++s) {
            const double p = likelihoods_[s][theta];
            if (!std::isfinite(p) || p < -kCoordSlack || p > 1.0 + kCoordSlack)
                throw Error(Errc::RowNotDistribution,
                            "likelihood outside [0,1] for state " +
                                std::to_string(theta));
            sum += p;
        }
        if (std::abs(sum - 1.0) > kSumTol)
            throw Error(Errc::RowNotDistribution,
                        "likelihoods for state " + std::to_string(theta) +
                            " sum to " + std::to_string(sum));
    }
}

const std::string& SignalModel::label(std::size_t s) const {
    if (s >= labels_.size())
        throw Error(Errc::IndexOutOfRange, "realization index " +
                                               std::to_string(s));
    return labels_[s];
}

std::size_t SignalModel::index_of(const std::string& label) const {
    for (std::size_t s = 0; s < labels_.size(); ++s)
        if (labels_[s] == label) return s;
    throw Error(Errc::MissingRealization, "no realization '" + label + "'");
}

double SignalModel::likelihood(std::size_t s, std::size_t theta) const {
    if (s >= likelihoods_.size())
        throw Error(Errc::IndexOutOfRange, "realization index " +
                                               std::to_string(s));
    if (theta >= states_)
        throw Error(Errc::IndexOutOfRange, "state index " +
                                               std::to_string(theta));
    return likelihoods_[s][theta];
}

const Vec& SignalModel::row(std::size_t s) const {
    if (s >= likelihoods_.size())
        throw Error(Errc::IndexOutOfRange, "realization index " +
                                               std::to_string(s));
    return likelihoods_[s];
}

Environment::Environment(Belief prior_in, SignalModel signals_in)
    : prior(std::move(prior_in)), signals(std::move(signals_in)) {
    validate_environment(*this);
}

void validate_environment(const Environment& env) {
    if (env.prior.size() != env.signals.states())
        throw Error(Errc::DimensionMismatch,
                    "prior has " + std::to_string(env.prior.size()) +
                        " states, signal model has " +
                        std::to_string(env.signals.states()));
    if (!env.prior.interior(kInteriorFloor))
        throw Error(Errc::ZeroSupportPrior,
                    "prior must put mass >= 1e-9 on every state");
    for (std::size_t s = 0; s < env.realizations(); ++s)
        if (realization_marginal(env, s) <= kInteriorFloor)
            throw Error(Errc::ZeroProbabilityRealization,
                        "realization '" + env.signals.label(s) +
                            "' is (numerically) unreachable");
}

double realization_marginal(const Environment& env, std::size_t s) {
    double p = 0.0;
    for (std::size_t theta = 0; theta < env.states(); ++theta)
        p += env.prior[theta] * env.signals.likelihood(s, theta);
    return p;
}

Belief bayes_posterior(const Environment& env, std::size_t s) {
    const double marginal = realization_marginal(env, s);
    if (marginal <= kInteriorFloor)
        throw Error(Errc::ZeroProbabilityRealization,
                    "cannot condition on realization '" +
                        env.signals.label(s) + "'");
    Vec post(env.states());
    for (std::size_t theta = 0; theta < env.states(); ++theta)
        post[theta] = env.prior[theta] * env.signals.likelihood(s, theta) /
                      marginal;
    return Belief(std::move(post));
}

Environment validate_environment(const Vec& prior,
                                 const std::vector<std::string>& labels,
                                 const Matrix& likelihoods) {
    double sum = 0.0;
    for (double p : prior) {
        if (!std::isfinite(p) || p < -kCoordSlack || p > 1.0 + kCoordSlack)
            throw Error(Errc::NonSimplexPrior,
                        "prior entry outside [0,1]: " + std::to_string(p));
        sum += p;
    }
    if (prior.size() < 2 || std::abs(sum - 1.0) > kSumTol)
        throw Error(Errc::NonSimplexPrior,
                    "prior entries sum to " + std::to_string(sum));
    for (double p : prior)
        if (p < kInteriorFloor)
            throw Error(Errc::ZeroSupportPrior,
                        "prior must put mass >= 1e-9 on every state");
    // SignalModel's constructor reports RowNotDistribution; the Environment
    // constructor reports ZeroProbabilityRealization.
    return Environment(Belief(prior), SignalModel(labels, likelihoods));
}

PosteriorSystem posterior_system(const Environment& env) {
    PosteriorSystem sys;
    sys.marginals.reserve(env.realizations());
    sys.posteriors.reserve(env.realizations());
    for (std::size_t s = 0; s < env.realizations(); ++s) {
        sys.marginals.push_back(realization_marginal(env, s));
        sys.posteriors.push_back(bayes_posterior(env, s));
    }
    sys.independent = affinely_independent(sys.posteriors);
    return sys;
}

} // namespace nonbayes
