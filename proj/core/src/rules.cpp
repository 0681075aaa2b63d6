#include "nonbayes/rules.hpp"

#include <algorithm>
#include <cmath>

#include "nonbayes/errors.hpp"
#include "nonbayes/geometry.hpp"

namespace nonbayes {

namespace {

constexpr double kSlack = 1e-12;

template <class... Ts> struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

void check_beta(double beta) {
    if (!(beta >= 0.0) || !std::isfinite(beta))
        throw Error(Errc::InvalidParameter,
                    "power exponent must be finite and >= 0");
}

double shrink_weight(const PerRealization& lambda, const std::string& label) {
    const double v = lambda.at(label);
    if (!(v >= -kSlack) || !(v <= 1.0 + kSlack))
        throw Error(Errc::InvalidParameter,
                    "shrink weight outside [0,1] at '" + label + "'");
    return std::clamp(v, 0.0, 1.0);
}

double stretch_weight(const PerRealization& lambda, const std::string& label) {
    const double v = lambda.at(label);
    if (!(v >= -kSlack) || !std::isfinite(v))
        throw Error(Errc::InvalidParameter,
                    "stretch weight must be >= 0 at '" + label + "'");
    return std::max(v, 0.0);
}

} // namespace

double PerRealization::at(const std::string& label) const {
    if (auto it = by_label.find(label); it != by_label.end()) return it->second;
    if (fallback) return *fallback;
    throw Error(Errc::MissingRealization,
                "no parameter for realization '" + label + "'");
}

std::string rule_kind(const DeterministicRule& rule) {
    return std::visit(
        overloaded{
            [](const BayesianRule&) { return std::string("bayes"); },
            [](const ShrinkRule&) { return std::string("shrink"); },
            [](const StretchRule&) { return std::string("stretch"); },
            [](const GretherTwoStateRule&) { return std::string("grether2"); },
            [](const PowerDistortionRule&) { return std::string("power"); },
            [](const MisspecifiedPriorRule&) {
                return std::string("misspecified_prior");
            },
            [](const ExtremeBeliefAversionRule&) {
                return std::string("extreme_belief_aversion");
            },
            [](const TabularRule&) { return std::string("table"); },
        },
        rule);
}

void RandomRule::set(const std::string& label,
                     std::vector<WeightedBelief> outcomes) {
    if (outcomes.empty())
        throw Error(Errc::InvalidParameter,
                    "empty support list for realization '" + label + "'");
    const std::size_t dim = outcomes.front().posterior.size();
    double total = 0.0;
    for (auto& o : outcomes) {
        if (o.posterior.size() != dim)
            throw Error(Errc::DimensionMismatch,
                        "support beliefs of mixed dimension at '" + label + "'");
        if (!std::isfinite(o.probability) || o.probability < -kSlack ||
            o.probability > 1.0 + kSlack)
            throw Error(Errc::NotADistribution,
                        "support probability outside [0,1] at '" + label + "'");
        o.probability = std::clamp(o.probability, 0.0, 1.0);
        total += o.probability;
    }
    if (std::abs(total - 1.0) > 1e-10)
        throw Error(Errc::NotADistribution, "support probabilities at '" +
                                                label + "' sum to " +
                                                std::to_string(total));
    support_[label] = std::move(outcomes);
}

bool RandomRule::has(const std::string& label) const {
    return support_.count(label) != 0;
}

const std::vector<WeightedBelief>& RandomRule::at(
    const std::string& label) const {
    auto it = support_.find(label);
    if (it == support_.end())
        throw Error(Errc::MissingRealization,
                    "no support list for realization '" + label + "'");
    return it->second;
}

std::size_t default_error_target(const Environment& env, std::size_t s) {
    if (s >= env.realizations())
        throw Error(Errc::IndexOutOfRange, "realization " + std::to_string(s));
    std::size_t modal = 0;
    for (std::size_t theta = 1; theta < env.states(); ++theta)
        if (env.prior[theta] > env.prior[modal]) modal = theta;
    std::size_t best = (s == 0) ? 1 : 0;
    double best_mass = bayes_posterior(env, best)[modal];
    for (std::size_t r = 0; r < env.realizations(); ++r) {
        if (r == s) continue;
        const double mass = bayes_posterior(env, r)[modal];
        if (mass > best_mass) {
            best = r;
            best_mass = mass;
        }
    }
    return best;
}

RandomRule compile_confirmatory(const ConfirmatoryBias& bias,
                                const Environment& env) {
    for (const auto& [label, target] : bias.error_target) {
        env.signals.index_of(label); // both sides must resolve
        if (env.signals.index_of(target) == env.signals.index_of(label))
            throw Error(Errc::InvalidParameter,
                        "error target of '" + label + "' must differ from it");
    }
    for (const auto& [label, value] : bias.q.by_label) {
        env.signals.index_of(label);
        if (!(value >= -kSlack) || !(value <= 1.0 + kSlack))
            throw Error(Errc::InvalidParameter,
                        "q outside [0,1] at '" + label + "'");
    }

    RandomRule compiled;
    for (std::size_t s = 0; s < env.realizations(); ++s) {
        const std::string& label = env.signals.label(s);
        const double q = std::clamp(bias.q.at(label), 0.0, 1.0);
        const Belief correct = bayes_posterior(env, s);
        if (q >= 1.0 - 1e-15) {
            compiled.set(label, {{correct, 1.0}});
            continue;
        }
        std::size_t target;
        if (auto it = bias.error_target.find(label);
            it != bias.error_target.end())
            target = env.signals.index_of(it->second);
        else
            target = default_error_target(env, s);
        compiled.set(label,
                     {{correct, q}, {bayes_posterior(env, target), 1.0 - q}});
    }
    return compiled;
}

void validate_rule(const DeterministicRule& rule, const Environment& env) {
    std::visit(
        overloaded{
            [](const BayesianRule&) {},
            [&](const ShrinkRule& r) {
                for (const auto& [label, _] : r.lambda.by_label)
                    env.signals.index_of(label);
                for (std::size_t s = 0; s < env.realizations(); ++s)
                    shrink_weight(r.lambda, env.signals.label(s));
            },
            [&](const StretchRule& r) {
                for (const auto& [label, _] : r.lambda.by_label)
                    env.signals.index_of(label);
                for (std::size_t s = 0; s < env.realizations(); ++s)
                    stretch_weight(r.lambda, env.signals.label(s));
            },
            [&](const GretherTwoStateRule& r) {
                check_beta(r.beta);
                if (env.states() != 2)
                    throw Error(Errc::DimensionMismatch,
                                "two-state rule on a " +
                                    std::to_string(env.states()) +
                                    "-state environment");
            },
            [](const PowerDistortionRule& r) { check_beta(r.beta); },
            [&](const MisspecifiedPriorRule& r) {
                if (r.perceived_prior.size() != env.states())
                    throw Error(Errc::DimensionMismatch,
                                "perceived prior dimension mismatch");
                if (!r.perceived_prior.interior(1e-9))
                    throw Error(Errc::InvalidParameter,
                                "perceived prior must have full support");
            },
            [&](const ExtremeBeliefAversionRule& r) {
                const double cap = 1.0 / static_cast<double>(env.states());
                if (!(r.epsilon > 0.0) || !(r.epsilon < cap))
                    throw Error(Errc::InvalidParameter,
                                "epsilon must lie in (0, 1/n)");
            },
            [&](const TabularRule& r) {
                for (const auto& [label, post] : r.posteriors) {
                    env.signals.index_of(label);
                    if (post.size() != env.states())
                        throw Error(Errc::DimensionMismatch,
                                    "tabular posterior dimension mismatch at '" +
                                        label + "'");
                }
                for (std::size_t s = 0; s < env.realizations(); ++s)
                    if (!r.posteriors.count(env.signals.label(s)))
                        throw Error(Errc::MissingRealization,
                                    "tabular rule misses realization '" +
                                        env.signals.label(s) + "'");
            },
        },
        rule);
}

Belief grether_two_state(const Belief& x, double beta) {
    check_beta(beta);
    if (x.size() != 2)
        throw Error(Errc::DimensionMismatch,
                    "two-state formula on dimension " + std::to_string(x.size()));
    const double a = std::pow(x[0], beta);
    const double b = std::pow(1.0 - x[0], beta);
    return Belief({a / (a + b), b / (a + b)});
}

Belief power_distortion(const Belief& x, double beta) {
    check_beta(beta);
    Vec raised(x.size());
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        raised[i] = std::pow(x[i], beta);
        total += raised[i];
    }
    if (!std::isfinite(total) || total <= 0.0)
        throw Error(Errc::InvalidParameter,
                    "power distortion degenerates on this belief");
    for (double& v : raised) v /= total;
    return Belief(std::move(raised));
}

namespace {

Belief shrink_toward_prior(const Environment& env, const Belief& x,
                           double lambda) {
    return Belief(axby(lambda, env.prior.coords(), 1.0 - lambda, x.coords()));
}

Belief apply_extreme_belief_aversion(const Environment& env, const Belief& x,
                                     double epsilon) {
    // Coordinate i moves along x_i + lambda * (mu_i - x_i); intersect the
    // per-coordinate feasibility intervals for epsilon <= value <= 1-epsilon.
    double lo = 0.0;
    double hi = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double a = x[i];
        const double d = env.prior[i] - a;
        if (std::abs(d) <= 1e-15) {
            if (a < epsilon - kSlack || a > 1.0 - epsilon + kSlack) {
                lo = 1.0;
                hi = 0.0;
                break;
            }
            continue;
        }
        const double at_floor = (epsilon - a) / d;
        const double at_cap = (1.0 - epsilon - a) / d;
        if (d > 0.0) {
            lo = std::max(lo, at_floor);
            hi = std::min(hi, at_cap);
        } else {
            lo = std::max(lo, at_cap);
            hi = std::min(hi, at_floor);
        }
    }
    if (lo > hi + kSlack)
        throw Error(Errc::InvalidParameter,
                    "no shrink keeps every coordinate in [eps, 1-eps]; the "
                    "prior itself violates the cap");
    return shrink_toward_prior(env, x, std::min(lo, hi));
}

} // namespace

Belief apply_deterministic(const DeterministicRule& rule, const Environment& env,
                           std::size_t s) {
    const std::string& label = env.signals.label(s);
    const Belief x = bayes_posterior(env, s);
    return std::visit(
        overloaded{
            [&](const BayesianRule&) { return x; },
            [&](const ShrinkRule& r) {
                return shrink_toward_prior(env, x, shrink_weight(r.lambda, label));
            },
            [&](const StretchRule& r) {
                const double lambda = stretch_weight(r.lambda, label);
                Vec out = axby(-lambda, env.prior.coords(), 1.0 + lambda,
                               x.coords());
                for (double v : out)
                    if (v < -kSlack || v > 1.0 + kSlack)
                        throw Error(Errc::LeftSimplex,
                                    "stretch overshoots the simplex at '" +
                                        label + "'");
                return Belief(std::move(out));
            },
            [&](const GretherTwoStateRule& r) {
                if (env.states() != 2)
                    throw Error(Errc::DimensionMismatch,
                                "two-state rule on a " +
                                    std::to_string(env.states()) +
                                    "-state environment");
                return grether_two_state(x, r.beta);
            },
            [&](const PowerDistortionRule& r) {
                return power_distortion(x, r.beta);
            },
            [&](const MisspecifiedPriorRule& r) {
                if (r.perceived_prior.size() != env.states())
                    throw Error(Errc::DimensionMismatch,
                                "perceived prior dimension mismatch");
                Vec w(env.states());
                double total = 0.0;
                for (std::size_t theta = 0; theta < env.states(); ++theta) {
                    w[theta] =
                        r.perceived_prior[theta] * env.signals.likelihood(s, theta);
                    total += w[theta];
                }
                if (total <= 1e-15)
                    throw Error(Errc::ZeroProbabilityRealization,
                                "perceived prior rules out realization '" +
                                    label + "'");
                for (double& v : w) v /= total;
                return Belief(std::move(w));
            },
            [&](const ExtremeBeliefAversionRule& r) {
                const double cap = 1.0 / static_cast<double>(env.states());
                if (!(r.epsilon > 0.0) || !(r.epsilon < cap))
                    throw Error(Errc::InvalidParameter,
                                "epsilon must lie in (0, 1/n)");
                return apply_extreme_belief_aversion(env, x, r.epsilon);
            },
            [&](const TabularRule& r) {
                auto it = r.posteriors.find(label);
                if (it == r.posteriors.end())
                    throw Error(Errc::MissingRealization,
                                "tabular rule misses realization '" + label +
                                    "'");
                if (it->second.size() != env.states())
                    throw Error(Errc::DimensionMismatch,
                                "tabular posterior dimension mismatch at '" +
                                    label + "'");
                return it->second;
            },
        },
        rule);
}

std::vector<Belief> distorted_posteriors(const DeterministicRule& rule,
                                         const Environment& env) {
    std::vector<Belief> out;
    out.reserve(env.realizations());
    for (std::size_t s = 0; s < env.realizations(); ++s)
        out.push_back(apply_deterministic(rule, env, s));
    return out;
}

const std::vector<WeightedBelief>& apply_random(const RandomRule& rule,
                                                const Environment& env,
                                                std::size_t s) {
    const auto& outcomes = rule.at(env.signals.label(s));
    for (const auto& o : outcomes)
        if (o.posterior.size() != env.states())
            throw Error(Errc::DimensionMismatch,
                        "support belief dimension mismatch at '" +
                            env.signals.label(s) + "'");
    return outcomes;
}

std::vector<std::vector<WeightedBelief>> outcome_system(const ScenarioRule& rule,
                                                        const Environment& env) {
    std::vector<std::vector<WeightedBelief>> out;
    out.reserve(env.realizations());
    std::visit(
        overloaded{
            [&](const DeterministicRule& det) {
                for (std::size_t s = 0; s < env.realizations(); ++s)
                    out.push_back({{apply_deterministic(det, env, s), 1.0}});
            },
            [&](const RandomRule& rnd) {
                for (std::size_t s = 0; s < env.realizations(); ++s)
                    out.push_back(apply_random(rnd, env, s));
            },
            [&](const ConfirmatoryBias& bias) {
                const RandomRule compiled = compile_confirmatory(bias, env);
                for (std::size_t s = 0; s < env.realizations(); ++s)
                    out.push_back(apply_random(compiled, env, s));
            },
        },
        rule);
    return out;
}

const char* reaction_name(ReactionTag tag) {
    switch (tag) {
    case ReactionTag::Bayesian: return "bayesian";
    case ReactionTag::Under: return "under";
    case ReactionTag::Over: return "over";
    case ReactionTag::SkipsPrior: return "skips_prior";
    case ReactionTag::OutsideHull: return "outside_hull";
    case ReactionTag::Degenerate: return "degenerate";
    case ReactionTag::Unclassified: return "unclassified";
    }
    return "unknown";
}

Reaction classify_reaction(const Environment& env, const Belief& posterior,
                           std::size_t s) {
    const Belief x = bayes_posterior(env, s);
    if (posterior.size() != x.size())
        throw Error(Errc::DimensionMismatch, "posterior dimension mismatch");

    Reaction out;
    if (linf_dist(posterior.coords(), x.coords()) <= 1e-9) {
        out.tag = ReactionTag::Bayesian;
        out.lambda = 0.0;
        return out;
    }
    const Vec d = axby(1.0, env.prior.coords(), -1.0, x.coords());
    if (linf_dist(env.prior.coords(), x.coords()) <= 1e-9) {
        out.tag = ReactionTag::Degenerate; // x_s = mu but the rule moved away
        return out;
    }

    const Vec r = axby(1.0, posterior.coords(), -1.0, x.coords());
    const double lambda = dot(r, d) / dot(d, d);
    out.residual = l2_dist(r, axby(lambda, d, 0.0, d));
    if (out.residual <= 1e-8) {
        if (lambda >= -kSlack && lambda <= 1.0 + kSlack) {
            out.tag = ReactionTag::Under;
            out.lambda = std::clamp(lambda, 0.0, 1.0);
        } else if (lambda < -kSlack) {
            out.tag = ReactionTag::Over;
            // Convert the fitted coordinate into the parameterization
            // x_s = lambda * mu + (1 - lambda) * x-hat.
            out.lambda = -lambda / (1.0 - lambda);
        } else {
            out.tag = ReactionTag::SkipsPrior;
            out.lambda = lambda;
        }
        return out;
    }

    std::vector<Belief> generators;
    generators.reserve(env.realizations());
    for (std::size_t i = 0; i < env.realizations(); ++i)
        generators.push_back(bayes_posterior(env, i));
    const HullCertificate cert = hull_membership(posterior, generators);
    out.tag = cert.side == HullCertificate::Side::Outside
                  ? ReactionTag::OutsideHull
                  : ReactionTag::Unclassified;
    return out;
}

bool underreacts_to_information(const Environment& env,
                                const DeterministicRule& rule) {
    for (std::size_t s = 0; s < env.realizations(); ++s) {
        const Reaction r =
            classify_reaction(env, apply_deterministic(rule, env, s), s);
        if (r.tag != ReactionTag::Bayesian && r.tag != ReactionTag::Under)
            return false;
    }
    return true;
}

namespace {

Belief interior_point(Rng& rng, std::size_t n) {
    // Mix toward uniform so every coordinate stays safely off the boundary.
    Vec v = rng.dirichlet_flat(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = 0.7 * v[i] + 0.3 / static_cast<double>(n);
    return Belief(std::move(v));
}

Environment plant_shared_posterior(const Belief& shared, const Belief& prior) {
    // pi("a"|theta) = c * shared(theta) / prior(theta) makes the Bayesian
    // posterior at "a" exactly `shared`; "b" absorbs the leftover mass.
    const std::size_t n = shared.size();
    double c = 1.0;
    for (std::size_t i = 0; i < n; ++i)
        c = std::min(c, prior[i] / shared[i]);
    c *= 0.5;
    Matrix rows(2, Vec(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        rows[0][i] = c * shared[i] / prior[i];
        rows[1][i] = 1.0 - rows[0][i];
    }
    return Environment(prior, SignalModel({"a", "b"}, rows));
}

} // namespace

SystematicReport systematic_consistency_check(const DeterministicRule& rule,
                                              std::size_t trials,
                                              std::uint64_t seed) {
    if (trials == 0)
        throw Error(Errc::InvalidParameter, "need at least one trial");
    std::size_t n = 3;
    if (std::holds_alternative<GretherTwoStateRule>(rule)) n = 2;
    if (const auto* m = std::get_if<MisspecifiedPriorRule>(&rule))
        n = m->perceived_prior.size();

    SystematicReport report;
    report.trials = trials;
    for (std::size_t t = 0; t < trials; ++t) {
        Rng rng = Rng::substream(seed, t);
        const Belief shared = interior_point(rng, n);
        const Environment left =
            plant_shared_posterior(shared, interior_point(rng, n));
        const Environment right =
            plant_shared_posterior(shared, interior_point(rng, n));
        const Belief a = apply_deterministic(rule, left, 0);
        const Belief b = apply_deterministic(rule, right, 0);
        const double gap = linf_dist(a.coords(), b.coords());
        report.worst_gap = std::max(report.worst_gap, gap);
        if (gap > 1e-9) ++report.mismatches;
    }
    return report;
}

} // namespace nonbayes
