#include "nonbayes/exploit.hpp"

#include <algorithm>
#include <cmath>

#include "nonbayes/errors.hpp"

namespace nonbayes {

namespace {

void check_target(double target_loss) {
    if (!(target_loss > 0.0) || !std::isfinite(target_loss))
        throw Error(Errc::InvalidParameter, "target loss must be positive");
}

DecisionProblem single_bet(const Hyperplane& plane, double lambda,
                           double epsilon = 0.0) {
    Vec payoffs(plane.alpha.size());
    for (std::size_t theta = 0; theta < payoffs.size(); ++theta)
        payoffs[theta] = lambda * (plane.alpha[theta] - plane.beta + epsilon);
    return DecisionProblem({Action("bet", std::move(payoffs))});
}

void verify_payoff(const ExploitContract& contract) {
    const double tol = 1e-9 * std::max(1.0, contract.target_loss);
    if (std::abs(contract.achieved_payoff + contract.target_loss) > tol)
        throw Error(Errc::ConstructionFailed,
                    "contract evaluates to " +
                        std::to_string(contract.achieved_payoff) +
                        " instead of -" + std::to_string(contract.target_loss));
}

/// Shared core of the separator constructions: given a hyperplane whose
/// distorted-belief takers have a strictly negative true-level total, price
/// the single action so that their losses sum to exactly -K.
ExploitContract separator_contract(const Environment& env,
                                   const ScenarioRule& rule,
                                   const Hyperplane& plane, double target_loss) {
    const PosteriorSystem sys = posterior_system(env);
    const auto outcomes = outcome_system(rule, env);

    double denominator = 0.0;
    std::vector<std::size_t> takers;
    for (std::size_t r = 0; r < env.realizations(); ++r) {
        const double true_level = plane.evaluate(sys.posteriors[r]);
        bool takes = false;
        for (const WeightedBelief& o : outcomes[r]) {
            if (plane.evaluate(o.posterior) > 0.0) {
                denominator -= sys.marginals[r] * o.probability * true_level;
                takes = true;
            }
        }
        if (takes) takers.push_back(r);
    }
    if (denominator <= 0.0)
        throw Error(Errc::ConstructionFailed,
                    "separator admits no losing taker set");

    ExploitContract contract;
    contract.target_loss = target_loss;
    contract.predicted_takers = std::move(takers);
    contract.certificate = plane;
    contract.problem = single_bet(plane, target_loss / denominator);
    contract.achieved_payoff = ex_ante_payoff(env, rule, contract.problem);
    verify_payoff(contract);
    return contract;
}

} // namespace

const char* verdict_name(Verdict v) {
    switch (v) {
    case Verdict::Exploitable: return "exploitable";
    case Verdict::Unexploitable: return "unexploitable";
    case Verdict::Unknown: return "unknown";
    }
    return "unknown";
}

const char* recipe_name(ExploitRecipe r) {
    switch (r) {
    case ExploitRecipe::HullEscape: return "hull_escape";
    case ExploitRecipe::BinarySkip: return "binary_skip";
    case ExploitRecipe::Confirmatory: return "confirmatory";
    }
    return "unknown";
}

ExploitContract build_overreaction_exploit(const Environment& env,
                                           const DeterministicRule& rule,
                                           std::size_t s, double target_loss) {
    check_target(target_loss);
    const PosteriorSystem sys = posterior_system(env);
    const Belief distorted = apply_deterministic(rule, env, s);
    const HullCertificate cert = hull_membership(distorted, sys.posteriors);
    if (cert.side != HullCertificate::Side::Outside)
        throw Error(Errc::NotOutsideHull,
                    "distorted posterior at '" + env.signals.label(s) +
                        "' stays inside the hull of Bayesian posteriors");
    return separator_contract(env, DeterministicRule(rule), cert.separator,
                              target_loss);
}

ExploitContract build_skip_exploit(const Environment& env,
                                   const DeterministicRule& rule, std::size_t s,
                                   double target_loss) {
    check_target(target_loss);
    if (env.realizations() != 2)
        throw Error(Errc::InvalidParameter,
                    "the prior-skipping construction is only guaranteed for "
                    "binary signals");
    const Belief distorted = apply_deterministic(rule, env, s);
    const std::vector<Belief> segment{bayes_posterior(env, s), env.prior};
    const HullCertificate cert = hull_membership(distorted, segment);
    if (cert.side != HullCertificate::Side::Outside)
        throw Error(Errc::NotOutsideHull,
                    "distorted posterior at '" + env.signals.label(s) +
                        "' underreacts (stays on the prior-posterior segment)");
    // Every Bayesian posterior is on the negative side: x_s by the separator
    // contract, and the other posterior because the taker-weighted average
    // equals either x_s's level or alpha . mu - beta, both <= -margin.
    return separator_contract(env, DeterministicRule(rule), cert.separator,
                              target_loss);
}

ExploitContract build_confirmatory_exploit(const Environment& env,
                                           const ConfirmatoryBias& bias,
                                           double target_loss, double epsilon) {
    check_target(target_loss);
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
        throw Error(Errc::InvalidParameter, "epsilon must be >= 0");

    const PosteriorSystem sys = posterior_system(env);
    if (!sys.independent)
        throw Error(Errc::AffineDependence,
                    "the exposing construction needs affinely independent "
                    "Bayesian posteriors");
    const RandomRule compiled = compile_confirmatory(bias, env);

    // Misreading edges: source realization -> the posterior it is mistaken for.
    struct Edge {
        std::size_t source;
        std::size_t target;
        double mass; // p_source * (1 - q_source)
    };
    std::vector<Edge> edges;
    for (std::size_t s = 0; s < env.realizations(); ++s) {
        const std::string& label = env.signals.label(s);
        const double q = std::clamp(bias.q.at(label), 0.0, 1.0);
        if (q >= 1.0 - 1e-15) continue;
        std::size_t t;
        if (auto it = bias.error_target.find(label); it != bias.error_target.end())
            t = env.signals.index_of(it->second);
        else
            t = default_error_target(env, s);
        edges.push_back({s, t, sys.marginals[s] * (1.0 - q)});
    }
    if (edges.empty())
        throw Error(Errc::NoMisreading,
                    "every realization is read correctly (q = 1)");

    // Target whose incoming misread mass gives the best-conditioned contract.
    std::size_t best_target = edges.front().target;
    double best_n = -1.0;
    Hyperplane best_plane;
    for (std::size_t t = 0; t < env.realizations(); ++t) {
        double n = 0.0;
        for (const Edge& e : edges)
            if (e.target == t) n += e.mass;
        if (n <= 0.0) continue;
        Hyperplane plane = exposing_hyperplane(sys.posteriors, t);
        // Re-anchor beta so the plane passes through the target exactly; the
        // tie-break at epsilon = 0 depends on the level being exactly zero.
        plane.beta = dot(plane.alpha, sys.posteriors[t].coords());
        double weighted = 0.0;
        for (const Edge& e : edges)
            if (e.target == t)
                weighted -= e.mass * plane.evaluate(sys.posteriors[e.source]);
        if (weighted > best_n) {
            best_n = weighted;
            best_target = t;
            best_plane = plane;
        }
    }
    const std::size_t target = best_target;
    const Hyperplane plane = best_plane;

    // Cap on epsilon: keep every non-target posterior strictly below the
    // plane, and keep the takers' total strictly negative.
    const double q_target =
        compiled.at(env.signals.label(target)).front().probability;
    double misread_mass = 0.0;
    double level_sum = 0.0; // sum over takers of mass * true level
    std::vector<std::size_t> takers{target};
    for (const Edge& e : edges) {
        if (e.target != target) continue;
        misread_mass += e.mass;
        level_sum += e.mass * plane.evaluate(sys.posteriors[e.source]);
        takers.push_back(e.source);
    }
    const double take_mass = sys.marginals[target] * q_target + misread_mass;
    double separation = 1.0;
    for (std::size_t j = 0; j < env.realizations(); ++j)
        if (j != target)
            separation = std::min(separation, -plane.evaluate(sys.posteriors[j]));
    const double cap = std::min(separation, -level_sum / take_mass);
    if (epsilon >= cap)
        throw Error(Errc::InvalidParameter,
                    "epsilon " + std::to_string(epsilon) +
                        " exceeds the feasible cap " + std::to_string(cap));

    const double total = level_sum + epsilon * take_mass; // strictly negative
    if (total >= 0.0)
        throw Error(Errc::ConstructionFailed,
                    "taker total failed to stay negative");
    const double lambda = target_loss / (-total);

    std::sort(takers.begin(), takers.end());
    ExploitContract contract;
    contract.target_loss = target_loss;
    contract.predicted_takers = std::move(takers);
    contract.certificate = plane;
    contract.problem = single_bet(plane, lambda, epsilon);
    contract.achieved_payoff = ex_ante_payoff(env, compiled, contract.problem);
    verify_payoff(contract);
    return contract;
}

ExploitabilityStatus exploitability_status(const Environment& env,
                                           const DeterministicRule& rule) {
    const PosteriorSystem sys = posterior_system(env);

    // Best hull escape first: it works for any signal size.
    std::optional<std::size_t> escape;
    double escape_margin = 0.0;
    for (std::size_t s = 0; s < env.realizations(); ++s) {
        const HullCertificate cert = hull_membership(
            apply_deterministic(rule, env, s), sys.posteriors);
        if (cert.side == HullCertificate::Side::Outside &&
            cert.margin > escape_margin) {
            escape = s;
            escape_margin = cert.margin;
        }
    }
    if (escape) {
        return {Verdict::Exploitable, ExploitRecipe::HullEscape, escape,
                "distorted posterior at '" + env.signals.label(*escape) +
                    "' leaves the hull of Bayesian posteriors"};
    }
    if (underreacts_to_information(env, rule))
        return {Verdict::Unexploitable, std::nullopt, std::nullopt,
                "underreacts to information"};
    if (env.realizations() == 2) {
        std::optional<std::size_t> skip;
        double skip_margin = 0.0;
        for (std::size_t s = 0; s < env.realizations(); ++s) {
            const std::vector<Belief> segment{sys.posteriors[s], env.prior};
            const HullCertificate cert =
                hull_membership(apply_deterministic(rule, env, s), segment);
            if (cert.side == HullCertificate::Side::Outside &&
                cert.margin > skip_margin) {
                skip = s;
                skip_margin = cert.margin;
            }
        }
        if (skip)
            return {Verdict::Exploitable, ExploitRecipe::BinarySkip, skip,
                    "binary signal without underreaction at '" +
                        env.signals.label(*skip) + "'"};
    }
    return {Verdict::Unknown, std::nullopt, std::nullopt,
            "inside the hull, off the segment, with more than two "
            "realizations: not characterized"};
}

ExploitabilityStatus exploitability_status(const Environment& env,
                                           const ScenarioRule& rule) {
    if (const auto* det = std::get_if<DeterministicRule>(&rule))
        return exploitability_status(env, *det);

    if (const auto* bias = std::get_if<ConfirmatoryBias>(&rule)) {
        for (std::size_t s = 0; s < env.realizations(); ++s) {
            const double q =
                std::clamp(bias->q.at(env.signals.label(s)), 0.0, 1.0);
            if (q < 1.0 - 1e-15)
                return {Verdict::Exploitable, ExploitRecipe::Confirmatory, s,
                        "realization '" + env.signals.label(s) +
                            "' is misread with probability " +
                            std::to_string(1.0 - q)};
        }
        return {Verdict::Unexploitable, std::nullopt, std::nullopt,
                "every realization is read correctly (Bayesian updating)"};
    }

    const auto& random = std::get<RandomRule>(rule);
    const PosteriorSystem sys = posterior_system(env);
    const auto outcomes = outcome_system(ScenarioRule(random), env);
    bool all_on_segments = true;
    for (std::size_t s = 0; s < env.realizations(); ++s) {
        const std::vector<Belief> segment{sys.posteriors[s], env.prior};
        for (const WeightedBelief& o : outcomes[s]) {
            if (o.probability <= 0.0) continue;
            const HullCertificate hull = hull_membership(o.posterior,
                                                         sys.posteriors);
            if (hull.side == HullCertificate::Side::Outside)
                return {Verdict::Exploitable, ExploitRecipe::HullEscape, s,
                        "a support point at '" + env.signals.label(s) +
                            "' leaves the hull of Bayesian posteriors"};
            if (hull_membership(o.posterior, segment).side ==
                HullCertificate::Side::Outside)
                all_on_segments = false;
        }
    }
    if (all_on_segments)
        return {Verdict::Unexploitable, std::nullopt, std::nullopt,
                "every support point lies on its prior-posterior segment"};
    return {Verdict::Unknown, std::nullopt, std::nullopt,
            "random support inside the hull but off the segments: not "
            "characterized"};
}

ExploitContract build_exploit(const Environment& env, const ScenarioRule& rule,
                              double target_loss, double epsilon) {
    const ExploitabilityStatus status = exploitability_status(env, rule);
    if (status.verdict != Verdict::Exploitable)
        throw Error(Errc::NotOutsideHull,
                    "no known construction: " + status.reason);
    switch (*status.recipe) {
    case ExploitRecipe::HullEscape: {
        if (const auto* det = std::get_if<DeterministicRule>(&rule))
            return build_overreaction_exploit(env, *det, *status.realization,
                                              target_loss);
        // Random rule: separate the escaping support point from the hull and
        // reuse the generic separator pricing.
        check_target(target_loss);
        const PosteriorSystem sys = posterior_system(env);
        const auto outcomes = outcome_system(rule, env);
        const Belief* worst = nullptr;
        double worst_margin = 0.0;
        for (const auto& list : outcomes)
            for (const WeightedBelief& o : list) {
                if (o.probability <= 0.0) continue;
                const HullCertificate cert =
                    hull_membership(o.posterior, sys.posteriors);
                if (cert.side == HullCertificate::Side::Outside &&
                    cert.margin > worst_margin) {
                    worst_margin = cert.margin;
                    worst = &o.posterior;
                }
            }
        if (!worst)
            throw Error(Errc::NotOutsideHull, "no escaping support point");
        const HullCertificate cert = hull_membership(*worst, sys.posteriors);
        return separator_contract(env, rule, cert.separator, target_loss);
    }
    case ExploitRecipe::BinarySkip:
        return build_skip_exploit(env, std::get<DeterministicRule>(rule),
                                  *status.realization, target_loss);
    case ExploitRecipe::Confirmatory:
        return build_confirmatory_exploit(env, std::get<ConfirmatoryBias>(rule),
                                          target_loss, epsilon);
    }
    throw Error(Errc::ConstructionFailed, "unreachable");
}

DecisionProblem prune_dagger_actions(const Environment& env,
                                     const DeterministicRule& rule,
                                     const DecisionProblem& dp) {
    const PosteriorSystem sys = posterior_system(env);
    const std::vector<Belief> distorted = distorted_posteriors(rule, env);

    std::vector<Action> kept;
    for (const Action& a : dp.actions) {
        bool dagger = false;
        for (std::size_t i = 0; i < sys.posteriors.size() && !dagger; ++i)
            dagger = action_value(a, sys.posteriors[i]) > 1e-12 &&
                     action_value(a, distorted[i]) <= 1e-12;
        if (!dagger) kept.push_back(a);
    }
    return DecisionProblem(std::move(kept));
}

} // namespace nonbayes
