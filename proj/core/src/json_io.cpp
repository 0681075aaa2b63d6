#include "nonbayes/json_io.hpp"

#include <fstream>
#include <utility>
#include <vector>

#include "nonbayes/errors.hpp"

namespace nonbayes {

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
    throw Error(Errc::ParseError, where + ": " + what);
}

const json& field(const json& j, const std::string& where, const char* key) {
    if (!j.is_object()) bad(where, "expected an object");
    const auto it = j.find(key);
    if (it == j.end()) bad(where, std::string("missing '") + key + "'");
    return *it;
}

double number(const json& j, const std::string& where) {
    if (!j.is_number()) bad(where, "expected a number");
    return j.get<double>();
}

std::string text(const json& j, const std::string& where) {
    if (!j.is_string()) bad(where, "expected a string");
    return j.get<std::string>();
}

Vec vec(const json& j, const std::string& where) {
    if (!j.is_array()) bad(where, "expected an array of numbers");
    Vec out;
    out.reserve(j.size());
    for (const json& e : j) out.push_back(number(e, where));
    return out;
}

json per_realization_to_json(const PerRealization& p) {
    if (p.by_label.empty() && p.fallback) return json(*p.fallback);
    json out = json::object();
    for (const auto& [label, value] : p.by_label) out[label] = value;
    if (p.fallback) out["*"] = *p.fallback;
    return out;
}

PerRealization per_realization_from_json(const json& j,
                                         const std::string& where) {
    if (j.is_number()) return PerRealization(j.get<double>());
    if (!j.is_object()) bad(where, "expected a number or a label map");
    PerRealization out;
    for (const auto& [key, value] : j.items()) {
        if (key == "*")
            out.fallback = number(value, where + ".*");
        else
            out.by_label[key] = number(value, where + "." + key);
    }
    return out;
}

} // namespace

json to_json(const Environment& env) {
    json j;
    j["prior"] = env.prior.coords();
    json rows = json::object();
    for (std::size_t s = 0; s < env.realizations(); ++s)
        rows[env.signals.label(s)] = env.signals.row(s);
    j["likelihoods"] = std::move(rows);
    return j;
}

Environment environment_from_json(const json& j) {
    const Vec prior = vec(field(j, "environment", "prior"), "environment.prior");
    const json& rows = field(j, "environment", "likelihoods");
    if (!rows.is_object() || rows.empty())
        bad("environment.likelihoods", "expected a nonempty label map");
    std::vector<std::string> labels;
    Matrix likelihoods;
    for (const auto& [label, row] : rows.items()) {
        labels.push_back(label);
        likelihoods.push_back(vec(row, "environment.likelihoods." + label));
    }
    return validate_environment(prior, labels, likelihoods);
}

namespace {

json deterministic_to_json(const DeterministicRule& rule) {
    json j;
    j["kind"] = rule_kind(rule);
    std::visit(
        [&j](const auto& r) {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, ShrinkRule> ||
                          std::is_same_v<T, StretchRule>)
                j["lambda"] = per_realization_to_json(r.lambda);
            else if constexpr (std::is_same_v<T, GretherTwoStateRule> ||
                               std::is_same_v<T, PowerDistortionRule>)
                j["beta"] = r.beta;
            else if constexpr (std::is_same_v<T, MisspecifiedPriorRule>)
                j["perceived_prior"] = r.perceived_prior.coords();
            else if constexpr (std::is_same_v<T, ExtremeBeliefAversionRule>)
                j["epsilon"] = r.epsilon;
            else if constexpr (std::is_same_v<T, TabularRule>) {
                json posts = json::object();
                for (const auto& [label, b] : r.posteriors)
                    posts[label] = b.coords();
                j["posteriors"] = std::move(posts);
            }
        },
        rule);
    return j;
}

} // namespace

json to_json(const ScenarioRule& rule) {
    return std::visit(
        [](const auto& r) -> json {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, DeterministicRule>) {
                return deterministic_to_json(r);
            } else if constexpr (std::is_same_v<T, RandomRule>) {
                json j;
                j["kind"] = "random";
                json support = json::object();
                for (const auto& [label, outcomes] : r.support()) {
                    json arr = json::array();
                    for (const WeightedBelief& o : outcomes)
                        arr.push_back({{"posterior", o.posterior.coords()},
                                       {"probability", o.probability}});
                    support[label] = std::move(arr);
                }
                j["support"] = std::move(support);
                return j;
            } else {
                json j;
                j["kind"] = "confirmatory";
                j["q"] = per_realization_to_json(r.q);
                if (!r.error_target.empty()) {
                    json targets = json::object();
                    for (const auto& [label, target] : r.error_target)
                        targets[label] = target;
                    j["error_target"] = std::move(targets);
                }
                return j;
            }
        },
        rule);
}

ScenarioRule scenario_rule_from_json(const json& j) {
    const std::string kind = text(field(j, "rule", "kind"), "rule.kind");
    if (kind == "bayes") return DeterministicRule{BayesianRule{}};
    if (kind == "shrink")
        return DeterministicRule{ShrinkRule{per_realization_from_json(
            field(j, "rule", "lambda"), "rule.lambda")}};
    if (kind == "stretch")
        return DeterministicRule{StretchRule{per_realization_from_json(
            field(j, "rule", "lambda"), "rule.lambda")}};
    if (kind == "grether2")
        return DeterministicRule{GretherTwoStateRule{
            number(field(j, "rule", "beta"), "rule.beta")}};
    if (kind == "power")
        return DeterministicRule{PowerDistortionRule{
            number(field(j, "rule", "beta"), "rule.beta")}};
    if (kind == "misspecified_prior")
        return DeterministicRule{MisspecifiedPriorRule{Belief(
            vec(field(j, "rule", "perceived_prior"), "rule.perceived_prior"))}};
    if (kind == "extreme_belief_aversion")
        return DeterministicRule{ExtremeBeliefAversionRule{
            number(field(j, "rule", "epsilon"), "rule.epsilon")}};
    if (kind == "table") {
        const json& posts = field(j, "rule", "posteriors");
        if (!posts.is_object()) bad("rule.posteriors", "expected a label map");
        TabularRule table;
        for (const auto& [label, row] : posts.items())
            table.posteriors.emplace(
                label, Belief(vec(row, "rule.posteriors." + label)));
        return DeterministicRule{table};
    }
    if (kind == "random") {
        const json& support = field(j, "rule", "support");
        if (!support.is_object()) bad("rule.support", "expected a label map");
        RandomRule rule;
        for (const auto& [label, arr] : support.items()) {
            const std::string where = "rule.support." + label;
            if (!arr.is_array() || arr.empty())
                bad(where, "expected a nonempty outcome array");
            std::vector<WeightedBelief> outcomes;
            for (const json& o : arr)
                outcomes.push_back(
                    {Belief(vec(field(o, where, "posterior"),
                                where + ".posterior")),
                     number(field(o, where, "probability"),
                            where + ".probability")});
            rule.set(label, std::move(outcomes));
        }
        return rule;
    }
    if (kind == "confirmatory") {
        ConfirmatoryBias bias;
        bias.q = per_realization_from_json(field(j, "rule", "q"), "rule.q");
        if (const auto it = j.find("error_target"); it != j.end()) {
            if (!it->is_object())
                bad("rule.error_target", "expected a label map");
            for (const auto& [label, target] : it->items())
                bias.error_target[label] =
                    text(target, "rule.error_target." + label);
        }
        return bias;
    }
    bad("rule.kind", "unknown kind '" + kind + "'");
}

json to_json(const DecisionProblem& dp) {
    json actions = json::array();
    for (const Action& a : dp.actions)
        actions.push_back({{"label", a.label}, {"payoffs", a.payoffs}});
    return json{{"actions", std::move(actions)}};
}

DecisionProblem decision_problem_from_json(const json& j) {
    const json& arr = field(j, "decision_problem", "actions");
    if (!arr.is_array()) bad("decision_problem.actions", "expected an array");
    std::vector<Action> actions;
    for (const json& a : arr)
        actions.emplace_back(
            text(field(a, "decision_problem.actions[]", "label"),
                 "decision_problem.actions[].label"),
            vec(field(a, "decision_problem.actions[]", "payoffs"),
                "decision_problem.actions[].payoffs"));
    return DecisionProblem(std::move(actions));
}

json to_json(const Hyperplane& plane) {
    return json{{"alpha", plane.alpha}, {"beta", plane.beta}};
}

Hyperplane hyperplane_from_json(const json& j) {
    return Hyperplane{vec(field(j, "hyperplane", "alpha"), "hyperplane.alpha"),
                      number(field(j, "hyperplane", "beta"),
                             "hyperplane.beta")};
}

json to_json(const HullCertificate& cert) {
    json j;
    if (cert.side == HullCertificate::Side::Inside) {
        j["verdict"] = "inside";
        j["weights"] = cert.weights;
    } else {
        j["verdict"] = "outside";
        j["alpha"] = cert.separator.alpha;
        j["beta"] = cert.separator.beta;
        j["margin"] = cert.margin;
    }
    j["distance"] = cert.projection.distance;
    return j;
}

json to_json(const ExploitContract& contract, const Environment& env) {
    json takers = json::array();
    for (const std::size_t s : contract.predicted_takers)
        takers.push_back(env.signals.label(s));
    return json{{"problem", to_json(contract.problem)},
                {"target_loss", contract.target_loss},
                {"predicted_takers", std::move(takers)},
                {"achieved_payoff", contract.achieved_payoff},
                {"certificate", to_json(contract.certificate)}};
}

json to_json(const Scenario& scenario) {
    json j;
    j["environment"] = to_json(scenario.env);
    j["rule"] = to_json(scenario.rule);
    if (scenario.dp) j["decision_problem"] = to_json(*scenario.dp);
    if (scenario.target_loss) j["target_loss"] = *scenario.target_loss;
    return j;
}

json to_json(const TrialReport& report) {
    json failures = json::array();
    for (const TrialFailure& f : report.failures)
        failures.push_back({{"trial", f.trial}, {"summary", f.summary}});
    return json{{"suite", report.suite},
                {"trials", report.trials},
                {"resamples", report.resamples},
                {"borderline", report.borderline},
                {"extreme", report.extreme},
                {"passed", report.passed()},
                {"failures", std::move(failures)}};
}

json to_json(const SimulationResult& result) {
    return json{{"trials", result.trials},
                {"empirical_mean", result.empirical_mean},
                {"standard_error", result.standard_error},
                {"analytic", result.analytic},
                {"consistent", result.consistent()}};
}

Scenario scenario_from_json(const json& j) {
    if (!j.is_object()) bad("scenario", "expected an object");
    Scenario scenario{environment_from_json(field(j, "scenario", "environment")),
                      scenario_rule_from_json(field(j, "scenario", "rule")),
                      std::nullopt, std::nullopt};
    if (const auto it = j.find("decision_problem"); it != j.end())
        scenario.dp = decision_problem_from_json(*it);
    if (const auto it = j.find("target_loss"); it != j.end()) {
        const double k = number(*it, "scenario.target_loss");
        if (!(k > 0.0))
            throw Error(Errc::InvalidParameter,
                        "scenario.target_loss must be positive");
        scenario.target_loss = k;
    }

    // Resolve every cross-reference now rather than at first use.
    std::visit(
        [&scenario](const auto& r) {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, DeterministicRule>) {
                validate_rule(r, scenario.env);
            } else if constexpr (std::is_same_v<T, RandomRule>) {
                for (std::size_t s = 0; s < scenario.env.realizations(); ++s)
                    for (const WeightedBelief& o :
                         apply_random(r, scenario.env, s))
                        if (o.posterior.size() != scenario.env.states())
                            throw Error(Errc::DimensionMismatch,
                                        "random-rule posterior dimension");
            } else {
                (void)compile_confirmatory(r, scenario.env);
            }
        },
        scenario.rule);
    if (scenario.dp)
        for (const Action& a : scenario.dp->actions)
            if (a.payoffs.size() != scenario.env.states())
                throw Error(Errc::DimensionMismatch,
                            "action '" + a.label +
                                "' payoffs vs environment states");
    return scenario;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::ParseError, "cannot open '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(Errc::ParseError,
                    "'" + path + "' is not valid JSON: " + e.what());
    }
    return scenario_from_json(j);
}

} // namespace nonbayes
