#include "nonbayes/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>

#include "nonbayes/errors.hpp"
#include "nonbayes/exploit.hpp"
#include "nonbayes/geometry.hpp"
#include "nonbayes/numeric.hpp"

namespace nonbayes {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string format(const char* fmt, ...) {
    va_list args;
    va_start(args, fmt);
    char buf[256];
    std::vsnprintf(buf, sizeof buf, fmt, args);
    va_end(args);
    return buf;
}

std::vector<std::string> signal_labels(std::size_t m) {
    std::vector<std::string> labels;
    labels.reserve(m);
    for (std::size_t s = 0; s < m; ++s)
        labels.push_back("s" + std::to_string(s + 1));
    return labels;
}

/// Uniform n in {2,3,4} and a compatible signal count.
std::pair<std::size_t, std::size_t> small_shape(Rng& rng) {
    const std::size_t n = 2 + rng.index(3);
    const std::size_t m = 2 + rng.index(n - 1);
    return {n, m};
}

PerRealization random_weights(Rng& rng, const Environment& env, double lo,
                              double hi) {
    PerRealization w;
    for (std::size_t s = 0; s < env.realizations(); ++s)
        w.by_label[env.signals.label(s)] = rng.uniform(lo, hi);
    return w;
}

/// Fixed two-state benchmark: even prior, 80% accurate signal.
Environment binary_symmetric() {
    return Environment(Belief({0.5, 0.5}),
                       SignalModel({"H", "L"}, {{0.8, 0.2}, {0.2, 0.8}}));
}

/// Fixed three-state benchmark with well-interior posteriors (each signal
/// triples the odds of its own state).
Environment ternary_peaked() {
    const Vec third = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    Matrix rows(3, Vec(3, 0.2));
    for (std::size_t s = 0; s < 3; ++s) rows[s][s] = 0.6;
    return Environment(Belief(third), SignalModel(signal_labels(3), rows));
}

} // namespace

Environment random_environment(std::size_t n, std::size_t m,
                               std::uint64_t seed) {
    if (m < 2 || m > n || n > 8)
        throw Error(Errc::InvalidParameter,
                    "random_environment needs 2 <= m <= n <= 8");
    Rng rng(seed);
    for (std::size_t rejections = 0; rejections < 10000; ++rejections) {
        // Interior prior: mix a flat Dirichlet draw with the uniform point so
        // every state keeps at least 1% mass.
        Vec prior = rng.dirichlet_flat(n);
        for (double& p : prior) p = (1.0 - 0.01 * double(n)) * p + 0.01;

        Matrix rows(m, Vec(n, 0.0));
        for (std::size_t theta = 0; theta < n; ++theta) {
            const Vec col = rng.dirichlet_flat(m);
            for (std::size_t s = 0; s < m; ++s) rows[s][theta] = col[s];
        }

        bool marginals_ok = true;
        for (std::size_t s = 0; s < m && marginals_ok; ++s) {
            double p = 0.0;
            for (std::size_t theta = 0; theta < n; ++theta)
                p += prior[theta] * rows[s][theta];
            marginals_ok = p >= 0.01;
        }
        if (!marginals_ok) continue;

        Environment env(Belief(prior), SignalModel(signal_labels(m), rows));
        const PosteriorSystem sys = posterior_system(env);
        if (!affinely_independent(sys.posteriors, 1e-6)) continue;
        return env;
    }
    throw Error(Errc::SamplingExhausted,
                "no admissible environment after 10000 rejections");
}

DecisionProblem random_decision_problem(std::size_t n, std::size_t k,
                                        double range, std::uint64_t seed) {
    if (n < 2 || k == 0 || !(range > 0.0) || !std::isfinite(range))
        throw Error(Errc::InvalidParameter,
                    "random_decision_problem needs n >= 2, k >= 1, range > 0");
    Rng rng(seed);
    std::vector<Action> actions;
    actions.reserve(k);
    for (std::size_t a = 0; a < k; ++a) {
        Vec payoffs(n);
        for (double& u : payoffs) u = rng.uniform(-range, range);
        actions.emplace_back("a" + std::to_string(a + 1), payoffs);
    }
    return DecisionProblem(actions);
}

TrialReport theorem1_suite(std::size_t trials, std::uint64_t seed) {
    TrialReport report;
    report.suite = "theorem1";
    report.trials = trials;
    report.extreme = kInf;
    for (std::uint64_t t = 0; t < trials; ++t) {
        Rng rng = Rng::substream(seed, t);
        const auto [n, m] = small_shape(rng);
        const Environment env = random_environment(n, m, rng.next());
        const ShrinkRule rule{random_weights(rng, env, 0.0, 1.0)};
        const std::size_t k = 1 + rng.index(n + 2);
        const DecisionProblem dp =
            random_decision_problem(n, k, 10.0, rng.next());
        const double payoff =
            ex_ante_payoff(env, ScenarioRule{DeterministicRule{rule}}, dp);
        report.extreme = std::min(report.extreme, payoff);
        if (payoff < -1e-9)
            report.failures.push_back(
                {t, format("underreacting agent earned %.3e < -1e-9", payoff)});
    }
    if (trials == 0) report.extreme = 0.0;
    return report;
}

TrialReport lemma1_suite(std::size_t trials, std::uint64_t seed) {
    TrialReport report;
    report.suite = "lemma1";
    report.trials = trials;
    const double targets[4] = {0.5, 1.0, 10.0, 1000.0};
    for (std::uint64_t t = 0; t < trials; ++t) {
        Rng rng = Rng::substream(seed, t);
        bool done = false;
        for (int attempt = 0; attempt < 500 && !done; ++attempt) {
            const auto [n, m] = small_shape(rng);
            const Environment env = random_environment(n, m, rng.next());
            const PosteriorSystem sys = posterior_system(env);

            const StretchRule rule{random_weights(rng, env, 0.05, 1.5)};
            std::vector<Belief> distorted;
            try {
                distorted = distorted_posteriors(DeterministicRule{rule}, env);
            } catch (const Error&) {
                ++report.resamples; // stretched past the simplex boundary
                continue;
            }

            // Pick the widest hull escape; demand a well-conditioned one so
            // the K = 1000 exactness check is meaningful rather than a
            // rounding lottery.
            std::optional<std::size_t> best;
            std::optional<HullCertificate> best_cert;
            for (std::size_t s = 0; s < m; ++s) {
                HullCertificate cert =
                    hull_membership(distorted[s], sys.posteriors);
                if (cert.side != HullCertificate::Side::Outside) continue;
                if (!best || cert.margin > best_cert->margin) {
                    best = s;
                    best_cert = std::move(cert);
                }
            }
            if (!best || best_cert->margin < 5e-4) {
                ++report.resamples;
                continue;
            }
            double denom = 0.0;
            for (std::size_t r = 0; r < m; ++r)
                if (best_cert->separator.evaluate(distorted[r]) > 0.0)
                    denom -= sys.marginals[r] *
                             best_cert->separator.evaluate(sys.posteriors[r]);
            if (denom < 1e-3) {
                ++report.resamples;
                continue;
            }

            const double K = targets[rng.index(4)];
            try {
                const ExploitContract contract = build_overreaction_exploit(
                    env, DeterministicRule{rule}, *best, K);
                const double err =
                    std::abs(contract.achieved_payoff + K) / std::max(1.0, K);
                report.extreme = std::max(report.extreme, err);
                if (err > 1e-9)
                    report.failures.push_back(
                        {t, format("payoff %.12f missed -K=%g",
                                   contract.achieved_payoff, K)});
            } catch (const Error& e) {
                report.failures.push_back(
                    {t, std::string("construction failed: ") + e.what()});
            }
            done = true;
        }
        if (!done)
            report.failures.push_back(
                {t, "no well-conditioned hull escape in 500 attempts"});
    }
    return report;
}

namespace {

/// Worst-case slack of a candidate single-action direction u: positive iff
/// every margin of the "take iff distorted value > 0" story holds strictly
/// and the takers' true-value total is strictly negative.
double direction_robustness(const Vec& u, const std::vector<Belief>& distorted,
                            const PosteriorSystem& sys) {
    double slack = kInf;
    double total = 0.0;
    bool any = false;
    for (std::size_t s = 0; s < distorted.size(); ++s) {
        const double dv = dot(u, distorted[s].coords());
        if (dv > 0.0) {
            any = true;
            slack = std::min(slack, dv);
            total += sys.marginals[s] * dot(u, sys.posteriors[s].coords());
        } else {
            slack = std::min(slack, -dv);
        }
    }
    if (!any) return -kInf;
    return std::min(slack, -total);
}

} // namespace

TrialReport prop2_bruteforce_check(std::size_t trials, std::uint64_t seed) {
    TrialReport report;
    report.suite = "prop2";
    report.trials = trials;
    report.extreme = kInf; // tightest accepted oracle separation
    constexpr std::size_t kAngles = 10000;
    const double nudges[6] = {-1e-4, -1e-5, -1e-7, 1e-7, 1e-5, 1e-4};

    for (std::uint64_t t = 0; t < trials; ++t) {
        Rng rng = Rng::substream(seed, t);
        const Environment env = random_environment(2, 2, rng.next());
        const PosteriorSystem sys = posterior_system(env);

        // Distorted posteriors anywhere on the (one-dimensional) simplex.
        std::vector<Belief> distorted;
        TabularRule table;
        for (std::size_t s = 0; s < 2; ++s) {
            Belief b(rng.dirichlet_flat(2));
            table.posteriors.emplace(env.signals.label(s), b);
            distorted.push_back(std::move(b));
        }

        const ExploitabilityStatus status =
            exploitability_status(env, DeterministicRule{table});

        // Brute-force search over all gauge directions.
        double best_all = -kInf;
        double best_grid = -kInf;
        for (std::size_t a = 0; a < kAngles; ++a) {
            const double phi = 2.0 * M_PI * double(a) / double(kAngles);
            const Vec u = {std::cos(phi), std::sin(phi)};
            const double rob = direction_robustness(u, distorted, sys);
            best_grid = std::max(best_grid, rob);
            best_all = std::max(best_all, rob);
        }
        // Refine near taker-set changes: directions orthogonal to a distorted
        // posterior or to a taker-weighted true-posterior sum.
        std::vector<Vec> criticals = {distorted[0].coords(),
                                      distorted[1].coords()};
        {
            const Vec& x0 = sys.posteriors[0].coords();
            const Vec& x1 = sys.posteriors[1].coords();
            criticals.push_back({sys.marginals[0] * x0[0],
                                 sys.marginals[0] * x0[1]});
            criticals.push_back({sys.marginals[1] * x1[0],
                                 sys.marginals[1] * x1[1]});
            criticals.push_back(env.prior.coords());
        }
        for (const Vec& v : criticals) {
            const double base = std::atan2(-v[0], v[1]);
            for (const double side : {0.0, M_PI})
                for (const double nudge : nudges) {
                    const double phi = base + side + nudge;
                    const Vec u = {std::cos(phi), std::sin(phi)};
                    best_all = std::max(
                        best_all, direction_robustness(u, distorted, sys));
                }
        }
        const bool witness = best_all > 0.0;

        // Exclude calls either side could flip under tolerance wiggle.
        bool borderline = witness ? best_all <= 1e-6 : best_grid >= -1e-6;
        for (std::size_t s = 0; s < 2 && !borderline; ++s) {
            const double d_full =
                project_to_hull(distorted[s].coords(), sys.posteriors).distance;
            const std::vector<Belief> segment = {sys.posteriors[s], env.prior};
            const double d_seg =
                project_to_hull(distorted[s].coords(), segment).distance;
            borderline = (d_full > 1e-12 && d_full <= 1e-6) ||
                         (d_seg > 1e-12 && d_seg <= 1e-6);
        }
        if (borderline) {
            ++report.borderline;
            continue;
        }

        const bool flagged = status.verdict == Verdict::Exploitable;
        if (status.verdict == Verdict::Unknown) {
            report.failures.push_back(
                {t, "unresolved verdict on a clear binary instance"});
            continue;
        }
        if (flagged != witness) {
            report.failures.push_back(
                {t, format("verdict %s but oracle robustness %.3e",
                           verdict_name(status.verdict), best_all)});
            continue;
        }
        report.extreme = std::min(report.extreme, std::abs(best_all));
    }
    if (!std::isfinite(report.extreme)) report.extreme = 0.0;
    return report;
}

TrialReport pruning_suite(std::size_t trials, std::uint64_t seed) {
    TrialReport report;
    report.suite = "pruning";
    report.trials = trials;
    for (std::uint64_t t = 0; t < trials; ++t) {
        Rng rng = Rng::substream(seed, t);
        const auto [n, m] = small_shape(rng);
        const Environment env = random_environment(n, m, rng.next());
        const DeterministicRule rule{
            ShrinkRule{random_weights(rng, env, 0.0, 1.0)}};
        const std::size_t k = 1 + rng.index(n + 2);
        const DecisionProblem dp =
            random_decision_problem(n, k, 10.0, rng.next());

        const double before = ex_ante_payoff(env, ScenarioRule{rule}, dp);
        const DecisionProblem pruned = prune_dagger_actions(env, rule, dp);
        const double after = ex_ante_payoff(env, ScenarioRule{rule}, pruned);
        report.extreme = std::max(report.extreme, after - before);
        if (after > before + 1e-9)
            report.failures.push_back(
                {t, format("pruning raised payoff %.12f -> %.12f", before,
                           after)});
        // When every action was prunable the original payoff cannot have
        // been negative: each kept trade was already worthless somewhere
        // and harmless on the distorted side everywhere.
        if (pruned.actions.empty() && before < -1e-9)
            report.failures.push_back(
                {t, format("all actions prunable yet payoff %.3e < 0",
                           before)});
    }
    return report;
}

TrialReport confirmatory_suite(std::size_t trials, std::uint64_t seed) {
    TrialReport report;
    report.suite = "confirmatory";
    report.trials = trials;
    const double targets[3] = {0.5, 1.0, 10.0};
    for (std::uint64_t t = 0; t < trials; ++t) {
        Rng rng = Rng::substream(seed, t);
        const std::size_t n = 2 + rng.index(3);

        if (t % 10 == 0) {
            // Control: an agent who never misreads must be rejected.
            const Environment env = random_environment(n, n, rng.next());
            ConfirmatoryBias bias;
            bias.q.fallback = 1.0;
            try {
                (void)build_confirmatory_exploit(env, bias, 1.0);
                report.failures.push_back(
                    {t, "all-correct control was not rejected"});
            } catch (const Error& e) {
                if (e.code() != Errc::NoMisreading)
                    report.failures.push_back(
                        {t, std::string("control rejected with wrong error: ") +
                                e.what()});
            }
            continue;
        }

        bool done = false;
        for (int attempt = 0; attempt < 300 && !done; ++attempt) {
            const Environment env = random_environment(n, n, rng.next());
            const PosteriorSystem sys = posterior_system(env);

            // Conditioning: every exposing hyperplane should separate by a
            // sane margin, otherwise exactness at K = 10 is a rounding bet.
            std::vector<Hyperplane> planes;
            bool conditioned = true;
            for (std::size_t tt = 0; tt < n && conditioned; ++tt) {
                try {
                    planes.push_back(exposing_hyperplane(sys.posteriors, tt));
                } catch (const Error&) {
                    conditioned = false;
                    break;
                }
                for (std::size_t j = 0; j < n; ++j)
                    if (j != tt &&
                        -planes.back().evaluate(sys.posteriors[j]) < 1e-2)
                        conditioned = false;
            }
            if (!conditioned) {
                ++report.resamples;
                continue;
            }

            ConfirmatoryBias bias;
            bias.q.fallback = 1.0;
            const std::size_t misreads = 1 + rng.index(n);
            for (std::size_t i = 0; i < misreads; ++i)
                bias.q.by_label[env.signals.label(rng.index(n))] =
                    rng.uniform(0.0, 0.8);
            for (const auto& [label, q] : bias.q.by_label)
                if (rng.uniform01() < 0.3) {
                    // Occasionally pin an explicit misread destination.
                    const std::size_t s = env.signals.index_of(label);
                    std::size_t tgt = rng.index(n);
                    if (tgt == s) tgt = (tgt + 1) % n;
                    bias.error_target[label] = env.signals.label(tgt);
                }

            // The dominant-target mass must clear a floor for the same
            // conditioning reason.
            Vec mass(n, 0.0);
            for (std::size_t s = 0; s < n; ++s) {
                const std::string& label = env.signals.label(s);
                const double q = bias.q.at(label);
                if (q >= 1.0 - 1e-15) continue;
                std::size_t tgt;
                if (auto it = bias.error_target.find(label);
                    it != bias.error_target.end())
                    tgt = env.signals.index_of(it->second);
                else
                    tgt = default_error_target(env, s);
                mass[tgt] += sys.marginals[s] * (1.0 - q) *
                             (-planes[tgt].evaluate(sys.posteriors[s]));
            }
            if (*std::max_element(mass.begin(), mass.end()) < 1e-3) {
                ++report.resamples;
                continue;
            }

            const double K = targets[rng.index(3)];
            try {
                const ExploitContract contract =
                    build_confirmatory_exploit(env, bias, K);
                const double err = std::abs(contract.achieved_payoff + K);
                report.extreme = std::max(report.extreme, err);
                if (err > 1e-9)
                    report.failures.push_back(
                        {t, format("payoff %.12f missed -K=%g",
                                   contract.achieved_payoff, K)});
            } catch (const Error& e) {
                report.failures.push_back(
                    {t, std::string("construction failed: ") + e.what()});
            }
            done = true;
        }
        if (!done)
            report.failures.push_back(
                {t, "no well-conditioned confirmatory draw in 300 attempts"});
    }
    return report;
}

TrialReport bayes_plausibility_suite(std::size_t trials, std::uint64_t seed) {
    TrialReport report;
    report.suite = "plausibility";
    report.trials = trials;
    for (std::uint64_t t = 0; t < trials; ++t) {
        Rng rng = Rng::substream(seed, t);
        const std::size_t n = 2 + rng.index(7);
        const std::size_t m = 2 + rng.index(n - 1);
        const Environment env = random_environment(n, m, rng.next());
        const PosteriorSystem sys = posterior_system(env);
        Vec recon(n, 0.0);
        for (std::size_t s = 0; s < m; ++s)
            for (std::size_t theta = 0; theta < n; ++theta)
                recon[theta] += sys.marginals[s] * sys.posteriors[s][theta];
        const double gap = linf_dist(recon, env.prior.coords());
        report.extreme = std::max(report.extreme, gap);
        if (gap > 1e-10)
            report.failures.push_back(
                {t, format("posterior average drifted %.3e from prior", gap)});
    }
    return report;
}

TrialReport grether_reduction_suite(std::size_t trials, std::uint64_t seed) {
    TrialReport report;
    report.suite = "grether";
    report.trials = trials;
    const double betas[4] = {0.25, 0.5, 2.0, 4.0};
    for (std::uint64_t t = 0; t < trials; ++t) {
        Rng rng = Rng::substream(seed, t);
        double x = rng.uniform01();
        while (x <= 0.0 || x >= 1.0) x = rng.uniform01();
        const Belief b({x, 1.0 - x});
        for (const double beta : betas) {
            const Belief closed = grether_two_state(b, beta);
            const Belief power = power_distortion(b, beta);
            const double gap = linf_dist(closed.coords(), power.coords());
            report.extreme = std::max(report.extreme, gap);
            if (gap > 1e-12)
                report.failures.push_back(
                    {t, format("beta=%g closed form off by %.3e", beta, gap)});
        }
        const Belief identity = grether_two_state(b, 1.0);
        const double gap = linf_dist(identity.coords(), b.coords());
        if (gap > 1e-15)
            report.failures.push_back(
                {t, format("beta=1 not the identity (gap %.3e)", gap)});
    }
    return report;
}

TrialReport random_segment_safety_suite(std::size_t trials,
                                        std::uint64_t seed) {
    TrialReport report;
    report.suite = "random_safety";
    report.trials = trials;
    report.extreme = kInf;
    for (std::uint64_t t = 0; t < trials; ++t) {
        Rng rng = Rng::substream(seed, t);
        const auto [n, m] = small_shape(rng);
        const Environment env = random_environment(n, m, rng.next());
        const PosteriorSystem sys = posterior_system(env);

        RandomRule rule;
        for (std::size_t s = 0; s < m; ++s) {
            const std::size_t arms = 1 + rng.index(3);
            const Vec probs = rng.dirichlet_flat(arms);
            std::vector<WeightedBelief> outcomes;
            for (std::size_t a = 0; a < arms; ++a) {
                const double w = rng.uniform01();
                outcomes.push_back(
                    {Belief(axby(1.0 - w, sys.posteriors[s].coords(), w,
                                 env.prior.coords())),
                     probs[a]});
            }
            rule.set(env.signals.label(s), outcomes);
        }

        const std::size_t k = 1 + rng.index(n + 2);
        const DecisionProblem dp =
            random_decision_problem(n, k, 10.0, rng.next());
        const double payoff = ex_ante_payoff(env, ScenarioRule{rule}, dp);
        report.extreme = std::min(report.extreme, payoff);
        if (payoff < -1e-9)
            report.failures.push_back(
                {t, format("segment-supported rule earned %.3e", payoff)});
    }
    if (trials == 0) report.extreme = 0.0;
    return report;
}

TrialReport geometry_oracle_suite(std::size_t trials, std::uint64_t seed) {
    TrialReport report;
    report.suite = "geometry";
    report.trials = trials;
    for (std::uint64_t t = 0; t < trials; ++t) {
        Rng rng = Rng::substream(seed, t);
        const std::size_t n = (t % 2 == 0) ? 2 : 3;
        const std::size_t count = 2 + rng.index(2);
        std::vector<Belief> gens;
        for (std::size_t i = 0; i < count; ++i)
            gens.emplace_back(rng.dirichlet_flat(n));
        const Vec query = rng.dirichlet_flat(n);

        const Projection proj = project_to_hull(query, gens);
        const HullCertificate cert = hull_membership(Belief(query), gens);
        const bool inside = cert.side == HullCertificate::Side::Inside;

        if (n == 2) {
            // The hull is an interval of first coordinates; distances scale
            // by sqrt(2) along the simplex line.
            double lo = kInf, hi = -kInf;
            for (const Belief& g : gens) {
                lo = std::min(lo, g[0]);
                hi = std::max(hi, g[0]);
            }
            const double overhang =
                std::max({lo - query[0], query[0] - hi, 0.0});
            const double oracle = overhang * std::sqrt(2.0);
            if (std::abs(oracle - proj.distance) > 1e-9)
                report.failures.push_back(
                    {t, format("interval oracle %.12f vs projection %.12f",
                               oracle, proj.distance)});
            else if (inside != (oracle <= 1e-9))
                report.failures.push_back(
                    {t, format("side disagrees with interval oracle at %.3e",
                               oracle)});
            report.extreme =
                std::max(report.extreme, std::abs(oracle - proj.distance));
            continue;
        }

        // Dense barycentric sweep. Grid distances can only overestimate the
        // true one, so a grid point closer than the projection's distance is
        // an immediate fault, and the nearest grid point must sit within one
        // mesh width of it.
        constexpr int kSteps = 1000;
        double grid_min = kInf;
        bool fault = false;
        for (int i = 0; i <= kSteps && !fault; ++i) {
            const double w0 = double(i) / kSteps;
            if (count == 2) {
                const Vec point =
                    axby(1.0 - w0, gens[0].coords(), w0, gens[1].coords());
                grid_min = std::min(grid_min, l2_dist(point, query));
            } else {
                for (int j = 0; i + j <= kSteps; ++j) {
                    const double w1 = double(j) / kSteps;
                    Vec point(n, 0.0);
                    for (std::size_t c = 0; c < n; ++c)
                        point[c] = w0 * gens[0][c] + w1 * gens[1][c] +
                                   (1.0 - w0 - w1) * gens[2][c];
                    grid_min = std::min(grid_min, l2_dist(point, query));
                    if (grid_min < proj.distance - 1e-9) break;
                }
            }
            if (grid_min < proj.distance - 1e-9) fault = true;
            // Inside certificates cannot fault (grid distances are >= 0),
            // so the scan may stop once the mesh-width check is satisfied.
            if (inside && grid_min <= proj.distance + 2e-3 - 1e-12) break;
        }
        if (fault)
            report.failures.push_back(
                {t, format("grid found hull point at %.12f < projection %.12f",
                           grid_min, proj.distance)});
        else if (grid_min > proj.distance + 2e-3)
            report.failures.push_back(
                {t, format("projection %.12f unreachable on grid (min %.12f)",
                           proj.distance, grid_min)});
        else if (!inside)
            report.extreme = std::max(report.extreme,
                                      std::abs(grid_min - proj.distance));
    }
    return report;
}

SimulationResult simulate_payoff(const Environment& env,
                                 const ScenarioRule& rule,
                                 const DecisionProblem& dp, std::size_t trials,
                                 std::uint64_t seed) {
    if (trials == 0)
        throw Error(Errc::InvalidParameter, "simulation needs trials >= 1");
    for (const Action& a : dp.actions)
        if (a.payoffs.size() != env.states())
            throw Error(Errc::DimensionMismatch,
                        "action payoffs vs environment states");

    const PosteriorSystem sys = posterior_system(env);
    const auto outcomes = outcome_system(rule, env);
    const std::size_t m = env.realizations();
    const std::size_t n = env.states();

    // Resolve every (realization, outcome) choice once up front.
    std::vector<std::vector<const Vec*>> payout(m);
    std::vector<Vec> mixture(m);
    for (std::size_t s = 0; s < m; ++s) {
        for (const WeightedBelief& o : outcomes[s]) {
            const auto pick =
                agent_best_response(dp, o.posterior, sys.posteriors[s]);
            payout[s].push_back(pick ? &dp.actions[*pick].payoffs : nullptr);
            mixture[s].push_back(o.probability);
        }
    }
    std::vector<Vec> likecol(n, Vec(m));
    for (std::size_t theta = 0; theta < n; ++theta)
        for (std::size_t s = 0; s < m; ++s)
            likecol[theta][s] = env.signals.likelihood(s, theta);

    Rng rng(seed);
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        const std::size_t theta = rng.categorical(env.prior.coords());
        const std::size_t s = rng.categorical(likecol[theta]);
        const std::size_t k =
            mixture[s].size() > 1 ? rng.categorical(mixture[s]) : 0;
        const double v = payout[s][k] ? (*payout[s][k])[theta] : 0.0;
        sum += v;
        sumsq += v * v;
    }

    SimulationResult result;
    result.trials = trials;
    result.empirical_mean = sum / double(trials);
    const double nd = double(trials);
    double var =
        (sumsq - nd * result.empirical_mean * result.empirical_mean) /
        std::max(1.0, nd - 1.0);
    var = std::max(var, 0.0);
    result.standard_error = std::sqrt(var / nd);
    result.analytic = ex_ante_payoff(env, rule, dp);
    return result;
}

namespace {

struct FixedScenario {
    Environment env;
    ScenarioRule rule;
    DecisionProblem dp;
};

FixedScenario make_scenario(std::size_t i, std::uint64_t seed) {
    Rng rng = Rng::substream(seed, 1000 + i);
    const Environment bin = binary_symmetric();
    const Environment tern = ternary_peaked();
    const DecisionProblem bet1(
        {Action("long_h", {1.0, -1.0})}); // worth 0.3 to a Bayesian

    switch (i % 20) {
    case 0:
        return {bin, DeterministicRule{BayesianRule{}}, bet1};
    case 1:
        return {bin, DeterministicRule{ShrinkRule{PerRealization{0.5}}}, bet1};
    case 2: {
        const DeterministicRule rule{StretchRule{PerRealization{0.5}}};
        const ExploitContract c = build_overreaction_exploit(bin, rule, 0, 1.0);
        return {bin, rule, c.problem};
    }
    case 3:
        return {bin, DeterministicRule{GretherTwoStateRule{2.0}},
                random_decision_problem(2, 3, 5.0, rng.next())};
    case 4:
        return {bin, DeterministicRule{GretherTwoStateRule{0.5}},
                random_decision_problem(2, 3, 5.0, rng.next())};
    case 5: {
        ConfirmatoryBias bias;
        bias.q.fallback = 1.0;
        bias.q.by_label["L"] = 0.5;
        const ExploitContract c = build_confirmatory_exploit(bin, bias, 1.0);
        return {bin, ScenarioRule{bias}, c.problem};
    }
    case 6: {
        ConfirmatoryBias bias;
        bias.q.by_label["H"] = 0.7;
        bias.q.by_label["L"] = 0.9;
        return {bin, ScenarioRule{bias},
                random_decision_problem(2, 2, 5.0, rng.next())};
    }
    case 7: {
        const PosteriorSystem sys = posterior_system(bin);
        RandomRule rule;
        for (std::size_t s = 0; s < 2; ++s) {
            const Vec mid = axby(0.6, sys.posteriors[s].coords(), 0.4,
                                 bin.prior.coords());
            rule.set(bin.signals.label(s),
                     {{sys.posteriors[s], 0.7}, {Belief(mid), 0.3}});
        }
        return {bin, ScenarioRule{rule},
                random_decision_problem(2, 3, 5.0, rng.next())};
    }
    case 8: {
        TabularRule table;
        table.posteriors.emplace("H", Belief({0.6, 0.4}));
        table.posteriors.emplace("L", Belief({0.35, 0.65}));
        return {bin, DeterministicRule{table},
                random_decision_problem(2, 3, 5.0, rng.next())};
    }
    case 9:
        return {bin,
                DeterministicRule{MisspecifiedPriorRule{Belief({0.4, 0.6})}},
                random_decision_problem(2, 3, 5.0, rng.next())};
    case 10:
        return {tern, DeterministicRule{BayesianRule{}},
                random_decision_problem(3, 4, 5.0, rng.next())};
    case 11: {
        PerRealization w{0.4};
        w.by_label["s1"] = 0.2;
        w.by_label["s2"] = 0.5;
        w.by_label["s3"] = 0.9;
        return {tern, DeterministicRule{ShrinkRule{w}},
                random_decision_problem(3, 4, 5.0, rng.next())};
    }
    case 12:
        return {tern, DeterministicRule{PowerDistortionRule{2.0}},
                random_decision_problem(3, 4, 5.0, rng.next())};
    case 13:
        return {tern, DeterministicRule{PowerDistortionRule{0.5}},
                random_decision_problem(3, 4, 5.0, rng.next())};
    case 14:
        return {tern, DeterministicRule{ExtremeBeliefAversionRule{0.05}},
                random_decision_problem(3, 4, 5.0, rng.next())};
    case 15: {
        const DeterministicRule rule{StretchRule{PerRealization{0.4}}};
        const ExploitContract c =
            build_overreaction_exploit(tern, rule, 0, 2.0);
        return {tern, rule, c.problem};
    }
    case 16: {
        ConfirmatoryBias bias;
        bias.q.fallback = 1.0;
        bias.q.by_label["s1"] = 0.6;
        const ExploitContract c = build_confirmatory_exploit(tern, bias, 0.5);
        return {tern, ScenarioRule{bias}, c.problem};
    }
    case 17: {
        const Environment env = random_environment(4, 3, rng.next());
        return {env, DeterministicRule{ShrinkRule{PerRealization{0.3}}},
                random_decision_problem(4, 5, 5.0, rng.next())};
    }
    case 18:
        return {bin, DeterministicRule{ExtremeBeliefAversionRule{0.2}},
                random_decision_problem(2, 3, 5.0, rng.next())};
    default: {
        const PosteriorSystem sys = posterior_system(bin);
        RandomRule rule;
        const Vec past = // overshoot past the posterior, out of the hull
            axby(1.6, sys.posteriors[0].coords(), -0.6, bin.prior.coords());
        rule.set("H", {{Belief(past), 0.5}, {sys.posteriors[0], 0.5}});
        rule.set("L", {{sys.posteriors[1], 1.0}});
        const ExploitContract c =
            build_exploit(bin, ScenarioRule{rule}, 1.0);
        return {bin, ScenarioRule{rule}, c.problem};
    }
    }
}

} // namespace

TrialReport monte_carlo_suite(std::size_t scenarios, std::size_t samples,
                              std::uint64_t seed) {
    TrialReport report;
    report.suite = "montecarlo";
    report.trials = scenarios;
    std::vector<TrialFailure> excursions;
    for (std::uint64_t i = 0; i < scenarios; ++i) {
        const FixedScenario sc = make_scenario(i, seed);
        const SimulationResult sim = simulate_payoff(
            sc.env, sc.rule, sc.dp, samples, Rng::substream(seed, i).next());
        const double gap = std::abs(sim.empirical_mean - sim.analytic);
        const double z =
            sim.standard_error > 0.0 ? gap / sim.standard_error : 0.0;
        report.extreme = std::max(report.extreme, z);
        if (!sim.consistent())
            excursions.push_back(
                {i, format("empirical %.6f vs analytic %.6f (%.2f SE)",
                           sim.empirical_mean, sim.analytic, z)});
    }
    // One four-standard-error excursion per batch is within expectation.
    if (excursions.size() > 1) report.failures = std::move(excursions);
    return report;
}

TrialReport theorem1_selftest(std::uint64_t seed) {
    TrialReport report;
    report.suite = "theorem1_selftest";
    report.trials = 1;
    (void)seed;
    const Environment env = binary_symmetric();
    const DeterministicRule mutant{StretchRule{PerRealization{0.5}}};
    const ExploitContract contract =
        build_overreaction_exploit(env, mutant, 0, 1.0);
    const double payoff =
        ex_ante_payoff(env, ScenarioRule{mutant}, contract.problem);
    if (payoff < -1e-9)
        report.failures.push_back(
            {0, format("planted overreacting rule earned %.6f as designed",
                       payoff)});
    report.extreme = payoff;
    return report;
}

} // namespace nonbayes
