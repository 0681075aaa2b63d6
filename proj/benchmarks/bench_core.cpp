// Micro-benchmarks for the hot paths: posterior updates, hull queries,
// best-response evaluation, and full contract construction.

#include <benchmark/benchmark.h>

#include "nonbayes/exploit.hpp"
#include "nonbayes/harness.hpp"

using namespace nonbayes;

namespace {

Environment fixed_environment(std::size_t n, std::size_t m) {
    return random_environment(n, m, 20260825);
}

void bm_posterior_system(benchmark::State& state) {
    const Environment env =
        fixed_environment(std::size_t(state.range(0)), std::size_t(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(posterior_system(env));
}
BENCHMARK(bm_posterior_system)->Arg(2)->Arg(4)->Arg(8);

void bm_hull_membership(benchmark::State& state) {
    const Environment env =
        fixed_environment(std::size_t(state.range(0)), std::size_t(state.range(0)));
    const PosteriorSystem sys = posterior_system(env);
    const Belief query = env.prior;
    for (auto _ : state)
        benchmark::DoNotOptimize(hull_membership(query, sys.posteriors));
}
BENCHMARK(bm_hull_membership)->Arg(2)->Arg(4)->Arg(8);

void bm_classify_reaction(benchmark::State& state) {
    const Environment env = fixed_environment(4, 4);
    const Belief distorted =
        apply_deterministic(ShrinkRule{PerRealization{0.35}}, env, 0);
    for (auto _ : state)
        benchmark::DoNotOptimize(classify_reaction(env, distorted, 0));
}
BENCHMARK(bm_classify_reaction);

void bm_ex_ante_payoff(benchmark::State& state) {
    const Environment env = fixed_environment(4, 4);
    const ScenarioRule rule{DeterministicRule{ShrinkRule{PerRealization{0.5}}}};
    const DecisionProblem dp = random_decision_problem(4, 6, 10.0, 7);
    for (auto _ : state)
        benchmark::DoNotOptimize(ex_ante_payoff(env, rule, dp));
}
BENCHMARK(bm_ex_ante_payoff);

void bm_build_exploit(benchmark::State& state) {
    const Environment env(Belief({0.5, 0.5}),
                          SignalModel({"H", "L"}, {{0.8, 0.2}, {0.2, 0.8}}));
    const ScenarioRule rule{DeterministicRule{StretchRule{PerRealization{0.5}}}};
    for (auto _ : state)
        benchmark::DoNotOptimize(build_exploit(env, rule, 1.0));
}
BENCHMARK(bm_build_exploit);

void bm_simulate_payoff(benchmark::State& state) {
    const Environment env(Belief({0.5, 0.5}),
                          SignalModel({"H", "L"}, {{0.8, 0.2}, {0.2, 0.8}}));
    const ScenarioRule rule{DeterministicRule{BayesianRule{}}};
    const DecisionProblem dp({Action("bet", {1.0, -1.0})});
    for (auto _ : state)
        benchmark::DoNotOptimize(
            simulate_payoff(env, rule, dp, std::size_t(state.range(0)), 7));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_simulate_payoff)->Arg(10000);

} // namespace

BENCHMARK_MAIN();
