#include <benchmark/benchmark.h>

#include "bivamp/denoisers.hpp"
#include "bivamp/messages.hpp"
#include "bivamp/model.hpp"
#include "bivamp/solver.hpp"
#include "bivamp/state_evolution.hpp"

namespace bivamp {
namespace {

Instance bench_instance(int n, int m, int r, const PriorSpec& pu, const PriorSpec& pv) {
  return generate_instance(ProblemDims{n, m, r}, pu, pv, ChannelSpec::awgn(1.0, true), 20.0, 1);
}

void BM_DenoiseRows(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const PriorSpec prior = PriorSpec::bernoulli_gaussian(0.05, 1.0);
  const Instance inst = bench_instance(n, n, 20, PriorSpec::binary(), prior);
  for (auto _ : state) {
    benchmark::DoNotOptimize(denoise_rows(prior, inst.v_true, 0.1));
  }
  state.SetItemsProcessed(state.iterations() * n * 20);
}
BENCHMARK(BM_DenoiseRows)->Arg(200)->Arg(1000);

void BM_BilmmseMessages(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int r = 20;
  const Instance inst = bench_instance(n, n, r, PriorSpec::gaussian(0, 1),
                                       PriorSpec::gaussian(0, 1));
  UvState s;
  s.u_post_minus = inst.u_true;
  s.v_post_minus = inst.v_true;
  s.u_post_minus_prev = inst.u_true;
  s.v_post_minus_prev = inst.v_true;
  s.r_u_post_minus = 0.1 * Mat::Identity(r, r);
  s.r_v_post_minus = 0.1 * Mat::Identity(r, r);
  const ProblemDims dims{n, n, r};
  for (auto _ : state) {
    const BilmmseMessages msg =
        bilmmse_messages(inst.y_obs, 10.0, s, dims, 1.0, BilmmseForm::kNoiseInflated);
    benchmark::DoNotOptimize(bilmmse_posterior(msg.b_u, msg.lambda_u, s.u_post_minus, 1.0));
  }
}
BENCHMARK(BM_BilmmseMessages)->Arg(200)->Arg(1000);

void BM_BigVampIterations(benchmark::State& state) {
  const PriorSpec pu = PriorSpec::binary();
  const PriorSpec pv = PriorSpec::gaussian(0, 1);
  const Observation obs = observe(bench_instance(200, 100, 10, pu, pv));
  RunConfig config;
  config.t_max = 10;
  config.max_attempts = 1;
  config.init = InitKind::kRandom;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_bigvamp(obs, pu, pv, config));
  }
  state.SetItemsProcessed(state.iterations() * config.t_max);
}
BENCHMARK(BM_BigVampIterations)->Unit(benchmark::kMillisecond);

void BM_StateEvolution(benchmark::State& state) {
  const SEParams params = make_se_params(ProblemDims{400, 400, 20}, PriorSpec::binary(),
                                         PriorSpec::bernoulli_gaussian(0.05, 1.0),
                                         ChannelSpec::awgn(1.0, true), 20.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_se(params, SeMode::kBigVamp));
  }
}
BENCHMARK(BM_StateEvolution)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace bivamp

BENCHMARK_MAIN();
