#include <benchmark/benchmark.h>

#include "mcv/sim.hpp"

namespace {

using namespace mcv;

Sample make_sample(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
  RngStream rng(seed, 0);
  const Vector mu = grid_mean(d);
  return generate_sample(Distribution::normal, mu, scale_to_target(Variant::vv, mu, compound_symmetric(d, 0.1), 0.5),
                         n, rng);
}

GroupedData make_groups(Eigen::Index k, Eigen::Index n, Eigen::Index d) {
  std::vector<Sample> groups;
  for (Eigen::Index i = 0; i < k; ++i) groups.push_back(make_sample(n, d, 100 + static_cast<std::uint64_t>(i)));
  return GroupedData(groups);
}

void BM_FitMcv(benchmark::State& state) {
  const auto variant = static_cast<Variant>(state.range(0));
  const Sample x = make_sample(50, state.range(1), 7);
  for (auto _ : state) benchmark::DoNotOptimize(fit_mcv(variant, x));
}
BENCHMARK(BM_FitMcv)->ArgsProduct({{0, 1, 2, 3}, {2, 5, 10}});

void BM_Estimate(benchmark::State& state) {
  const Sample x = make_sample(50, state.range(0), 8);
  for (auto _ : state) benchmark::DoNotOptimize(estimate(Variant::rr, x));
}
BENCHMARK(BM_Estimate)->Arg(2)->Arg(5)->Arg(10);

void BM_PermutationTest(benchmark::State& state) {
  const GroupedData data = make_groups(4, state.range(0), 5);
  const ContrastMatrix h = ksample_contrasts(4);
  for (auto _ : state)
    benchmark::DoNotOptimize(permutation_test({Quantity::c, Variant::vv}, data, h, 0.05, {500, 1, 1}));
}
BENCHMARK(BM_PermutationTest)->Arg(30)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_BootstrapMct(benchmark::State& state) {
  const GroupedData data = make_groups(4, state.range(0), 5);
  const ContrastMatrix h = tukey_contrasts(4);
  for (auto _ : state)
    benchmark::DoNotOptimize(bootstrap_mct({Quantity::b, Variant::vv}, data, h, 0.05, {500, 1, 1}));
}
BENCHMARK(BM_BootstrapMct)->Arg(30)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_EquicoordinateQuantile(benchmark::State& state) {
  const Matrix r = compound_symmetric(state.range(0), 0.5);
  for (auto _ : state) {
    RngStream rng(9, 0);
    benchmark::DoNotOptimize(mvn_equicoordinate_quantile(r, 0.05, 100000, rng));
  }
}
BENCHMARK(BM_EquicoordinateQuantile)->Arg(2)->Arg(6)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
