#include <benchmark/benchmark.h>

#include <map>
#include <random>

#include "tamelab/generator.hpp"
#include "tamelab/montecarlo.hpp"

using namespace tamelab;

namespace {

const GeneratorContext& torus(int R) {
  static std::map<int, GeneratorContext> cache;
  auto it = cache.find(R);
  if (it == cache.end()) it = cache.emplace(R, build_generator(build_grid(torus_spec(2, R, 1.0)))).first;
  return it->second;
}

Vec noise(int n) {
  std::mt19937_64 g(7);
  std::normal_distribution<double> d;
  Vec f(n);
  for (int i = 0; i < n; ++i) f[i] = d(g);
  return f;
}

void BM_apply_L(benchmark::State& st) {
  const auto& ctx = torus(static_cast<int>(st.range(0)));
  const Vec f = noise(ctx.n());
  for (auto _ : st) benchmark::DoNotOptimize(apply_L(ctx, f));
}

void BM_apply_L_serial(benchmark::State& st) {
  const auto& ctx = torus(static_cast<int>(st.range(0)));
  const Vec f = noise(ctx.n());
  for (auto _ : st) benchmark::DoNotOptimize(apply_L_serial(ctx, f));
}

void BM_gamma(benchmark::State& st) {
  const auto& ctx = torus(static_cast<int>(st.range(0)));
  const Vec f = noise(ctx.n());
  for (auto _ : st) benchmark::DoNotOptimize(gamma(ctx, f, f));
}

void BM_gamma_serial(benchmark::State& st) {
  const auto& ctx = torus(static_cast<int>(st.range(0)));
  const Vec f = noise(ctx.n());
  for (auto _ : st) benchmark::DoNotOptimize(gamma_serial(ctx, f, f));
}

WalkerConfig walkers() {
  WalkerConfig c;
  c.n_walkers = 20000;
  return c;
}

void BM_mc(benchmark::State& st) {
  const auto& ctx = torus(32);
  const Vec V = Vec::Constant(ctx.n(), 0.5), f = Vec::Ones(ctx.n());
  for (auto _ : st) benchmark::DoNotOptimize(mc_feynman_kac(ctx, V, f, 0, 0.05, walkers()).mean);
}

void BM_mc_serial(benchmark::State& st) {
  const auto& ctx = torus(32);
  const Vec V = Vec::Constant(ctx.n(), 0.5), f = Vec::Ones(ctx.n());
  for (auto _ : st) benchmark::DoNotOptimize(mc_feynman_kac_serial(ctx, V, f, 0, 0.05, walkers()).mean);
}

}  // namespace

BENCHMARK(BM_apply_L)->Arg(64)->Arg(256);
BENCHMARK(BM_apply_L_serial)->Arg(64)->Arg(256);
BENCHMARK(BM_gamma)->Arg(64)->Arg(256);
BENCHMARK(BM_gamma_serial)->Arg(64)->Arg(256);
BENCHMARK(BM_mc)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_mc_serial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
