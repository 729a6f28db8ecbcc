#include <benchmark/benchmark.h>

#include <random>

#include "sidnism/decompose.hpp"
#include "sidnism/metrics.hpp"
#include "sidnism/ops.hpp"

namespace {

using namespace sidnism;

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

Image noise_image(std::size_t side, std::size_t c, std::uint64_t seed) {
  return Image(side, side, c, noise(side * side * c, seed));
}

void BM_Conv2dForwardBackward(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const std::size_t ch = 32;
  const auto in = noise(ch * side * side, 1);
  const auto k = noise(ch * ch * 9, 2);
  const std::vector<double> b(ch, 0.0);
  for (auto _ : state) {
    ad::Tape tape;
    const ad::Tensor x = tape.variable({ch, side, side}, in);
    const ad::Tensor y = ad::conv2d(x, tape.variable({ch, ch, 3, 3}, k), tape.variable({ch}, b));
    tape.backward(ad::sum(y));
    benchmark::DoNotOptimize(x.grad().data());
  }
}
BENCHMARK(BM_Conv2dForwardBackward)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_DecomposeIteration(benchmark::State& state) {
  const Image s = noise_image(64, 3, 3);
  sid::SidConfig cfg;
  cfg.iterations = 1;
  cfg.mode = state.range(0) == 0 ? sid::Mode::direct : sid::Mode::cnn;
  for (auto _ : state) benchmark::DoNotOptimize(sid::decompose(s, cfg));
}
BENCHMARK(BM_DecomposeIteration)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Ssim(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const Image a = noise_image(side, 3, 4);
  const Image b = noise_image(side, 3, 5);
  for (auto _ : state) benchmark::DoNotOptimize(metrics::ssim(a, b));
}
BENCHMARK(BM_Ssim)->Arg(64)->Arg(512)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
