#include <benchmark/benchmark.h>

#include <random>

#include "srlab/conv.hpp"
#include "srlab/eval.hpp"
#include "srlab/model.hpp"
#include "srlab/resample.hpp"
#include "srlab/train.hpp"

using namespace srlab;

namespace {

Tensor noise(int c, int h, int w, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  Tensor t(c, h, w);
  for (float& v : t.data()) v = u(rng);
  return t;
}

void BM_ConvForward(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Tensor in = noise(1, n, n, 1);
  BasicFilterBank<float> bank(64, 1, 9);
  std::mt19937_64 rng(2);
  std::normal_distribution<float> g(0.0f, 0.001f);
  for (float& v : bank.weights) v = g(rng);
  for (auto _ : state) benchmark::DoNotOptimize(conv2d_valid(in, bank));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n - 8) * (n - 8) * 64 * 81);
}
BENCHMARK(BM_ConvForward)->Arg(33)->Arg(256);

// One training sample through 9-1-5: forward, loss gradient, backward.
void BM_SampleBackprop(benchmark::State& state) {
  const Network net = init_network(basic_config(), 1);
  const Tensor in = noise(1, 33, 33, 3);
  const Tensor target = noise(1, 21, 21, 4);
  const std::vector<double> w{1.0};
  for (auto _ : state) {
    const auto cache = forward_cached(net, in);
    const auto g = loss_mse_gradient(cache.output(), target, w);
    benchmark::DoNotOptimize(backward(net, cache, g));
  }
}
BENCHMARK(BM_SampleBackprop);

void BM_PredictFull(benchmark::State& state) {
  const Network net = init_network(basic_config(), 1);
  const Tensor in = noise(1, 256, 256, 5);
  for (auto _ : state) benchmark::DoNotOptimize(predict_full(net, in));
}
BENCHMARK(BM_PredictFull)->Unit(benchmark::kMillisecond);

void BM_ResizeBicubic(benchmark::State& state) {
  const Tensor img = noise(3, 510, 510, 6);
  for (auto _ : state) benchmark::DoNotOptimize(degrade(img, 3, BicubicDownUp{}));
}
BENCHMARK(BM_ResizeBicubic)->Unit(benchmark::kMillisecond);

void BM_Ssim(benchmark::State& state) {
  const Tensor a = noise(1, 256, 256, 7);
  const Tensor b = noise(1, 256, 256, 8);
  for (auto _ : state) benchmark::DoNotOptimize(ssim(a, b));
}
BENCHMARK(BM_Ssim)->Unit(benchmark::kMillisecond);

void BM_Msssim(benchmark::State& state) {
  const Tensor a = noise(1, 256, 256, 7);
  const Tensor b = noise(1, 256, 256, 8);
  for (auto _ : state) benchmark::DoNotOptimize(msssim(a, b));
}
BENCHMARK(BM_Msssim)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
