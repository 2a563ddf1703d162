// Copyright 2026 The ParasNet Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <benchmark/benchmark.h>

#include "parasnet/baseline/sift.hpp"
#include "parasnet/layers.hpp"
#include "parasnet/model.hpp"
#include "parasnet/synth.hpp"
#include "parasnet/trainer.hpp"
#include "parasnet/tsne.hpp"

namespace parasnet {
namespace {

Tensor synthetic_image(ClassLabel label) {
  synth::GenConfig cfg;
  Rng rng(synth::sample_seed(cfg, synth::Split::kTest, label, 0));
  return synth::gen_sample(label, cfg, rng).pixels;
}

Tensor uniform(Shape shape, Rng& rng) {
  Tensor t(std::move(shape));
  for (float& v : t.data()) v = static_cast<float>(rng.uniform(-1.0, 1.0));
  return t;
}

void BM_Conv2dValid(benchmark::State& state) {
  const auto cin = static_cast<std::size_t>(state.range(0));
  const auto f = static_cast<std::size_t>(state.range(1));
  Rng rng(1);
  const Tensor in = uniform({122, 162, cin}, rng);
  const Tensor k = uniform({3, 3, cin, f}, rng);
  const Tensor b = uniform({f}, rng);
  for (auto _ : state) benchmark::DoNotOptimize(nn::conv2d_valid(in, k, b));
  state.SetItemsProcessed(state.iterations() * 120 * 160 * 9 * cin * f);
}
BENCHMARK(BM_Conv2dValid)->Args({1, 8})->Args({8, 8})->Args({16, 16})->Unit(benchmark::kMicrosecond);

void BM_Conv2dBackward(benchmark::State& state) {
  const auto c = static_cast<std::size_t>(state.range(0));
  Rng rng(2);
  const Tensor in = uniform({122, 162, c}, rng);
  const Tensor k = uniform({3, 3, c, c}, rng);
  const Tensor up = uniform({120, 160, c}, rng);
  for (auto _ : state) benchmark::DoNotOptimize(nn::conv2d_backward(in, k, up));
}
BENCHMARK(BM_Conv2dBackward)->Arg(8)->Arg(16)->Unit(benchmark::kMicrosecond);

void BM_Inference(benchmark::State& state) {
  const ParasNet model = build_model(static_cast<std::size_t>(state.range(0)), 7);
  const Tensor image = synthetic_image(ClassLabel::kCrypto);
  for (auto _ : state) benchmark::DoNotOptimize(infer(model, image));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Inference)->Arg(2)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_TrainingSample(benchmark::State& state) {
  const ParasNet model = build_model(static_cast<std::size_t>(state.range(0)), 7);
  const Tensor image = synthetic_image(ClassLabel::kGiardia);
  Rng rng(3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        train::loss_and_gradients(model, image, ClassLabel::kGiardia, nn::Mode::kTrain, rng));
  }
}
BENCHMARK(BM_TrainingSample)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_SiftFeatures(benchmark::State& state) {
  const Tensor image = synthetic_image(class_from_index(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(baseline::extract_features(image));
}
BENCHMARK(BM_SiftFeatures)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

void BM_Tsne(benchmark::State& state) {
  Rng rng(4);
  tsne::Points x(static_cast<std::size_t>(state.range(0)), std::vector<double>(128));
  for (auto& row : x)
    for (double& v : row) v = rng.normal();
  tsne::TsneConfig cfg;
  cfg.iterations = 100;
  for (auto _ : state) benchmark::DoNotOptimize(tsne::tsne_embed(x, cfg));
}
BENCHMARK(BM_Tsne)->Arg(300)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace parasnet

BENCHMARK_MAIN();
