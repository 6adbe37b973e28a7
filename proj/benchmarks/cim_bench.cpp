// Copyright 2026 the cim authors
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

#include <complex>
#include <vector>

#include "cim/dpm.hpp"
#include "cim/fft.hpp"
#include "cim/nn/unet.hpp"
#include "cim/phantom.hpp"
#include "cim/registration.hpp"
#include "cim/slim.hpp"
#include "cim/translate.hpp"

namespace {

using namespace cim;

PhaseMap blobs(int n, uint64_t seed = 7) {
  BlobFieldSpec spec;
  spec.seed = seed;
  spec.count = 6;
  spec.radius_min_um = 4.0;
  spec.radius_max_um = 12.0;
  return blob_field(spec, n, n, 0.3, 532.0);
}

void BM_fft_forward(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::vector<std::complex<double>> buf(static_cast<size_t>(n) * n, {1.0, 0.0});
  for (auto _ : state) {
    fft::forward(n, n, buf.data());
    benchmark::DoNotOptimize(buf.data());
  }
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_fft_forward)->Arg(256)->Arg(512);

void BM_render_dpm(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const PhaseMap truth = blobs(n);
  for (auto _ : state) {
    Interferogram ig = render_dpm(truth, 0.25, 0.0, DpmNoiseParams{});
    benchmark::DoNotOptimize(ig.intensity.data.data());
  }
}
BENCHMARK(BM_render_dpm)->Arg(256)->Arg(512);

void BM_demodulate_hilbert(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Interferogram ig = render_dpm(blobs(n), 0.25, 0.0, DpmNoiseParams{});
  DemodConfig cfg;
  cfg.filter_radius = 0.2;
  for (auto _ : state) {
    PhaseMap rec = demodulate_hilbert(ig, cfg);
    benchmark::DoNotOptimize(rec.values.data.data());
  }
}
BENCHMARK(BM_demodulate_hilbert)->Arg(256)->Arg(512);

void BM_reconstruct_slim(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const FrameStack stack = render_slim(blobs(n), 0.05, SlimNoiseParams{});
  for (auto _ : state) {
    PhaseMap rec = reconstruct_slim(stack);
    benchmark::DoNotOptimize(rec.values.data.data());
  }
}
BENCHMARK(BM_reconstruct_slim)->Arg(256)->Arg(512);

void BM_register_pair(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const PhaseMap fixed = blobs(n);
  const PhaseMap moving = apply_transform(fixed, RegistrationTransform{1.0, -3.0, 2.0}, n, n);
  for (auto _ : state) {
    RegistrationTransform t = register_pair(moving, fixed, 1.0);
    benchmark::DoNotOptimize(&t);
  }
}
BENCHMARK(BM_register_pair)->Arg(128)->Arg(256);

void BM_unet_forward(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  nn::NetworkConfig cfg;
  cfg.seed = 3;
  nn::ResUNet<float> net(cfg);
  Rasterf input(n, n, 0.5f);
  for (auto _ : state) {
    Rasterf out = infer_normalized(net, input);
    benchmark::DoNotOptimize(out.data.data());
  }
}
BENCHMARK(BM_unet_forward)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
