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

#include <cmath>
#include <random>

#include "cim/dataset.hpp"
#include "cim/translate.hpp"
#include "doctest.h"

using namespace cim;

namespace {

nn::ResUNet<float> small_net(uint64_t seed = 31) {
  nn::NetworkConfig cfg;
  cfg.encoder_channels = {2, 2, 4, 4};
  cfg.bottleneck_channels = 4;
  cfg.seed = seed;
  return nn::ResUNet<float>(cfg);
}

// Zeroing every trainable tensor makes the network emit its input (through
// the global residual connection) plus the head bias.
void make_constant_net(nn::ResUNet<float>& net, float head_bias) {
  for (auto& p : net.parameters())
    if (p.trainable)
      for (auto& v : p.value->v) v = 0.0f;
  auto params = net.parameters();
  for (auto& p : params)
    if (p.name == "head/bias") p.value->v[0] = head_bias;
}

Rasterf random_unit_raster(int w, int h, uint64_t seed) {
  Rasterf r(w, h);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  for (auto& v : r.data) v = u(rng);
  return r;
}

}  // namespace

TEST_CASE("a zeroed network on zero input yields its head bias at any size") {
  auto net = small_net();
  make_constant_net(net, 0.5f);
  for (int n : {64, 100, 37}) {  // divisible and two awkward sizes
    const Rasterf out = infer_normalized(net, Rasterf(n, n, 0.0f));
    REQUIRE(out.width == n);
    REQUIRE(out.height == n);
    for (float v : out.data) CHECK(v == doctest::Approx(0.5f).epsilon(1e-6));
  }
}

TEST_CASE("outputs are clamped to the normalized range") {
  auto net = small_net();
  make_constant_net(net, 1.7f);  // would exceed the range without the clamp
  const Rasterf hi = infer_normalized(net, random_unit_raster(32, 32, 8));
  for (float v : hi.data) CHECK(v < 1.0f);
  make_constant_net(net, -0.3f);
  const Rasterf lo = infer_normalized(net, Rasterf(32, 32, 0.0f));
  for (float v : lo.data) CHECK(v == 0.0f);
}

TEST_CASE("non-square and non-divisible sizes survive the reflect padding") {
  auto net = small_net();
  const Rasterf in = random_unit_raster(100, 52, 10);
  const Rasterf out = infer_normalized(net, in);
  CHECK(out.width == 100);
  CHECK(out.height == 52);
  for (float v : out.data) CHECK(std::isfinite(v));
}

TEST_CASE("padding does not perturb the interior on divisible inputs") {
  // On an already-divisible input, infer_normalized must equal a direct
  // forward pass (same tensor in, no padding applied).
  auto net = small_net();
  const Rasterf in = random_unit_raster(64, 64, 11);
  const Rasterf via_api = infer_normalized(net, in);
  nn::Tensor<float> x(1, 1, 64, 64);
  for (int y = 0; y < 64; ++y)
    for (int xx = 0; xx < 64; ++xx) x.at(0, 0, y, xx) = in.at(xx, y);
  const nn::Tensor<float> direct = net.forward(x, false);
  for (int y = 0; y < 64; ++y)
    for (int xx = 0; xx < 64; ++xx) {
      const float clamped =
          std::clamp(direct.at(0, 0, y, xx), 0.0f, std::nextafter(1.0f, 0.0f));
      CHECK(via_api.at(xx, y) == clamped);
    }
}

TEST_CASE("full inference preserves geometry and retargets the wavelength") {
  auto net = small_net();
  PhaseMap in;
  in.values = Rasterf(48, 48);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  for (auto& v : in.values.data) v = u(rng);
  in.pixel_size_um = 0.11;
  in.wavelength_nm = 532.0;
  in.valid = Mask(48, 48, 1);
  in.valid->at(3, 4) = 0;
  const PhaseMap out = infer_full(net, in, 623.0);
  CHECK(out.width() == 48);
  CHECK(out.height() == 48);
  CHECK(out.pixel_size_um == in.pixel_size_um);
  CHECK(out.wavelength_nm == 623.0);
  REQUIRE(out.valid.has_value());
  CHECK(out.valid->at(3, 4) == 0);
  CHECK(out.valid->at(0, 0) == 1);
  // The result is a wrapped phase map: normalization must accept it unchanged.
  CHECK_NOTHROW(normalize_phase(out));
}
