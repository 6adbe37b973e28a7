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

#include "cim/registration.hpp"
#include "doctest.h"

using namespace cim;

namespace {

// Smooth synthetic scene evaluated in fixed-grid coordinates, so the same
// continuous signal can be sampled at both magnifications.
double scene(double u, double v, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(16.0, 112.0), width(6.0, 14.0), amp(0.3, 1.0);
  double acc = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double cx = pos(rng), cy = pos(rng), s = width(rng), a = amp(rng);
    const double d2 = (u - cx) * (u - cx) + (v - cy) * (v - cy);
    acc += a * std::exp(-d2 / (2.0 * s * s));
  }
  return acc;
}

PhaseMap sample_fixed(int n, uint64_t seed) {
  PhaseMap map;
  map.values = Rasterf(n, n);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) map.values.at(x, y) = static_cast<float>(scene(x, y, seed));
  return map;
}

PhaseMap sample_moving(int n, double magnification, double tx, double ty, uint64_t seed) {
  PhaseMap map;
  map.values = Rasterf(n, n);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x)
      map.values.at(x, y) = static_cast<float>(
          scene((x - tx) / magnification, (y - ty) / magnification, seed));
  return map;
}

}  // namespace

TEST_CASE("known 2.5x transform with subpixel shift is recovered") {
  const double mag = 2.5;
  const int nf = 128, nm = 320;  // moving covers the fixed field of view at 2.5x
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> shift(-20.0, 20.0);
  for (int trial = 0; trial < 5; ++trial) {
    const double tx = shift(rng), ty = shift(rng);
    const PhaseMap fixed = sample_fixed(nf, 100 + trial);
    const PhaseMap moving = sample_moving(nm, mag, tx, ty, 100 + trial);
    const RegistrationTransform t = register_pair(moving, fixed, mag);
    CHECK(t.scale == mag);
    // Errors measured on the fixed grid.
    CHECK(std::abs(t.tx - tx) / mag < 0.25);
    CHECK(std::abs(t.ty - ty) / mag < 0.25);
  }
}

TEST_CASE("zero shift registers to the identity translation") {
  const PhaseMap fixed = sample_fixed(128, 7);
  const PhaseMap moving = sample_moving(320, 2.5, 0.0, 0.0, 7);
  const RegistrationTransform t = register_pair(moving, fixed, 2.5);
  CHECK(std::abs(t.tx) / 2.5 < 0.25);
  CHECK(std::abs(t.ty) / 2.5 < 0.25);
}

TEST_CASE("featureless pairs are reported as unregistrable") {
  PhaseMap flat_m, flat_f;
  flat_m.values = Rasterf(320, 320, 0.0f);
  flat_f.values = Rasterf(128, 128, 0.0f);
  CHECK_THROWS(register_pair(flat_m, flat_f, 2.5));
}

TEST_CASE("identity transform resampling reproduces the input") {
  const PhaseMap map = sample_fixed(64, 9);
  const PhaseMap out = apply_transform(map, RegistrationTransform{});
  for (size_t i = 0; i < map.values.size(); ++i)
    CHECK(out.values.data[i] == doctest::Approx(map.values.data[i]).epsilon(1e-6));
}

TEST_CASE("out-of-bounds pixels are cleared in the validity mask") {
  const PhaseMap map = sample_fixed(64, 10);
  RegistrationTransform t;
  t.tx = -10.0;  // shifts sampling before the left edge
  const PhaseMap out = apply_transform(map, t);
  REQUIRE(out.valid.has_value());
  CHECK(out.valid->at(0, 10) == 0);
  CHECK(out.valid->at(32, 32) != 0);
}

TEST_CASE("round trip through the recovered transform matches the fixed image") {
  const double mag = 2.5;
  const PhaseMap fixed = sample_fixed(128, 11);
  const PhaseMap moving = sample_moving(320, mag, 6.4, -3.2, 11);
  const RegistrationTransform t = register_pair(moving, fixed, mag);
  const PhaseMap warped = apply_transform(moving, t, 128, 128);
  double acc = 0.0;
  size_t n = 0;
  for (int y = 8; y < 120; ++y)
    for (int x = 8; x < 120; ++x) {
      if (!warped.is_valid(x, y)) continue;
      const double d = warped.values.at(x, y) - fixed.values.at(x, y);
      acc += d * d;
      ++n;
    }
  REQUIRE(n > 0);
  CHECK(std::sqrt(acc / static_cast<double>(n)) < 0.05);
}
