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

#include <algorithm>
#include <cmath>

#include "cim/phantom.hpp"
#include "doctest.h"

using namespace cim;

TEST_CASE("bead peak phase matches the closed-form optical path length") {
  BeadSpec spec;  // 1 um polystyrene-like bead in immersion medium
  // Independent computation: phi = 2*pi * d * (n - n0) / lambda.
  const double expected = 2.0 * kPi * 1.0 * (1.588 - 1.518) / 0.623;
  CHECK(bead_peak_phase(spec, 623.0) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(bead_peak_phase(spec, 623.0) == doctest::Approx(0.71).epsilon(0.01));
}

TEST_CASE("bead raster peak equals the analytic peak when centered on a pixel") {
  BeadSpec spec;
  spec.center_x_px = 32;
  spec.center_y_px = 32;
  const PhaseMap map = bead_phase(spec, 64, 64, 0.05, 623.0);
  float peak = 0.0f;
  for (float v : map.values.data) peak = std::max(peak, v);
  CHECK(map.values.at(32, 32) == doctest::Approx(bead_peak_phase(spec, 623.0)).epsilon(1e-6));
  CHECK(peak == doctest::Approx(bead_peak_phase(spec, 623.0)).epsilon(1e-6));
}

TEST_CASE("bead phase is zero outside the projected footprint") {
  BeadSpec spec;
  spec.center_x_px = 32;
  spec.center_y_px = 32;
  const PhaseMap map = bead_phase(spec, 64, 64, 0.05, 623.0);
  // Radius is 0.5 um = 10 px here.
  CHECK(map.values.at(32 + 12, 32) == 0.0f);
  CHECK(map.values.at(0, 0) == 0.0f);
  CHECK(map.values.at(32 + 9, 32) > 0.0f);
}

TEST_CASE("bead footprint overflowing the raster is rejected") {
  BeadSpec spec;
  spec.center_x_px = 0;
  spec.center_y_px = 0;
  CHECK_THROWS_AS(bead_phase(spec, 16, 16, 0.05, 623.0), std::invalid_argument);
}

TEST_CASE("blob field is deterministic under its seed") {
  BlobFieldSpec spec;
  spec.seed = 7;
  spec.count = 5;
  spec.radius_min_um = 2.0;
  spec.radius_max_um = 6.0;
  const PhaseMap a = blob_field(spec, 96, 96, 0.3, 623.0);
  const PhaseMap b = blob_field(spec, 96, 96, 0.3, 623.0);
  CHECK(a.values.data == b.values.data);
  spec.seed = 8;
  const PhaseMap c = blob_field(spec, 96, 96, 0.3, 623.0);
  CHECK(a.values.data != c.values.data);
}

TEST_CASE("blob field stays inside the wrapped positive range") {
  BlobFieldSpec spec;
  spec.seed = 3;
  spec.count = 40;  // force heavy overlap so the clamp engages
  spec.radius_min_um = 5.0;
  spec.radius_max_um = 15.0;
  spec.peak_phase_max = 2.0;
  const PhaseMap map = blob_field(spec, 128, 128, 0.3, 623.0);
  for (float v : map.values.data) {
    CHECK(v >= 0.0f);
    CHECK(v < static_cast<float>(kPi));
  }
}

TEST_CASE("wavelength scaling multiplies by the exact wavelength ratio") {
  BlobFieldSpec spec;
  spec.seed = 11;
  spec.count = 4;
  const PhaseMap src = blob_field(spec, 64, 64, 0.3, 532.0);
  const PhaseMap dst = scale_wavelength(src, 623.0);
  CHECK(dst.wavelength_nm == 623.0);
  const double ratio = 532.0 / 623.0;  // independent of the implementation
  for (size_t i = 0; i < src.values.size(); ++i)
    CHECK(dst.values.data[i] ==
          doctest::Approx(static_cast<double>(src.values.data[i]) * ratio).epsilon(1e-6));
}

TEST_CASE("wavelength scaling to the same wavelength is the identity") {
  BlobFieldSpec spec;
  spec.seed = 2;
  spec.count = 3;
  const PhaseMap src = blob_field(spec, 32, 32, 0.3, 623.0);
  const PhaseMap same = scale_wavelength(src, 623.0);
  CHECK(same.values.data == src.values.data);
}
