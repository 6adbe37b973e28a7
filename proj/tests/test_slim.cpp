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

#include "cim/phantom.hpp"
#include "cim/slim.hpp"
#include "doctest.h"

using namespace cim;

namespace {

PhaseMap blobs(uint64_t seed, int n = 96) {
  BlobFieldSpec spec;
  spec.seed = seed;
  spec.count = 5;
  spec.radius_min_um = 3.0;
  spec.radius_max_um = 8.0;
  return blob_field(spec, n, n, 0.3, 623.0);
}

double valid_rms(const PhaseMap& a, const Rasterf& b) {
  double acc = 0.0;
  size_t n = 0;
  for (int y = 0; y < a.height(); ++y)
    for (int x = 0; x < a.width(); ++x) {
      if (!a.is_valid(x, y)) continue;
      const double d = a.values.at(x, y) - b.at(x, y);
      acc += d * d;
      ++n;
    }
  REQUIRE(n > 0);
  return std::sqrt(acc / static_cast<double>(n));
}

}  // namespace

TEST_CASE("field decomposition is exactly additive") {
  const PhaseMap truth = blobs(4);
  const FieldPair pair = decompose_field(truth, 0.05);
  for (int y = 0; y < truth.height(); ++y)
    for (int x = 0; x < truth.width(); ++x) {
      const auto total = pair.e0.at(x, y) + pair.e1.at(x, y);
      const auto expected = std::polar(1.0, static_cast<double>(truth.values.at(x, y)));
      CHECK(std::abs(total - expected) < 1e-10);
    }
}

TEST_CASE("noiseless four-frame render and reconstruction is numerically exact") {
  const PhaseMap truth = blobs(8);
  const FrameStack stack = render_slim(truth, 0.05, SlimNoiseParams{});
  const PhaseMap rec = reconstruct_slim(stack);
  CHECK(valid_rms(rec, truth.values) < 1e-6);
}

TEST_CASE("frames are nonnegative intensities") {
  const PhaseMap truth = blobs(9, 64);
  SlimNoiseParams noise;
  noise.read_noise_sigma = 0.05;
  noise.seed = 3;
  const FrameStack stack = render_slim(truth, 0.05, noise);
  for (const auto& frame : stack.frames)
    for (double v : frame.data) CHECK(v >= 0.0);
}

TEST_CASE("noise is deterministic under the seed") {
  const PhaseMap truth = blobs(10, 64);
  SlimNoiseParams noise;
  noise.photon_scale = 1e4;
  noise.read_noise_sigma = 0.01;
  noise.seed = 21;
  const FrameStack a = render_slim(truth, 0.05, noise);
  const FrameStack b = render_slim(truth, 0.05, noise);
  for (int k = 0; k < 4; ++k) CHECK(a.frames[k].data == b.frames[k].data);
}

TEST_CASE("swapping the quadrature frames negates the reconstructed phase") {
  // I1 and I3 differ only in the sign of the quadrature term, so exchanging
  // them flips the scattered-phase sign and hence the specimen phase.
  const PhaseMap truth = blobs(11);
  FrameStack stack = render_slim(truth, 0.05, SlimNoiseParams{});
  const PhaseMap rec = reconstruct_slim(stack);
  std::swap(stack.frames[1], stack.frames[3]);
  const PhaseMap neg = reconstruct_slim(stack);
  for (int y = 0; y < truth.height(); ++y)
    for (int x = 0; x < truth.width(); ++x) {
      if (!rec.is_valid(x, y) || !neg.is_valid(x, y)) continue;
      CHECK(neg.values.at(x, y) == doctest::Approx(-rec.values.at(x, y)).epsilon(1e-5));
    }
}

TEST_CASE("signal-free pixels are masked out, not fabricated") {
  PhaseMap flat;  // constant phase: no scattered field anywhere
  flat.values = Rasterf(64, 64, 0.0f);
  const FrameStack stack = render_slim(flat, 0.05, SlimNoiseParams{});
  const PhaseMap rec = reconstruct_slim(stack);
  REQUIRE(rec.valid.has_value());
  size_t invalid = 0;
  for (uint8_t m : rec.valid->data)
    if (m == 0) ++invalid;
  CHECK(invalid == rec.valid->size());
}

TEST_CASE("mismatched frame dimensions are rejected") {
  const PhaseMap truth = blobs(12, 32);
  FrameStack stack = render_slim(truth, 0.05, SlimNoiseParams{});
  stack.frames[2] = Rasterd(16, 32, 0.0);
  CHECK_THROWS_AS(reconstruct_slim(stack), std::invalid_argument);
}

TEST_CASE("phase offsets are the canonical quarter-wave sequence") {
  const auto offsets = FrameStack::phase_offsets();
  CHECK(offsets[0] == 0.0);
  CHECK(offsets[1] == doctest::Approx(kPi / 2));
  CHECK(offsets[2] == doctest::Approx(kPi));
  CHECK(offsets[3] == doctest::Approx(3 * kPi / 2));
}
