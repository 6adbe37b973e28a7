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

#pragma once

#include <array>
#include <complex>
#include <cstdint>

#include "cim/image.hpp"

namespace cim {

/// Additive split of the total field into unscattered (low-pass) and scattered parts.
struct FieldPair {
  Image<std::complex<double>> e0;  // unscattered component
  Image<std::complex<double>> e1;  // scattered component, e0 + e1 == exp(i*phi)
};

/// Four quadrature frames; offsets are fixed at {0, pi/2, pi, 3pi/2}.
struct FrameStack {
  std::array<Rasterd, 4> frames;
  double pixel_size_um = 1.0;
  double wavelength_nm = 623.0;

  static constexpr std::array<double, 4> phase_offsets() {
    return {0.0, kPi / 2.0, kPi, 3.0 * kPi / 2.0};
  }
  int width() const { return frames[0].width; }
  int height() const { return frames[0].height; }
};

/// Broadband LED arm: shot and read noise only, no speckle.
struct SlimNoiseParams {
  double photon_scale = 0.0;
  double read_noise_sigma = 0.0;
  uint64_t seed = 0;
};

// E_total = exp(i*phi); e0 is the disk low-pass of E_total, e1 the remainder.
FieldPair decompose_field(const PhaseMap& phase, double lowpass_radius);

// Renders I_k = |E1 + a*exp(-i*delta_k)|^2 with a = |lowpass(E_total)| taken
// real, so the four frames pin down the absolute specimen phase. Noise is
// applied per frame (shot before read, negatives clamped), deterministically
// under the seed.
FrameStack render_slim(const PhaseMap& phase, double lowpass_radius, const SlimNoiseParams& noise);

// Four-step combination with scattered/unscattered amplitude-ratio correction.
// Signal-free pixels get phi = 0 and a cleared validity bit; a noise-driven
// negative discriminant in the beta solve clamps to the nearest feasible value
// and also clears the bit.
PhaseMap reconstruct_slim(const FrameStack& stack, double epsilon = 1e-12);

}  // namespace cim
