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

#include <cstdint>

#include "cim/image.hpp"

namespace cim {

/// Polystyrene-bead style sphere with analytically known peak phase.
struct BeadSpec {
  double diameter_um = 1.0;
  double n_bead = 1.588;
  double n_medium = 1.518;
  double center_x_px = 0.0;
  double center_y_px = 0.0;
};

/// Cell-like field of smooth raised-cosine bumps.
struct BlobFieldSpec {
  uint64_t seed = 0;
  int count = 0;
  double radius_min_um = 10.0;
  double radius_max_um = 25.0;
  double peak_phase_min = 0.1;   // radians
  double peak_phase_max = 0.8;   // radians
};

// Projected sphere thickness sampled at pixel centers; peak at the center
// pixel equals 2*pi*d*(n - n0)/lambda exactly when the center lies on a pixel.
PhaseMap bead_phase(const BeadSpec& spec, int width, int height, double pixel_size_um,
                    double wavelength_nm);

/// Analytic peak phase of a bead, 2*pi*d*(n - n0)/lambda.
double bead_peak_phase(const BeadSpec& spec, double wavelength_nm);

// Deterministic sum of raised-cosine bumps, clamped to [0, pi).
PhaseMap blob_field(const BlobFieldSpec& spec, int width, int height, double pixel_size_um,
                    double wavelength_nm);

// Multiplies every pixel by lambda_source/lambda_target and updates metadata.
PhaseMap scale_wavelength(const PhaseMap& map, double target_wavelength_nm);

}  // namespace cim
