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

#include "cim/image.hpp"

namespace cim {

// Maps fixed-grid coordinates into the moving raster:
//   (x_m, y_m) = (scale * x_f + tx, scale * y_f + ty)
// with tx, ty in moving-raster pixels.
struct RegistrationTransform {
  double scale = 1.0;
  double tx = 0.0;
  double ty = 0.0;
};

// Resamples `moving` down by nominal_scale, estimates the residual translation
// by phase correlation with parabolic subpixel peak refinement, and returns
// the composed transform. Throws when the correlation peak falls below
// min_confidence (unregistrable pair).
RegistrationTransform register_pair(const PhaseMap& moving, const PhaseMap& fixed,
                                    double nominal_scale, double min_confidence = 0.03);

// Bilinear resampling of `map` through the transform onto an out_width x
// out_height grid (defaults to the input dimensions). Out-of-bounds pixels
// are zeroed and cleared in the validity mask.
PhaseMap apply_transform(const PhaseMap& map, const RegistrationTransform& t, int out_width = -1,
                         int out_height = -1);

}  // namespace cim
