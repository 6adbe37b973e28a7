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
#include "cim/nn/unet.hpp"

namespace cim {

/// Runs the translator over a full phase map of arbitrary size: normalizes,
/// reflect-pads up to the network's spatial divisor, infers, crops back and
/// denormalizes. The output inherits the input pixel size; its wavelength is
/// the translation target.
PhaseMap infer_full(nn::ResUNet<float>& net, const PhaseMap& input,
                    double target_wavelength_nm = 623.0);

/// Same pipeline on a pre-normalized [0, 1) raster; returns the raw network
/// output clamped back to [0, 1).
Rasterf infer_normalized(nn::ResUNet<float>& net, const Rasterf& input);

}  // namespace cim
