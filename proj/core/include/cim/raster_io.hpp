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

#include <string>

#include "cim/dpm.hpp"
#include "cim/image.hpp"
#include "cim/slim.hpp"

namespace cim {

// On-disk layout: <base>.f32 holds the little-endian float32 raster in
// row-major order, <base>.json the metadata sidecar. Validity masks, when
// present, live in <base>.mask.u8. Frame stacks store <base>.k0.f32 ..
// <base>.k3.f32 under one sidecar.

void save_phase_map(const std::string& base, const PhaseMap& map);
PhaseMap load_phase_map(const std::string& base);

void save_interferogram(const std::string& base, const Interferogram& ig);
Interferogram load_interferogram(const std::string& base);

void save_frame_stack(const std::string& base, const FrameStack& stack);
FrameStack load_frame_stack(const std::string& base);

}  // namespace cim
