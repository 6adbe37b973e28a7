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

#include "cim/image.hpp"
#include "cim/nn/unet.hpp"

namespace cim {

// Container formats for the named-tensor checkpoint. Hdf5 is the reference;
// FlatBinary is a single-file fallback: magic, JSON index, raw float32 data.
// Paths ending in .h5/.hdf5 select Hdf5 by default.
enum class WeightFormat { Auto, Hdf5, FlatBinary };

// On-disk layout for 4-axis tensors. Native keeps each tensor's own axis
// order ("oihw" for convolutions, "iohw" for transposed convolutions); Hwio
// stores every 4-axis tensor as "hwio". Each tensor carries an explicit
// axis-order tag, and the loader converts whatever layout it finds back to
// the in-memory order.
enum class WeightLayout { Native, Hwio };

void save_weights(const std::string& path, nn::ResUNet<float>& net,
                  WeightFormat format = WeightFormat::Auto,
                  WeightLayout layout = WeightLayout::Native);

// Fills the network in place; throws DataError naming the tensor on a
// missing entry, shape mismatch, or unrecognized axis-order tag.
void load_weights(const std::string& path, nn::ResUNet<float>& net,
                  WeightFormat format = WeightFormat::Auto);

}  // namespace cim
