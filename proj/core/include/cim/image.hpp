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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

namespace cim {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Dense row-major 2D raster.
template <typename T>
struct Image {
  int width = 0;
  int height = 0;
  std::vector<T> data;

  Image() = default;
  Image(int w, int h, T fill = T{}) : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {
    if (w < 0 || h < 0) throw std::invalid_argument("image dimensions must be nonnegative");
  }

  T& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
  const T& at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
  T* row(int y) { return data.data() + static_cast<size_t>(y) * width; }
  const T* row(int y) const { return data.data() + static_cast<size_t>(y) * width; }
  size_t size() const { return data.size(); }
  bool same_shape(const Image& o) const { return width == o.width && height == o.height; }
};

using Rasterf = Image<float>;
using Rasterd = Image<double>;
using Mask = Image<uint8_t>;  // nonzero = valid pixel

/// Wrap into [-pi, pi).
inline double wrap_phase(double p) {
  p = std::remainder(p, kTwoPi);  // [-pi, pi]
  if (p >= kPi) p -= kTwoPi;
  return p;
}

/// 2D phase raster in radians plus the physical metadata every module passes along.
struct PhaseMap {
  Rasterf values;
  double pixel_size_um = 1.0;
  double wavelength_nm = 623.0;
  bool wrapped = true;
  std::optional<Mask> valid;  // absent means every pixel is valid

  int width() const { return values.width; }
  int height() const { return values.height; }

  bool is_valid(int x, int y) const { return !valid || valid->at(x, y) != 0; }
};

/// Errors that reached the filesystem or a malformed artifact (CLI exit code 2).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numerical failures such as a diverged loss (CLI exit code 3).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace cim
