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

#include "cim/phantom.hpp"

#include <algorithm>
#include <random>
#include <string>

namespace cim {
namespace {

// Largest float strictly below pi keeps phantoms inside the wrapped range.
const float kMaxWrapped = std::nextafter(static_cast<float>(kPi), 0.0f);

void check_wavelength(double wavelength_nm) {
  if (!(wavelength_nm > 0.0)) throw std::invalid_argument("wavelength must be positive");
}

}  // namespace

double bead_peak_phase(const BeadSpec& spec, double wavelength_nm) {
  const double lambda_um = wavelength_nm * 1e-3;
  return kTwoPi * spec.diameter_um * (spec.n_bead - spec.n_medium) / lambda_um;
}

PhaseMap bead_phase(const BeadSpec& spec, int width, int height, double pixel_size_um,
                    double wavelength_nm) {
  check_wavelength(wavelength_nm);
  if (!(spec.diameter_um > 0.0)) throw std::invalid_argument("bead diameter must be positive");
  if (spec.n_bead < 1.0 || spec.n_bead > 2.0 || spec.n_medium < 1.0 || spec.n_medium > 2.0)
    throw std::invalid_argument("refractive indices must lie in [1, 2]");
  if (!(pixel_size_um > 0.0)) throw std::invalid_argument("pixel size must be positive");

  const double r_px = 0.5 * spec.diameter_um / pixel_size_um;
  if (spec.center_x_px - r_px < 0.0 || spec.center_x_px + r_px > width - 1 ||
      spec.center_y_px - r_px < 0.0 || spec.center_y_px + r_px > height - 1) {
    throw std::invalid_argument(
        "bead footprint (radius " + std::to_string(r_px) + " px at " +
        std::to_string(spec.center_x_px) + "," + std::to_string(spec.center_y_px) +
        ") exceeds the " + std::to_string(width) + "x" + std::to_string(height) + " raster");
  }

  const double lambda_um = wavelength_nm * 1e-3;
  const double radius_um = 0.5 * spec.diameter_um;
  const double phase_per_um = kTwoPi * (spec.n_bead - spec.n_medium) / lambda_um;

  PhaseMap map;
  map.values = Rasterf(width, height, 0.0f);
  map.pixel_size_um = pixel_size_um;
  map.wavelength_nm = wavelength_nm;
  map.wrapped = true;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double dx = (x - spec.center_x_px) * pixel_size_um;
      const double dy = (y - spec.center_y_px) * pixel_size_um;
      const double rho2 = dx * dx + dy * dy;
      if (rho2 >= radius_um * radius_um) continue;
      const double thickness = 2.0 * std::sqrt(radius_um * radius_um - rho2);
      const double phi = phase_per_um * thickness;
      map.values.at(x, y) = std::min(static_cast<float>(phi), kMaxWrapped);
    }
  }
  return map;
}

PhaseMap blob_field(const BlobFieldSpec& spec, int width, int height, double pixel_size_um,
                    double wavelength_nm) {
  check_wavelength(wavelength_nm);
  if (spec.count < 0) throw std::invalid_argument("blob count must be nonnegative");
  if (spec.peak_phase_min < 0.0 || spec.peak_phase_max >= kPi ||
      spec.peak_phase_min > spec.peak_phase_max)
    throw std::invalid_argument("peak phase range must lie within [0, pi)");
  if (spec.radius_min_um <= 0.0 || spec.radius_min_um > spec.radius_max_um)
    throw std::invalid_argument("invalid blob radius range");

  // All random draws happen up front, in a fixed order, so the rendering is a
  // pure function of the spec.
  struct Blob {
    double cx, cy, radius_px, peak;
  };
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> ux(0.0, width);
  std::uniform_real_distribution<double> uy(0.0, height);
  std::uniform_real_distribution<double> ur(spec.radius_min_um, spec.radius_max_um);
  std::uniform_real_distribution<double> up(spec.peak_phase_min, spec.peak_phase_max);
  std::vector<Blob> blobs(static_cast<size_t>(spec.count));
  for (auto& b : blobs) {
    b.cx = ux(rng);
    b.cy = uy(rng);
    b.radius_px = ur(rng) / pixel_size_um;
    b.peak = up(rng);
  }

  PhaseMap map;
  map.values = Rasterf(width, height, 0.0f);
  map.pixel_size_um = pixel_size_um;
  map.wavelength_nm = wavelength_nm;
  map.wrapped = true;
  for (const auto& b : blobs) {
    const int x0 = std::max(0, static_cast<int>(std::floor(b.cx - b.radius_px)));
    const int x1 = std::min(width - 1, static_cast<int>(std::ceil(b.cx + b.radius_px)));
    const int y0 = std::max(0, static_cast<int>(std::floor(b.cy - b.radius_px)));
    const int y1 = std::min(height - 1, static_cast<int>(std::ceil(b.cy + b.radius_px)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double rho = std::hypot(x - b.cx, y - b.cy);
        if (rho >= b.radius_px) continue;
        const double bump = 0.5 * b.peak * (1.0 + std::cos(kPi * rho / b.radius_px));
        map.values.at(x, y) += static_cast<float>(bump);
      }
    }
  }
  for (auto& v : map.values.data) v = std::min(v, kMaxWrapped);
  return map;
}

PhaseMap scale_wavelength(const PhaseMap& map, double target_wavelength_nm) {
  check_wavelength(target_wavelength_nm);
  check_wavelength(map.wavelength_nm);
  PhaseMap out = map;
  const double ratio = map.wavelength_nm / target_wavelength_nm;
  bool in_range = true;
  for (auto& v : out.values.data) {
    v = static_cast<float>(v * ratio);
    if (v < -kPi || v >= kPi) in_range = false;
  }
  out.wavelength_nm = target_wavelength_nm;
  out.wrapped = in_range;  // scaling never wraps; the flag reports the range honestly
  return out;
}

}  // namespace cim
