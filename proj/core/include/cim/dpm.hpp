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

/// Single off-axis interferogram frame.
struct Interferogram {
  Rasterf intensity;                 // detector units, >= 0
  double carrier_u = 0.25;           // cycles/pixel along x
  double carrier_v = 0.0;            // cycles/pixel along y
  double pixel_size_um = 1.0;
  double wavelength_nm = 532.0;

  int width() const { return intensity.width; }
  int height() const { return intensity.height; }
};

/// Laser-characteristic noise model for the off-axis arm.
struct DpmNoiseParams {
  double speckle_correlation_px = 0.0;     // 0 disables speckle
  double speckle_contrast = 0.0;           // [0, 1]
  double parasitic_fringe_amplitude = 0.0; // relative to the mean intensity
  double parasitic_u = 0.0;                // cycles/pixel
  double parasitic_v = 0.0;
  double read_noise_sigma = 0.0;           // detector units
  double photon_scale = 0.0;               // expected counts at unit intensity; 0 disables shot noise
  uint64_t seed = 0;
};

struct DemodConfig {
  double carrier_u = 0.25;
  double carrier_v = 0.0;
  double filter_radius = 0.1;  // cycles/pixel, must stay below |carrier|
  enum class Apodization { Hard, RaisedCosine };
  Apodization apodization = Apodization::RaisedCosine;
  // The self-referenced geometry leaves an unobservable piston (the phase of
  // the filtered 0th order) on the result. When set, the modal phase value --
  // the specimen-free background -- is shifted to zero, as in standard
  // quantitative phase practice.
  bool anchor_background = true;
};

// Forward-render the interference of the object field (carrying the off-axis
// carrier) with its own low-pass-filtered copy acting as reference. The
// reference is the object spectrum restricted to a disk of reference_radius
// cycles/pixel, mimicking the pinhole-filtered 0th order.
Interferogram render_dpm(const PhaseMap& phase, double carrier_u, double carrier_v,
                         const DpmNoiseParams& noise, double reference_radius = 0.02);

// FFT, sideband extraction around the configured carrier, baseband shift,
// inverse FFT, arg. The optional background is subtracted modulo 2pi.
PhaseMap demodulate_hilbert(const Interferogram& ig, const DemodConfig& cfg,
                            const PhaseMap* background = nullptr);

/// Demodulates a blank-specimen frame for use as the background of later frames.
PhaseMap calibrate_background(const Interferogram& blank, const DemodConfig& cfg);

}  // namespace cim
