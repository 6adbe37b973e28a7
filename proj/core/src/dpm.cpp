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

#include "cim/dpm.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "cim/fft.hpp"

namespace cim {
namespace {

using cdouble = std::complex<double>;

void check_carrier(double u, double v) {
  if (std::abs(u) >= 0.5 || std::abs(v) >= 0.5)
    throw std::invalid_argument("carrier at or above Nyquist (|component| >= 0.5 cycles/pixel)");
  if (u == 0.0 && v == 0.0) throw std::invalid_argument("carrier must be nonzero");
}

/// Keeps only spectral content inside a disk of `radius` cycles/pixel.
std::vector<cdouble> disk_lowpass(const std::vector<cdouble>& field, int w, int h, double radius) {
  std::vector<cdouble> spec = field;
  fft::forward(h, w, spec.data());
  for (int ky = 0; ky < h; ++ky) {
    const double fv = fft::bin_freq(ky, h);
    for (int kx = 0; kx < w; ++kx) {
      const double fu = fft::bin_freq(kx, w);
      if (fu * fu + fv * fv > radius * radius) spec[static_cast<size_t>(ky) * w + kx] = 0.0;
    }
  }
  fft::inverse(h, w, spec.data());
  return spec;
}

// Shifts the modal phase (the flat specimen-free background) to zero. The
// mode is found on a coarse circular histogram, then refined as the median of
// the nearby values; the median resists the one-sided tail that specimen
// edges blending into the background add next to the modal bin.
void anchor_background_phase(Rasterf& values) {
  constexpr int kBins = 512;
  std::vector<size_t> hist(kBins, 0);
  for (float v : values.data) {
    int b = static_cast<int>((static_cast<double>(v) + kPi) / kTwoPi * kBins);
    hist[std::clamp(b, 0, kBins - 1)]++;
  }
  int best = 0;
  for (int b = 1; b < kBins; ++b)
    if (hist[b] > hist[best]) best = b;
  const double mode = (best + 0.5) / kBins * kTwoPi - kPi;

  const double window = 4.0 * kTwoPi / kBins;
  std::vector<double> near;
  near.reserve(values.data.size() / 8);
  for (float v : values.data) {
    const double d = wrap_phase(static_cast<double>(v) - mode);
    if (std::abs(d) <= window) near.push_back(d);
  }
  double piston = mode;
  if (!near.empty()) {
    auto mid = near.begin() + near.size() / 2;
    std::nth_element(near.begin(), mid, near.end());
    piston = wrap_phase(mode + *mid);
  }
  for (float& v : values.data)
    v = static_cast<float>(wrap_phase(static_cast<double>(v) - piston));
}

}  // namespace

Interferogram render_dpm(const PhaseMap& phase, double carrier_u, double carrier_v,
                         const DpmNoiseParams& noise, double reference_radius) {
  check_carrier(carrier_u, carrier_v);
  if (!(reference_radius > 0.0 && reference_radius < 0.5))
    throw std::invalid_argument("reference radius must lie in (0, 0.5) cycles/pixel");
  if (noise.speckle_contrast < 0.0 || noise.speckle_contrast > 1.0)
    throw std::invalid_argument("speckle contrast must lie in [0, 1]");

  const int w = phase.width();
  const int h = phase.height();
  const size_t n = static_cast<size_t>(w) * h;
  std::mt19937_64 rng(noise.seed);

  // Object field: unit-mean speckle times the specimen phase.
  std::vector<cdouble> field(n);
  if (noise.speckle_correlation_px > 0.0 && noise.speckle_contrast > 0.0) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<cdouble> g(n);
    for (auto& z : g) z = cdouble(gauss(rng), gauss(rng));
    fft::forward(h, w, g.data());
    const double ell = noise.speckle_correlation_px;
    for (int ky = 0; ky < h; ++ky) {
      const double fv = fft::bin_freq(ky, h);
      for (int kx = 0; kx < w; ++kx) {
        const double fu = fft::bin_freq(kx, w);
        const double f2 = fu * fu + fv * fv;
        g[static_cast<size_t>(ky) * w + kx] *= std::exp(-2.0 * kPi * kPi * ell * ell * f2);
      }
    }
    fft::inverse(h, w, g.data());
    double rms = 0.0;
    for (const auto& z : g) rms += std::norm(z);
    rms = std::sqrt(rms / static_cast<double>(n));
    const double gain = rms > 0.0 ? noise.speckle_contrast / rms : 0.0;
    for (size_t i = 0; i < n; ++i) field[i] = 1.0 + gain * g[i];
  } else {
    for (auto& z : field) z = 1.0;
  }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      field[static_cast<size_t>(y) * w + x] *=
          std::polar(1.0, static_cast<double>(phase.values.at(x, y)));

  // Filtered 0th order acts as the reference arm.
  std::vector<cdouble> reference = disk_lowpass(field, w, h, reference_radius);

  Interferogram ig;
  ig.intensity = Rasterf(w, h, 0.0f);
  ig.carrier_u = carrier_u;
  ig.carrier_v = carrier_v;
  ig.pixel_size_um = phase.pixel_size_um;
  ig.wavelength_nm = phase.wavelength_nm;

  std::vector<double> intensity(n);
  double mean = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const size_t i = static_cast<size_t>(y) * w + x;
      const double theta = kTwoPi * (carrier_u * x + carrier_v * y);
      const double val = std::norm(field[i] * std::polar(1.0, theta) + reference[i]);
      intensity[i] = val;
      mean += val;
    }
  }
  mean /= static_cast<double>(n);

  if (noise.parasitic_fringe_amplitude > 0.0) {
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        intensity[static_cast<size_t>(y) * w + x] +=
            noise.parasitic_fringe_amplitude * mean *
            std::cos(kTwoPi * (noise.parasitic_u * x + noise.parasitic_v * y));
  }

  // Shot noise before read noise; negative results clamp to zero.
  if (noise.photon_scale > 0.0) {
    for (auto& v : intensity) {
      std::poisson_distribution<long> poisson(noise.photon_scale * std::max(v, 0.0));
      v = static_cast<double>(poisson(rng)) / noise.photon_scale;
    }
  }
  if (noise.read_noise_sigma > 0.0) {
    std::normal_distribution<double> gauss(0.0, noise.read_noise_sigma);
    for (auto& v : intensity) v += gauss(rng);
  }
  for (size_t i = 0; i < n; ++i)
    ig.intensity.data[i] = static_cast<float>(std::max(intensity[i], 0.0));
  return ig;
}

PhaseMap demodulate_hilbert(const Interferogram& ig, const DemodConfig& cfg,
                            const PhaseMap* background) {
  check_carrier(cfg.carrier_u, cfg.carrier_v);
  const double cmag = std::hypot(cfg.carrier_u, cfg.carrier_v);
  if (!(cfg.filter_radius > 0.0) || cfg.filter_radius >= cmag)
    throw std::invalid_argument("sideband window overlaps DC (filter_radius >= |carrier|)");
  if (std::max(std::abs(cfg.carrier_u), std::abs(cfg.carrier_v)) + cfg.filter_radius >= 0.5)
    throw std::invalid_argument("sideband window crosses the Nyquist border");

  const int w = ig.width();
  const int h = ig.height();
  const size_t n = static_cast<size_t>(w) * h;
  if (background && (background->width() != w || background->height() != h))
    throw std::invalid_argument("background dimensions do not match the interferogram");

  std::vector<cdouble> spec(n);
  for (size_t i = 0; i < n; ++i) spec[i] = ig.intensity.data[i];
  fft::forward(h, w, spec.data());

  // Windowed sideband, circularly shifted so the carrier bin lands on DC.
  const int su = static_cast<int>(std::lround(cfg.carrier_u * w));
  const int sv = static_cast<int>(std::lround(cfg.carrier_v * h));
  const double r = cfg.filter_radius;
  const double flat = 0.6 * r;  // raised-cosine taper starts here
  std::vector<cdouble> base(n, 0.0);
  for (int ky = 0; ky < h; ++ky) {
    for (int kx = 0; kx < w; ++kx) {
      const int sx = ((kx + su) % w + w) % w;
      const int sy = ((ky + sv) % h + h) % h;
      const double fu = fft::bin_freq(sx, w);
      const double fv = fft::bin_freq(sy, h);
      const double d = std::hypot(fu - cfg.carrier_u, fv - cfg.carrier_v);
      if (d > r) continue;
      double wgt = 1.0;
      if (cfg.apodization == DemodConfig::Apodization::RaisedCosine && d > flat)
        wgt = 0.5 * (1.0 + std::cos(kPi * (d - flat) / (r - flat)));
      base[static_cast<size_t>(ky) * w + kx] = spec[static_cast<size_t>(sy) * w + sx] * wgt;
    }
  }
  fft::inverse(h, w, base.data());

  PhaseMap out;
  out.values = Rasterf(w, h, 0.0f);
  out.pixel_size_um = ig.pixel_size_um;
  out.wavelength_nm = ig.wavelength_nm;
  out.wrapped = true;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double phi = std::arg(base[static_cast<size_t>(y) * w + x]);
      if (background) phi = wrap_phase(phi - background->values.at(x, y));
      else phi = wrap_phase(phi);
      out.values.at(x, y) = static_cast<float>(phi);
    }
  }
  if (cfg.anchor_background) anchor_background_phase(out.values);
  return out;
}

PhaseMap calibrate_background(const Interferogram& blank, const DemodConfig& cfg) {
  return demodulate_hilbert(blank, cfg, nullptr);
}

}  // namespace cim
