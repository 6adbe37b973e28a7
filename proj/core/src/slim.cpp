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

#include "cim/slim.hpp"

#include <random>
#include <vector>

#include "cim/fft.hpp"

namespace cim {
namespace {

using cdouble = std::complex<double>;

std::vector<cdouble> total_field(const PhaseMap& phase) {
  const int w = phase.width();
  const int h = phase.height();
  std::vector<cdouble> field(static_cast<size_t>(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      field[static_cast<size_t>(y) * w + x] =
          std::polar(1.0, static_cast<double>(phase.values.at(x, y)));
  return field;
}

std::vector<cdouble> disk_lowpass(std::vector<cdouble> field, int w, int h, double radius) {
  fft::forward(h, w, field.data());
  for (int ky = 0; ky < h; ++ky) {
    const double fv = fft::bin_freq(ky, h);
    for (int kx = 0; kx < w; ++kx) {
      const double fu = fft::bin_freq(kx, w);
      if (fu * fu + fv * fv > radius * radius) field[static_cast<size_t>(ky) * w + kx] = 0.0;
    }
  }
  fft::inverse(h, w, field.data());
  return field;
}

void check_radius(double lowpass_radius) {
  if (!(lowpass_radius > 0.0 && lowpass_radius < 0.5))
    throw std::invalid_argument("lowpass radius must lie in (0, 0.5) cycles/pixel");
}

}  // namespace

FieldPair decompose_field(const PhaseMap& phase, double lowpass_radius) {
  check_radius(lowpass_radius);
  const int w = phase.width();
  const int h = phase.height();
  auto total = total_field(phase);
  auto low = disk_lowpass(total, w, h, lowpass_radius);

  FieldPair pair;
  pair.e0 = Image<cdouble>(w, h);
  pair.e1 = Image<cdouble>(w, h);
  for (size_t i = 0; i < total.size(); ++i) {
    pair.e0.data[i] = low[i];
    pair.e1.data[i] = total[i] - low[i];
  }
  return pair;
}

FrameStack render_slim(const PhaseMap& phase, double lowpass_radius,
                       const SlimNoiseParams& noise) {
  check_radius(lowpass_radius);
  const int w = phase.width();
  const int h = phase.height();
  const size_t n = static_cast<size_t>(w) * h;

  auto total = total_field(phase);
  auto low = disk_lowpass(total, w, h, lowpass_radius);

  FrameStack stack;
  stack.pixel_size_um = phase.pixel_size_um;
  stack.wavelength_nm = phase.wavelength_nm;
  for (auto& f : stack.frames) f = Rasterd(w, h, 0.0);

  const auto offsets = FrameStack::phase_offsets();
  for (size_t i = 0; i < n; ++i) {
    // Real unscattered amplitude: the modulator only sees relative phase, so
    // the reference phase is fixed to zero by convention.
    const double a = std::abs(low[i]);
    const cdouble e1 = total[i] - a;
    for (int k = 0; k < 4; ++k)
      stack.frames[k].data[i] = std::norm(e1 + a * std::polar(1.0, -offsets[k]));
  }

  if (noise.photon_scale > 0.0 || noise.read_noise_sigma > 0.0) {
    std::mt19937_64 rng(noise.seed);
    for (auto& frame : stack.frames) {
      if (noise.photon_scale > 0.0) {
        for (auto& v : frame.data) {
          std::poisson_distribution<long> poisson(noise.photon_scale * std::max(v, 0.0));
          v = static_cast<double>(poisson(rng)) / noise.photon_scale;
        }
      }
      if (noise.read_noise_sigma > 0.0) {
        std::normal_distribution<double> gauss(0.0, noise.read_noise_sigma);
        for (auto& v : frame.data) v += gauss(rng);
      }
      for (auto& v : frame.data) v = std::max(v, 0.0);
    }
  }
  return stack;
}

PhaseMap reconstruct_slim(const FrameStack& stack, double epsilon) {
  const int w = stack.width();
  const int h = stack.height();
  for (int k = 1; k < 4; ++k)
    if (stack.frames[k].width != w || stack.frames[k].height != h)
      throw std::invalid_argument("frame stack dimensions disagree");

  PhaseMap out;
  out.values = Rasterf(w, h, 0.0f);
  out.pixel_size_um = stack.pixel_size_um;
  out.wavelength_nm = stack.wavelength_nm;
  out.wrapped = true;
  out.valid = Mask(w, h, 1);

  const size_t n = static_cast<size_t>(w) * h;
  for (size_t i = 0; i < n; ++i) {
    const double i0 = stack.frames[0].data[i];
    const double i1 = stack.frames[1].data[i];
    const double i2 = stack.frames[2].data[i];
    const double i3 = stack.frames[3].data[i];

    const double cos_term = i0 - i2;  // 4*|E0||E1| cos(dphi)
    const double sin_term = i3 - i1;  // 4*|E0||E1| sin(dphi)
    if (std::abs(cos_term) < epsilon && std::abs(sin_term) < epsilon) {
      out.valid->data[i] = 0;  // no scattered signal
      continue;
    }

    const double dphi = std::atan2(sin_term, cos_term);
    const double product = 0.25 * std::hypot(cos_term, sin_term);  // |E0||E1|
    const double sum = 0.25 * (i0 + i1 + i2 + i3);                 // |E0|^2 + |E1|^2

    double disc = sum * sum - 4.0 * product * product;
    if (disc < 0.0) {
      disc = 0.0;  // noise pushed the solve infeasible; clamp to beta = 1
      out.valid->data[i] = 0;
    }
    const double root = std::sqrt(disc);
    const double denom = sum + root;
    const double beta = denom > 0.0 ? std::sqrt((sum - root) / denom) : 0.0;

    const double phi = std::atan2(beta * std::sin(dphi), 1.0 + beta * std::cos(dphi));
    out.values.data[i] = static_cast<float>(wrap_phase(phi));
  }
  return out;
}

}  // namespace cim
