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

#include "cim/translate.hpp"

#include <algorithm>
#include <cmath>

#include "cim/dataset.hpp"

namespace cim {

namespace {

// Reflect index i into [0, n), mirror at the edges without repeating them.
int reflect(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i = std::abs(i) % period;
  return i < n ? i : period - i;
}

}  // namespace

Rasterf infer_normalized(nn::ResUNet<float>& net, const Rasterf& input) {
  const int d = net.cfg.divisor();
  const int ph = (input.height + d - 1) / d * d;
  const int pw = (input.width + d - 1) / d * d;

  nn::Tensor<float> x(1, 1, ph, pw);
  for (int y = 0; y < ph; ++y) {
    const int sy = reflect(y, input.height);
    for (int xx = 0; xx < pw; ++xx)
      x.at(0, 0, y, xx) = input.at(reflect(xx, input.width), sy);
  }

  nn::Tensor<float> y = net.forward(x, /*train=*/false);

  Rasterf out(input.width, input.height);
  const float hi = std::nextafter(1.0f, 0.0f);
  for (int yy = 0; yy < input.height; ++yy)
    for (int xx = 0; xx < input.width; ++xx)
      out.at(xx, yy) = std::clamp(y.at(0, 0, yy, xx), 0.0f, hi);
  return out;
}

PhaseMap infer_full(nn::ResUNet<float>& net, const PhaseMap& input, double target_wavelength_nm) {
  Rasterf norm = normalize_phase(input);
  Rasterf pred = infer_normalized(net, norm);
  PhaseMap out = denormalize_phase(pred, input.pixel_size_um, target_wavelength_nm);
  out.valid = input.valid;
  return out;
}

}  // namespace cim
