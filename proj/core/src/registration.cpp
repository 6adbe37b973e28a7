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

#include "cim/registration.hpp"

#include <complex>
#include <vector>

#include "cim/fft.hpp"

namespace cim {
namespace {

using cdouble = std::complex<double>;

double bilinear(const Rasterf& img, double x, double y, bool* inside) {
  if (x < 0.0 || y < 0.0 || x > img.width - 1 || y > img.height - 1) {
    if (inside) *inside = false;
    return 0.0;
  }
  if (inside) *inside = true;
  const int x0 = static_cast<int>(x);
  const int y0 = static_cast<int>(y);
  const int x1 = std::min(x0 + 1, img.width - 1);
  const int y1 = std::min(y0 + 1, img.height - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  return (1 - fx) * (1 - fy) * img.at(x0, y0) + fx * (1 - fy) * img.at(x1, y0) +
         (1 - fx) * fy * img.at(x0, y1) + fx * fy * img.at(x1, y1);
}

}  // namespace

RegistrationTransform register_pair(const PhaseMap& moving, const PhaseMap& fixed,
                                    double nominal_scale, double min_confidence) {
  if (!(nominal_scale > 0.0)) throw std::invalid_argument("nominal scale must be positive");
  const int w = fixed.width();
  const int h = fixed.height();
  if (w < 8 || h < 8) throw std::invalid_argument("fixed raster too small for registration");

  // Undo the nominal magnification, then window and whiten both images.
  std::vector<double> a(static_cast<size_t>(w) * h), b(a.size());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      a[static_cast<size_t>(y) * w + x] =
          bilinear(moving.values, nominal_scale * x, nominal_scale * y, nullptr);
      b[static_cast<size_t>(y) * w + x] = fixed.values.at(x, y);
    }
  double mean_a = 0.0, mean_b = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    mean_a += a[i];
    mean_b += b[i];
  }
  mean_a /= static_cast<double>(a.size());
  mean_b /= static_cast<double>(b.size());

  // One estimation pass. The analysis window on the downsampled moving image
  // is displaced by (wdx, wdy) so that, once the displacement approximates the
  // true shift, both windows weight the same scene content. A fixed window on
  // shifted content otherwise shrinks the estimate several percent toward
  // zero, which at 20 px shifts costs more than a pixel.
  struct Estimate {
    double peak, dx, dy;
  };
  auto hann = [](double t, int n) {
    if (t < 0.0 || t > n - 1) return 0.0;
    return 0.5 * (1.0 - std::cos(kTwoPi * t / (n - 1)));
  };
  auto estimate = [&](double wdx, double wdy) -> Estimate {
    std::vector<cdouble> fa(a.size()), fb(b.size());
    double energy_a = 0.0, energy_b = 0.0;
    for (int y = 0; y < h; ++y) {
      const double wy_b = hann(y, h), wy_a = hann(y - wdy, h);
      for (int x = 0; x < w; ++x) {
        const size_t i = static_cast<size_t>(y) * w + x;
        fa[i] = (a[i] - mean_a) * hann(x - wdx, w) * wy_a;
        fb[i] = (b[i] - mean_b) * hann(x, w) * wy_b;
        energy_a += std::norm(fa[i]);
        energy_b += std::norm(fb[i]);
      }
    }
    if (energy_a == 0.0 || energy_b == 0.0)
      throw std::runtime_error("unregistrable pair: featureless input");
    fft::forward(h, w, fa.data());
    fft::forward(h, w, fb.data());

    // Confidence: the energy-normalized cross-correlation peak (1 for a
    // perfect match, 0 for independent content).
    std::vector<cdouble> spectrum(fa.size());
    for (size_t i = 0; i < spectrum.size(); ++i) spectrum[i] = fa[i] * std::conj(fb[i]);
    std::vector<cdouble> cross = spectrum;
    fft::inverse(h, w, cross.data());
    const double norm = std::sqrt(energy_a * energy_b);
    double peak = -1.0;
    for (const auto& c : cross) peak = std::max(peak, c.real() / norm);

    // Localization: regularized spectral whitening concentrates the peak into
    // a near-delta insensitive to the smooth scene's autocorrelation width.
    double mean_mag = 0.0;
    for (const auto& s : spectrum) mean_mag += std::abs(s);
    mean_mag /= static_cast<double>(spectrum.size());
    const double reg = 1e-2 * mean_mag;
    std::vector<cdouble> white(spectrum.size());
    for (size_t i = 0; i < white.size(); ++i)
      white[i] = spectrum[i] / (std::abs(spectrum[i]) + reg);
    std::vector<cdouble> sharp = white;
    fft::inverse(h, w, sharp.data());
    int px = 0, py = 0;
    double best = -1.0;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const double v = sharp[static_cast<size_t>(y) * w + x].real();
        if (v > best) {
          best = v;
          px = x;
          py = y;
        }
      }

    // Subpixel refinement: the whitened correlation on a 1/64-pixel grid
    // around the integer peak, by direct DFT summation (separable in x/y).
    constexpr int kHalf = 64;  // +-1 px
    constexpr double kStep = 1.0 / 64.0;
    std::vector<cdouble> ex(static_cast<size_t>(w) * (2 * kHalf + 1));
    std::vector<cdouble> ey(static_cast<size_t>(h) * (2 * kHalf + 1));
    for (int s = -kHalf; s <= kHalf; ++s) {
      for (int kx = 0; kx < w; ++kx)
        ex[static_cast<size_t>(kx) * (2 * kHalf + 1) + (s + kHalf)] =
            std::polar(1.0, kTwoPi * fft::bin_freq(kx, w) * (px + s * kStep));
      for (int ky = 0; ky < h; ++ky)
        ey[static_cast<size_t>(ky) * (2 * kHalf + 1) + (s + kHalf)] =
            std::polar(1.0, kTwoPi * fft::bin_freq(ky, h) * (py + s * kStep));
    }
    // temp(ky, sx) = sum_kx white(ky, kx) * ex(kx, sx)
    std::vector<cdouble> temp(static_cast<size_t>(h) * (2 * kHalf + 1), 0.0);
    for (int ky = 0; ky < h; ++ky)
      for (int kx = 0; kx < w; ++kx) {
        const cdouble v = white[static_cast<size_t>(ky) * w + kx];
        for (int sx = 0; sx <= 2 * kHalf; ++sx)
          temp[static_cast<size_t>(ky) * (2 * kHalf + 1) + sx] +=
              v * ex[static_cast<size_t>(kx) * (2 * kHalf + 1) + sx];
      }
    double dx = px, dy = py;
    double fine_best = -1.0;
    for (int sy = 0; sy <= 2 * kHalf; ++sy)
      for (int sx = 0; sx <= 2 * kHalf; ++sx) {
        cdouble acc = 0.0;
        for (int ky = 0; ky < h; ++ky)
          acc += ey[static_cast<size_t>(ky) * (2 * kHalf + 1) + sy] *
                 temp[static_cast<size_t>(ky) * (2 * kHalf + 1) + sx];
        if (acc.real() > fine_best) {
          fine_best = acc.real();
          dx = px + (sx - kHalf) * kStep;
          dy = py + (sy - kHalf) * kStep;
        }
      }
    if (dx > w / 2.0) dx -= w;
    if (dy > h / 2.0) dy -= h;
    return {peak, dx, dy};
  };

  const Estimate coarse = estimate(0.0, 0.0);
  const Estimate fine = estimate(std::round(coarse.dx), std::round(coarse.dy));
  if (fine.peak < min_confidence)
    throw std::runtime_error("unregistrable pair: correlation peak " +
                             std::to_string(fine.peak) + " below confidence threshold " +
                             std::to_string(min_confidence));

  return RegistrationTransform{nominal_scale, nominal_scale * fine.dx, nominal_scale * fine.dy};
}

PhaseMap apply_transform(const PhaseMap& map, const RegistrationTransform& t, int out_width,
                         int out_height) {
  if (!(t.scale > 0.0)) throw std::invalid_argument("transform scale must be positive");
  const int w = out_width > 0 ? out_width : map.width();
  const int h = out_height > 0 ? out_height : map.height();

  PhaseMap out;
  out.values = Rasterf(w, h, 0.0f);
  out.pixel_size_um = map.pixel_size_um;
  out.wavelength_nm = map.wavelength_nm;
  out.wrapped = map.wrapped;
  out.valid = Mask(w, h, 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double xm = t.scale * x + t.tx;
      const double ym = t.scale * y + t.ty;
      bool inside = false;
      const double v = bilinear(map.values, xm, ym, &inside);
      if (!inside) {
        out.valid->at(x, y) = 0;
        continue;
      }
      if (map.valid) {
        const int x0 = static_cast<int>(xm), y0 = static_cast<int>(ym);
        const int x1 = std::min(x0 + 1, map.width() - 1);
        const int y1 = std::min(y0 + 1, map.height() - 1);
        if (!map.valid->at(x0, y0) || !map.valid->at(x1, y0) || !map.valid->at(x0, y1) ||
            !map.valid->at(x1, y1)) {
          out.valid->at(x, y) = 0;
          continue;
        }
      }
      out.values.at(x, y) = static_cast<float>(v);
    }
  }
  return out;
}

}  // namespace cim
