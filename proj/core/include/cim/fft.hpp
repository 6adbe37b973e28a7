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

#include <complex>

namespace cim::fft {

// In-place 2D transforms on row-major interleaved complex buffers.
// Forward uses the e^{-i2pi} kernel; inverse is scaled by 1/(width*height).
// Plans are cached per (shape, direction) behind an internal mutex, so the
// calls are safe from concurrent threads.
void forward(int height, int width, std::complex<float>* data);
void inverse(int height, int width, std::complex<float>* data);
void forward(int height, int width, std::complex<double>* data);
void inverse(int height, int width, std::complex<double>* data);

/// Signed frequency in cycles/sample for bin k of an n-point transform.
inline double bin_freq(int k, int n) {
  return k < (n + 1) / 2 ? static_cast<double>(k) / n : static_cast<double>(k - n) / n;
}

}  // namespace cim::fft
