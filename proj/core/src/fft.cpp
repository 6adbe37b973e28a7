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

#include "cim/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace cim::fft {
namespace {

std::mutex g_planner_mutex;

// FFTW planners are not thread safe; plan creation is serialized and plans
// are executed via the new-array interface (FFTW_UNALIGNED keeps that legal
// for arbitrary caller buffers).

fftwf_plan plan_f(int h, int w, int sign) {
  static std::map<std::tuple<int, int, int>, fftwf_plan> cache;
  std::lock_guard lock(g_planner_mutex);
  auto key = std::make_tuple(h, w, sign);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::vector<std::complex<float>> tmp(static_cast<size_t>(h) * w);
  auto* buf = reinterpret_cast<fftwf_complex*>(tmp.data());
  fftwf_plan p = fftwf_plan_dft_2d(h, w, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  cache.emplace(key, p);
  return p;
}

fftw_plan plan_d(int h, int w, int sign) {
  static std::map<std::tuple<int, int, int>, fftw_plan> cache;
  std::lock_guard lock(g_planner_mutex);
  auto key = std::make_tuple(h, w, sign);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::vector<std::complex<double>> tmp(static_cast<size_t>(h) * w);
  auto* buf = reinterpret_cast<fftw_complex*>(tmp.data());
  fftw_plan p = fftw_plan_dft_2d(h, w, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  cache.emplace(key, p);
  return p;
}

}  // namespace

void forward(int height, int width, std::complex<float>* data) {
  auto* buf = reinterpret_cast<fftwf_complex*>(data);
  fftwf_execute_dft(plan_f(height, width, FFTW_FORWARD), buf, buf);
}

void inverse(int height, int width, std::complex<float>* data) {
  auto* buf = reinterpret_cast<fftwf_complex*>(data);
  fftwf_execute_dft(plan_f(height, width, FFTW_BACKWARD), buf, buf);
  const float scale = 1.0f / (static_cast<float>(height) * static_cast<float>(width));
  const size_t n = static_cast<size_t>(height) * width;
  for (size_t i = 0; i < n; ++i) data[i] *= scale;
}

void forward(int height, int width, std::complex<double>* data) {
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plan_d(height, width, FFTW_FORWARD), buf, buf);
}

void inverse(int height, int width, std::complex<double>* data) {
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plan_d(height, width, FFTW_BACKWARD), buf, buf);
  const double scale = 1.0 / (static_cast<double>(height) * static_cast<double>(width));
  const size_t n = static_cast<size_t>(height) * width;
  for (size_t i = 0; i < n; ++i) data[i] *= scale;
}

}  // namespace cim::fft
