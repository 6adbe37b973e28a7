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

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cim::nn {

/// Dense NCHW tensor. Vectors (biases, norm parameters) use n=c=h=1.
template <typename T>
struct Tensor {
  int n = 0, c = 0, h = 0, w = 0;
  std::vector<T> v;

  Tensor() = default;
  Tensor(int n_, int c_, int h_, int w_, T fill = T{})
      : n(n_), c(c_), h(h_), w(w_), v(static_cast<size_t>(n_) * c_ * h_ * w_, fill) {}

  static Tensor vec(int len, T fill = T{}) { return Tensor(1, 1, 1, len, fill); }

  size_t size() const { return v.size(); }
  bool same_shape(const Tensor& o) const {
    return n == o.n && c == o.c && h == o.h && w == o.w;
  }
  std::string shape_str() const {
    return std::to_string(n) + "x" + std::to_string(c) + "x" + std::to_string(h) + "x" +
           std::to_string(w);
  }

  T* plane(int ni, int ci) {
    return v.data() + (static_cast<size_t>(ni) * c + ci) * h * w;
  }
  const T* plane(int ni, int ci) const {
    return v.data() + (static_cast<size_t>(ni) * c + ci) * h * w;
  }
  T& at(int ni, int ci, int y, int x) { return plane(ni, ci)[static_cast<size_t>(y) * w + x]; }
  const T& at(int ni, int ci, int y, int x) const {
    return plane(ni, ci)[static_cast<size_t>(y) * w + x];
  }

  void zero() { std::fill(v.begin(), v.end(), T{}); }
};

/// Named view of one network tensor, used by the optimizer and the serializer.
template <typename T>
struct ParamRef {
  std::string name;
  Tensor<T>* value = nullptr;
  Tensor<T>* grad = nullptr;          // null for non-trainable state
  std::string axis_order;             // "oihw" | "iohw" | "c"
  bool trainable = true;
};

}  // namespace cim::nn
