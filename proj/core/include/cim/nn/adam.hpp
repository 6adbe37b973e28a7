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
#include <vector>

#include "cim/nn/tensor.hpp"

namespace cim::nn {

/// Adam with bias correction. Moment buffers are allocated per trainable
/// parameter on construction and keyed by position, so the parameter list
/// must stay stable across steps.
template <typename T>
class Adam {
 public:
  Adam(std::vector<ParamRef<T>> params, double lr, double beta1 = 0.9, double beta2 = 0.999,
       double eps = 1e-8)
      : params_(std::move(params)), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
    for (const auto& p : params_) {
      m_.emplace_back(p.trainable ? p.value->size() : 0, 0.0);
      v_.emplace_back(p.trainable ? p.value->size() : 0, 0.0);
    }
  }

  void step() {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, t_);
    const double bc2 = 1.0 - std::pow(beta2_, t_);
    for (size_t i = 0; i < params_.size(); ++i) {
      auto& p = params_[i];
      if (!p.trainable || !p.grad) continue;
      auto& m = m_[i];
      auto& v = v_[i];
      for (size_t j = 0; j < p.value->size(); ++j) {
        const double g = static_cast<double>(p.grad->v[j]);
        m[j] = beta1_ * m[j] + (1.0 - beta1_) * g;
        v[j] = beta2_ * v[j] + (1.0 - beta2_) * g * g;
        const double mhat = m[j] / bc1;
        const double vhat = v[j] / bc2;
        p.value->v[j] -= static_cast<T>(lr_ * mhat / (std::sqrt(vhat) + eps_));
      }
    }
  }

  void zero_grads() {
    for (auto& p : params_)
      if (p.grad) p.grad->zero();
  }

 private:
  std::vector<ParamRef<T>> params_;
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

}  // namespace cim::nn
