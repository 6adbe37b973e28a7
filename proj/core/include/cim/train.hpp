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

#include <functional>
#include <utility>
#include <vector>

#include "cim/image.hpp"
#include "cim/nn/unet.hpp"

namespace cim {

struct TrainConfig {
  double learning_rate = 6e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  int batch_size = 4;
  int epochs = 1000;
  int crop_size = 400;
  int crops_per_image = 1;  // crops drawn from each image per epoch
  uint64_t seed = 0;
};

struct TrainLog {
  std::vector<double> train_loss;  // one entry per epoch
  std::vector<double> val_loss;
  int best_epoch = -1;  // 0-based epoch whose weights the network holds
  double best_val_loss = 0.0;
};

/// (input, target) raster pair, both already normalized to [0, 1).
using SamplePair = std::pair<Rasterf, Rasterf>;

/// Called after each epoch with (epoch, train_loss, val_loss).
using EpochCallback = std::function<void(int, double, double)>;

// Minimizes mean squared error with Adam. Crops are re-drawn every epoch.
// The network is left holding the weights of the best validation epoch.
// Throws NumericError when a loss turns non-finite.
TrainLog train_network(nn::ResUNet<float>& net, const std::vector<SamplePair>& train_set,
                       const std::vector<SamplePair>& val_set, const TrainConfig& cfg,
                       const EpochCallback& on_epoch = nullptr);

// Mean squared error of the network output against targets, inference mode.
double evaluate_loss(nn::ResUNet<float>& net, const std::vector<SamplePair>& set, int crop_size);

// Central-difference check of the full backward pass on a small
// double-precision network; returns the worst relative gradient error.
double gradient_check(uint64_t seed = 0);

}  // namespace cim
