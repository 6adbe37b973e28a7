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

#include "cim/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "cim/dataset.hpp"
#include "cim/nn/adam.hpp"

namespace cim {

namespace {

void copy_crop_into(const Rasterf& src, nn::Tensor<float>& dst, int ni) {
  float* p = dst.plane(ni, 0);
  std::copy(src.data.begin(), src.data.end(), p);
}

std::pair<Rasterf, Rasterf> center_crop(const Rasterf& a, const Rasterf& b, int size) {
  if (a.width == size && a.height == size) return {a, b};
  if (a.width < size || a.height < size)
    throw std::invalid_argument("raster smaller than evaluation crop size");
  const int x0 = (a.width - size) / 2;
  const int y0 = (a.height - size) / 2;
  Rasterf ca(size, size), cb(size, size);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      ca.at(x, y) = a.at(x0 + x, y0 + y);
      cb.at(x, y) = b.at(x0 + x, y0 + y);
    }
  return {std::move(ca), std::move(cb)};
}

/// Returns the loss and fills dloss with dL/dy for L = mean((y - t)^2).
template <typename T>
double mse_and_grad(const nn::Tensor<T>& y, const nn::Tensor<T>& t, nn::Tensor<T>* dloss) {
  const double n = static_cast<double>(y.size());
  double acc = 0.0;
  if (dloss) *dloss = nn::Tensor<T>(y.n, y.c, y.h, y.w);
  for (size_t i = 0; i < y.size(); ++i) {
    const double d = static_cast<double>(y.v[i]) - static_cast<double>(t.v[i]);
    acc += d * d;
    if (dloss) dloss->v[i] = static_cast<T>(2.0 * d / n);
  }
  return acc / n;
}

std::vector<std::vector<float>> snapshot(nn::ResUNet<float>& net) {
  std::vector<std::vector<float>> out;
  for (auto& p : net.parameters()) out.push_back(p.value->v);
  return out;
}

void restore(nn::ResUNet<float>& net, const std::vector<std::vector<float>>& snap) {
  auto params = net.parameters();
  for (size_t i = 0; i < params.size(); ++i) params[i].value->v = snap[i];
}

}  // namespace

double evaluate_loss(nn::ResUNet<float>& net, const std::vector<SamplePair>& set, int crop_size) {
  if (set.empty()) throw std::invalid_argument("evaluation set is empty");
  double acc = 0.0;
  for (const auto& [in, target] : set) {
    auto [ci, ct] = center_crop(in, target, crop_size);
    nn::Tensor<float> x(1, 1, crop_size, crop_size), t(1, 1, crop_size, crop_size);
    copy_crop_into(ci, x, 0);
    copy_crop_into(ct, t, 0);
    nn::Tensor<float> y = net.forward(x, /*train=*/false);
    acc += mse_and_grad<float>(y, t, nullptr);
  }
  return acc / static_cast<double>(set.size());
}

TrainLog train_network(nn::ResUNet<float>& net, const std::vector<SamplePair>& train_set,
                       const std::vector<SamplePair>& val_set, const TrainConfig& cfg,
                       const EpochCallback& on_epoch) {
  if (train_set.empty()) throw std::invalid_argument("training set is empty");
  if (val_set.empty()) throw std::invalid_argument("validation set is empty");
  net.check_shape(cfg.crop_size, cfg.crop_size);

  nn::Adam<float> opt(net.parameters(), cfg.learning_rate, cfg.beta1, cfg.beta2);
  std::mt19937_64 rng(cfg.seed);

  TrainLog log;
  log.best_val_loss = std::numeric_limits<double>::infinity();
  std::vector<std::vector<float>> best;

  const size_t samples_per_epoch = train_set.size() * static_cast<size_t>(cfg.crops_per_image);
  std::vector<size_t> order(samples_per_epoch);
  for (size_t i = 0; i < samples_per_epoch; ++i) order[i] = i % train_set.size();

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    size_t epoch_batches = 0;
    for (size_t pos = 0; pos < order.size(); pos += cfg.batch_size, ++epoch_batches) {
      const int bs = static_cast<int>(std::min<size_t>(cfg.batch_size, order.size() - pos));
      nn::Tensor<float> x(bs, 1, cfg.crop_size, cfg.crop_size);
      nn::Tensor<float> t(bs, 1, cfg.crop_size, cfg.crop_size);
      for (int b = 0; b < bs; ++b) {
        const auto& [in, target] = train_set[order[pos + b]];
        auto [ci, ct] = random_crop(in, target, cfg.crop_size, rng);
        copy_crop_into(ci, x, b);
        copy_crop_into(ct, t, b);
      }
      opt.zero_grads();
      nn::Tensor<float> y = net.forward(x, /*train=*/true);
      nn::Tensor<float> dloss;
      const double loss = mse_and_grad(y, t, &dloss);
      if (!std::isfinite(loss))
        throw NumericError("non-finite training loss at epoch " + std::to_string(epoch) +
                           ", batch " + std::to_string(epoch_batches));
      net.backward(dloss);
      opt.step();
      epoch_loss += loss;
    }
    epoch_loss /= static_cast<double>(epoch_batches);

    const double vloss = evaluate_loss(net, val_set, cfg.crop_size);
    if (!std::isfinite(vloss))
      throw NumericError("non-finite validation loss at epoch " + std::to_string(epoch));
    log.train_loss.push_back(epoch_loss);
    log.val_loss.push_back(vloss);
    if (vloss < log.best_val_loss) {
      log.best_val_loss = vloss;
      log.best_epoch = epoch;
      best = snapshot(net);
    }
    if (on_epoch) on_epoch(epoch, epoch_loss, vloss);
  }

  if (!best.empty()) restore(net, best);
  return log;
}

double gradient_check(uint64_t seed) {
  nn::NetworkConfig cfg;
  cfg.encoder_channels = {2, 2, 4, 4};
  cfg.bottleneck_channels = 8;
  cfg.dropout_rate = 0.0;  // masks would change between finite-difference evals
  cfg.seed = seed;
  nn::ResUNet<double> net(cfg);

  const int n = 16;
  std::mt19937_64 rng(seed + 99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  nn::Tensor<double> x(1, 1, n, n), t(1, 1, n, n);
  for (auto& v : x.v) v = u(rng);
  for (auto& v : t.v) v = u(rng);

  auto params = net.parameters();
  net.zero_grads();
  nn::Tensor<double> y = net.forward(x, /*train=*/true);
  nn::Tensor<double> dloss;
  mse_and_grad(y, t, &dloss);
  net.backward(dloss);

  // Analytic grads are now in place; compare a sample of entries per tensor.
  double worst = 0.0;
  std::mt19937_64 pick(seed + 7);
  for (auto& p : params) {
    if (!p.trainable || !p.grad) continue;
    const size_t count = std::min<size_t>(p.value->size(), 4);
    for (size_t s = 0; s < count; ++s) {
      const size_t j = std::uniform_int_distribution<size_t>(0, p.value->size() - 1)(pick);
      const double orig = p.value->v[j];
      const double eps = 1e-5 * (1.0 + std::abs(orig));
      p.value->v[j] = orig + eps;
      const double lp = mse_and_grad<double>(net.forward(x, true), t, nullptr);
      p.value->v[j] = orig - eps;
      const double lm = mse_and_grad<double>(net.forward(x, true), t, nullptr);
      p.value->v[j] = orig;
      const double numeric = (lp - lm) / (2.0 * eps);
      const double analytic = p.grad->v[j];
      const double denom = std::max(std::abs(numeric) + std::abs(analytic), 1e-6);
      worst = std::max(worst, std::abs(numeric - analytic) / denom);
    }
  }
  return worst;
}

}  // namespace cim
