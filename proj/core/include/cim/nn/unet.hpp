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
#include <string>
#include <vector>

#include "cim/nn/layers.hpp"

namespace cim::nn {

struct NetworkConfig {
  std::vector<int> encoder_channels{16, 32, 64, 128};
  int bottleneck_channels = 256;
  int in_channels = 1;
  int out_channels = 1;
  double dropout_rate = 0.25;  // at encoder stages 3-4 and the bottleneck
  enum class Upsample { TransposedConv, NearestConv };
  Upsample upsample = Upsample::TransposedConv;
  bool use_activation = true;  // disabled only by correctness harnesses
  uint64_t seed = 0;

  /// Spatial divisibility the four downsamplings impose.
  int divisor() const { return 1 << static_cast<int>(encoder_channels.size()); }
};

// conv3x3 -> BN -> act -> conv3x3 -> BN, plus a 1x1 shortcut summed before the
// final activation.
template <typename T>
struct ResidualBlock {
  Conv2d<T> conv1, conv2, shortcut;
  BatchNorm2d<T> bn1, bn2;
  ReLU<T> act1, act2;
  bool use_activation = true;

  void init(int in_ch, int out_ch, bool activation, std::mt19937_64& rng) {
    use_activation = activation;
    conv1.init(in_ch, out_ch, 3, rng);
    conv2.init(out_ch, out_ch, 3, rng);
    shortcut.init(in_ch, out_ch, 1, rng);
    bn1.init(out_ch);
    bn2.init(out_ch);
  }

  Tensor<T> forward(const Tensor<T>& x, bool train) {
    Tensor<T> a = bn1.forward(conv1.forward(x, train), train);
    if (use_activation) act1.forward_inplace(a, train);
    Tensor<T> b = bn2.forward(conv2.forward(a, train), train);
    Tensor<T> s = shortcut.forward(x, train);
    for (size_t i = 0; i < b.size(); ++i) b.v[i] += s.v[i];
    if (use_activation) act2.forward_inplace(b, train);
    return b;
  }

  Tensor<T> backward(const Tensor<T>& dy) {
    Tensor<T> d = use_activation ? act2.backward(dy) : dy;
    Tensor<T> dx = shortcut.backward(d);
    Tensor<T> da = bn2.backward(d);
    da = conv2.backward(da);
    if (use_activation) da = act1.backward(da);
    da = bn1.backward(da);
    da = conv1.backward(da);
    for (size_t i = 0; i < dx.size(); ++i) dx.v[i] += da.v[i];
    return dx;
  }

  void collect(const std::string& prefix, std::vector<ParamRef<T>>& out) {
    out.push_back({prefix + "/conv1/weight", &conv1.weight, &conv1.wgrad, "oihw", true});
    out.push_back({prefix + "/conv1/bias", &conv1.bias, &conv1.bgrad, "c", true});
    out.push_back({prefix + "/bn1/gamma", &bn1.gamma, &bn1.ggrad, "c", true});
    out.push_back({prefix + "/bn1/beta", &bn1.beta, &bn1.bgrad, "c", true});
    out.push_back({prefix + "/bn1/running_mean", &bn1.running_mean, nullptr, "c", false});
    out.push_back({prefix + "/bn1/running_var", &bn1.running_var, nullptr, "c", false});
    out.push_back({prefix + "/conv2/weight", &conv2.weight, &conv2.wgrad, "oihw", true});
    out.push_back({prefix + "/conv2/bias", &conv2.bias, &conv2.bgrad, "c", true});
    out.push_back({prefix + "/bn2/gamma", &bn2.gamma, &bn2.ggrad, "c", true});
    out.push_back({prefix + "/bn2/beta", &bn2.beta, &bn2.bgrad, "c", true});
    out.push_back({prefix + "/bn2/running_mean", &bn2.running_mean, nullptr, "c", false});
    out.push_back({prefix + "/bn2/running_var", &bn2.running_var, nullptr, "c", false});
    out.push_back({prefix + "/shortcut/weight", &shortcut.weight, &shortcut.wgrad, "oihw", true});
    out.push_back({prefix + "/shortcut/bias", &shortcut.bias, &shortcut.bgrad, "c", true});
  }
};

/// Factor-2 upsampling, either learned (transposed conv) or nearest + conv3x3.
template <typename T>
struct Upsampler {
  NetworkConfig::Upsample mode = NetworkConfig::Upsample::TransposedConv;
  ConvTranspose2<T> deconv;
  Conv2d<T> conv;
  int in_h = 0, in_w = 0;

  void init(int in_ch, int out_ch, NetworkConfig::Upsample m, std::mt19937_64& rng) {
    mode = m;
    if (mode == NetworkConfig::Upsample::TransposedConv)
      deconv.init(in_ch, out_ch, rng);
    else
      conv.init(in_ch, out_ch, 3, rng);
  }

  Tensor<T> forward(const Tensor<T>& x, bool train) {
    if (mode == NetworkConfig::Upsample::TransposedConv) return deconv.forward(x, train);
    in_h = x.h;
    in_w = x.w;
    Tensor<T> up(x.n, x.c, 2 * x.h, 2 * x.w);
    for (int ni = 0; ni < x.n; ++ni)
      for (int c = 0; c < x.c; ++c) {
        const T* src = x.plane(ni, c);
        T* dst = up.plane(ni, c);
        for (int y = 0; y < up.h; ++y)
          for (int xx = 0; xx < up.w; ++xx)
            dst[static_cast<size_t>(y) * up.w + xx] =
                src[static_cast<size_t>(y / 2) * x.w + xx / 2];
      }
    return conv.forward(up, train);
  }

  Tensor<T> backward(const Tensor<T>& dy) {
    if (mode == NetworkConfig::Upsample::TransposedConv) return deconv.backward(dy);
    Tensor<T> dup = conv.backward(dy);
    Tensor<T> dx(dup.n, dup.c, in_h, in_w);
    for (int ni = 0; ni < dup.n; ++ni)
      for (int c = 0; c < dup.c; ++c) {
        const T* g = dup.plane(ni, c);
        T* d = dx.plane(ni, c);
        for (int y = 0; y < dup.h; ++y)
          for (int xx = 0; xx < dup.w; ++xx)
            d[static_cast<size_t>(y / 2) * in_w + xx / 2] +=
                g[static_cast<size_t>(y) * dup.w + xx];
      }
    return dx;
  }

  void collect(const std::string& prefix, std::vector<ParamRef<T>>& out) {
    if (mode == NetworkConfig::Upsample::TransposedConv) {
      out.push_back({prefix + "/weight", &deconv.weight, &deconv.wgrad, "iohw", true});
      out.push_back({prefix + "/bias", &deconv.bias, &deconv.bgrad, "c", true});
    } else {
      out.push_back({prefix + "/weight", &conv.weight, &conv.wgrad, "oihw", true});
      out.push_back({prefix + "/bias", &conv.bias, &conv.bgrad, "c", true});
    }
  }
};

template <typename T>
struct ResUNet {
  NetworkConfig cfg;
  std::vector<ResidualBlock<T>> enc;
  std::vector<MaxPool2<T>> pools;
  ResidualBlock<T> bottleneck;
  std::vector<Upsampler<T>> ups;
  std::vector<ResidualBlock<T>> dec;
  Conv2d<T> head;
  Dropout<T> drop_enc3, drop_enc4, drop_bottleneck;
  std::mt19937_64 dropout_rng;

  // forward state
  std::vector<Tensor<T>> skips;

  explicit ResUNet(const NetworkConfig& config = {}) { build(config); }

  void build(const NetworkConfig& config) {
    cfg = config;
    if (cfg.encoder_channels.size() != 4)
      throw std::invalid_argument("network expects exactly 4 encoder stages");
    std::mt19937_64 rng(cfg.seed);
    dropout_rng.seed(cfg.seed + 1);

    enc.assign(4, {});
    pools.assign(4, {});
    ups.assign(4, {});
    dec.assign(4, {});
    int in_ch = cfg.in_channels;
    for (int s = 0; s < 4; ++s) {
      enc[s].init(in_ch, cfg.encoder_channels[s], cfg.use_activation, rng);
      in_ch = cfg.encoder_channels[s];
    }
    bottleneck.init(cfg.encoder_channels[3], cfg.bottleneck_channels, cfg.use_activation, rng);
    int prev = cfg.bottleneck_channels;
    for (int s = 3; s >= 0; --s) {
      const int ch = cfg.encoder_channels[s];
      ups[3 - s].init(prev, ch, cfg.upsample, rng);
      dec[3 - s].init(2 * ch, ch, cfg.use_activation, rng);
      prev = ch;
    }
    head.init(cfg.encoder_channels[0], cfg.out_channels, 1, rng);
    // Small head init keeps the initial output near the identity provided by
    // the global residual connection, so training starts from the input
    // instead of from noise.
    for (auto& v : head.weight.v) v *= static_cast<T>(0.01);
    drop_enc3.rate = static_cast<T>(cfg.dropout_rate);
    drop_enc4.rate = static_cast<T>(cfg.dropout_rate);
    drop_bottleneck.rate = static_cast<T>(cfg.dropout_rate);
  }

  void check_shape(int h, int w) const {
    const int d = cfg.divisor();
    if (h % d != 0 || w % d != 0)
      throw std::invalid_argument("input " + std::to_string(w) + "x" + std::to_string(h) +
                                  " not divisible by " + std::to_string(d));
  }

  /// train=true enables dropout and batch statistics and caches for backward.
  Tensor<T> forward(const Tensor<T>& x, bool train) {
    check_shape(x.h, x.w);
    skips.assign(4, {});
    Tensor<T> a = x;
    for (int s = 0; s < 4; ++s) {
      Tensor<T> b = enc[s].forward(a, train);
      if (s == 2) b = drop_enc3.forward(b, train, dropout_rng);
      if (s == 3) b = drop_enc4.forward(b, train, dropout_rng);
      skips[s] = b;
      a = pools[s].forward(b, train);
    }
    a = bottleneck.forward(a, train);
    a = drop_bottleneck.forward(a, train, dropout_rng);
    for (int s = 3; s >= 0; --s) {
      Tensor<T> u = ups[3 - s].forward(a, train);
      a = concat_channels(u, skips[s]);
      if (!train) skips[s] = {};  // free as we go at inference
      a = dec[3 - s].forward(a, train);
    }
    Tensor<T> y = head.forward(a, train);
    // Global residual connection: the network predicts a correction to its
    // input, so the identity mapping is the starting point for training.
    if (cfg.in_channels == cfg.out_channels)
      for (size_t i = 0; i < y.size(); ++i) y.v[i] += x.v[i];
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy) {
    Tensor<T> d = head.backward(dy);
    std::vector<Tensor<T>> skip_grads(4);
    for (int s = 0; s <= 3; ++s) {
      d = dec[3 - s].backward(d);
      Tensor<T> du;
      const int ch = cfg.encoder_channels[s];
      split_channels(d, du, skip_grads[s], ch, ch);
      d = ups[3 - s].backward(du);
    }
    d = drop_bottleneck.backward(d);
    d = bottleneck.backward(d);
    for (int s = 3; s >= 0; --s) {
      d = pools[s].backward(d);
      for (size_t i = 0; i < d.size(); ++i) d.v[i] += skip_grads[s].v[i];
      if (s == 3) d = drop_enc4.backward(d);
      if (s == 2) d = drop_enc3.backward(d);
      d = enc[s].backward(d);
    }
    // Gradient of the global residual connection.
    if (cfg.in_channels == cfg.out_channels)
      for (size_t i = 0; i < d.size(); ++i) d.v[i] += dy.v[i];
    return d;
  }

  std::vector<ParamRef<T>> parameters() {
    std::vector<ParamRef<T>> out;
    for (int s = 0; s < 4; ++s) enc[s].collect("enc" + std::to_string(s + 1), out);
    bottleneck.collect("bottleneck", out);
    for (int s = 0; s < 4; ++s) {
      ups[s].collect("up" + std::to_string(s + 1), out);
      dec[s].collect("dec" + std::to_string(s + 1), out);
    }
    out.push_back({"head/weight", &head.weight, &head.wgrad, "oihw", true});
    out.push_back({"head/bias", &head.bias, &head.bgrad, "c", true});
    return out;
  }

  size_t param_count() {
    size_t total = 0;
    for (const auto& p : parameters())
      if (p.trainable) total += p.value->size();
    return total;
  }

  void zero_grads() {
    for (auto& p : parameters())
      if (p.grad) p.grad->zero();
  }
};

}  // namespace cim::nn
