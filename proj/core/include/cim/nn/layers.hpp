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

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "cim/nn/tensor.hpp"

namespace cim::nn {

template <typename T>
using MatrixRM = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapRM = Eigen::Map<MatrixRM<T>>;
template <typename T>
using CMapRM = Eigen::Map<const MatrixRM<T>>;
template <typename T>
using StridedMapRM = Eigen::Map<MatrixRM<T>, 0, Eigen::OuterStride<>>;
template <typename T>
using CStridedMapRM = Eigen::Map<const MatrixRM<T>, 0, Eigen::OuterStride<>>;

/// Rows of im2col work handled per GEMM call; bounds the scratch buffer.
inline int conv_row_block(int k, int in_ch, int width, size_t elem_size) {
  const size_t budget = size_t{48} * 1024 * 1024;
  const size_t per_row = static_cast<size_t>(k) * k * in_ch * width * elem_size;
  const int rows = static_cast<int>(budget / std::max<size_t>(per_row, 1));
  return std::max(rows, 1);
}

// ---------------------------------------------------------------------------
// Convolution, stride 1, same padding, odd kernel (1x1 and 3x3 in practice).

template <typename T>
struct Conv2d {
  int in_ch = 0, out_ch = 0, k = 1;
  Tensor<T> weight;  // [out_ch, in_ch, k, k]
  Tensor<T> bias;    // [out_ch]
  Tensor<T> wgrad, bgrad;
  Tensor<T> x_cache;

  void init(int in, int out, int kernel, std::mt19937_64& rng) {
    in_ch = in;
    out_ch = out;
    k = kernel;
    weight = Tensor<T>(out, in, kernel, kernel);
    bias = Tensor<T>::vec(out);
    wgrad = Tensor<T>(out, in, kernel, kernel);
    bgrad = Tensor<T>::vec(out);
    const double limit = std::sqrt(6.0 / (static_cast<double>(in) * kernel * kernel));
    std::uniform_real_distribution<double> u(-limit, limit);
    for (auto& v : weight.v) v = static_cast<T>(u(rng));
  }

  // col is [in_ch*k*k, rows*W] row-major for output rows [y0, y1).
  void im2col(const Tensor<T>& x, int ni, int y0, int y1, T* col) const {
    const int W = x.w, H = x.h;
    const int pad = k / 2;
    const size_t cols = static_cast<size_t>(y1 - y0) * W;
    for (int c = 0; c < in_ch; ++c) {
      const T* src = x.plane(ni, c);
      for (int ky = 0; ky < k; ++ky) {
        for (int kx = 0; kx < k; ++kx) {
          T* dst = col + ((static_cast<size_t>(c) * k + ky) * k + kx) * cols;
          for (int y = y0; y < y1; ++y) {
            const int sy = y + ky - pad;
            T* drow = dst + static_cast<size_t>(y - y0) * W;
            if (sy < 0 || sy >= H) {
              std::fill(drow, drow + W, T{});
              continue;
            }
            const T* srow = src + static_cast<size_t>(sy) * W;
            for (int x2 = 0; x2 < W; ++x2) {
              const int sx = x2 + kx - pad;
              drow[x2] = (sx >= 0 && sx < W) ? srow[sx] : T{};
            }
          }
        }
      }
    }
  }

  void col2im_add(const T* col, Tensor<T>& dx, int ni, int y0, int y1) const {
    const int W = dx.w, H = dx.h;
    const int pad = k / 2;
    const size_t cols = static_cast<size_t>(y1 - y0) * W;
    for (int c = 0; c < in_ch; ++c) {
      T* dst = dx.plane(ni, c);
      for (int ky = 0; ky < k; ++ky) {
        for (int kx = 0; kx < k; ++kx) {
          const T* src = col + ((static_cast<size_t>(c) * k + ky) * k + kx) * cols;
          for (int y = y0; y < y1; ++y) {
            const int sy = y + ky - pad;
            if (sy < 0 || sy >= H) continue;
            const T* srow = src + static_cast<size_t>(y - y0) * W;
            T* drow = dst + static_cast<size_t>(sy) * W;
            for (int x2 = 0; x2 < W; ++x2) {
              const int sx = x2 + kx - pad;
              if (sx >= 0 && sx < W) drow[sx] += srow[x2];
            }
          }
        }
      }
    }
  }

  Tensor<T> forward(const Tensor<T>& x, bool train) {
    if (x.c != in_ch) throw std::invalid_argument("conv input channels mismatch");
    if (train) x_cache = x;
    Tensor<T> y(x.n, out_ch, x.h, x.w);
    const size_t plane = static_cast<size_t>(x.h) * x.w;
    CMapRM<T> Wm(weight.v.data(), out_ch, static_cast<Eigen::Index>(in_ch) * k * k);

    if (k == 1) {
      for (int ni = 0; ni < x.n; ++ni) {
        CMapRM<T> Xm(x.plane(ni, 0), in_ch, static_cast<Eigen::Index>(plane));
        MapRM<T> Ym(y.plane(ni, 0), out_ch, static_cast<Eigen::Index>(plane));
        Ym.noalias() = Wm * Xm;
      }
    } else {
      const int block = conv_row_block(k, in_ch, x.w, sizeof(T));
      std::vector<T> col(static_cast<size_t>(in_ch) * k * k * block * x.w);
      for (int ni = 0; ni < x.n; ++ni) {
        for (int y0 = 0; y0 < x.h; y0 += block) {
          const int y1 = std::min(y0 + block, x.h);
          const size_t cols = static_cast<size_t>(y1 - y0) * x.w;
          im2col(x, ni, y0, y1, col.data());
          CMapRM<T> Cm(col.data(), static_cast<Eigen::Index>(in_ch) * k * k,
                       static_cast<Eigen::Index>(cols));
          StridedMapRM<T> Ym(y.plane(ni, 0) + static_cast<size_t>(y0) * x.w, out_ch,
                             static_cast<Eigen::Index>(cols),
                             Eigen::OuterStride<>(static_cast<Eigen::Index>(plane)));
          Ym.noalias() = Wm * Cm;
        }
      }
    }
    for (int ni = 0; ni < x.n; ++ni)
      for (int c = 0; c < out_ch; ++c) {
        T* p = y.plane(ni, c);
        const T b = bias.v[c];
        for (size_t i = 0; i < plane; ++i) p[i] += b;
      }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy) {
    const Tensor<T>& x = x_cache;
    Tensor<T> dx(x.n, in_ch, x.h, x.w);
    const size_t plane = static_cast<size_t>(x.h) * x.w;
    CMapRM<T> Wm(weight.v.data(), out_ch, static_cast<Eigen::Index>(in_ch) * k * k);
    MapRM<T> dWm(wgrad.v.data(), out_ch, static_cast<Eigen::Index>(in_ch) * k * k);

    for (int ni = 0; ni < x.n; ++ni)
      for (int c = 0; c < out_ch; ++c) {
        const T* p = dy.plane(ni, c);
        T acc{};
        for (size_t i = 0; i < plane; ++i) acc += p[i];
        bgrad.v[c] += acc;
      }

    if (k == 1) {
      for (int ni = 0; ni < x.n; ++ni) {
        CMapRM<T> Xm(x.plane(ni, 0), in_ch, static_cast<Eigen::Index>(plane));
        CMapRM<T> dYm(dy.plane(ni, 0), out_ch, static_cast<Eigen::Index>(plane));
        MapRM<T> dXm(dx.plane(ni, 0), in_ch, static_cast<Eigen::Index>(plane));
        dWm.noalias() += dYm * Xm.transpose();
        dXm.noalias() = Wm.transpose() * dYm;
      }
    } else {
      const int block = conv_row_block(k, in_ch, x.w, sizeof(T));
      std::vector<T> col(static_cast<size_t>(in_ch) * k * k * block * x.w);
      std::vector<T> dcol(col.size());
      for (int ni = 0; ni < x.n; ++ni) {
        for (int y0 = 0; y0 < x.h; y0 += block) {
          const int y1 = std::min(y0 + block, x.h);
          const size_t cols = static_cast<size_t>(y1 - y0) * x.w;
          im2col(x, ni, y0, y1, col.data());
          CMapRM<T> Cm(col.data(), static_cast<Eigen::Index>(in_ch) * k * k,
                       static_cast<Eigen::Index>(cols));
          CStridedMapRM<T> dYm(dy.plane(ni, 0) + static_cast<size_t>(y0) * x.w, out_ch,
                               static_cast<Eigen::Index>(cols),
                               Eigen::OuterStride<>(static_cast<Eigen::Index>(plane)));
          dWm.noalias() += dYm * Cm.transpose();
          MapRM<T> dCm(dcol.data(), static_cast<Eigen::Index>(in_ch) * k * k,
                       static_cast<Eigen::Index>(cols));
          dCm.noalias() = Wm.transpose() * dYm;
          col2im_add(dcol.data(), dx, ni, y0, y1);
        }
      }
    }
    return dx;
  }
};

// ---------------------------------------------------------------------------
// Batch normalization over (N, H, W) per channel.

template <typename T>
struct BatchNorm2d {
  int ch = 0;
  T momentum = static_cast<T>(0.9);
  T eps = static_cast<T>(1e-5);
  Tensor<T> gamma, beta, ggrad, bgrad;
  Tensor<T> running_mean, running_var;
  Tensor<T> xhat_cache;
  std::vector<T> invstd_cache;

  void init(int channels) {
    ch = channels;
    gamma = Tensor<T>::vec(channels, static_cast<T>(1));
    beta = Tensor<T>::vec(channels);
    ggrad = Tensor<T>::vec(channels);
    bgrad = Tensor<T>::vec(channels);
    running_mean = Tensor<T>::vec(channels);
    running_var = Tensor<T>::vec(channels, static_cast<T>(1));
  }

  Tensor<T> forward(const Tensor<T>& x, bool train) {
    Tensor<T> y(x.n, x.c, x.h, x.w);
    const size_t plane = static_cast<size_t>(x.h) * x.w;
    const size_t count = static_cast<size_t>(x.n) * plane;
    if (train) {
      xhat_cache = Tensor<T>(x.n, x.c, x.h, x.w);
      invstd_cache.assign(ch, T{});
    }
    for (int c = 0; c < ch; ++c) {
      T mean, var;
      if (train) {
        double m = 0.0;
        for (int ni = 0; ni < x.n; ++ni) {
          const T* p = x.plane(ni, c);
          for (size_t i = 0; i < plane; ++i) m += p[i];
        }
        m /= static_cast<double>(count);
        double v2 = 0.0;
        for (int ni = 0; ni < x.n; ++ni) {
          const T* p = x.plane(ni, c);
          for (size_t i = 0; i < plane; ++i) {
            const double d = p[i] - m;
            v2 += d * d;
          }
        }
        v2 /= static_cast<double>(count);
        mean = static_cast<T>(m);
        var = static_cast<T>(v2);
        running_mean.v[c] = momentum * running_mean.v[c] + (1 - momentum) * mean;
        running_var.v[c] = momentum * running_var.v[c] + (1 - momentum) * var;
      } else {
        mean = running_mean.v[c];
        var = running_var.v[c];
      }
      const T invstd = static_cast<T>(1.0 / std::sqrt(static_cast<double>(var) + eps));
      const T g = gamma.v[c], b = beta.v[c];
      for (int ni = 0; ni < x.n; ++ni) {
        const T* p = x.plane(ni, c);
        T* q = y.plane(ni, c);
        T* xh = train ? xhat_cache.plane(ni, c) : nullptr;
        for (size_t i = 0; i < plane; ++i) {
          const T h = (p[i] - mean) * invstd;
          if (xh) xh[i] = h;
          q[i] = g * h + b;
        }
      }
      if (train) invstd_cache[c] = invstd;
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy) {
    const Tensor<T>& xh = xhat_cache;
    Tensor<T> dx(dy.n, dy.c, dy.h, dy.w);
    const size_t plane = static_cast<size_t>(dy.h) * dy.w;
    const double count = static_cast<double>(dy.n) * plane;
    for (int c = 0; c < ch; ++c) {
      double sum_dy = 0.0, sum_dy_xh = 0.0;
      for (int ni = 0; ni < dy.n; ++ni) {
        const T* g = dy.plane(ni, c);
        const T* h = xh.plane(ni, c);
        for (size_t i = 0; i < plane; ++i) {
          sum_dy += g[i];
          sum_dy_xh += static_cast<double>(g[i]) * h[i];
        }
      }
      ggrad.v[c] += static_cast<T>(sum_dy_xh);
      bgrad.v[c] += static_cast<T>(sum_dy);
      const double scale = static_cast<double>(gamma.v[c]) * invstd_cache[c] / count;
      for (int ni = 0; ni < dy.n; ++ni) {
        const T* g = dy.plane(ni, c);
        const T* h = xh.plane(ni, c);
        T* d = dx.plane(ni, c);
        for (size_t i = 0; i < plane; ++i)
          d[i] = static_cast<T>(scale * (count * g[i] - sum_dy - h[i] * sum_dy_xh));
      }
    }
    return dx;
  }
};

// ---------------------------------------------------------------------------

template <typename T>
struct ReLU {
  Tensor<uint8_t> mask;

  Tensor<T> forward(const Tensor<T>& x, bool train) {
    Tensor<T> y = x;
    if (train) mask = Tensor<uint8_t>(x.n, x.c, x.h, x.w);
    for (size_t i = 0; i < y.size(); ++i) {
      const bool pos = y.v[i] > T{};
      if (train) mask.v[i] = pos;
      if (!pos) y.v[i] = T{};
    }
    return y;
  }

  void forward_inplace(Tensor<T>& x, bool train) {
    if (train) mask = Tensor<uint8_t>(x.n, x.c, x.h, x.w);
    for (size_t i = 0; i < x.size(); ++i) {
      const bool pos = x.v[i] > T{};
      if (train) mask.v[i] = pos;
      if (!pos) x.v[i] = T{};
    }
  }

  Tensor<T> backward(const Tensor<T>& dy) const {
    Tensor<T> dx = dy;
    for (size_t i = 0; i < dx.size(); ++i)
      if (!mask.v[i]) dx.v[i] = T{};
    return dx;
  }
};

template <typename T>
struct MaxPool2 {
  Tensor<uint8_t> argmax;
  int in_h = 0, in_w = 0;

  Tensor<T> forward(const Tensor<T>& x, bool train) {
    if (x.h % 2 != 0 || x.w % 2 != 0)
      throw std::invalid_argument("pooling input dimensions must be even");
    in_h = x.h;
    in_w = x.w;
    Tensor<T> y(x.n, x.c, x.h / 2, x.w / 2);
    if (train) argmax = Tensor<uint8_t>(x.n, x.c, x.h / 2, x.w / 2);
    for (int ni = 0; ni < x.n; ++ni)
      for (int c = 0; c < x.c; ++c) {
        const T* src = x.plane(ni, c);
        T* dst = y.plane(ni, c);
        uint8_t* am = train ? argmax.plane(ni, c) : nullptr;
        for (int yy = 0; yy < y.h; ++yy)
          for (int xx = 0; xx < y.w; ++xx) {
            const size_t base = static_cast<size_t>(2 * yy) * x.w + 2 * xx;
            T best = src[base];
            int idx = 0;
            const T cands[3] = {src[base + 1], src[base + x.w], src[base + x.w + 1]};
            for (int j = 0; j < 3; ++j)
              if (cands[j] > best) {
                best = cands[j];
                idx = j + 1;
              }
            dst[static_cast<size_t>(yy) * y.w + xx] = best;
            if (am) am[static_cast<size_t>(yy) * y.w + xx] = static_cast<uint8_t>(idx);
          }
      }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy) const {
    Tensor<T> dx(dy.n, dy.c, in_h, in_w);
    for (int ni = 0; ni < dy.n; ++ni)
      for (int c = 0; c < dy.c; ++c) {
        const T* g = dy.plane(ni, c);
        const uint8_t* am = argmax.plane(ni, c);
        T* d = dx.plane(ni, c);
        for (int yy = 0; yy < dy.h; ++yy)
          for (int xx = 0; xx < dy.w; ++xx) {
            const size_t i = static_cast<size_t>(yy) * dy.w + xx;
            const int idx = am[i];
            const size_t base = static_cast<size_t>(2 * yy + idx / 2) * in_w + 2 * xx + idx % 2;
            d[base] = g[i];
          }
      }
    return dx;
  }
};

// ---------------------------------------------------------------------------
// 2x2 stride-2 transposed convolution (non-overlapping blocks).

template <typename T>
struct ConvTranspose2 {
  int in_ch = 0, out_ch = 0;
  Tensor<T> weight;  // [in_ch, out_ch, 2, 2]
  Tensor<T> bias;    // [out_ch]
  Tensor<T> wgrad, bgrad;
  Tensor<T> x_cache;

  void init(int in, int out, std::mt19937_64& rng) {
    in_ch = in;
    out_ch = out;
    weight = Tensor<T>(in, out, 2, 2);
    bias = Tensor<T>::vec(out);
    wgrad = Tensor<T>(in, out, 2, 2);
    bgrad = Tensor<T>::vec(out);
    const double limit = std::sqrt(6.0 / (static_cast<double>(in) * 4.0));
    std::uniform_real_distribution<double> u(-limit, limit);
    for (auto& v : weight.v) v = static_cast<T>(u(rng));
  }

  Tensor<T> forward(const Tensor<T>& x, bool train) {
    if (x.c != in_ch) throw std::invalid_argument("deconv input channels mismatch");
    if (train) x_cache = x;
    Tensor<T> y(x.n, out_ch, 2 * x.h, 2 * x.w);
    const size_t plane_in = static_cast<size_t>(x.h) * x.w;
    CMapRM<T> Wm(weight.v.data(), in_ch, static_cast<Eigen::Index>(out_ch) * 4);
    MatrixRM<T> Z(static_cast<Eigen::Index>(out_ch) * 4, static_cast<Eigen::Index>(plane_in));
    for (int ni = 0; ni < x.n; ++ni) {
      CMapRM<T> Xm(x.plane(ni, 0), in_ch, static_cast<Eigen::Index>(plane_in));
      Z.noalias() = Wm.transpose() * Xm;
      for (int o = 0; o < out_ch; ++o) {
        T* dst = y.plane(ni, o);
        const T b = bias.v[o];
        for (int q = 0; q < 4; ++q) {
          const T* src = Z.data() + (static_cast<size_t>(o) * 4 + q) * plane_in;
          const int oy = q / 2, ox = q % 2;
          for (int yy = 0; yy < x.h; ++yy) {
            T* drow = dst + static_cast<size_t>(2 * yy + oy) * y.w + ox;
            const T* srow = src + static_cast<size_t>(yy) * x.w;
            for (int xx = 0; xx < x.w; ++xx) drow[2 * xx] = srow[xx] + b;
          }
        }
      }
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy) {
    const Tensor<T>& x = x_cache;
    Tensor<T> dx(x.n, in_ch, x.h, x.w);
    const size_t plane_in = static_cast<size_t>(x.h) * x.w;
    CMapRM<T> Wm(weight.v.data(), in_ch, static_cast<Eigen::Index>(out_ch) * 4);
    MapRM<T> dWm(wgrad.v.data(), in_ch, static_cast<Eigen::Index>(out_ch) * 4);
    MatrixRM<T> dZ(static_cast<Eigen::Index>(out_ch) * 4, static_cast<Eigen::Index>(plane_in));
    for (int ni = 0; ni < x.n; ++ni) {
      for (int o = 0; o < out_ch; ++o) {
        const T* g = dy.plane(ni, o);
        double bsum = 0.0;
        for (int q = 0; q < 4; ++q) {
          T* dst = dZ.data() + (static_cast<size_t>(o) * 4 + q) * plane_in;
          const int oy = q / 2, ox = q % 2;
          for (int yy = 0; yy < x.h; ++yy) {
            const T* grow = g + static_cast<size_t>(2 * yy + oy) * dy.w + ox;
            T* drow = dst + static_cast<size_t>(yy) * x.w;
            for (int xx = 0; xx < x.w; ++xx) {
              drow[xx] = grow[2 * xx];
              bsum += grow[2 * xx];
            }
          }
        }
        bgrad.v[o] += static_cast<T>(bsum);
      }
      CMapRM<T> Xm(x.plane(ni, 0), in_ch, static_cast<Eigen::Index>(plane_in));
      MapRM<T> dXm(dx.plane(ni, 0), in_ch, static_cast<Eigen::Index>(plane_in));
      dWm.noalias() += Xm * dZ.transpose();
      dXm.noalias() = Wm * dZ;
    }
    return dx;
  }
};

// ---------------------------------------------------------------------------

template <typename T>
struct Dropout {
  T rate{};
  Tensor<uint8_t> mask;

  Tensor<T> forward(const Tensor<T>& x, bool train, std::mt19937_64& rng) {
    if (!train || rate <= T{}) return x;
    mask = Tensor<uint8_t>(x.n, x.c, x.h, x.w);
    std::bernoulli_distribution keep(1.0 - static_cast<double>(rate));
    const T scale = static_cast<T>(1.0 / (1.0 - static_cast<double>(rate)));
    Tensor<T> y = x;
    for (size_t i = 0; i < y.size(); ++i) {
      const bool k = keep(rng);
      mask.v[i] = k;
      y.v[i] = k ? y.v[i] * scale : T{};
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy) const {
    if (rate <= T{}) return dy;
    const T scale = static_cast<T>(1.0 / (1.0 - static_cast<double>(rate)));
    Tensor<T> dx = dy;
    for (size_t i = 0; i < dx.size(); ++i) dx.v[i] = mask.v[i] ? dx.v[i] * scale : T{};
    return dx;
  }
};

template <typename T>
Tensor<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.n != b.n || a.h != b.h || a.w != b.w)
    throw std::invalid_argument("concat spatial dimensions disagree");
  Tensor<T> y(a.n, a.c + b.c, a.h, a.w);
  const size_t plane = static_cast<size_t>(a.h) * a.w;
  for (int ni = 0; ni < a.n; ++ni) {
    std::copy_n(a.plane(ni, 0), static_cast<size_t>(a.c) * plane, y.plane(ni, 0));
    std::copy_n(b.plane(ni, 0), static_cast<size_t>(b.c) * plane, y.plane(ni, a.c));
  }
  return y;
}

template <typename T>
void split_channels(const Tensor<T>& dy, Tensor<T>& da, Tensor<T>& db, int ca, int cb) {
  da = Tensor<T>(dy.n, ca, dy.h, dy.w);
  db = Tensor<T>(dy.n, cb, dy.h, dy.w);
  const size_t plane = static_cast<size_t>(dy.h) * dy.w;
  for (int ni = 0; ni < dy.n; ++ni) {
    std::copy_n(dy.plane(ni, 0), static_cast<size_t>(ca) * plane, da.plane(ni, 0));
    std::copy_n(dy.plane(ni, ca), static_cast<size_t>(cb) * plane, db.plane(ni, 0));
  }
}

}  // namespace cim::nn
