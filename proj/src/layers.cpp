#include "sdacd/nn/layers.hpp"

#include <Eigen/Core>
#include <cmath>
#include <stdexcept>

namespace sdacd::nn {

using RowMat = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using CMapMat = Eigen::Map<const RowMat>;

namespace {

void im2col(const Tensor& x, int k, int stride, int pad, int oh, int ow, float* col) {
  const int K_cols = oh * ow;
  for (int ci = 0; ci < x.c; ++ci) {
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        float* row = col + (static_cast<size_t>((ci * k + ky) * k + kx)) * K_cols;
        for (int oy = 0; oy < oh; ++oy) {
          const int iy = oy * stride - pad + ky;
          if (iy < 0 || iy >= x.h) {
            for (int ox = 0; ox < ow; ++ox) row[oy * ow + ox] = 0.0f;
            continue;
          }
          const float* src = x.data() + (static_cast<size_t>(ci) * x.h + iy) * x.w;
          for (int ox = 0; ox < ow; ++ox) {
            const int ix = ox * stride - pad + kx;
            row[oy * ow + ox] = (ix >= 0 && ix < x.w) ? src[ix] : 0.0f;
          }
        }
      }
    }
  }
}

void col2im_add(const float* col, int cin, int k, int stride, int pad, int oh, int ow, Tensor& gx) {
  const int K_cols = oh * ow;
  for (int ci = 0; ci < cin; ++ci) {
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        const float* row = col + (static_cast<size_t>((ci * k + ky) * k + kx)) * K_cols;
        for (int oy = 0; oy < oh; ++oy) {
          const int iy = oy * stride - pad + ky;
          if (iy < 0 || iy >= gx.h) continue;
          float* dst = gx.data() + (static_cast<size_t>(ci) * gx.h + iy) * gx.w;
          for (int ox = 0; ox < ow; ++ox) {
            const int ix = ox * stride - pad + kx;
            if (ix >= 0 && ix < gx.w) dst[ix] += row[oy * ow + ox];
          }
        }
      }
    }
  }
}

}  // namespace

Conv2d::Conv2d(int cin, int cout, int k, int stride, int pad)
    : cin_(cin),
      cout_(cout),
      k_(k),
      stride_(stride),
      pad_(pad),
      weight_(cout, cin, k * k),
      bias_(cout, 1, 1),
      gweight_(cout, cin, k * k),
      gbias_(cout, 1, 1) {}

Tensor Conv2d::forward(const Tensor& x, Tape& tape) const {
  if (x.c != cin_) throw std::runtime_error("conv2d: channel mismatch");
  const int oh = (x.h + 2 * pad_ - k_) / stride_ + 1;
  const int ow = (x.w + 2 * pad_ - k_) / stride_ + 1;
  if (oh <= 0 || ow <= 0) throw std::runtime_error("conv2d: input too small");
  const int K = cin_ * k_ * k_;
  const int N = oh * ow;

  Tensor col(1, K, N);
  im2col(x, k_, stride_, pad_, oh, ow, col.data());

  Tensor out(cout_, oh, ow);
  CMapMat W(weight_.data(), cout_, K);
  CMapMat C(col.data(), K, N);
  MapMat O(out.data(), cout_, N);
  O.noalias() = W * C;
  for (int co = 0; co < cout_; ++co) O.row(co).array() += bias_.v[co];

  tape.push(std::move(col), x.h, x.w);
  return out;
}

Tensor Conv2d::backward(const Tensor& gy, Tape& tape, bool train) {
  TapeSlot slot = tape.pop();
  const Tensor& col = slot.t;
  const int xh = slot.a, xw = slot.b;
  const int K = cin_ * k_ * k_;
  const int N = gy.h * gy.w;

  CMapMat GO(gy.data(), cout_, N);
  CMapMat C(col.data(), K, N);
  if (train) {
    MapMat GW(gweight_.data(), cout_, K);
    GW.noalias() += GO * C.transpose();
    for (int co = 0; co < cout_; ++co) gbias_.v[co] += GO.row(co).sum();
  }

  Tensor gcol(1, K, N);
  CMapMat W(weight_.data(), cout_, K);
  MapMat GC(gcol.data(), K, N);
  GC.noalias() = W.transpose() * GO;

  Tensor gx(cin_, xh, xw);
  col2im_add(gcol.data(), cin_, k_, stride_, pad_, gy.h, gy.w, gx);
  return gx;
}

void Conv2d::collect(std::vector<Tensor*>& params, std::vector<Tensor*>& grads) {
  params.push_back(&weight_);
  grads.push_back(&gweight_);
  params.push_back(&bias_);
  grads.push_back(&gbias_);
}

void Conv2d::init(Rng& rng) {
  const float std = std::sqrt(2.0f / static_cast<float>(cin_ * k_ * k_));
  for (auto& w : weight_.v) w = rng.normal(0.0f, std);
  bias_.fill(0.0f);
}

InstanceNorm2d::InstanceNorm2d(int channels, float eps)
    : channels_(channels),
      eps_(eps),
      gamma_(channels, 1, 1),
      beta_(channels, 1, 1),
      ggamma_(channels, 1, 1),
      gbeta_(channels, 1, 1) {
  gamma_.fill(1.0f);
}

Tensor InstanceNorm2d::forward(const Tensor& x, Tape& tape) const {
  if (x.c != channels_) throw std::runtime_error("instance_norm: channel mismatch");
  const int n = x.h * x.w;
  Tensor xhat(x.c, x.h, x.w);
  Tensor invstd(x.c, 1, 1);
  Tensor out(x.c, x.h, x.w);
  for (int ci = 0; ci < x.c; ++ci) {
    const float* src = x.data() + static_cast<size_t>(ci) * n;
    double mean = 0.0;
    for (int i = 0; i < n; ++i) mean += src[i];
    mean /= n;
    double var = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = src[i] - mean;
      var += d * d;
    }
    var /= n;
    const float is = 1.0f / std::sqrt(static_cast<float>(var) + eps_);
    invstd.v[ci] = is;
    float* xh = xhat.data() + static_cast<size_t>(ci) * n;
    float* dst = out.data() + static_cast<size_t>(ci) * n;
    const float g = gamma_.v[ci], b = beta_.v[ci];
    for (int i = 0; i < n; ++i) {
      xh[i] = (src[i] - static_cast<float>(mean)) * is;
      dst[i] = g * xh[i] + b;
    }
  }
  tape.push(std::move(xhat));
  tape.push(std::move(invstd));
  return out;
}

Tensor InstanceNorm2d::backward(const Tensor& gy, Tape& tape, bool train) {
  const Tensor invstd = tape.pop().t;
  const Tensor xhat = tape.pop().t;
  const int n = gy.h * gy.w;
  Tensor gx(gy.c, gy.h, gy.w);
  for (int ci = 0; ci < gy.c; ++ci) {
    const float* gyp = gy.data() + static_cast<size_t>(ci) * n;
    const float* xh = xhat.data() + static_cast<size_t>(ci) * n;
    double sum_gy = 0.0, sum_gy_xhat = 0.0;
    for (int i = 0; i < n; ++i) {
      sum_gy += gyp[i];
      sum_gy_xhat += static_cast<double>(gyp[i]) * xh[i];
    }
    if (train) {
      ggamma_.v[ci] += static_cast<float>(sum_gy_xhat);
      gbeta_.v[ci] += static_cast<float>(sum_gy);
    }
    const float mean_gy = static_cast<float>(sum_gy / n);
    const float mean_gy_xhat = static_cast<float>(sum_gy_xhat / n);
    const float scale = gamma_.v[ci] * invstd.v[ci];
    float* gxp = gx.data() + static_cast<size_t>(ci) * n;
    for (int i = 0; i < n; ++i) gxp[i] = scale * (gyp[i] - mean_gy - xh[i] * mean_gy_xhat);
  }
  return gx;
}

void InstanceNorm2d::collect(std::vector<Tensor*>& params, std::vector<Tensor*>& grads) {
  params.push_back(&gamma_);
  grads.push_back(&ggamma_);
  params.push_back(&beta_);
  grads.push_back(&gbeta_);
}

void InstanceNorm2d::init(Rng&) {
  gamma_.fill(1.0f);
  beta_.fill(0.0f);
}

Tensor ReLU::forward(const Tensor& x, Tape& tape) const {
  Tensor out(x.c, x.h, x.w);
  for (size_t i = 0; i < x.size(); ++i) out.v[i] = x.v[i] > 0.0f ? x.v[i] : 0.0f;
  tape.push(x);
  return out;
}

Tensor ReLU::backward(const Tensor& gy, Tape& tape, bool) {
  const Tensor x = tape.pop().t;
  Tensor gx(gy.c, gy.h, gy.w);
  for (size_t i = 0; i < gy.size(); ++i) gx.v[i] = x.v[i] > 0.0f ? gy.v[i] : 0.0f;
  return gx;
}

Tensor LeakyReLU::forward(const Tensor& x, Tape& tape) const {
  Tensor out(x.c, x.h, x.w);
  for (size_t i = 0; i < x.size(); ++i) out.v[i] = x.v[i] > 0.0f ? x.v[i] : slope_ * x.v[i];
  tape.push(x);
  return out;
}

Tensor LeakyReLU::backward(const Tensor& gy, Tape& tape, bool) {
  const Tensor x = tape.pop().t;
  Tensor gx(gy.c, gy.h, gy.w);
  for (size_t i = 0; i < gy.size(); ++i) gx.v[i] = x.v[i] > 0.0f ? gy.v[i] : slope_ * gy.v[i];
  return gx;
}

Tensor Tanh::forward(const Tensor& x, Tape& tape) const {
  Tensor out(x.c, x.h, x.w);
  for (size_t i = 0; i < x.size(); ++i) out.v[i] = std::tanh(x.v[i]);
  tape.push(out);
  return out;
}

Tensor Tanh::backward(const Tensor& gy, Tape& tape, bool) {
  const Tensor y = tape.pop().t;
  Tensor gx(gy.c, gy.h, gy.w);
  for (size_t i = 0; i < gy.size(); ++i) gx.v[i] = gy.v[i] * (1.0f - y.v[i] * y.v[i]);
  return gx;
}

Tensor HardTanh::forward(const Tensor& x, Tape& tape) const {
  Tensor out(x.c, x.h, x.w);
  for (size_t i = 0; i < x.size(); ++i) out.v[i] = std::min(1.0f, std::max(-1.0f, x.v[i]));
  tape.push(x);
  return out;
}

Tensor HardTanh::backward(const Tensor& gy, Tape& tape, bool) {
  const Tensor x = tape.pop().t;
  Tensor gx(gy.c, gy.h, gy.w);
  for (size_t i = 0; i < gy.size(); ++i) gx.v[i] = (x.v[i] > -1.0f && x.v[i] < 1.0f) ? gy.v[i] : 0.0f;
  return gx;
}

Tensor Upsample2x::forward(const Tensor& x, Tape&) const {
  Tensor out(x.c, x.h * 2, x.w * 2);
  for (int ci = 0; ci < x.c; ++ci)
    for (int y = 0; y < x.h; ++y)
      for (int xx = 0; xx < x.w; ++xx) {
        const float v = x.at(ci, y, xx);
        out.at(ci, 2 * y, 2 * xx) = v;
        out.at(ci, 2 * y, 2 * xx + 1) = v;
        out.at(ci, 2 * y + 1, 2 * xx) = v;
        out.at(ci, 2 * y + 1, 2 * xx + 1) = v;
      }
  return out;
}

Tensor Upsample2x::backward(const Tensor& gy, Tape&, bool) {
  Tensor gx(gy.c, gy.h / 2, gy.w / 2);
  for (int ci = 0; ci < gx.c; ++ci)
    for (int y = 0; y < gx.h; ++y)
      for (int xx = 0; xx < gx.w; ++xx)
        gx.at(ci, y, xx) = gy.at(ci, 2 * y, 2 * xx) + gy.at(ci, 2 * y, 2 * xx + 1) +
                           gy.at(ci, 2 * y + 1, 2 * xx) + gy.at(ci, 2 * y + 1, 2 * xx + 1);
  return gx;
}

Tensor GlobalAvgPool::forward(const Tensor& x, Tape& tape) const {
  Tensor out(x.c, 1, 1);
  const int n = x.h * x.w;
  for (int ci = 0; ci < x.c; ++ci) {
    double s = 0.0;
    const float* src = x.data() + static_cast<size_t>(ci) * n;
    for (int i = 0; i < n; ++i) s += src[i];
    out.v[ci] = static_cast<float>(s / n);
  }
  tape.push(Tensor(), x.h, x.w);
  return out;
}

Tensor GlobalAvgPool::backward(const Tensor& gy, Tape& tape, bool) {
  TapeSlot slot = tape.pop();
  const int h = slot.a, w = slot.b;
  Tensor gx(gy.c, h, w);
  const float inv = 1.0f / static_cast<float>(h * w);
  for (int ci = 0; ci < gy.c; ++ci) {
    float* dst = gx.data() + static_cast<size_t>(ci) * h * w;
    const float g = gy.v[ci] * inv;
    for (int i = 0; i < h * w; ++i) dst[i] = g;
  }
  return gx;
}

ResBlock::ResBlock(int channels)
    : conv1_(channels, channels, 3, 1, 1),
      conv2_(channels, channels, 3, 1, 1),
      in1_(channels),
      in2_(channels) {}

Tensor ResBlock::forward(const Tensor& x, Tape& tape) const {
  Tensor y = conv1_.forward(x, tape);
  y = in1_.forward(y, tape);
  y = relu_.forward(y, tape);
  y = conv2_.forward(y, tape);
  y = in2_.forward(y, tape);
  y += x;
  return y;
}

Tensor ResBlock::backward(const Tensor& gy, Tape& tape, bool train) {
  Tensor g = in2_.backward(gy, tape, train);
  g = conv2_.backward(g, tape, train);
  g = relu_.backward(g, tape, train);
  g = in1_.backward(g, tape, train);
  g = conv1_.backward(g, tape, train);
  g += gy;  // identity skip
  return g;
}

void ResBlock::collect(std::vector<Tensor*>& params, std::vector<Tensor*>& grads) {
  conv1_.collect(params, grads);
  in1_.collect(params, grads);
  conv2_.collect(params, grads);
  in2_.collect(params, grads);
}

void ResBlock::init(Rng& rng) {
  conv1_.init(rng);
  in1_.init(rng);
  conv2_.init(rng);
  in2_.init(rng);
}

}  // namespace sdacd::nn
