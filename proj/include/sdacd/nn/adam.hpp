#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "sdacd/nn/net.hpp"

namespace sdacd::nn {

// Adam over one ParamGroup. Moment buffers are laid out parallel to the
// group's parameter tensors.
class Adam {
 public:
  Adam() = default;
  Adam(float lr, float beta1 = 0.9f, float beta2 = 0.999f, float eps = 1e-8f)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void attach(const ParamGroup& group) {
    m_.clear();
    v_.clear();
    for (const auto* p : group.params) {
      m_.emplace_back(p->c, p->h, p->w);
      v_.emplace_back(p->c, p->h, p->w);
    }
    t_ = 0;
  }

  // Optional global-norm gradient clipping, then one Adam step.
  void step(ParamGroup& group, float clip_norm = 0.0f) {
    if (clip_norm > 0.0f) {
      double sq = 0.0;
      for (const auto* g : group.grads)
        for (float x : g->v) sq += static_cast<double>(x) * x;
      const double norm = std::sqrt(sq);
      if (norm > clip_norm) {
        const float scale = static_cast<float>(clip_norm / norm);
        for (auto* g : group.grads) *g *= scale;
      }
    }
    ++t_;
    const float bc1 = 1.0f - std::pow(beta1_, static_cast<float>(t_));
    const float bc2 = 1.0f - std::pow(beta2_, static_cast<float>(t_));
    for (size_t i = 0; i < group.params.size(); ++i) {
      Tensor& p = *group.params[i];
      const Tensor& g = *group.grads[i];
      Tensor& m = m_[i];
      Tensor& v = v_[i];
      for (size_t j = 0; j < p.v.size(); ++j) {
        m.v[j] = beta1_ * m.v[j] + (1.0f - beta1_) * g.v[j];
        v.v[j] = beta2_ * v.v[j] + (1.0f - beta2_) * g.v[j] * g.v[j];
        const float mhat = m.v[j] / bc1;
        const float vhat = v.v[j] / bc2;
        p.v[j] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
      }
    }
  }

  float lr() const { return lr_; }
  void set_lr(float lr) { lr_ = lr; }
  int64_t steps() const { return t_; }
  void set_steps(int64_t t) { t_ = t; }
  std::vector<Tensor>& moments_m() { return m_; }
  std::vector<Tensor>& moments_v() { return v_; }

 private:
  float lr_ = 1e-3f;
  float beta1_ = 0.9f, beta2_ = 0.999f, eps_ = 1e-8f;
  int64_t t_ = 0;
  std::vector<Tensor> m_, v_;
};

}  // namespace sdacd::nn
