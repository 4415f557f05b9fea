#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace sdacd::nn {

// Dense CHW float tensor for a single sample. Channel planes are contiguous.
struct Tensor {
  int c = 0, h = 0, w = 0;
  std::vector<float> v;

  Tensor() = default;
  Tensor(int c_, int h_, int w_) : c(c_), h(h_), w(w_), v(static_cast<size_t>(c_) * h_ * w_, 0.0f) {}

  static Tensor zeros(int c, int h, int w) { return Tensor(c, h, w); }
  static Tensor full(int c, int h, int w, float value) {
    Tensor t(c, h, w);
    std::fill(t.v.begin(), t.v.end(), value);
    return t;
  }

  size_t size() const { return v.size(); }
  bool same_shape(const Tensor& o) const { return c == o.c && h == o.h && w == o.w; }

  float& at(int ci, int yi, int xi) { return v[(static_cast<size_t>(ci) * h + yi) * w + xi]; }
  float at(int ci, int yi, int xi) const { return v[(static_cast<size_t>(ci) * h + yi) * w + xi]; }

  float* data() { return v.data(); }
  const float* data() const { return v.data(); }

  void fill(float value) { std::fill(v.begin(), v.end(), value); }

  Tensor& operator+=(const Tensor& o) {
    assert(same_shape(o));
    for (size_t i = 0; i < v.size(); ++i) v[i] += o.v[i];
    return *this;
  }
  Tensor& operator*=(float s) {
    for (auto& x : v) x *= s;
    return *this;
  }
};

inline Tensor operator+(Tensor a, const Tensor& b) {
  a += b;
  return a;
}

// Channel-wise concatenation of feature maps sharing H and W.
inline Tensor concat_channels(const Tensor& a, const Tensor& b) {
  assert(a.h == b.h && a.w == b.w);
  Tensor out(a.c + b.c, a.h, a.w);
  std::copy(a.v.begin(), a.v.end(), out.v.begin());
  std::copy(b.v.begin(), b.v.end(), out.v.begin() + static_cast<ptrdiff_t>(a.size()));
  return out;
}

inline void split_channels(const Tensor& g, Tensor& ga, Tensor& gb) {
  assert(g.c == ga.c + gb.c && g.h == ga.h && g.w == gb.w);
  std::copy(g.v.begin(), g.v.begin() + static_cast<ptrdiff_t>(ga.size()), ga.v.begin());
  std::copy(g.v.begin() + static_cast<ptrdiff_t>(ga.size()), g.v.end(), gb.v.begin());
}

}  // namespace sdacd::nn
