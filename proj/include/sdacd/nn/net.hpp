#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "sdacd/nn/layers.hpp"

namespace sdacd::nn {

// Sequential layer stack. Owns parameters and their grad buffers (via the
// layers); activations live in caller-owned tapes so forward is const.
class Net {
 public:
  Net() = default;
  Net(Net&&) = default;
  Net& operator=(Net&&) = default;

  template <typename L, typename... Args>
  Net& add(Args&&... args) {
    layers_.push_back(std::make_unique<L>(std::forward<Args>(args)...));
    return *this;
  }

  Tensor forward(const Tensor& x, Tape& tape) const {
    Tensor y = x;
    for (const auto& l : layers_) y = l->forward(y, tape);
    return y;
  }

  Tensor backward(const Tensor& gy, Tape& tape, bool train) {
    Tensor g = gy;
    for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->backward(g, tape, train);
    return g;
  }

  void init(Rng& rng) {
    for (auto& l : layers_) l->init(rng);
  }

  void collect(std::vector<Tensor*>& params, std::vector<Tensor*>& grads) {
    for (auto& l : layers_) l->collect(params, grads);
  }

  Layer& layer(size_t i) { return *layers_[i]; }
  size_t layer_count() const { return layers_.size(); }

 private:
  std::vector<std::unique_ptr<Layer>> layers_;
};

// Flattened parameter view over one or more nets; the unit of optimization,
// checkpointing and checksumming.
struct ParamGroup {
  std::vector<Tensor*> params;
  std::vector<Tensor*> grads;

  void absorb(Net& net) { net.collect(params, grads); }

  size_t count() const {
    size_t n = 0;
    for (const auto* p : params) n += p->size();
    return n;
  }
  void zero_grad() {
    for (auto* g : grads) g->fill(0.0f);
  }
  // FNV-1a over raw parameter bytes; order-sensitive, good enough to detect
  // any mutation for phase-isolation checks.
  uint64_t checksum() const {
    uint64_t h = 1469598103934665603ULL;
    for (const auto* p : params) {
      const auto* bytes = reinterpret_cast<const unsigned char*>(p->v.data());
      for (size_t i = 0; i < p->v.size() * sizeof(float); ++i) {
        h ^= bytes[i];
        h *= 1099511628211ULL;
      }
    }
    return h;
  }
};

}  // namespace sdacd::nn
