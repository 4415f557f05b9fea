#pragma once

#include <memory>
#include <string>
#include <vector>

#include "sdacd/nn/rng.hpp"
#include "sdacd/nn/tensor.hpp"

namespace sdacd::nn {

// Per-forward-call activation record. Layers push what their backward needs
// during forward and pop it back in exact reverse order. Keeping activations
// out of the layers makes forward passes read-only over parameters.
struct TapeSlot {
  Tensor t;
  int a = 0, b = 0;
};

struct Tape {
  std::vector<TapeSlot> slots;
  void push(Tensor t, int a = 0, int b = 0) { slots.push_back({std::move(t), a, b}); }
  TapeSlot pop() {
    TapeSlot s = std::move(slots.back());
    slots.pop_back();
    return s;
  }
  bool empty() const { return slots.empty(); }
};

class Layer {
 public:
  virtual ~Layer() = default;
  virtual Tensor forward(const Tensor& x, Tape& tape) const = 0;
  // Consumes this layer's tape slots. Parameter gradients accumulate into the
  // layer-owned grad buffers only when `train` is set; input gradients are
  // always produced so losses can flow through frozen networks.
  virtual Tensor backward(const Tensor& gy, Tape& tape, bool train) = 0;
  virtual void collect(std::vector<Tensor*>& params, std::vector<Tensor*>& grads) {}
  virtual void init(Rng& rng) {}
  virtual std::string kind() const = 0;
};

class Conv2d final : public Layer {
 public:
  Conv2d(int cin, int cout, int k, int stride, int pad);
  Tensor forward(const Tensor& x, Tape& tape) const override;
  Tensor backward(const Tensor& gy, Tape& tape, bool train) override;
  void collect(std::vector<Tensor*>& params, std::vector<Tensor*>& grads) override;
  void init(Rng& rng) override;
  std::string kind() const override { return "conv2d"; }

  int cin() const { return cin_; }
  int cout() const { return cout_; }
  Tensor& weight() { return weight_; }
  Tensor& bias() { return bias_; }

 private:
  int cin_, cout_, k_, stride_, pad_;
  Tensor weight_;  // (cout, cin, k*k)
  Tensor bias_;    // (cout, 1, 1)
  Tensor gweight_, gbias_;
};

class InstanceNorm2d final : public Layer {
 public:
  explicit InstanceNorm2d(int channels, float eps = 1e-5f);
  Tensor forward(const Tensor& x, Tape& tape) const override;
  Tensor backward(const Tensor& gy, Tape& tape, bool train) override;
  void collect(std::vector<Tensor*>& params, std::vector<Tensor*>& grads) override;
  void init(Rng& rng) override;
  std::string kind() const override { return "instance_norm"; }

 private:
  int channels_;
  float eps_;
  Tensor gamma_, beta_;
  Tensor ggamma_, gbeta_;
};

class ReLU final : public Layer {
 public:
  Tensor forward(const Tensor& x, Tape& tape) const override;
  Tensor backward(const Tensor& gy, Tape& tape, bool train) override;
  std::string kind() const override { return "relu"; }
};

class LeakyReLU final : public Layer {
 public:
  explicit LeakyReLU(float slope = 0.2f) : slope_(slope) {}
  Tensor forward(const Tensor& x, Tape& tape) const override;
  Tensor backward(const Tensor& gy, Tape& tape, bool train) override;
  std::string kind() const override { return "leaky_relu"; }

 private:
  float slope_;
};

class Tanh final : public Layer {
 public:
  Tensor forward(const Tensor& x, Tape& tape) const override;
  Tensor backward(const Tensor& gy, Tape& tape, bool train) override;
  std::string kind() const override { return "tanh"; }
};

// Saturating clamp to [-1, 1]; gradient passes only strictly inside the range.
class HardTanh final : public Layer {
 public:
  Tensor forward(const Tensor& x, Tape& tape) const override;
  Tensor backward(const Tensor& gy, Tape& tape, bool train) override;
  std::string kind() const override { return "hard_tanh"; }
};

class Upsample2x final : public Layer {
 public:
  Tensor forward(const Tensor& x, Tape& tape) const override;
  Tensor backward(const Tensor& gy, Tape& tape, bool train) override;
  std::string kind() const override { return "upsample2x"; }
};

class GlobalAvgPool final : public Layer {
 public:
  Tensor forward(const Tensor& x, Tape& tape) const override;
  Tensor backward(const Tensor& gy, Tape& tape, bool train) override;
  std::string kind() const override { return "global_avg_pool"; }
};

// conv-IN-ReLU-conv-IN with identity skip, the CycleGAN residual block.
class ResBlock final : public Layer {
 public:
  explicit ResBlock(int channels);
  Tensor forward(const Tensor& x, Tape& tape) const override;
  Tensor backward(const Tensor& gy, Tape& tape, bool train) override;
  void collect(std::vector<Tensor*>& params, std::vector<Tensor*>& grads) override;
  void init(Rng& rng) override;
  std::string kind() const override { return "res_block"; }

 private:
  Conv2d conv1_, conv2_;
  InstanceNorm2d in1_, in2_;
  ReLU relu_;
};

}  // namespace sdacd::nn
