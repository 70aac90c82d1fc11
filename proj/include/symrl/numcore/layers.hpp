#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "symrl/numcore/tape.hpp"
#include "symrl/numcore/tensor.hpp"
#include "symrl/rng.hpp"

namespace symrl::num {

struct LayerSpec {
  enum class Kind { kDense, kConv2d, kRelu, kTanh, kSigmoid };

  Kind kind = Kind::kRelu;
  // Dense.
  int in = 0;
  int out = 0;
  // Conv2d.
  int in_channels = 0;
  int out_channels = 0;
  int kernel_h = 0;
  int kernel_w = 0;
  int stride = 1;
  bool zero_pad = false;

  static LayerSpec dense(int in, int out) {
    LayerSpec s;
    s.kind = Kind::kDense;
    s.in = in;
    s.out = out;
    s.validate();
    return s;
  }

  static LayerSpec conv2d(int in_channels, int out_channels, int kernel_h, int kernel_w,
                          int stride, bool zero_pad) {
    LayerSpec s;
    s.kind = Kind::kConv2d;
    s.in_channels = in_channels;
    s.out_channels = out_channels;
    s.kernel_h = kernel_h;
    s.kernel_w = kernel_w;
    s.stride = stride;
    s.zero_pad = zero_pad;
    s.validate();
    return s;
  }

  static LayerSpec activation(Kind k) {
    LayerSpec s;
    s.kind = k;
    return s;
  }

  void validate() const {
    switch (kind) {
      case Kind::kDense:
        if (in <= 0 || out <= 0) throw std::invalid_argument("dense layer: widths must be positive");
        break;
      case Kind::kConv2d:
        if (in_channels <= 0 || out_channels <= 0) throw std::invalid_argument("conv layer: channels must be positive");
        if (kernel_h <= 0 || kernel_w <= 0) throw std::invalid_argument("conv layer: kernel dims must be positive");
        if (stride <= 0) throw std::invalid_argument("conv layer: stride must be positive");
        break;
      default:
        break;
    }
  }

  bool has_params() const { return kind == Kind::kDense || kind == Kind::kConv2d; }
};

// A layer bundles its spec with owned parameters. Weights are initialized
// uniform in +-sqrt(6/(fan_in+fan_out)), biases zero.
struct Layer {
  LayerSpec spec;
  Tensor weight;
  Tensor bias;

  static Layer make(const LayerSpec& spec, Rng& rng) {
    spec.validate();
    Layer l;
    l.spec = spec;
    if (spec.kind == LayerSpec::Kind::kDense) {
      l.weight = glorot({spec.out, spec.in}, spec.in, spec.out, rng);
      l.bias = Tensor({spec.out});
    } else if (spec.kind == LayerSpec::Kind::kConv2d) {
      const int fan_in = spec.kernel_h * spec.kernel_w * spec.in_channels;
      const int fan_out = spec.kernel_h * spec.kernel_w * spec.out_channels;
      l.weight = glorot({spec.out_channels, spec.kernel_h, spec.kernel_w, spec.in_channels},
                        fan_in, fan_out, rng);
      l.bias = Tensor({spec.out_channels});
    }
    return l;
  }

  Tape::Ref forward(Tape& tape, Tape::Ref x) {
    switch (spec.kind) {
      case LayerSpec::Kind::kDense:
        return tape.dense(x, tape.leaf(weight), tape.leaf(bias));
      case LayerSpec::Kind::kConv2d:
        return tape.conv2d(x, tape.leaf(weight), tape.leaf(bias), spec.stride, spec.zero_pad);
      case LayerSpec::Kind::kRelu:
        return tape.relu(x);
      case LayerSpec::Kind::kTanh:
        return tape.tanh_act(x);
      case LayerSpec::Kind::kSigmoid:
        return tape.sigmoid(x);
    }
    throw std::logic_error("layer: unknown kind");
  }

  std::vector<Tensor*> params() {
    if (!spec.has_params()) return {};
    return {&weight, &bias};
  }

 private:
  static Tensor glorot(std::vector<int> shape, int fan_in, int fan_out, Rng& rng) {
    Tensor t(std::move(shape));
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    for (int i = 0; i < t.size(); ++i) t[i] = rng.uniform(-bound, bound);
    return t;
  }
};

// Records spec-driven inference for a whole stack.
inline Tape::Ref forward(Tape& tape, std::vector<Layer>& stack, Tape::Ref x) {
  for (auto& l : stack) x = l.forward(tape, x);
  return x;
}

}  // namespace symrl::num
