#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "symrl/numcore/tensor.hpp"

namespace symrl::num {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  void validate() const {
    if (lr <= 0.0) throw std::invalid_argument("adam: learning rate must be positive");
    if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0) {
      throw std::invalid_argument("adam: betas must lie in [0,1)");
    }
    if (eps <= 0.0) throw std::invalid_argument("adam: eps must be positive");
  }
};

// Adaptive moment estimation over a fixed parameter set. step() consumes the
// gradients accumulated in each tensor but leaves them untouched; callers
// reset via zero_grad().
class Adam {
 public:
  explicit Adam(std::vector<Tensor*> params, AdamConfig cfg = {})
      : params_(std::move(params)), cfg_(cfg) {
    cfg_.validate();
    m_.reserve(params_.size());
    v_.reserve(params_.size());
    for (auto* p : params_) {
      m_.emplace_back(p->size(), 0.0);
      v_.emplace_back(p->size(), 0.0);
    }
  }

  void step() {
    for (std::size_t k = 0; k < params_.size(); ++k) {
      if (!params_[k]->has_grad()) {
        throw std::runtime_error("adam: parameter " + std::to_string(k) +
                                 " has no gradient; run backward first");
      }
    }
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (std::size_t k = 0; k < params_.size(); ++k) {
      Tensor& p = *params_[k];
      const auto& g = p.grad();
      auto& m = m_[k];
      auto& v = v_[k];
      for (std::size_t i = 0; i < g.size(); ++i) {
        m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g[i];
        v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g[i] * g[i];
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        p[static_cast<int>(i)] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
      }
    }
  }

  void zero_grad() {
    for (auto* p : params_) {
      p->ensure_grad();
      p->zero_grad();
    }
  }

  std::int64_t step_count() const { return t_; }
  const AdamConfig& config() const { return cfg_; }

 private:
  std::vector<Tensor*> params_;
  std::vector<std::vector<double>> m_, v_;
  AdamConfig cfg_;
  std::int64_t t_ = 0;
};

}  // namespace symrl::num
