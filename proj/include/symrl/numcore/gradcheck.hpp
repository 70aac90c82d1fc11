#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "symrl/numcore/tape.hpp"
#include "symrl/numcore/tensor.hpp"

namespace symrl::num {

// Compares reverse-mode gradients against central finite differences.
//
// build_loss must construct a fresh tape pass over the current parameter
// values and return the scalar loss ref. Cost is O(P) extra forward passes,
// so keep the instance small.
//
// Returns max over parameter entries of |analytic - numeric| normalized by
// max(|analytic|, |numeric|, 1e-8).
inline double gradient_check(const std::vector<Tensor*>& params,
                             const std::function<Tape::Ref(Tape&)>& build_loss,
                             double h = 1e-5) {
  for (auto* p : params) {
    p->ensure_grad();
    p->zero_grad();
  }
  {
    Tape tape;
    tape.backward(build_loss(tape));
  }
  std::vector<std::vector<double>> analytic;
  analytic.reserve(params.size());
  for (auto* p : params) analytic.push_back(p->grad());

  const auto loss_value = [&]() {
    Tape tape;
    return tape.value(build_loss(tape))[0];
  };

  double worst = 0.0;
  for (std::size_t k = 0; k < params.size(); ++k) {
    Tensor& p = *params[k];
    for (int i = 0; i < p.size(); ++i) {
      const double keep = p[i];
      p[i] = keep + h;
      const double up = loss_value();
      p[i] = keep - h;
      const double down = loss_value();
      p[i] = keep;
      const double numeric = (up - down) / (2.0 * h);
      const double a = analytic[k][static_cast<std::size_t>(i)];
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
      worst = std::max(worst, std::abs(a - numeric) / denom);
    }
  }
  return worst;
}

}  // namespace symrl::num
