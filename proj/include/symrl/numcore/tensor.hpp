#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

namespace symrl::num {

inline std::string shape_str(const std::vector<int>& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

// Dense row-major tensor of 64-bit reals with an optional gradient buffer of
// the same shape. The gradient buffer is absent until ensure_grad().
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
    values_.assign(checked_size(shape_), 0.0);
  }

  Tensor(std::vector<int> shape, std::vector<double> values)
      : shape_(std::move(shape)), values_(std::move(values)) {
    if (static_cast<std::size_t>(checked_size(shape_)) != values_.size()) {
      throw std::invalid_argument("tensor: " + std::to_string(values_.size()) +
                                  " values do not fill shape " + shape_str(shape_));
    }
  }

  static Tensor zeros(std::vector<int> shape) { return Tensor(std::move(shape)); }

  static Tensor full(std::vector<int> shape, double v) {
    Tensor t(std::move(shape));
    std::fill(t.values_.begin(), t.values_.end(), v);
    return t;
  }

  static Tensor scalar(double v) { return Tensor({1}, {v}); }

  const std::vector<int>& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  int dim(int i) const { return shape_.at(i); }
  int size() const { return static_cast<int>(values_.size()); }

  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }
  double& operator[](int i) { return values_[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return values_[static_cast<std::size_t>(i)]; }

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

  bool has_grad() const { return !grad_.empty(); }

  void ensure_grad() {
    if (grad_.empty()) grad_.assign(values_.size(), 0.0);
  }

  void zero_grad() { std::fill(grad_.begin(), grad_.end(), 0.0); }
  void drop_grad() { grad_.clear(); }

  std::vector<double>& grad() {
    if (grad_.empty()) throw std::logic_error("tensor: gradient buffer absent");
    return grad_;
  }

  const std::vector<double>& grad() const {
    if (grad_.empty()) throw std::logic_error("tensor: gradient buffer absent");
    return grad_;
  }

 private:
  static int checked_size(const std::vector<int>& shape) {
    long long n = 1;
    for (int d : shape) {
      if (d <= 0) {
        throw std::invalid_argument("tensor: nonpositive dimension in shape " +
                                    shape_str(shape));
      }
      n *= d;
    }
    return static_cast<int>(n);
  }

  std::vector<int> shape_;
  std::vector<double> values_;
  std::vector<double> grad_;
};

}  // namespace symrl::num
