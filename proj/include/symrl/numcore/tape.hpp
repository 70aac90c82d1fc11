#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "symrl/numcore/gemm.hpp"
#include "symrl/numcore/tensor.hpp"

namespace symrl::num {

// Reverse-mode recorder. A tape is built per forward pass and discarded
// afterwards; backward() walks the recorded nodes in reverse creation order
// (a valid topological order) and accumulates parameter gradients into the
// external tensors registered via leaf().
//
// Repeated backward() calls re-propagate from a clean internal state, so
// parameter gradients accumulate across calls until the caller resets them.
class Tape {
 public:
  using Ref = int;

  Ref constant(Tensor t) { return make_node(std::move(t), false); }

  // Registers an external parameter. Gradients accumulate into param.grad.
  Ref leaf(Tensor& param) {
    Ref r = make_node(param, true);
    Tensor* external = &param;
    nodes_[r].back = [r, external](Tape& t) {
      external->ensure_grad();
      auto& g = external->grad();
      const auto& ng = t.nodes_[r].grad;
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += ng[i];
    };
    return r;
  }

  const Tensor& value(Ref r) const { return nodes_.at(r).val; }

  // Gradient of the last backward() at this node (tests and diagnostics).
  const std::vector<double>& grad_at(Ref r) const { return nodes_.at(r).grad; }

  std::size_t num_nodes() const { return nodes_.size(); }

  // y = x * W^T + b with x:[B,in] or [in], W:[out,in], b:[out].
  Ref dense(Ref x, Ref w, Ref b) {
    const Tensor& xv = nodes_[x].val;
    const Tensor& wv = nodes_[w].val;
    const Tensor& bv = nodes_[b].val;
    if (wv.rank() != 2) throw std::invalid_argument("dense: weight must be rank 2, got " + shape_str(wv.shape()));
    const int out = wv.dim(0), in = wv.dim(1);
    if (bv.size() != out) {
      throw std::invalid_argument("dense: bias size " + std::to_string(bv.size()) +
                                  " does not match weight fan-out " + std::to_string(out));
    }
    const bool batched = xv.rank() == 2;
    const int batch = batched ? xv.dim(0) : 1;
    const int xin = batched ? xv.dim(1) : xv.size();
    if (xin != in) {
      throw std::invalid_argument("dense: input width " + std::to_string(xin) +
                                  " does not match weight fan-in " + std::to_string(in));
    }
    Tensor y(batched ? std::vector<int>{batch, out} : std::vector<int>{out});
    detail::gemm_nt(batch, out, in, xv.data(), wv.data(), y.data());
    for (int i = 0; i < batch; ++i)
      for (int j = 0; j < out; ++j) y[i * out + j] += bv[j];

    Ref r = make_node(std::move(y), any_grad({x, w, b}));
    if (!nodes_[r].needs_grad) return r;
    nodes_[r].back = [r, x, w, b, batch, in, out](Tape& t) {
      const auto& dy = t.nodes_[r].grad;
      if (t.nodes_[x].needs_grad) {
        detail::gemm_nn(batch, in, out, dy.data(), t.nodes_[w].val.data(),
                        t.nodes_[x].grad.data());
      }
      if (t.nodes_[w].needs_grad) {
        detail::gemm_tn(out, in, batch, dy.data(), t.nodes_[x].val.data(),
                        t.nodes_[w].grad.data());
      }
      if (t.nodes_[b].needs_grad) {
        auto& db = t.nodes_[b].grad;
        for (int i = 0; i < batch; ++i)
          for (int j = 0; j < out; ++j) db[j] += dy[i * out + j];
      }
    };
    return r;
  }

  // 2-D convolution over HWC inputs. x:[B,H,W,C] or [H,W,C], w:[O,kh,kw,C],
  // b:[O]. zero_pad keeps the spatial size for odd kernels at stride 1.
  Ref conv2d(Ref x, Ref w, Ref b, int stride, bool zero_pad) {
    const Tensor& xv = nodes_[x].val;
    const Tensor& wv = nodes_[w].val;
    const Tensor& bv = nodes_[b].val;
    if (stride <= 0) throw std::invalid_argument("conv2d: stride must be positive");
    if (wv.rank() != 4) throw std::invalid_argument("conv2d: weight must be rank 4, got " + shape_str(wv.shape()));
    const bool batched = xv.rank() == 4;
    if (!batched && xv.rank() != 3) {
      throw std::invalid_argument("conv2d: input must be rank 3 or 4, got " + shape_str(xv.shape()));
    }
    const int batch = batched ? xv.dim(0) : 1;
    const int h = xv.dim(batched ? 1 : 0);
    const int wd = xv.dim(batched ? 2 : 1);
    const int c = xv.dim(batched ? 3 : 2);
    const int oc = wv.dim(0), kh = wv.dim(1), kw = wv.dim(2), wc = wv.dim(3);
    if (wc != c) {
      throw std::invalid_argument("conv2d: input has " + std::to_string(c) +
                                  " channels but weight expects " + std::to_string(wc));
    }
    if (bv.size() != oc) {
      throw std::invalid_argument("conv2d: bias size " + std::to_string(bv.size()) +
                                  " does not match out-channels " + std::to_string(oc));
    }
    const int ph = zero_pad ? (kh - 1) / 2 : 0;
    const int pw = zero_pad ? (kw - 1) / 2 : 0;
    const int oh = (h + 2 * ph - kh) / stride + 1;
    const int ow = (wd + 2 * pw - kw) / stride + 1;
    if (h + 2 * ph < kh || wd + 2 * pw < kw) {
      throw std::invalid_argument("conv2d: kernel " + std::to_string(kh) + "x" + std::to_string(kw) +
                                  " exceeds padded input " + std::to_string(h + 2 * ph) + "x" +
                                  std::to_string(wd + 2 * pw));
    }

    const int rows = batch * oh * ow;
    const int cols_k = kh * kw * c;
    auto cols = std::make_shared<std::vector<double>>(
        static_cast<std::size_t>(rows) * cols_k, 0.0);
    im2col(xv.data(), batch, h, wd, c, kh, kw, stride, ph, pw, oh, ow, cols->data());

    Tensor y(batched ? std::vector<int>{batch, oh, ow, oc} : std::vector<int>{oh, ow, oc});
    detail::gemm_nt(rows, oc, cols_k, cols->data(), wv.data(), y.data());
    for (int rrow = 0; rrow < rows; ++rrow)
      for (int o = 0; o < oc; ++o) y[rrow * oc + o] += bv[o];

    Ref r = make_node(std::move(y), any_grad({x, w, b}));
    if (!nodes_[r].needs_grad) return r;
    nodes_[r].back = [r, x, w, b, cols, batch, h, wd, c, kh, kw, stride, ph, pw, oh, ow, oc,
                      rows, cols_k](Tape& t) {
      const auto& dy = t.nodes_[r].grad;
      if (t.nodes_[w].needs_grad) {
        detail::gemm_tn(oc, cols_k, rows, dy.data(), cols->data(), t.nodes_[w].grad.data());
      }
      if (t.nodes_[b].needs_grad) {
        auto& db = t.nodes_[b].grad;
        for (int rrow = 0; rrow < rows; ++rrow)
          for (int o = 0; o < oc; ++o) db[o] += dy[rrow * oc + o];
      }
      if (t.nodes_[x].needs_grad) {
        std::vector<double> dcols(static_cast<std::size_t>(rows) * cols_k, 0.0);
        detail::gemm_nn(rows, cols_k, oc, dy.data(), t.nodes_[w].val.data(), dcols.data());
        col2im(dcols.data(), batch, h, wd, c, kh, kw, stride, ph, pw, oh, ow,
               t.nodes_[x].grad.data());
      }
    };
    return r;
  }

  Ref relu(Ref x) {
    return unary(x, [](double v) { return v > 0.0 ? v : 0.0; },
                 [](double v, double) { return v > 0.0 ? 1.0 : 0.0; });
  }

  Ref tanh_act(Ref x) {
    return unary(x, [](double v) { return std::tanh(v); },
                 [](double, double y) { return 1.0 - y * y; });
  }

  Ref sigmoid(Ref x) {
    return unary(x, [](double v) { return 1.0 / (1.0 + std::exp(-v)); },
                 [](double, double y) { return y * (1.0 - y); });
  }

  Ref add(Ref a, Ref b) {
    return binary("add", a, b, [](double x, double y) { return x + y; },
                  [](double, double, double) { return 1.0; },
                  [](double, double, double) { return 1.0; });
  }

  Ref sub(Ref a, Ref b) {
    return binary("sub", a, b, [](double x, double y) { return x - y; },
                  [](double, double, double) { return 1.0; },
                  [](double, double, double) { return -1.0; });
  }

  Ref mul(Ref a, Ref b) {
    return binary("mul", a, b, [](double x, double y) { return x * y; },
                  [](double, double y, double) { return y; },
                  [](double x, double, double) { return x; });
  }

  // Elementwise min; gradient routes to the first argument on ties.
  Ref minimum(Ref a, Ref b) {
    return binary("minimum", a, b, [](double x, double y) { return x < y ? x : y; },
                  [](double x, double y, double) { return x <= y ? 1.0 : 0.0; },
                  [](double x, double y, double) { return x <= y ? 0.0 : 1.0; });
  }

  Ref maximum(Ref a, Ref b) {
    return binary("maximum", a, b, [](double x, double y) { return x > y ? x : y; },
                  [](double x, double y, double) { return x >= y ? 1.0 : 0.0; },
                  [](double x, double y, double) { return x >= y ? 0.0 : 1.0; });
  }

  // scale * x + shift.
  Ref affine(Ref x, double scale, double shift) {
    return unary(x, [scale, shift](double v) { return scale * v + shift; },
                 [scale](double, double) { return scale; });
  }

  Ref reshape(Ref x, std::vector<int> shape) {
    const Tensor& xv = nodes_[x].val;
    Tensor y(std::move(shape), xv.values());
    Ref r = make_node(std::move(y), nodes_[x].needs_grad);
    if (!nodes_[r].needs_grad) return r;
    nodes_[r].back = [r, x](Tape& t) {
      const auto& dy = t.nodes_[r].grad;
      auto& dx = t.nodes_[x].grad;
      for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += dy[i];
    };
    return r;
  }

  Ref sum_all(Ref x) { return reduce(x, false); }
  Ref mean_all(Ref x) { return reduce(x, true); }

  // Q = V + A - mean_a(A) with v:[B,1], a:[B,A].
  Ref dueling(Ref v, Ref a) {
    const Tensor& vv = nodes_[v].val;
    const Tensor& av = nodes_[a].val;
    if (vv.rank() != 2 || vv.dim(1) != 1) {
      throw std::invalid_argument("dueling: value head must be [B,1], got " + shape_str(vv.shape()));
    }
    if (av.rank() != 2 || av.dim(0) != vv.dim(0)) {
      throw std::invalid_argument("dueling: advantage head " + shape_str(av.shape()) +
                                  " does not match value head " + shape_str(vv.shape()));
    }
    const int batch = av.dim(0), na = av.dim(1);
    Tensor q({batch, na});
    for (int i = 0; i < batch; ++i) {
      double m = 0.0;
      for (int j = 0; j < na; ++j) m += av[i * na + j];
      m /= na;
      for (int j = 0; j < na; ++j) q[i * na + j] = vv[i] + av[i * na + j] - m;
    }
    Ref r = make_node(std::move(q), any_grad({v, a}));
    if (!nodes_[r].needs_grad) return r;
    nodes_[r].back = [r, v, a, batch, na](Tape& t) {
      const auto& dq = t.nodes_[r].grad;
      for (int i = 0; i < batch; ++i) {
        double s = 0.0;
        for (int j = 0; j < na; ++j) s += dq[i * na + j];
        if (t.nodes_[v].needs_grad) t.nodes_[v].grad[i] += s;
        if (t.nodes_[a].needs_grad) {
          for (int j = 0; j < na; ++j) t.nodes_[a].grad[i * na + j] += dq[i * na + j] - s / na;
        }
      }
    };
    return r;
  }

  // out[i] = x[i, cols[i]] for x:[B,N].
  Ref gather_cols(Ref x, std::vector<int> cols) {
    const Tensor& xv = nodes_[x].val;
    if (xv.rank() != 2) throw std::invalid_argument("gather_cols: input must be rank 2, got " + shape_str(xv.shape()));
    const int batch = xv.dim(0), n = xv.dim(1);
    if (static_cast<int>(cols.size()) != batch) {
      throw std::invalid_argument("gather_cols: " + std::to_string(cols.size()) +
                                  " indices for batch of " + std::to_string(batch));
    }
    Tensor y({batch});
    for (int i = 0; i < batch; ++i) {
      if (cols[i] < 0 || cols[i] >= n) {
        throw std::invalid_argument("gather_cols: index " + std::to_string(cols[i]) +
                                    " out of range [0," + std::to_string(n) + ")");
      }
      y[i] = xv[i * n + cols[i]];
    }
    Ref r = make_node(std::move(y), nodes_[x].needs_grad);
    if (!nodes_[r].needs_grad) return r;
    auto idx = std::make_shared<std::vector<int>>(std::move(cols));
    nodes_[r].back = [r, x, idx, n](Tape& t) {
      const auto& dy = t.nodes_[r].grad;
      auto& dx = t.nodes_[x].grad;
      for (std::size_t i = 0; i < idx->size(); ++i) dx[i * n + (*idx)[i]] += dy[i];
    };
    return r;
  }

  // Mean Huber loss: 0.5 e^2 for |e| <= delta, delta(|e| - delta/2) beyond.
  Ref huber(Ref pred, Ref target, double delta) {
    if (delta <= 0.0) throw std::invalid_argument("huber: delta must be positive");
    const Tensor& pv = nodes_[pred].val;
    const Tensor& tv = nodes_[target].val;
    if (!pv.same_shape(tv)) {
      throw std::invalid_argument("huber: prediction shape " + shape_str(pv.shape()) +
                                  " does not match target shape " + shape_str(tv.shape()));
    }
    const int n = pv.size();
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const double e = pv[i] - tv[i];
      const double ae = std::abs(e);
      acc += ae <= delta ? 0.5 * e * e : delta * (ae - 0.5 * delta);
    }
    Tensor y = Tensor::scalar(acc / n);
    Ref r = make_node(std::move(y), any_grad({pred, target}));
    if (!nodes_[r].needs_grad) return r;
    nodes_[r].back = [r, pred, target, delta, n](Tape& t) {
      const double g = t.nodes_[r].grad[0] / n;
      const auto& pv2 = t.nodes_[pred].val;
      const auto& tv2 = t.nodes_[target].val;
      for (int i = 0; i < n; ++i) {
        double e = pv2[i] - tv2[i];
        if (e > delta) e = delta;
        if (e < -delta) e = -delta;
        if (t.nodes_[pred].needs_grad) t.nodes_[pred].grad[i] += g * e;
        if (t.nodes_[target].needs_grad) t.nodes_[target].grad[i] -= g * e;
      }
    };
    return r;
  }

  // Propagates d(loss)/d(node) for every recorded node, then folds leaf
  // gradients into their external parameter tensors.
  void backward(Ref loss) {
    if (loss < 0 || loss >= static_cast<Ref>(nodes_.size())) {
      throw std::invalid_argument("backward: unknown node");
    }
    if (nodes_[loss].val.size() != 1) {
      throw std::invalid_argument("backward: loss must be a scalar, got shape " +
                                  shape_str(nodes_[loss].val.shape()));
    }
    for (auto& n : nodes_) {
      if (n.needs_grad) n.grad.assign(n.val.values().size(), 0.0);
    }
    if (!nodes_[loss].needs_grad) return;  // loss does not depend on any leaf
    nodes_[loss].grad[0] = 1.0;
    for (Ref i = loss; i >= 0; --i) {
      if (nodes_[i].needs_grad && nodes_[i].back) nodes_[i].back(*this);
    }
  }

 private:
  struct Node {
    Tensor val;
    std::vector<double> grad;
    bool needs_grad = false;
    std::function<void(Tape&)> back;
  };

  Ref make_node(Tensor val, bool needs_grad) {
    nodes_.push_back(Node{std::move(val), {}, needs_grad, nullptr});
    return static_cast<Ref>(nodes_.size() - 1);
  }

  bool any_grad(std::initializer_list<Ref> refs) const {
    for (Ref r : refs)
      if (nodes_[r].needs_grad) return true;
    return false;
  }

  template <class F, class DF>
  Ref unary(Ref x, F f, DF df) {
    const Tensor& xv = nodes_[x].val;
    Tensor y(xv.shape());
    for (int i = 0; i < xv.size(); ++i) y[i] = f(xv[i]);
    Ref r = make_node(std::move(y), nodes_[x].needs_grad);
    if (!nodes_[r].needs_grad) return r;
    nodes_[r].back = [r, x, df](Tape& t) {
      const auto& dy = t.nodes_[r].grad;
      const auto& xv2 = t.nodes_[x].val;
      const auto& yv = t.nodes_[r].val;
      auto& dx = t.nodes_[x].grad;
      for (int i = 0; i < xv2.size(); ++i) dx[i] += dy[i] * df(xv2[i], yv[i]);
    };
    return r;
  }

  template <class F, class DA, class DB>
  Ref binary(const char* name, Ref a, Ref b, F f, DA da, DB db) {
    const Tensor& av = nodes_[a].val;
    const Tensor& bv = nodes_[b].val;
    if (!av.same_shape(bv)) {
      throw std::invalid_argument(std::string(name) + ": shape " + shape_str(av.shape()) +
                                  " does not match " + shape_str(bv.shape()));
    }
    Tensor y(av.shape());
    for (int i = 0; i < av.size(); ++i) y[i] = f(av[i], bv[i]);
    Ref r = make_node(std::move(y), any_grad({a, b}));
    if (!nodes_[r].needs_grad) return r;
    nodes_[r].back = [r, a, b, da, db](Tape& t) {
      const auto& dy = t.nodes_[r].grad;
      const auto& av2 = t.nodes_[a].val;
      const auto& bv2 = t.nodes_[b].val;
      const auto& yv = t.nodes_[r].val;
      for (int i = 0; i < av2.size(); ++i) {
        if (t.nodes_[a].needs_grad) t.nodes_[a].grad[i] += dy[i] * da(av2[i], bv2[i], yv[i]);
        if (t.nodes_[b].needs_grad) t.nodes_[b].grad[i] += dy[i] * db(av2[i], bv2[i], yv[i]);
      }
    };
    return r;
  }

  Ref reduce(Ref x, bool mean) {
    const Tensor& xv = nodes_[x].val;
    const int n = xv.size();
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += xv[i];
    Tensor y = Tensor::scalar(mean ? acc / n : acc);
    Ref r = make_node(std::move(y), nodes_[x].needs_grad);
    if (!nodes_[r].needs_grad) return r;
    const double w = mean ? 1.0 / n : 1.0;
    nodes_[r].back = [r, x, w](Tape& t) {
      const double g = t.nodes_[r].grad[0] * w;
      auto& dx = t.nodes_[x].grad;
      for (auto& v : dx) v += g;
    };
    return r;
  }

  static void im2col(const double* x, int batch, int h, int w, int c, int kh, int kw,
                     int stride, int ph, int pw, int oh, int ow, double* cols) {
    const std::size_t row_len = static_cast<std::size_t>(kh) * kw * c;
    std::size_t row = 0;
    for (int bIdx = 0; bIdx < batch; ++bIdx) {
      const double* xb = x + static_cast<std::size_t>(bIdx) * h * w * c;
      for (int i = 0; i < oh; ++i) {
        for (int j = 0; j < ow; ++j, ++row) {
          double* dst = cols + row * row_len;
          const int r0 = i * stride - ph;
          const int c0 = j * stride - pw;
          for (int u = 0; u < kh; ++u) {
            const int rr = r0 + u;
            double* drow = dst + static_cast<std::size_t>(u) * kw * c;
            if (rr < 0 || rr >= h) continue;  // cols pre-zeroed
            int v0 = c0 < 0 ? -c0 : 0;
            int v1 = c0 + kw > w ? w - c0 : kw;
            if (v0 >= v1) continue;
            const double* src = xb + (static_cast<std::size_t>(rr) * w + (c0 + v0)) * c;
            std::copy(src, src + static_cast<std::size_t>(v1 - v0) * c, drow + static_cast<std::size_t>(v0) * c);
          }
        }
      }
    }
  }

  static void col2im(const double* cols, int batch, int h, int w, int c, int kh, int kw,
                     int stride, int ph, int pw, int oh, int ow, double* dx) {
    const std::size_t row_len = static_cast<std::size_t>(kh) * kw * c;
    std::size_t row = 0;
    for (int bIdx = 0; bIdx < batch; ++bIdx) {
      double* xb = dx + static_cast<std::size_t>(bIdx) * h * w * c;
      for (int i = 0; i < oh; ++i) {
        for (int j = 0; j < ow; ++j, ++row) {
          const double* src0 = cols + row * row_len;
          const int r0 = i * stride - ph;
          const int c0 = j * stride - pw;
          for (int u = 0; u < kh; ++u) {
            const int rr = r0 + u;
            if (rr < 0 || rr >= h) continue;
            int v0 = c0 < 0 ? -c0 : 0;
            int v1 = c0 + kw > w ? w - c0 : kw;
            if (v0 >= v1) continue;
            const double* src = src0 + static_cast<std::size_t>(u) * kw * c + static_cast<std::size_t>(v0) * c;
            double* dst = xb + (static_cast<std::size_t>(rr) * w + (c0 + v0)) * c;
            for (int q = 0; q < (v1 - v0) * c; ++q) dst[q] += src[q];
          }
        }
      }
    }
  }

  std::vector<Node> nodes_;
};

}  // namespace symrl::num
