// Copyright 2026 The NMWPM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nmwpm/tensor.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_set>

namespace nmwpm {

namespace {

using RowMat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using ConstMapMat = Eigen::Map<const RowMat>;

thread_local bool g_grad_enabled = true;

std::string shape_str(const Tensor& t) { return "[" + std::to_string(t.rows()) + ", " + std::to_string(t.cols()) + "]"; }

[[noreturn]] void shape_error(const char* op, const Tensor& a, const Tensor& b) {
  throw std::invalid_argument(std::string(op) + ": incompatible shapes " + shape_str(a) + " and " + shape_str(b));
}

// New result node; records parents only when some parent needs gradients.
Tensor make_result(int rows, int cols, std::initializer_list<const Tensor*> parents) {
  auto impl = std::make_shared<TensorImpl>();
  impl->rows = rows;
  impl->cols = cols;
  impl->value.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0.0f);
  if (g_grad_enabled) {
    for (const Tensor* p : parents) {
      if (p->requires_grad()) impl->requires_grad = true;
    }
    if (impl->requires_grad) {
      for (const Tensor* p : parents) impl->parents.push_back(p->handle());
    }
  }
  return Tensor(std::move(impl));
}

Tensor make_result(int rows, int cols, const std::vector<Tensor>& parents) {
  auto impl = std::make_shared<TensorImpl>();
  impl->rows = rows;
  impl->cols = cols;
  impl->value.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0.0f);
  if (g_grad_enabled) {
    for (const auto& p : parents) {
      if (p.requires_grad()) impl->requires_grad = true;
    }
    if (impl->requires_grad) {
      for (const auto& p : parents) impl->parents.push_back(p.handle());
    }
  }
  return Tensor(std::move(impl));
}

enum class Bcast { Same, Row, Col, Scalar };

Bcast broadcast_kind(const char* op, const Tensor& a, const Tensor& b) {
  if (a.rows() == b.rows() && a.cols() == b.cols()) return Bcast::Same;
  if (b.rows() == 1 && b.cols() == 1) return Bcast::Scalar;
  if (b.rows() == 1 && b.cols() == a.cols()) return Bcast::Row;
  if (b.cols() == 1 && b.rows() == a.rows()) return Bcast::Col;
  shape_error(op, a, b);
}

inline std::size_t bindex(Bcast kind, std::size_t r, std::size_t c, std::size_t cols) {
  switch (kind) {
    case Bcast::Same: return r * cols + c;
    case Bcast::Row: return c;
    case Bcast::Col: return r;
    case Bcast::Scalar: return 0;
  }
  return 0;
}

// Elementwise unary op with derivative expressed via input x and output y.
template <typename F, typename D>
Tensor unary(const Tensor& a, F f, D df) {
  Tensor out = make_result(a.rows(), a.cols(), {&a});
  const auto& x = a.values();
  auto& y = out.values();
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = f(x[i]);
  if (out.requires_grad()) {
    out.impl()->backward = [df](TensorImpl& self) {
      auto& pa = *self.parents[0];
      if (!pa.requires_grad) return;
      auto& ga = pa.grad_buffer();
      for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += self.grad[i] * df(pa.value[i], self.value[i]);
    };
  }
  return out;
}

}  // namespace

std::vector<Real>& TensorImpl::grad_buffer() {
  if (grad.empty()) grad.assign(value.size(), 0.0f);
  return grad;
}

Tensor Tensor::zeros(int rows, int cols, bool requires_grad) { return full(rows, cols, 0.0f, requires_grad); }

Tensor Tensor::full(int rows, int cols, Real value, bool requires_grad) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("negative tensor dimension");
  auto impl = std::make_shared<TensorImpl>();
  impl->rows = rows;
  impl->cols = cols;
  impl->value.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), value);
  impl->requires_grad = requires_grad;
  return Tensor(std::move(impl));
}

Tensor Tensor::from(int rows, int cols, std::vector<Real> values, bool requires_grad) {
  if (values.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
    throw std::invalid_argument("value count does not match shape");
  }
  auto impl = std::make_shared<TensorImpl>();
  impl->rows = rows;
  impl->cols = cols;
  impl->value = std::move(values);
  impl->requires_grad = requires_grad;
  return Tensor(std::move(impl));
}

Real Tensor::item() const {
  if (size() != 1) throw std::invalid_argument("item() needs a 1 x 1 tensor");
  return p_->value[0];
}

std::vector<Real> Tensor::grad() const {
  if (p_->grad.empty()) return std::vector<Real>(p_->value.size(), 0.0f);
  return p_->grad;
}

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }
bool grad_enabled() { return g_grad_enabled; }

void backward(const Tensor& loss) {
  if (loss.rows() != 1 || loss.cols() != 1) throw std::invalid_argument("backward needs a scalar (1 x 1) loss");
  if (!loss.requires_grad()) return;
  // Iterative post-order DFS gives a topological order.
  std::vector<TensorImpl*> order;
  std::unordered_set<TensorImpl*> seen;
  std::vector<std::pair<TensorImpl*, std::size_t>> stack{{loss.impl(), 0}};
  seen.insert(loss.impl());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      TensorImpl* p = node->parents[next++].get();
      if (p->requires_grad && seen.insert(p).second) stack.push_back({p, 0});
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  loss.impl()->grad_buffer()[0] += 1.0f;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    TensorImpl* node = *it;
    if (node->backward && !node->grad.empty()) node->backward(*node);
  }
  for (TensorImpl* node : order) {
    if (node->backward) {
      node->backward = nullptr;
      node->parents.clear();
    }
  }
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows()) shape_error("matmul", a, b);
  Tensor out = make_result(a.rows(), b.cols(), {&a, &b});
  MapMat(out.values().data(), a.rows(), b.cols()).noalias() =
      ConstMapMat(a.values().data(), a.rows(), a.cols()) * ConstMapMat(b.values().data(), b.rows(), b.cols());
  if (out.requires_grad()) {
    out.impl()->backward = [](TensorImpl& self) {
      auto& pa = *self.parents[0];
      auto& pb = *self.parents[1];
      ConstMapMat g(self.grad.data(), self.rows, self.cols);
      if (pa.requires_grad) {
        MapMat(pa.grad_buffer().data(), pa.rows, pa.cols).noalias() +=
            g * ConstMapMat(pb.value.data(), pb.rows, pb.cols).transpose();
      }
      if (pb.requires_grad) {
        MapMat(pb.grad_buffer().data(), pb.rows, pb.cols).noalias() +=
            ConstMapMat(pa.value.data(), pa.rows, pa.cols).transpose() * g;
      }
    };
  }
  return out;
}

Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b) {
  if (x.cols() != w.cols()) shape_error("linear", x, w);
  if (b.defined() && (b.rows() != 1 || b.cols() != w.rows())) shape_error("linear bias", w, b);
  Tensor out = b.defined() ? make_result(x.rows(), w.rows(), {&x, &w, &b}) : make_result(x.rows(), w.rows(), {&x, &w});
  MapMat o(out.values().data(), x.rows(), w.rows());
  o.noalias() = ConstMapMat(x.values().data(), x.rows(), x.cols()) * ConstMapMat(w.values().data(), w.rows(), w.cols()).transpose();
  if (b.defined()) o.rowwise() += Eigen::Map<const Eigen::Matrix<Real, 1, Eigen::Dynamic>>(b.values().data(), b.cols());
  if (out.requires_grad()) {
    out.impl()->backward = [](TensorImpl& self) {
      auto& px = *self.parents[0];
      auto& pw = *self.parents[1];
      ConstMapMat g(self.grad.data(), self.rows, self.cols);
      if (px.requires_grad) {
        MapMat(px.grad_buffer().data(), px.rows, px.cols).noalias() += g * ConstMapMat(pw.value.data(), pw.rows, pw.cols);
      }
      if (pw.requires_grad) {
        MapMat(pw.grad_buffer().data(), pw.rows, pw.cols).noalias() +=
            g.transpose() * ConstMapMat(px.value.data(), px.rows, px.cols);
      }
      if (self.parents.size() > 2 && self.parents[2]->requires_grad) {
        MapMat(self.parents[2]->grad_buffer().data(), 1, self.cols) += g.colwise().sum();
      }
    };
  }
  return out;
}

namespace {

template <int Sign>
Tensor add_sub(const char* op, const Tensor& a, const Tensor& b) {
  const Bcast kind = broadcast_kind(op, a, b);
  Tensor out = make_result(a.rows(), a.cols(), {&a, &b});
  const auto rows = static_cast<std::size_t>(a.rows()), cols = static_cast<std::size_t>(a.cols());
  const auto& av = a.values();
  const auto& bv = b.values();
  auto& ov = out.values();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) ov[r * cols + c] = av[r * cols + c] + Sign * bv[bindex(kind, r, c, cols)];
  }
  if (out.requires_grad()) {
    out.impl()->backward = [kind](TensorImpl& self) {
      auto& pa = *self.parents[0];
      auto& pb = *self.parents[1];
      const auto rows = static_cast<std::size_t>(self.rows), cols = static_cast<std::size_t>(self.cols);
      if (pa.requires_grad) {
        auto& ga = pa.grad_buffer();
        for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += self.grad[i];
      }
      if (pb.requires_grad) {
        auto& gb = pb.grad_buffer();
        for (std::size_t r = 0; r < rows; ++r) {
          for (std::size_t c = 0; c < cols; ++c) gb[bindex(kind, r, c, cols)] += Sign * self.grad[r * cols + c];
        }
      }
    };
  }
  return out;
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) { return add_sub<1>("add", a, b); }
Tensor sub(const Tensor& a, const Tensor& b) { return add_sub<-1>("sub", a, b); }

Tensor mul(const Tensor& a, const Tensor& b) {
  const Bcast kind = broadcast_kind("mul", a, b);
  Tensor out = make_result(a.rows(), a.cols(), {&a, &b});
  const auto rows = static_cast<std::size_t>(a.rows()), cols = static_cast<std::size_t>(a.cols());
  const auto& av = a.values();
  const auto& bv = b.values();
  auto& ov = out.values();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) ov[r * cols + c] = av[r * cols + c] * bv[bindex(kind, r, c, cols)];
  }
  if (out.requires_grad()) {
    out.impl()->backward = [kind](TensorImpl& self) {
      auto& pa = *self.parents[0];
      auto& pb = *self.parents[1];
      const auto rows = static_cast<std::size_t>(self.rows), cols = static_cast<std::size_t>(self.cols);
      if (pa.requires_grad) {
        auto& ga = pa.grad_buffer();
        for (std::size_t r = 0; r < rows; ++r) {
          for (std::size_t c = 0; c < cols; ++c) ga[r * cols + c] += self.grad[r * cols + c] * pb.value[bindex(kind, r, c, cols)];
        }
      }
      if (pb.requires_grad) {
        auto& gb = pb.grad_buffer();
        for (std::size_t r = 0; r < rows; ++r) {
          for (std::size_t c = 0; c < cols; ++c) gb[bindex(kind, r, c, cols)] += self.grad[r * cols + c] * pa.value[r * cols + c];
        }
      }
    };
  }
  return out;
}

Tensor scale(const Tensor& a, Real factor) {
  return unary(a, [factor](Real x) { return factor * x; }, [factor](Real, Real) { return factor; });
}

Tensor neg(const Tensor& a) { return scale(a, -1.0f); }

Tensor concat(const std::vector<Tensor>& parts, int axis) {
  if (parts.empty()) throw std::invalid_argument("concat of nothing");
  if (axis != 0 && axis != 1) throw std::invalid_argument("concat axis must be 0 or 1");
  int rows = 0, cols = 0;
  for (const auto& p : parts) {
    if (axis == 1) {
      if (p.rows() != parts[0].rows()) shape_error("concat", parts[0], p);
      cols += p.cols();
      rows = p.rows();
    } else {
      if (p.cols() != parts[0].cols()) shape_error("concat", parts[0], p);
      rows += p.rows();
      cols = p.cols();
    }
  }
  Tensor out = make_result(rows, cols, parts);
  auto& ov = out.values();
  if (axis == 0) {
    std::size_t off = 0;
    for (const auto& p : parts) {
      std::copy(p.values().begin(), p.values().end(), ov.begin() + static_cast<std::ptrdiff_t>(off));
      off += p.size();
    }
  } else {
    int c0 = 0;
    for (const auto& p : parts) {
      for (int r = 0; r < rows; ++r) {
        std::copy_n(p.values().begin() + static_cast<std::ptrdiff_t>(r) * p.cols(), p.cols(),
                    ov.begin() + static_cast<std::ptrdiff_t>(r) * cols + c0);
      }
      c0 += p.cols();
    }
  }
  if (out.requires_grad()) {
    out.impl()->backward = [axis](TensorImpl& self) {
      std::size_t off = 0;
      int c0 = 0;
      for (auto& sp : self.parents) {
        auto& p = *sp;
        if (axis == 0) {
          if (p.requires_grad) {
            auto& g = p.grad_buffer();
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[off + i];
          }
          off += p.value.size();
        } else {
          if (p.requires_grad) {
            auto& g = p.grad_buffer();
            for (int r = 0; r < p.rows; ++r) {
              for (int c = 0; c < p.cols; ++c) {
                g[static_cast<std::size_t>(r * p.cols + c)] += self.grad[static_cast<std::size_t>(r * self.cols + c0 + c)];
              }
            }
          }
          c0 += p.cols;
        }
      }
    };
  }
  return out;
}

Tensor slice(const Tensor& a, int axis, int start, int length) {
  const int extent = axis == 0 ? a.rows() : a.cols();
  if ((axis != 0 && axis != 1) || start < 0 || length < 0 || start + length > extent) {
    throw std::invalid_argument("slice out of range for " + shape_str(a));
  }
  const int rows = axis == 0 ? length : a.rows();
  const int cols = axis == 1 ? length : a.cols();
  Tensor out = make_result(rows, cols, {&a});
  auto& ov = out.values();
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int sr = axis == 0 ? r + start : r, sc = axis == 1 ? c + start : c;
      ov[static_cast<std::size_t>(r * cols + c)] = a.values()[static_cast<std::size_t>(sr * a.cols() + sc)];
    }
  }
  if (out.requires_grad()) {
    out.impl()->backward = [axis, start](TensorImpl& self) {
      auto& pa = *self.parents[0];
      if (!pa.requires_grad) return;
      auto& g = pa.grad_buffer();
      for (int r = 0; r < self.rows; ++r) {
        for (int c = 0; c < self.cols; ++c) {
          const int sr = axis == 0 ? r + start : r, sc = axis == 1 ? c + start : c;
          g[static_cast<std::size_t>(sr * pa.cols + sc)] += self.grad[static_cast<std::size_t>(r * self.cols + c)];
        }
      }
    };
  }
  return out;
}

Tensor gather_rows(const Tensor& a, const std::vector<int>& rows) {
  for (int r : rows) {
    if (r < 0 || r >= a.rows()) throw std::invalid_argument("gather_rows index out of range");
  }
  const int cols = a.cols();
  Tensor out = make_result(static_cast<int>(rows.size()), cols, {&a});
  auto& ov = out.values();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy_n(a.values().begin() + static_cast<std::ptrdiff_t>(rows[i]) * cols, cols,
                ov.begin() + static_cast<std::ptrdiff_t>(i) * cols);
  }
  if (out.requires_grad()) {
    out.impl()->backward = [rows](TensorImpl& self) {
      auto& pa = *self.parents[0];
      if (!pa.requires_grad) return;
      auto& g = pa.grad_buffer();
      const auto cols = static_cast<std::size_t>(self.cols);
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::size_t base = static_cast<std::size_t>(rows[i]) * cols;
        for (std::size_t c = 0; c < cols; ++c) g[base + c] += self.grad[i * cols + c];
      }
    };
  }
  return out;
}

namespace {

Tensor reduce_sum(const Tensor& a, double factor) {
  Tensor out = make_result(1, 1, {&a});
  double acc = 0.0;
  for (Real v : a.values()) acc += v;
  out.values()[0] = static_cast<Real>(acc * factor);
  if (out.requires_grad()) {
    out.impl()->backward = [factor](TensorImpl& self) {
      auto& pa = *self.parents[0];
      if (!pa.requires_grad) return;
      auto& g = pa.grad_buffer();
      const Real gv = static_cast<Real>(self.grad[0] * factor);
      for (auto& x : g) x += gv;
    };
  }
  return out;
}

}  // namespace

Tensor sum(const Tensor& a) { return reduce_sum(a, 1.0); }

Tensor mean(const Tensor& a) {
  if (a.size() == 0) throw std::invalid_argument("mean of an empty tensor");
  return reduce_sum(a, 1.0 / static_cast<double>(a.size()));
}

Tensor max_elementwise(const Tensor& a, const Tensor& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) shape_error("max_elementwise", a, b);
  Tensor out = make_result(a.rows(), a.cols(), {&a, &b});
  for (std::size_t i = 0; i < a.size(); ++i) out.values()[i] = std::max(a.values()[i], b.values()[i]);
  if (out.requires_grad()) {
    out.impl()->backward = [](TensorImpl& self) {
      auto& pa = *self.parents[0];
      auto& pb = *self.parents[1];
      for (std::size_t i = 0; i < self.grad.size(); ++i) {
        const Real x = pa.value[i], y = pb.value[i];
        const Real wa = x > y ? 1.0f : (x < y ? 0.0f : 0.5f);
        if (pa.requires_grad) pa.grad_buffer()[i] += wa * self.grad[i];
        if (pb.requires_grad) pb.grad_buffer()[i] += (1.0f - wa) * self.grad[i];
      }
    };
  }
  return out;
}

Tensor relu(const Tensor& a) {
  return unary(a, [](Real x) { return x > 0.0f ? x : 0.0f; }, [](Real x, Real) { return x > 0.0f ? 1.0f : 0.0f; });
}

Tensor gelu(const Tensor& a) {
  constexpr double kInvSqrt2 = 0.70710678118654752440;
  constexpr double kInvSqrt2Pi = 0.39894228040143267794;
  return unary(
      a,
      [](Real x) {
        const double xd = x;
        return static_cast<Real>(0.5 * xd * (1.0 + std::erf(xd * kInvSqrt2)));
      },
      [](Real x, Real) {
        const double xd = x;
        const double cdf = 0.5 * (1.0 + std::erf(xd * kInvSqrt2));
        return static_cast<Real>(cdf + xd * kInvSqrt2Pi * std::exp(-0.5 * xd * xd));
      });
}

Tensor sigmoid(const Tensor& a) {
  return unary(
      a,
      [](Real x) {
        if (x >= 0.0f) return 1.0f / (1.0f + std::exp(-x));
        const Real e = std::exp(x);
        return e / (1.0f + e);
      },
      [](Real, Real y) { return y * (1.0f - y); });
}

Tensor log(const Tensor& a) {
  for (Real x : a.values()) {
    if (!(x > 0.0f)) throw std::domain_error("log of a non-positive value");
  }
  return unary(a, [](Real x) { return std::log(x); }, [](Real x, Real) { return 1.0f / x; });
}

Tensor clamp(const Tensor& a, Real lo, Real hi) {
  if (!(lo <= hi)) throw std::invalid_argument("clamp bounds out of order");
  return unary(
      a, [lo, hi](Real x) { return std::clamp(x, lo, hi); },
      [lo, hi](Real x, Real) { return x >= lo && x <= hi ? 1.0f : 0.0f; });
}

Tensor softmax(const Tensor& a, int axis) {
  if (axis != 0 && axis != 1) throw std::invalid_argument("softmax axis must be 0 or 1");
  Tensor out = make_result(a.rows(), a.cols(), {&a});
  const int outer = axis == 1 ? a.rows() : a.cols();
  const int inner = axis == 1 ? a.cols() : a.rows();
  const int stride = axis == 1 ? 1 : a.cols();
  auto idx = [&](int o, int i) {
    return static_cast<std::size_t>(axis == 1 ? o * a.cols() + i : i * a.cols() + o);
  };
  for (int o = 0; o < outer; ++o) {
    Real mx = -std::numeric_limits<Real>::infinity();
    for (int i = 0; i < inner; ++i) mx = std::max(mx, a.values()[idx(o, i)]);
    double z = 0.0;
    for (int i = 0; i < inner; ++i) {
      const Real e = std::exp(a.values()[idx(o, i)] - mx);
      out.values()[idx(o, i)] = e;
      z += e;
    }
    for (int i = 0; i < inner; ++i) out.values()[idx(o, i)] = static_cast<Real>(out.values()[idx(o, i)] / z);
  }
  (void)stride;
  if (out.requires_grad()) {
    out.impl()->backward = [axis](TensorImpl& self) {
      auto& pa = *self.parents[0];
      if (!pa.requires_grad) return;
      auto& g = pa.grad_buffer();
      const int outer = axis == 1 ? self.rows : self.cols;
      const int inner = axis == 1 ? self.cols : self.rows;
      auto idx = [&](int o, int i) {
        return static_cast<std::size_t>(axis == 1 ? o * self.cols + i : i * self.cols + o);
      };
      for (int o = 0; o < outer; ++o) {
        double dot = 0.0;
        for (int i = 0; i < inner; ++i) dot += static_cast<double>(self.grad[idx(o, i)]) * self.value[idx(o, i)];
        for (int i = 0; i < inner; ++i) {
          g[idx(o, i)] += static_cast<Real>(self.value[idx(o, i)] * (self.grad[idx(o, i)] - dot));
        }
      }
    };
  }
  return out;
}

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, Real eps) {
  const int n = x.cols();
  if (gain.rows() != 1 || gain.cols() != n) shape_error("layer_norm gain", x, gain);
  if (bias.rows() != 1 || bias.cols() != n) shape_error("layer_norm bias", x, bias);
  Tensor out = make_result(x.rows(), n, {&x, &gain, &bias});
  std::vector<Real> xhat(x.size());
  std::vector<Real> inv_std(static_cast<std::size_t>(x.rows()));
  for (int r = 0; r < x.rows(); ++r) {
    const Real* row = x.values().data() + static_cast<std::ptrdiff_t>(r) * n;
    double mu = 0.0;
    for (int c = 0; c < n; ++c) mu += row[c];
    mu /= n;
    double var = 0.0;
    for (int c = 0; c < n; ++c) var += (row[c] - mu) * (row[c] - mu);
    var /= n;
    const double is = 1.0 / std::sqrt(var + eps);
    inv_std[static_cast<std::size_t>(r)] = static_cast<Real>(is);
    for (int c = 0; c < n; ++c) {
      const std::size_t i = static_cast<std::size_t>(r * n + c);
      xhat[i] = static_cast<Real>((row[c] - mu) * is);
      out.values()[i] = xhat[i] * gain.values()[static_cast<std::size_t>(c)] + bias.values()[static_cast<std::size_t>(c)];
    }
  }
  if (out.requires_grad()) {
    out.impl()->backward = [xhat = std::move(xhat), inv_std = std::move(inv_std)](TensorImpl& self) {
      auto& px = *self.parents[0];
      auto& pg = *self.parents[1];
      auto& pb = *self.parents[2];
      const int n = self.cols;
      std::vector<double> dxhat(static_cast<std::size_t>(n));
      for (int r = 0; r < self.rows; ++r) {
        const std::size_t base = static_cast<std::size_t>(r * n);
        double m1 = 0.0, m2 = 0.0;
        for (int c = 0; c < n; ++c) {
          const double d = static_cast<double>(self.grad[base + static_cast<std::size_t>(c)]) * pg.value[static_cast<std::size_t>(c)];
          dxhat[static_cast<std::size_t>(c)] = d;
          m1 += d;
          m2 += d * xhat[base + static_cast<std::size_t>(c)];
        }
        m1 /= n;
        m2 /= n;
        if (px.requires_grad) {
          auto& gx = px.grad_buffer();
          for (int c = 0; c < n; ++c) {
            gx[base + static_cast<std::size_t>(c)] += static_cast<Real>(
                inv_std[static_cast<std::size_t>(r)] * (dxhat[static_cast<std::size_t>(c)] - m1 - xhat[base + static_cast<std::size_t>(c)] * m2));
          }
        }
        if (pg.requires_grad) {
          auto& gg = pg.grad_buffer();
          for (int c = 0; c < n; ++c) gg[static_cast<std::size_t>(c)] += self.grad[base + static_cast<std::size_t>(c)] * xhat[base + static_cast<std::size_t>(c)];
        }
        if (pb.requires_grad) {
          auto& gb = pb.grad_buffer();
          for (int c = 0; c < n; ++c) gb[static_cast<std::size_t>(c)] += self.grad[base + static_cast<std::size_t>(c)];
        }
      }
    };
  }
  return out;
}

Tensor binary_cross_entropy(const Tensor& p, const Tensor& y, Real clamp_lo) {
  if (p.rows() != y.rows() || p.cols() != y.cols()) shape_error("binary_cross_entropy", p, y);
  if (p.size() == 0) throw std::invalid_argument("binary_cross_entropy of an empty tensor");
  const double lo = clamp_lo, hi = 1.0 - static_cast<double>(clamp_lo);
  Tensor out = make_result(1, 1, {&p, &y});
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pc = std::clamp(static_cast<double>(p.values()[i]), lo, hi);
    const double yv = y.values()[i];
    acc -= yv * std::log(pc) + (1.0 - yv) * std::log(1.0 - pc);
  }
  const double n = static_cast<double>(p.size());
  out.values()[0] = static_cast<Real>(acc / n);
  if (out.requires_grad()) {
    out.impl()->backward = [lo, hi, n](TensorImpl& self) {
      auto& pp = *self.parents[0];
      auto& py = *self.parents[1];
      const double g = self.grad[0] / n;
      for (std::size_t i = 0; i < pp.value.size(); ++i) {
        const double raw = pp.value[i];
        const double pc = std::clamp(raw, lo, hi);
        const double yv = py.value[i];
        if (pp.requires_grad && raw >= lo && raw <= hi) {
          pp.grad_buffer()[i] += static_cast<Real>(g * (-(yv / pc) + (1.0 - yv) / (1.0 - pc)));
        }
        if (py.requires_grad) py.grad_buffer()[i] += static_cast<Real>(g * (std::log(1.0 - pc) - std::log(pc)));
      }
    };
  }
  return out;
}

Tensor segment_attention(const Tensor& q, const Tensor& k, const Tensor& v, const AttentionPairs& pairs, int n_dst,
                         int heads, Real scale_factor, bool average_heads) {
  if (heads < 1 || q.cols() % heads != 0) throw std::invalid_argument("segment_attention: width not divisible by heads");
  if (k.cols() != q.cols() || v.cols() != q.cols()) shape_error("segment_attention", q, k);
  if (k.rows() != v.rows()) shape_error("segment_attention", k, v);
  if (q.rows() != n_dst) throw std::invalid_argument("segment_attention: q rows must equal n_dst");
  if (pairs.dst.size() != pairs.src.size()) throw std::invalid_argument("segment_attention: pair lists differ in length");
  for (std::size_t i = 0; i < pairs.dst.size(); ++i) {
    if (pairs.dst[i] < 0 || pairs.dst[i] >= n_dst || pairs.src[i] < 0 || pairs.src[i] >= k.rows() ||
        (i > 0 && pairs.dst[i] < pairs.dst[i - 1])) {
      throw std::invalid_argument("segment_attention: bad pair list");
    }
  }
  const int width = q.cols();
  const int hd = width / heads;
  const int out_cols = average_heads ? hd : width;
  Tensor out = make_result(n_dst, out_cols, {&q, &k, &v});
  const std::size_t np = pairs.dst.size();
  std::vector<Real> alpha(np * static_cast<std::size_t>(heads));
  const Real* qv = q.values().data();
  const Real* kv = k.values().data();
  const Real* vv = v.values().data();
  Real* ov = out.values().data();
  const Real head_w = average_heads ? 1.0f / static_cast<Real>(heads) : 1.0f;

  std::size_t s = 0;
  while (s < np) {
    std::size_t e = s;
    while (e < np && pairs.dst[e] == pairs.dst[s]) ++e;
    const int d = pairs.dst[s];
    for (int h = 0; h < heads; ++h) {
      Real mx = -std::numeric_limits<Real>::infinity();
      for (std::size_t i = s; i < e; ++i) {
        const Real* qr = qv + static_cast<std::ptrdiff_t>(d) * width + h * hd;
        const Real* kr = kv + static_cast<std::ptrdiff_t>(pairs.src[i]) * width + h * hd;
        Real dot = 0.0f;
        for (int c = 0; c < hd; ++c) dot += qr[c] * kr[c];
        alpha[i * static_cast<std::size_t>(heads) + static_cast<std::size_t>(h)] = dot * scale_factor;
        mx = std::max(mx, dot * scale_factor);
      }
      double z = 0.0;
      for (std::size_t i = s; i < e; ++i) {
        Real& a = alpha[i * static_cast<std::size_t>(heads) + static_cast<std::size_t>(h)];
        a = std::exp(a - mx);
        z += a;
      }
      Real* orow = ov + static_cast<std::ptrdiff_t>(d) * out_cols + (average_heads ? 0 : h * hd);
      for (std::size_t i = s; i < e; ++i) {
        Real& a = alpha[i * static_cast<std::size_t>(heads) + static_cast<std::size_t>(h)];
        a = static_cast<Real>(a / z);
        const Real* vr = vv + static_cast<std::ptrdiff_t>(pairs.src[i]) * width + h * hd;
        for (int c = 0; c < hd; ++c) orow[c] += head_w * a * vr[c];
      }
    }
    s = e;
  }

  if (out.requires_grad()) {
    out.impl()->backward = [pairs, alpha = std::move(alpha), heads, hd, width, out_cols, average_heads, head_w,
                            scale_factor](TensorImpl& self) {
      auto& pq = *self.parents[0];
      auto& pk = *self.parents[1];
      auto& pv = *self.parents[2];
      const std::size_t np = pairs.dst.size();
      std::vector<Real> dalpha(np);
      std::size_t s = 0;
      while (s < np) {
        std::size_t e = s;
        while (e < np && pairs.dst[e] == pairs.dst[s]) ++e;
        const int d = pairs.dst[s];
        for (int h = 0; h < heads; ++h) {
          const Real* go = self.grad.data() + static_cast<std::ptrdiff_t>(d) * out_cols + (average_heads ? 0 : h * hd);
          double dot_sum = 0.0;
          for (std::size_t i = s; i < e; ++i) {
            const Real a = alpha[i * static_cast<std::size_t>(heads) + static_cast<std::size_t>(h)];
            const Real* vr = pv.value.data() + static_cast<std::ptrdiff_t>(pairs.src[i]) * width + h * hd;
            Real da = 0.0f;
            for (int c = 0; c < hd; ++c) da += head_w * go[c] * vr[c];
            dalpha[i] = da;
            dot_sum += static_cast<double>(a) * da;
            if (pv.requires_grad) {
              Real* gv = pv.grad_buffer().data() + static_cast<std::ptrdiff_t>(pairs.src[i]) * width + h * hd;
              for (int c = 0; c < hd; ++c) gv[c] += head_w * a * go[c];
            }
          }
          for (std::size_t i = s; i < e; ++i) {
            const Real a = alpha[i * static_cast<std::size_t>(heads) + static_cast<std::size_t>(h)];
            const Real ds = static_cast<Real>(a * (dalpha[i] - dot_sum)) * scale_factor;
            const Real* qr = pq.value.data() + static_cast<std::ptrdiff_t>(d) * width + h * hd;
            const Real* kr = pk.value.data() + static_cast<std::ptrdiff_t>(pairs.src[i]) * width + h * hd;
            if (pq.requires_grad) {
              Real* gq = pq.grad_buffer().data() + static_cast<std::ptrdiff_t>(d) * width + h * hd;
              for (int c = 0; c < hd; ++c) gq[c] += ds * kr[c];
            }
            if (pk.requires_grad) {
              Real* gk = pk.grad_buffer().data() + static_cast<std::ptrdiff_t>(pairs.src[i]) * width + h * hd;
              for (int c = 0; c < hd; ++c) gk[c] += ds * qr[c];
            }
          }
        }
        s = e;
      }
    };
  }
  return out;
}

}  // namespace nmwpm
