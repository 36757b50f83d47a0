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

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace nmwpm {

// Scalar type of the engine. Gradient checks build a second copy of the
// library with NMWPM_REAL_DOUBLE defined.
#ifdef NMWPM_REAL_DOUBLE
using Real = double;
#else
using Real = float;
#endif

// Reverse-mode autodiff over dense row-major matrices of Real. Every tensor
// is two-dimensional; scalars are 1 x 1 and vectors 1 x n. Broadcasting
// applies only to a second operand of shape 1 x n (row), m x 1 (column),
// or 1 x 1. Reductions and normalization statistics accumulate in double.
struct TensorImpl {
  int rows = 0;
  int cols = 0;
  std::vector<Real> value;
  std::vector<Real> grad;  // empty until first accumulation
  bool requires_grad = false;
  std::vector<std::shared_ptr<TensorImpl>> parents;
  std::function<void(TensorImpl&)> backward;  // reads self.grad, accumulates into parents

  std::vector<Real>& grad_buffer();
};

class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::shared_ptr<TensorImpl> impl) : p_(std::move(impl)) {}

  static Tensor zeros(int rows, int cols, bool requires_grad = false);
  static Tensor full(int rows, int cols, Real value, bool requires_grad = false);
  static Tensor from(int rows, int cols, std::vector<Real> values, bool requires_grad = false);
  static Tensor scalar(Real value) { return full(1, 1, value); }

  bool defined() const noexcept { return static_cast<bool>(p_); }
  int rows() const { return p_->rows; }
  int cols() const { return p_->cols; }
  std::vector<int> shape() const { return {p_->rows, p_->cols}; }
  std::size_t size() const { return p_->value.size(); }

  std::vector<Real>& values() { return p_->value; }
  const std::vector<Real>& values() const { return p_->value; }
  Real at(int r, int c) const { return p_->value[static_cast<std::size_t>(r) * static_cast<std::size_t>(p_->cols) + static_cast<std::size_t>(c)]; }
  Real item() const;

  bool requires_grad() const { return p_->requires_grad; }
  void set_requires_grad(bool on) { p_->requires_grad = on; }
  // Gradient buffer (zeros if nothing accumulated yet).
  std::vector<Real> grad() const;
  bool has_grad() const { return !p_->grad.empty(); }
  void zero_grad() { p_->grad.clear(); }

  TensorImpl* impl() const { return p_.get(); }
  const std::shared_ptr<TensorImpl>& handle() const { return p_; }

 private:
  std::shared_ptr<TensorImpl> p_;
};

// Disables graph recording on this thread while alive.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool grad_enabled();

// Populate gradients of every tensor reachable from `loss` (must be 1 x 1),
// accumulating into existing buffers, then release the recorded graph.
void backward(const Tensor& loss);

Tensor matmul(const Tensor& a, const Tensor& b);
// x W^T (+ b): x is [n, in], W is [out, in], b is [1, out] or undefined.
Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b = Tensor());
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, Real factor);
Tensor neg(const Tensor& a);
Tensor concat(const std::vector<Tensor>& parts, int axis);  // axis 0: stack rows, 1: join columns
Tensor slice(const Tensor& a, int axis, int start, int length);
Tensor gather_rows(const Tensor& a, const std::vector<int>& rows);
Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);
Tensor max_elementwise(const Tensor& a, const Tensor& b);  // ties split the gradient 0.5 / 0.5
Tensor relu(const Tensor& a);
Tensor gelu(const Tensor& a);  // exact x * Phi(x)
Tensor sigmoid(const Tensor& a);
Tensor log(const Tensor& a);
Tensor clamp(const Tensor& a, Real lo, Real hi);
Tensor softmax(const Tensor& a, int axis);
Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, Real eps = 1e-5f);

// Mean binary cross entropy over all elements, probabilities clamped to
// [clamp_lo, 1 - clamp_lo]. Differentiable in both arguments, so
// binary_cross_entropy(p, p) is the mean binary entropy of p.
Tensor binary_cross_entropy(const Tensor& p, const Tensor& y, Real clamp_lo = 1e-7f);

// Multi-head attention restricted to listed (dst, src) pairs. q is
// [n_dst, heads * head_dim], k and v are [n_src, heads * head_dim]. For each
// dst the softmax runs over its src entries; a dst with no entries gets a
// zero row. Output is [n_dst, heads * head_dim], or the mean over heads
// ([n_dst, head_dim]) when average_heads is set.
struct AttentionPairs {
  std::vector<int> dst;  // nondecreasing
  std::vector<int> src;
};
Tensor segment_attention(const Tensor& q, const Tensor& k, const Tensor& v, const AttentionPairs& pairs, int n_dst,
                         int heads, Real scale, bool average_heads);

}  // namespace nmwpm
