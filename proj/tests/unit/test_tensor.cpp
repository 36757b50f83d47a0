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

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "nmwpm/tensor.hpp"

using namespace nmwpm;

namespace {

// Double-precision reference matrices for the finite-difference oracle.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> v;
  Mat(int r, int c) : rows(r), cols(c), v(static_cast<std::size_t>(r * c), 0.0) {}
  double& operator()(int r, int c) { return v[static_cast<std::size_t>(r * cols + c)]; }
  double operator()(int r, int c) const { return v[static_cast<std::size_t>(r * cols + c)]; }
};

using RefFn = std::function<Mat(const std::vector<Mat>&)>;
using EngineFn = std::function<Tensor(const std::vector<Tensor>&)>;

struct Input {
  int rows;
  int cols;
  std::vector<double> values;
};

Input random_input(int rows, int cols, std::mt19937_64& rng, double lo = -2.0, double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Input in{rows, cols, {}};
  for (int i = 0; i < rows * cols; ++i) in.values.push_back(u(rng));
  return in;
}

std::vector<Mat> to_mats(const std::vector<Input>& inputs) {
  std::vector<Mat> out;
  for (const auto& in : inputs) {
    Mat m(in.rows, in.cols);
    m.v = in.values;
    out.push_back(m);
  }
  return out;
}

// Max |autodiff - central difference| over all input entries, divided by the
// largest finite-difference magnitude. The loss is <R, f(inputs)> with a
// fixed random R so every output entry contributes.
double gradient_error(const std::vector<Input>& inputs, const EngineFn& engine, const RefFn& ref,
                      std::mt19937_64& rng, double eps = 1e-3) {
  std::vector<Tensor> ts;
  for (const auto& in : inputs) {
    std::vector<Real> vals(in.values.begin(), in.values.end());
    ts.push_back(Tensor::from(in.rows, in.cols, vals, true));
  }
  Tensor out = engine(ts);
  const Mat ref_out = ref(to_mats(inputs));
  REQUIRE(out.rows() == ref_out.rows);
  REQUIRE(out.cols() == ref_out.cols);
  for (std::size_t i = 0; i < out.size(); ++i) {
    REQUIRE(std::abs(out.values()[i] - ref_out.v[i]) <= 1e-4 * (1.0 + std::abs(ref_out.v[i])));
  }
  std::normal_distribution<double> nd;
  std::vector<Real> r(out.size());
  for (auto& x : r) x = static_cast<Real>(nd(rng));
  backward(sum(mul(out, Tensor::from(out.rows(), out.cols(), r))));

  auto objective = [&](const std::vector<Mat>& ms) {
    const Mat o = ref(ms);
    double acc = 0.0;
    for (std::size_t i = 0; i < o.v.size(); ++i) acc += o.v[i] * static_cast<double>(r[i]);
    return acc;
  };
  double max_err = 0.0, max_fd = 0.0;
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    const auto g = ts[t].grad();
    for (std::size_t i = 0; i < inputs[t].values.size(); ++i) {
      auto plus = to_mats(inputs), minus = to_mats(inputs);
      plus[t].v[i] += eps;
      minus[t].v[i] -= eps;
      const double fd = (objective(plus) - objective(minus)) / (2.0 * eps);
      max_err = std::max(max_err, std::abs(fd - static_cast<double>(g[i])));
      max_fd = std::max(max_fd, std::abs(fd));
    }
  }
  return max_err / std::max(max_fd, 1e-12);
}

// Entries kept away from kinks (0 for relu, each other for max) by more
// than the finite-difference step.
void push_from_zero(Input& in, double margin = 0.05) {
  for (auto& x : in.values) {
    if (std::abs(x) < margin) x = x < 0 ? -margin : margin;
  }
}

constexpr int kTrials = 100;
constexpr double kTol = 1e-4;

int dim(std::mt19937_64& rng, int hi = 5) { return std::uniform_int_distribution<int>(1, hi)(rng); }

Mat ref_unary(const Mat& a, double (*f)(double)) {
  Mat o(a.rows, a.cols);
  for (std::size_t i = 0; i < a.v.size(); ++i) o.v[i] = f(a.v[i]);
  return o;
}

template <typename Op>
Mat ref_broadcast(const Mat& a, const Mat& b, Op op) {
  Mat o(a.rows, a.cols);
  for (int r = 0; r < a.rows; ++r) {
    for (int c = 0; c < a.cols; ++c) o(r, c) = op(a(r, c), b(b.rows == 1 ? 0 : r, b.cols == 1 ? 0 : c));
  }
  return o;
}

void check_primitive(const char* name, const std::function<std::vector<Input>(std::mt19937_64&)>& make,
                     const EngineFn& engine, const RefFn& ref) {
  std::mt19937_64 rng(12345);
  double worst = 0.0;
  for (int t = 0; t < kTrials; ++t) worst = std::max(worst, gradient_error(make(rng), engine, ref, rng));
  INFO(std::string(name) << " worst relative error " << worst);
  CHECK(worst < kTol);
}

}  // namespace

TEST_CASE("sigmoid at zero") {
  Tensor x = Tensor::from(1, 1, {0.0f}, true);
  Tensor y = sigmoid(x);
  CHECK(y.item() == doctest::Approx(0.5));
  backward(y);
  CHECK(x.grad()[0] == doctest::Approx(0.25));
}

TEST_CASE("softmax rows sum to one") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    const Input in = random_input(dim(rng), dim(rng, 9), rng, -20.0, 20.0);
    Tensor s = softmax(Tensor::from(in.rows, in.cols, std::vector<Real>(in.values.begin(), in.values.end())), 1);
    for (int r = 0; r < s.rows(); ++r) {
      double acc = 0.0;
      for (int c = 0; c < s.cols(); ++c) acc += s.at(r, c);
      CHECK(std::abs(acc - 1.0) < 1e-6);
    }
  }
}

TEST_CASE("gelu matches x * Phi(x)") {
  std::vector<Real> grid;
  for (int i = -400; i <= 400; ++i) grid.push_back(static_cast<Real>(i) * 0.02f);
  Tensor y = gelu(Tensor::from(1, static_cast<int>(grid.size()), grid));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid[i];
    const double ref = x * 0.5 * std::erfc(-x / std::sqrt(2.0));
    CHECK(std::abs(y.values()[i] - ref) < 1e-6);
  }
}

TEST_CASE("layer_norm normalizes rows") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    const Input in = random_input(dim(rng), 2 + dim(rng, 30), rng, -50.0, 50.0);
    const int n = in.cols;
    Tensor y = layer_norm(Tensor::from(in.rows, n, std::vector<Real>(in.values.begin(), in.values.end())),
                          Tensor::full(1, n, 1.0f), Tensor::zeros(1, n));
    for (int r = 0; r < y.rows(); ++r) {
      double mu = 0.0, var = 0.0;
      for (int c = 0; c < n; ++c) mu += y.at(r, c);
      mu /= n;
      for (int c = 0; c < n; ++c) var += (y.at(r, c) - mu) * (y.at(r, c) - mu);
      var /= n;
      CHECK(std::abs(mu) < 1e-5);
      CHECK(std::abs(var - 1.0) < 1e-4);
    }
  }
}

TEST_CASE("backward basics") {
  Tensor w = Tensor::from(2, 3, {1, 2, 3, 4, 5, 6}, true);
  backward(sum(w));
  for (Real g : w.grad()) CHECK(g == 1.0f);

  Tensor w2 = Tensor::from(2, 3, {1, -1, 2, 0.5, 3, 1}, true);
  Tensor x = Tensor::from(3, 1, {0.25, -2, 7});
  backward(sum(matmul(w2, x)));
  const std::vector<Real> expect{0.25, -2, 7, 0.25, -2, 7};
  CHECK(w2.grad() == expect);

  // Gradients accumulate across calls until cleared.
  backward(sum(w));
  for (Real g : w.grad()) CHECK(g == 2.0f);
  w.zero_grad();
  CHECK_FALSE(w.has_grad());

  CHECK_THROWS_AS(backward(w), std::invalid_argument);
}

TEST_CASE("graph is released after backward") {
  Tensor a = Tensor::from(1, 2, {1, 2}, true);
  Tensor h = relu(a);
  Tensor loss = sum(h);
  backward(loss);
  CHECK(loss.impl()->parents.empty());
  CHECK(h.impl()->parents.empty());
  CHECK_FALSE(static_cast<bool>(h.impl()->backward));
}

TEST_CASE("no-grad guard stops recording") {
  Tensor a = Tensor::from(1, 2, {1, 2}, true);
  {
    NoGradGuard guard;
    CHECK_FALSE(grad_enabled());
    Tensor y = mul(a, a);
    CHECK_FALSE(y.requires_grad());
    CHECK(y.impl()->parents.empty());
  }
  CHECK(grad_enabled());
}

TEST_CASE("shape errors") {
  Tensor a = Tensor::zeros(2, 3), b = Tensor::zeros(2, 2), v = Tensor::zeros(1, 3);
  CHECK_THROWS_AS(matmul(a, a), std::invalid_argument);
  CHECK_THROWS_AS(add(a, b), std::invalid_argument);
  CHECK_NOTHROW(add(a, v));
  CHECK_THROWS_AS(concat({a, b}, 0), std::invalid_argument);
  CHECK_THROWS_AS(slice(a, 1, 2, 2), std::invalid_argument);
  CHECK_THROWS_AS(gather_rows(a, {2}), std::invalid_argument);
  CHECK_THROWS_AS(layer_norm(a, Tensor::zeros(1, 2), Tensor::zeros(1, 3)), std::invalid_argument);
  CHECK_THROWS_AS(binary_cross_entropy(a, b), std::invalid_argument);
  CHECK_THROWS_AS(Tensor::from(2, 2, {1, 2, 3}), std::invalid_argument);
  CHECK_THROWS_AS(max_elementwise(a, v), std::invalid_argument);
}

TEST_CASE("max_elementwise splits ties") {
  Tensor a = Tensor::from(1, 3, {1, 2, 3}, true), b = Tensor::from(1, 3, {0, 2, 4}, true);
  backward(sum(max_elementwise(a, b)));
  CHECK(a.grad() == std::vector<Real>{1, 0.5, 0});
  CHECK(b.grad() == std::vector<Real>{0, 0.5, 1});
}

TEST_CASE("binary cross entropy values") {
  Tensor p = Tensor::full(1, 8, 0.5f);
  CHECK(binary_cross_entropy(p, p).item() == doctest::Approx(std::log(2.0)).epsilon(1e-6));
  // Clamped extremes: p = y in {0, 1} costs -ln(1 - 1e-7) per entry.
  Tensor ex = Tensor::from(1, 4, {0, 1, 1, 0});
  const double floor_cost = -std::log1p(-1e-7);
  CHECK(binary_cross_entropy(ex, ex).item() == doctest::Approx(floor_cost).epsilon(1e-3));
}

TEST_CASE("segment attention over an empty neighbourhood is zero") {
  Tensor q = Tensor::full(3, 4, 1.0f), k = Tensor::full(2, 4, 1.0f), v = Tensor::full(2, 4, 2.0f);
  AttentionPairs pairs{{0, 0, 2}, {0, 1, 1}};
  Tensor o = segment_attention(q, k, v, pairs, 3, 2, 0.5f, false);
  for (int c = 0; c < 4; ++c) {
    CHECK(o.at(0, c) == doctest::Approx(2.0));
    CHECK(o.at(1, c) == 0.0f);
    CHECK(o.at(2, c) == doctest::Approx(2.0));
  }
  CHECK_THROWS_AS(segment_attention(q, k, v, AttentionPairs{{2, 0}, {0, 0}}, 3, 2, 0.5f, false),
                  std::invalid_argument);
}

TEST_CASE("finite differences: matmul") {
  check_primitive(
      "matmul",
      [](std::mt19937_64& rng) {
        const int m = dim(rng), k = dim(rng), n = dim(rng);
        return std::vector<Input>{random_input(m, k, rng), random_input(k, n, rng)};
      },
      [](const std::vector<Tensor>& t) { return matmul(t[0], t[1]); },
      [](const std::vector<Mat>& m) {
        Mat o(m[0].rows, m[1].cols);
        for (int r = 0; r < o.rows; ++r)
          for (int c = 0; c < o.cols; ++c)
            for (int i = 0; i < m[0].cols; ++i) o(r, c) += m[0](r, i) * m[1](i, c);
        return o;
      });
}

TEST_CASE("finite differences: linear") {
  for (int with_bias = 0; with_bias < 2; ++with_bias) {
    check_primitive(
        "linear",
        [with_bias](std::mt19937_64& rng) {
          const int n = dim(rng), in = dim(rng), out = dim(rng);
          std::vector<Input> v{random_input(n, in, rng), random_input(out, in, rng)};
          if (with_bias) v.push_back(random_input(1, out, rng));
          return v;
        },
        [with_bias](const std::vector<Tensor>& t) { return with_bias ? linear(t[0], t[1], t[2]) : linear(t[0], t[1]); },
        [with_bias](const std::vector<Mat>& m) {
          Mat o(m[0].rows, m[1].rows);
          for (int r = 0; r < o.rows; ++r)
            for (int c = 0; c < o.cols; ++c) {
              for (int i = 0; i < m[0].cols; ++i) o(r, c) += m[0](r, i) * m[1](c, i);
              if (with_bias) o(r, c) += m[2](0, c);
            }
          return o;
        });
  }
}

namespace {

std::vector<Input> broadcast_pair(std::mt19937_64& rng) {
  const int m = dim(rng), n = dim(rng);
  const int mode = std::uniform_int_distribution<int>(0, 3)(rng);
  const int br = (mode == 1 || mode == 3) ? 1 : m;
  const int bc = (mode == 2 || mode == 3) ? 1 : n;
  return {random_input(m, n, rng), random_input(br, bc, rng)};
}

}  // namespace

TEST_CASE("finite differences: add, sub, mul with broadcasting") {
  check_primitive(
      "add", broadcast_pair, [](const std::vector<Tensor>& t) { return add(t[0], t[1]); },
      [](const std::vector<Mat>& m) { return ref_broadcast(m[0], m[1], [](double a, double b) { return a + b; }); });
  check_primitive(
      "sub", broadcast_pair, [](const std::vector<Tensor>& t) { return sub(t[0], t[1]); },
      [](const std::vector<Mat>& m) { return ref_broadcast(m[0], m[1], [](double a, double b) { return a - b; }); });
  check_primitive(
      "mul", broadcast_pair, [](const std::vector<Tensor>& t) { return mul(t[0], t[1]); },
      [](const std::vector<Mat>& m) { return ref_broadcast(m[0], m[1], [](double a, double b) { return a * b; }); });
}

TEST_CASE("finite differences: scale and neg") {
  auto one = [](std::mt19937_64& rng) { return std::vector<Input>{random_input(dim(rng), dim(rng), rng)}; };
  check_primitive(
      "scale", one, [](const std::vector<Tensor>& t) { return scale(t[0], -1.75f); },
      [](const std::vector<Mat>& m) { return ref_unary(m[0], [](double x) { return -1.75 * x; }); });
  check_primitive(
      "neg", one, [](const std::vector<Tensor>& t) { return neg(t[0]); },
      [](const std::vector<Mat>& m) { return ref_unary(m[0], [](double x) { return -x; }); });
}

TEST_CASE("finite differences: concat, slice, gather_rows") {
  for (int axis = 0; axis < 2; ++axis) {
    check_primitive(
        "concat",
        [axis](std::mt19937_64& rng) {
          const int shared = dim(rng);
          std::vector<Input> in;
          const int parts = dim(rng, 3);
          for (int i = 0; i < parts; ++i) {
            in.push_back(axis == 0 ? random_input(dim(rng), shared, rng) : random_input(shared, dim(rng), rng));
          }
          return in;
        },
        [axis](const std::vector<Tensor>& t) { return concat(t, axis); },
        [axis](const std::vector<Mat>& m) {
          int rows = 0, cols = 0;
          for (const auto& p : m) {
            rows = axis == 0 ? rows + p.rows : p.rows;
            cols = axis == 1 ? cols + p.cols : p.cols;
          }
          Mat o(rows, cols);
          int off = 0;
          for (const auto& p : m) {
            for (int r = 0; r < p.rows; ++r)
              for (int c = 0; c < p.cols; ++c) o(axis == 0 ? r + off : r, axis == 1 ? c + off : c) = p(r, c);
            off += axis == 0 ? p.rows : p.cols;
          }
          return o;
        });
  }
  for (int axis = 0; axis < 2; ++axis) {
    auto start = std::make_shared<int>(0), len = std::make_shared<int>(1);
    check_primitive(
        "slice",
        [axis, start, len](std::mt19937_64& rng) {
          const Input in = random_input(dim(rng, 6), dim(rng, 6), rng);
          const int extent = axis == 0 ? in.rows : in.cols;
          *start = std::uniform_int_distribution<int>(0, extent - 1)(rng);
          *len = std::uniform_int_distribution<int>(1, extent - *start)(rng);
          return std::vector<Input>{in};
        },
        [axis, start, len](const std::vector<Tensor>& t) { return slice(t[0], axis, *start, *len); },
        [axis, start, len](const std::vector<Mat>& m) {
          Mat o(axis == 0 ? *len : m[0].rows, axis == 1 ? *len : m[0].cols);
          for (int r = 0; r < o.rows; ++r)
            for (int c = 0; c < o.cols; ++c) o(r, c) = m[0](axis == 0 ? r + *start : r, axis == 1 ? c + *start : c);
          return o;
        });
  }
  auto rows = std::make_shared<std::vector<int>>();
  check_primitive(
      "gather_rows",
      [rows](std::mt19937_64& rng) {
        const Input in = random_input(dim(rng), dim(rng), rng);
        rows->clear();
        const int n = dim(rng, 7);
        for (int i = 0; i < n; ++i) rows->push_back(std::uniform_int_distribution<int>(0, in.rows - 1)(rng));
        return std::vector<Input>{in};
      },
      [rows](const std::vector<Tensor>& t) { return gather_rows(t[0], *rows); },
      [rows](const std::vector<Mat>& m) {
        Mat o(static_cast<int>(rows->size()), m[0].cols);
        for (int r = 0; r < o.rows; ++r)
          for (int c = 0; c < o.cols; ++c) o(r, c) = m[0]((*rows)[static_cast<std::size_t>(r)], c);
        return o;
      });
}

TEST_CASE("finite differences: reductions and max") {
  auto one = [](std::mt19937_64& rng) { return std::vector<Input>{random_input(dim(rng), dim(rng), rng)}; };
  check_primitive(
      "sum", one, [](const std::vector<Tensor>& t) { return sum(t[0]); },
      [](const std::vector<Mat>& m) {
        Mat o(1, 1);
        for (double x : m[0].v) o.v[0] += x;
        return o;
      });
  check_primitive(
      "mean", one, [](const std::vector<Tensor>& t) { return mean(t[0]); },
      [](const std::vector<Mat>& m) {
        Mat o(1, 1);
        for (double x : m[0].v) o.v[0] += x / static_cast<double>(m[0].v.size());
        return o;
      });
  check_primitive(
      "max_elementwise",
      [](std::mt19937_64& rng) {
        const int r = dim(rng), c = dim(rng);
        Input a = random_input(r, c, rng), b = random_input(r, c, rng);
        for (std::size_t i = 0; i < a.values.size(); ++i) {
          if (std::abs(a.values[i] - b.values[i]) < 0.05) b.values[i] = a.values[i] + 0.1;
        }
        return std::vector<Input>{a, b};
      },
      [](const std::vector<Tensor>& t) { return max_elementwise(t[0], t[1]); },
      [](const std::vector<Mat>& m) {
        return ref_broadcast(m[0], m[1], [](double a, double b) { return std::max(a, b); });
      });
}

TEST_CASE("finite differences: pointwise nonlinearities") {
  auto kinked = [](std::mt19937_64& rng) {
    Input in = random_input(dim(rng), dim(rng), rng);
    push_from_zero(in);
    return std::vector<Input>{in};
  };
  auto one = [](std::mt19937_64& rng) { return std::vector<Input>{random_input(dim(rng), dim(rng), rng, -4, 4)}; };
  check_primitive(
      "relu", kinked, [](const std::vector<Tensor>& t) { return relu(t[0]); },
      [](const std::vector<Mat>& m) { return ref_unary(m[0], [](double x) { return x > 0 ? x : 0.0; }); });
  check_primitive(
      "gelu", one, [](const std::vector<Tensor>& t) { return gelu(t[0]); },
      [](const std::vector<Mat>& m) {
        return ref_unary(m[0], [](double x) { return 0.5 * x * std::erfc(-x / std::sqrt(2.0)); });
      });
  check_primitive(
      "sigmoid", one, [](const std::vector<Tensor>& t) { return sigmoid(t[0]); },
      [](const std::vector<Mat>& m) { return ref_unary(m[0], [](double x) { return 1.0 / (1.0 + std::exp(-x)); }); });
  check_primitive(
      "log",
      [](std::mt19937_64& rng) { return std::vector<Input>{random_input(dim(rng), dim(rng), rng, 0.2, 3.0)}; },
      [](const std::vector<Tensor>& t) { return log(t[0]); },
      [](const std::vector<Mat>& m) { return ref_unary(m[0], [](double x) { return std::log(x); }); });
  check_primitive(
      "clamp",
      [](std::mt19937_64& rng) {
        Input in = random_input(dim(rng), dim(rng), rng);
        for (auto& x : in.values) {
          if (std::abs(std::abs(x) - 1.0) < 0.05) x *= 1.2;
        }
        return std::vector<Input>{in};
      },
      [](const std::vector<Tensor>& t) { return clamp(t[0], -1.0f, 1.0f); },
      [](const std::vector<Mat>& m) { return ref_unary(m[0], [](double x) { return std::clamp(x, -1.0, 1.0); }); });
}

TEST_CASE("finite differences: softmax and layer_norm") {
  for (int axis = 0; axis < 2; ++axis) {
    check_primitive(
        "softmax",
        [](std::mt19937_64& rng) { return std::vector<Input>{random_input(dim(rng), dim(rng), rng)}; },
        [axis](const std::vector<Tensor>& t) { return softmax(t[0], axis); },
        [axis](const std::vector<Mat>& m) {
          const Mat& a = m[0];
          Mat o(a.rows, a.cols);
          const int outer = axis == 1 ? a.rows : a.cols, inner = axis == 1 ? a.cols : a.rows;
          for (int i = 0; i < outer; ++i) {
            double z = 0.0;
            for (int j = 0; j < inner; ++j) z += std::exp(axis == 1 ? a(i, j) : a(j, i));
            for (int j = 0; j < inner; ++j) {
              if (axis == 1) o(i, j) = std::exp(a(i, j)) / z;
              else o(j, i) = std::exp(a(j, i)) / z;
            }
          }
          return o;
        });
  }
  check_primitive(
      "layer_norm",
      [](std::mt19937_64& rng) {
        const int r = dim(rng), c = 1 + dim(rng, 7);
        return std::vector<Input>{random_input(r, c, rng), random_input(1, c, rng), random_input(1, c, rng)};
      },
      [](const std::vector<Tensor>& t) { return layer_norm(t[0], t[1], t[2]); },
      [](const std::vector<Mat>& m) {
        const Mat& x = m[0];
        Mat o(x.rows, x.cols);
        for (int r = 0; r < x.rows; ++r) {
          double mu = 0.0, var = 0.0;
          for (int c = 0; c < x.cols; ++c) mu += x(r, c) / x.cols;
          for (int c = 0; c < x.cols; ++c) var += (x(r, c) - mu) * (x(r, c) - mu) / x.cols;
          for (int c = 0; c < x.cols; ++c) o(r, c) = (x(r, c) - mu) / std::sqrt(var + 1e-5) * m[1](0, c) + m[2](0, c);
        }
        return o;
      });
}

TEST_CASE("finite differences: binary cross entropy in both arguments") {
  check_primitive(
      "binary_cross_entropy",
      [](std::mt19937_64& rng) {
        const int r = dim(rng), c = dim(rng);
        return std::vector<Input>{random_input(r, c, rng, 0.1, 0.9), random_input(r, c, rng, 0.0, 1.0)};
      },
      [](const std::vector<Tensor>& t) { return binary_cross_entropy(t[0], t[1]); },
      [](const std::vector<Mat>& m) {
        Mat o(1, 1);
        for (std::size_t i = 0; i < m[0].v.size(); ++i) {
          const double p = m[0].v[i], y = m[1].v[i];
          o.v[0] -= (y * std::log(p) + (1 - y) * std::log(1 - p)) / static_cast<double>(m[0].v.size());
        }
        return o;
      });
}

TEST_CASE("finite differences: segment attention") {
  for (int avg = 0; avg < 2; ++avg) {
    auto pairs = std::make_shared<AttentionPairs>();
    auto shape = std::make_shared<std::array<int, 4>>();  // n_dst, n_src, heads, head_dim
    check_primitive(
        "segment_attention",
        [pairs, shape](std::mt19937_64& rng) {
          const int n_dst = dim(rng, 4), n_src = dim(rng, 4), heads = dim(rng, 3), hd = dim(rng, 3);
          *shape = {n_dst, n_src, heads, hd};
          pairs->dst.clear();
          pairs->src.clear();
          std::bernoulli_distribution keep(0.6);
          for (int d = 0; d < n_dst; ++d)
            for (int s = 0; s < n_src; ++s)
              if (keep(rng)) {
                pairs->dst.push_back(d);
                pairs->src.push_back(s);
              }
          return std::vector<Input>{random_input(n_dst, heads * hd, rng), random_input(n_src, heads * hd, rng),
                                    random_input(n_src, heads * hd, rng)};
        },
        [pairs, shape, avg](const std::vector<Tensor>& t) {
          const auto [n_dst, n_src, heads, hd] = *shape;
          return segment_attention(t[0], t[1], t[2], *pairs, n_dst, heads, 0.7f, avg != 0);
        },
        [pairs, shape, avg](const std::vector<Mat>& m) {
          const auto [n_dst, n_src, heads, hd] = *shape;
          Mat o(n_dst, avg ? hd : heads * hd);
          for (int d = 0; d < n_dst; ++d) {
            std::vector<int> srcs;
            for (std::size_t i = 0; i < pairs->dst.size(); ++i)
              if (pairs->dst[i] == d) srcs.push_back(pairs->src[i]);
            if (srcs.empty()) continue;
            for (int h = 0; h < heads; ++h) {
              std::vector<double> s;
              double z = 0.0;
              for (int src : srcs) {
                double dot = 0.0;
                for (int c = 0; c < hd; ++c) dot += m[0](d, h * hd + c) * m[1](src, h * hd + c);
                s.push_back(std::exp(0.7 * dot));
                z += s.back();
              }
              for (std::size_t j = 0; j < srcs.size(); ++j)
                for (int c = 0; c < hd; ++c)
                  o(d, avg ? c : h * hd + c) += (avg ? 1.0 / heads : 1.0) * s[j] / z * m[2](srcs[j], h * hd + c);
            }
          }
          return o;
        });
  }
}
