/*
Copyright 2026 The diffsched Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#include "diffsched/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace diffsched {

namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

// Index into an operand that may be broadcast from length 1.
inline std::size_t bi(std::size_t len, std::size_t i) { return len == 1 ? 0 : i; }

}  // namespace

const Tape::Record& Tape::rec(DiffVector x) const {
  if (x.node >= records_.size()) throw std::out_of_range("DiffVector does not belong to this tape");
  return records_[x.node];
}

std::size_t Tape::binary_len(DiffVector x, DiffVector y, const char* op) const {
  const std::size_t lx = rec(x).len;
  const std::size_t ly = rec(y).len;
  if (lx == ly || ly == 1) return lx;
  if (lx == 1) return ly;
  throw std::invalid_argument(std::string(op) + ": length mismatch " + std::to_string(lx) + " vs " +
                              std::to_string(ly));
}

DiffVector Tape::push(Op op, std::size_t a, std::size_t b, std::size_t len, double aux, bool needs_grad) {
  const std::size_t offset = values_.size();
  records_.push_back(Record{op, needs_grad, a, b, offset, len, aux});
  values_.resize(offset + len);
  return DiffVector{records_.size() - 1, len};
}

DiffVector Tape::constant(std::span<const double> v) {
  DiffVector out = push(Op::Constant, kNone, kNone, v.size(), 0.0, false);
  std::copy(v.begin(), v.end(), values_.begin() + static_cast<std::ptrdiff_t>(records_.back().offset));
  return out;
}

DiffVector Tape::param(std::span<const double> v) {
  DiffVector out = push(Op::Param, kNone, kNone, v.size(), 0.0, true);
  std::copy(v.begin(), v.end(), values_.begin() + static_cast<std::ptrdiff_t>(records_.back().offset));
  return out;
}

DiffVector Tape::add(DiffVector x, DiffVector y) {
  const std::size_t n = binary_len(x, y, "add");
  DiffVector out = push(Op::Add, x.node, y.node, n, 0.0, rec(x).needs_grad || rec(y).needs_grad);
  const Record& rx = records_[x.node];
  const Record& ry = records_[y.node];
  const std::size_t o = records_[out.node].offset;
  for (std::size_t i = 0; i < n; ++i)
    values_[o + i] = values_[rx.offset + bi(rx.len, i)] + values_[ry.offset + bi(ry.len, i)];
  return out;
}

DiffVector Tape::mul(DiffVector x, DiffVector y) {
  const std::size_t n = binary_len(x, y, "mul");
  DiffVector out = push(Op::Mul, x.node, y.node, n, 0.0, rec(x).needs_grad || rec(y).needs_grad);
  const Record& rx = records_[x.node];
  const Record& ry = records_[y.node];
  const std::size_t o = records_[out.node].offset;
  for (std::size_t i = 0; i < n; ++i)
    values_[o + i] = values_[rx.offset + bi(rx.len, i)] * values_[ry.offset + bi(ry.len, i)];
  return out;
}

DiffVector Tape::div(DiffVector x, DiffVector y) {
  const std::size_t n = binary_len(x, y, "div");
  for (double d : value(y))
    if (d == 0.0) throw std::domain_error("div: division by zero");
  DiffVector out = push(Op::Div, x.node, y.node, n, 0.0, rec(x).needs_grad || rec(y).needs_grad);
  const Record& rx = records_[x.node];
  const Record& ry = records_[y.node];
  const std::size_t o = records_[out.node].offset;
  for (std::size_t i = 0; i < n; ++i)
    values_[o + i] = values_[rx.offset + bi(rx.len, i)] / values_[ry.offset + bi(ry.len, i)];
  return out;
}

DiffVector Tape::log(DiffVector x) {
  for (double v : value(x))
    if (!(v > 0.0)) throw std::domain_error("log: nonpositive input");
  DiffVector out = push(Op::Log, x.node, kNone, x.len, 0.0, rec(x).needs_grad);
  const std::size_t ix = records_[x.node].offset;
  const std::size_t o = records_[out.node].offset;
  for (std::size_t i = 0; i < x.len; ++i) values_[o + i] = std::log(values_[ix + i]);
  return out;
}

DiffVector Tape::clamped_log(DiffVector x, double floor) {
  if (!(floor > 0.0)) throw std::invalid_argument("clamped_log: floor must be positive");
  DiffVector out = push(Op::ClampedLog, x.node, kNone, x.len, floor, rec(x).needs_grad);
  const std::size_t ix = records_[x.node].offset;
  const std::size_t o = records_[out.node].offset;
  for (std::size_t i = 0; i < x.len; ++i) values_[o + i] = std::log(std::max(values_[ix + i], floor));
  return out;
}

DiffVector Tape::exp(DiffVector x) {
  DiffVector out = push(Op::Exp, x.node, kNone, rec(x).len, 0.0, rec(x).needs_grad);
  const std::size_t ix = records_[x.node].offset;
  const std::size_t o = records_[out.node].offset;
  for (std::size_t i = 0; i < x.len; ++i) values_[o + i] = std::exp(values_[ix + i]);
  return out;
}

DiffVector Tape::sum(DiffVector x) {
  DiffVector out = push(Op::Sum, x.node, kNone, 1, 0.0, rec(x).needs_grad);
  const std::size_t ix = records_[x.node].offset;
  double s = 0.0;
  for (std::size_t i = 0; i < x.len; ++i) s += values_[ix + i];
  values_[records_[out.node].offset] = s;
  return out;
}

DiffVector Tape::dot(DiffVector x, std::span<const double> w) {
  if (w.size() != rec(x).len)
    throw std::invalid_argument("dot: length mismatch " + std::to_string(x.len) + " vs " +
                                std::to_string(w.size()));
  DiffVector weights = constant(w);
  DiffVector out = push(Op::Dot, x.node, weights.node, 1, 0.0, rec(x).needs_grad);
  const std::size_t ix = records_[x.node].offset;
  const std::size_t iw = records_[weights.node].offset;
  double s = 0.0;
  for (std::size_t i = 0; i < x.len; ++i) s += values_[ix + i] * values_[iw + i];
  values_[records_[out.node].offset] = s;
  return out;
}

DiffVector Tape::cumsum(DiffVector x) {
  DiffVector out = push(Op::Cumsum, x.node, kNone, rec(x).len, 0.0, rec(x).needs_grad);
  const std::size_t ix = records_[x.node].offset;
  const std::size_t o = records_[out.node].offset;
  double s = 0.0;
  for (std::size_t i = 0; i < x.len; ++i) {
    s += values_[ix + i];
    values_[o + i] = s;
  }
  return out;
}

DiffVector Tape::softmax(DiffVector x, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("softmax: tau must be positive");
  DiffVector out = push(Op::Softmax, x.node, kNone, rec(x).len, tau, rec(x).needs_grad);
  const std::size_t ix = records_[x.node].offset;
  const std::size_t o = records_[out.node].offset;
  double mx = -INFINITY;
  for (std::size_t i = 0; i < x.len; ++i) mx = std::max(mx, values_[ix + i]);
  double z = 0.0;
  for (std::size_t i = 0; i < x.len; ++i) {
    values_[o + i] = std::exp((values_[ix + i] - mx) / tau);
    z += values_[o + i];
  }
  for (std::size_t i = 0; i < x.len; ++i) values_[o + i] /= z;
  return out;
}

DiffVector Tape::straight_through_onehot(DiffVector x) {
  auto v = value(x);
  std::size_t best = v.size();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i]) || !(v[i] > 0.0)) continue;
    if (best == v.size() || v[i] > v[best]) best = i;
  }
  if (best == v.size()) throw std::domain_error("straight_through_onehot: no finite positive entry");
  return straight_through_select(x, best);
}

DiffVector Tape::straight_through_select(DiffVector x, std::size_t index) {
  if (index >= rec(x).len) throw std::out_of_range("straight_through_select: index out of range");
  DiffVector out = push(Op::StraightThrough, x.node, kNone, x.len, 0.0, rec(x).needs_grad);
  values_[records_[out.node].offset + index] = 1.0;
  return out;
}

std::span<const double> Tape::value(DiffVector x) const {
  const Record& r = rec(x);
  return std::span<const double>(values_.data() + r.offset, r.len);
}

double Tape::scalar_value(DiffVector x) const {
  if (rec(x).len != 1) throw std::invalid_argument("scalar_value: not a scalar");
  return values_[records_[x.node].offset];
}

GradientMap Tape::backward(DiffVector root) {
  if (rec(root).len != 1) throw std::invalid_argument("backward: root must be a scalar");
  grads_.assign(values_.size(), 0.0);
  grads_[records_[root.node].offset] = 1.0;

  // Accumulates g * (broadcast-aware) into the gradient of input `in`.
  auto reduce_into = [&](std::size_t in, std::size_t n, auto&& term) {
    const Record& r = records_[in];
    if (!r.needs_grad) return;
    for (std::size_t i = 0; i < n; ++i) grads_[r.offset + bi(r.len, i)] += term(i);
  };

  for (std::size_t k = root.node + 1; k-- > 0;) {
    const Record& r = records_[k];
    if (!r.needs_grad) continue;
    const double* g = grads_.data() + r.offset;
    const double* out = values_.data() + r.offset;
    const std::size_t n = r.len;

    switch (r.op) {
      case Op::Constant:
      case Op::Param:
        break;
      case Op::Add:
        reduce_into(r.a, n, [&](std::size_t i) { return g[i]; });
        reduce_into(r.b, n, [&](std::size_t i) { return g[i]; });
        break;
      case Op::Mul: {
        const Record& ra = records_[r.a];
        const Record& rb = records_[r.b];
        reduce_into(r.a, n, [&](std::size_t i) { return g[i] * values_[rb.offset + bi(rb.len, i)]; });
        reduce_into(r.b, n, [&](std::size_t i) { return g[i] * values_[ra.offset + bi(ra.len, i)]; });
        break;
      }
      case Op::Div: {
        const Record& rb = records_[r.b];
        reduce_into(r.a, n, [&](std::size_t i) { return g[i] / values_[rb.offset + bi(rb.len, i)]; });
        reduce_into(r.b, n, [&](std::size_t i) { return -g[i] * out[i] / values_[rb.offset + bi(rb.len, i)]; });
        break;
      }
      case Op::Log: {
        const double* x = values_.data() + records_[r.a].offset;
        reduce_into(r.a, n, [&](std::size_t i) { return g[i] / x[i]; });
        break;
      }
      case Op::ClampedLog: {
        const double* x = values_.data() + records_[r.a].offset;
        reduce_into(r.a, n, [&](std::size_t i) { return x[i] >= r.aux ? g[i] / x[i] : 0.0; });
        break;
      }
      case Op::Exp:
        reduce_into(r.a, n, [&](std::size_t i) { return g[i] * out[i]; });
        break;
      case Op::Sum:
        reduce_into(r.a, records_[r.a].len, [&](std::size_t) { return g[0]; });
        break;
      case Op::Dot: {
        const double* w = values_.data() + records_[r.b].offset;
        reduce_into(r.a, records_[r.a].len, [&](std::size_t i) { return g[0] * w[i]; });
        break;
      }
      case Op::Cumsum: {
        // d/dx_j = sum_{i >= j} g_i
        double acc = 0.0;
        double* gx = grads_.data() + records_[r.a].offset;
        for (std::size_t j = n; j-- > 0;) {
          acc += g[j];
          gx[j] += acc;
        }
        break;
      }
      case Op::Softmax: {
        double dotgy = 0.0;
        for (std::size_t i = 0; i < n; ++i) dotgy += g[i] * out[i];
        reduce_into(r.a, n, [&](std::size_t i) { return out[i] * (g[i] - dotgy) / r.aux; });
        break;
      }
      case Op::StraightThrough:
        reduce_into(r.a, n, [&](std::size_t i) { return g[i]; });
        break;
    }
  }

  GradientMap grads;
  for (std::size_t k = 0; k < records_.size(); ++k) {
    const Record& r = records_[k];
    if (r.op != Op::Param) continue;
    grads.emplace(k, std::vector<double>(grads_.begin() + static_cast<std::ptrdiff_t>(r.offset),
                                         grads_.begin() + static_cast<std::ptrdiff_t>(r.offset + r.len)));
  }
  return grads;
}

}  // namespace diffsched
