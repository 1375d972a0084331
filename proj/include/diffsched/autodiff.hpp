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

#pragma once

// Reverse-mode automatic differentiation over small dense vectors.
//
// A Tape records every operation in creation order, so inputs always precede
// outputs and backward() is a single reverse sweep. Values live in one flat
// arena; a DiffVector is just (node index, length). A tape belongs to one
// thread. Build a fresh tape per forward/backward pass.
//
// Binary elementwise ops accept equal lengths or a length-1 operand, which is
// broadcast.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <span>
#include <vector>

namespace diffsched {

struct DiffVector {
  std::size_t node = 0;
  std::size_t len = 0;
};

/// Gradient of the root with respect to every parameter on the tape, keyed by
/// the parameter's node index.
using GradientMap = std::map<std::size_t, std::vector<double>>;

class Tape {
 public:
  DiffVector constant(std::span<const double> v);
  DiffVector constant(std::initializer_list<double> v) { return constant(std::span(v.begin(), v.size())); }
  DiffVector scalar(double v) { return constant(std::span(&v, 1)); }
  DiffVector param(std::span<const double> v);
  DiffVector param(std::initializer_list<double> v) { return param(std::span(v.begin(), v.size())); }

  DiffVector add(DiffVector x, DiffVector y);
  DiffVector mul(DiffVector x, DiffVector y);
  /// Throws std::domain_error on a zero denominator entry.
  DiffVector div(DiffVector x, DiffVector y);

  /// Throws std::domain_error on a nonpositive entry.
  DiffVector log(DiffVector x);
  /// log(max(x, floor)); the adjoint is zero where x < floor. Intended only
  /// for x*log(x) terms whose argument is a probability that may be exactly 0.
  DiffVector clamped_log(DiffVector x, double floor);
  DiffVector exp(DiffVector x);

  DiffVector sum(DiffVector x);
  /// Inner product with a constant weight vector.
  DiffVector dot(DiffVector x, std::span<const double> w);
  DiffVector cumsum(DiffVector x);
  /// softmax(x / tau) with max subtraction. Requires tau > 0.
  DiffVector softmax(DiffVector x, double tau);

  /// Forward: one_hot(argmax(x)), lowest index on ties. Backward: identity.
  /// Throws std::domain_error unless some entry is finite and positive.
  DiffVector straight_through_onehot(DiffVector x);
  /// Forward: one_hot(index). Backward: identity into x.
  DiffVector straight_through_select(DiffVector x, std::size_t index);

  std::span<const double> value(DiffVector x) const;
  double scalar_value(DiffVector x) const;

  /// Seeds d(root)/d(root) = 1 and sweeps the tape in reverse. Root must have
  /// length 1 (std::invalid_argument otherwise).
  GradientMap backward(DiffVector root);

  std::size_t size() const noexcept { return records_.size(); }

 private:
  enum class Op : std::uint8_t {
    Constant, Param, Add, Mul, Div, Log, ClampedLog, Exp, Sum, Dot, Cumsum, Softmax, StraightThrough
  };

  struct Record {
    Op op;
    bool needs_grad;
    std::size_t a;  // first input node
    std::size_t b;  // second input node (binary ops, dot weights)
    std::size_t offset;
    std::size_t len;
    double aux;  // tau or clamp floor
  };

  DiffVector push(Op op, std::size_t a, std::size_t b, std::size_t len, double aux, bool needs_grad);
  const Record& rec(DiffVector x) const;
  std::size_t binary_len(DiffVector x, DiffVector y, const char* op) const;

  std::vector<Record> records_;
  std::vector<double> values_;
  std::vector<double> grads_;
};

}  // namespace diffsched
