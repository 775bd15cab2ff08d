// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace armi {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_to_string(const Shape& shape);

namespace detail {
struct Node;
}

// Dense row-major float64 array that records the operations producing it so
// gradients can be propagated in reverse. A Tensor is a shared handle: copies
// alias the same node. Values are fixed once created; the only sanctioned
// writers are optimizers, checkpoint loading and finite-difference probes,
// all through mutable_values().
class Tensor {
 public:
  // Receives the op's output values and the gradient flowing into them, and
  // accumulates into the captured inputs' grad_buffer().
  using BackwardFn =
      std::function<void(std::span<const double> out_value, std::span<const double> out_grad)>;

  Tensor() = default;
  Tensor(Shape shape, std::vector<double> values, bool requires_grad = false);

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor filled(Shape shape, double value, bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);

  // Builds the result of a differentiable op. Throws NumericalError when any
  // value is non-finite. The graph edge is recorded only when gradients are
  // enabled and some input requires them.
  static Tensor from_op(const char* op_name, Shape shape, std::vector<double> values,
                        std::vector<Tensor> inputs, BackwardFn backward);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t size() const;
  std::span<const double> values() const;
  double item() const;
  double at(std::size_t flat_index) const;

  bool requires_grad() const;
  bool has_grad() const;
  std::span<const double> grad() const;
  void zero_grad();
  // Zero-initialised on first use. Empty for tensors that do not require grad.
  std::span<double> grad_buffer() const;

  // Seeds d(this)/d(this) = 1 and propagates to every reachable leaf. The
  // recorded graph is released afterwards.
  void backward() const;

  std::span<double> mutable_values();

  bool same_node(const Tensor& other) const { return node_ == other.node_; }

 private:
  std::shared_ptr<detail::Node> node_;
};

bool grad_enabled();

// Disables graph recording for the current thread while alive.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

}  // namespace armi
