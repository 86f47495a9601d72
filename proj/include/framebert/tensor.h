// Copyright 2026 The FrameBERT Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FRAMEBERT_TENSOR_H_
#define FRAMEBERT_TENSOR_H_

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace framebert {

using Shape = std::vector<std::size_t>;

std::size_t NumElements(const Shape& shape);
std::string ShapeToString(const Shape& shape);

namespace internal {

// One vertex of the autodiff graph. Leaves are created by the user;
// interior nodes are created by ops and carry a backward closure that reads
// `grad` and accumulates into the parents' gradients.
struct Node {
  Shape shape;
  std::vector<double> values;
  std::vector<double> grad;
  bool requires_grad = false;
  bool is_leaf = true;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward;

  // Allocates a zeroed gradient buffer on first use.
  std::span<double> EnsureGrad();
};

}  // namespace internal

// True unless a NoGradGuard is alive on this thread.
bool GradEnabled();

// Disables graph recording on the current thread for its lifetime.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

// Dense row-major array of doubles with optional participation in
// reverse-mode differentiation. Copies share the underlying node.
class Tensor {
 public:
  Tensor() = default;
  Tensor(Shape shape, std::vector<double> values, bool requires_grad = false);

  static Tensor Zeros(Shape shape, bool requires_grad = false);
  static Tensor Full(Shape shape, double value, bool requires_grad = false);
  static Tensor Scalar(double value, bool requires_grad = false);

  // Builds an op result. Records `inputs` and `backward` on the graph when
  // gradients are enabled and some input requires them.
  static Tensor FromOp(Shape shape, std::vector<double> values,
                       const std::vector<Tensor>& inputs,
                       std::function<void(internal::Node&)> backward);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t size() const;

  std::span<const double> values() const;
  // Direct write access. Intended for leaves (parameter init, optimizers,
  // finite-difference probes); mutating an interior node does not update
  // its consumers.
  std::span<double> mutable_values();
  double item() const;

  bool requires_grad() const;
  bool has_grad() const;
  std::span<const double> grad() const;
  std::span<double> mutable_grad();
  void ZeroGrad();

  // Accumulates d(this)/d(leaf) into every reachable leaf that requires a
  // gradient. `this` must hold exactly one element.
  void Backward() const;

  // Same values, no graph history, no gradient.
  Tensor Detach() const;

  internal::Node* node() const { return node_.get(); }
  const std::shared_ptr<internal::Node>& shared_node() const { return node_; }

 private:
  explicit Tensor(std::shared_ptr<internal::Node> node)
      : node_(std::move(node)) {}

  std::shared_ptr<internal::Node> node_;
};

}  // namespace framebert

#endif  // FRAMEBERT_TENSOR_H_
