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

#include "framebert/tensor.h"

#include <algorithm>
#include <sstream>
#include <unordered_set>

#include "framebert/errors.h"

namespace framebert {

namespace {

thread_local bool grad_enabled = true;

void CheckShape(const Shape& shape, std::size_t count) {
  for (std::size_t extent : shape) {
    if (extent == 0) {
      throw DimensionError("tensor extents must be positive, got " +
                           ShapeToString(shape));
    }
  }
  if (NumElements(shape) != count) {
    throw DimensionError("shape " + ShapeToString(shape) + " needs " +
                         std::to_string(NumElements(shape)) + " values, got " +
                         std::to_string(count));
  }
}

}  // namespace

std::size_t NumElements(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t extent : shape) n *= extent;
  return n;
}

std::string ShapeToString(const Shape& shape) {
  std::ostringstream out;
  out << "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) out << "x";
    out << shape[i];
  }
  out << "]";
  return out.str();
}

std::span<double> internal::Node::EnsureGrad() {
  if (grad.size() != values.size()) grad.assign(values.size(), 0.0);
  return grad;
}

bool GradEnabled() { return grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(grad_enabled) { grad_enabled = false; }
NoGradGuard::~NoGradGuard() { grad_enabled = previous_; }

Tensor::Tensor(Shape shape, std::vector<double> values, bool requires_grad) {
  CheckShape(shape, values.size());
  auto node = std::make_shared<internal::Node>();
  node->shape = std::move(shape);
  node->values = std::move(values);
  node->requires_grad = requires_grad;
  if (requires_grad) node->EnsureGrad();
  node_ = std::move(node);
}

Tensor Tensor::Zeros(Shape shape, bool requires_grad) {
  std::size_t n = NumElements(shape);
  return Tensor(std::move(shape), std::vector<double>(n, 0.0), requires_grad);
}

Tensor Tensor::Full(Shape shape, double value, bool requires_grad) {
  std::size_t n = NumElements(shape);
  return Tensor(std::move(shape), std::vector<double>(n, value), requires_grad);
}

Tensor Tensor::Scalar(double value, bool requires_grad) {
  return Tensor({1}, {value}, requires_grad);
}

Tensor Tensor::FromOp(Shape shape, std::vector<double> values,
                      const std::vector<Tensor>& inputs,
                      std::function<void(internal::Node&)> backward) {
  CheckShape(shape, values.size());
  auto node = std::make_shared<internal::Node>();
  node->shape = std::move(shape);
  node->values = std::move(values);
  node->is_leaf = false;
  if (GradEnabled()) {
    bool any = std::any_of(inputs.begin(), inputs.end(), [](const Tensor& t) {
      return t.defined() && t.requires_grad();
    });
    if (any) {
      node->requires_grad = true;
      node->parents.reserve(inputs.size());
      for (const Tensor& t : inputs) node->parents.push_back(t.node_);
      node->backward = std::move(backward);
    }
  }
  return Tensor(std::move(node));
}

const Shape& Tensor::shape() const { return node_->shape; }

std::size_t Tensor::dim(std::size_t axis) const {
  if (axis >= rank()) {
    throw DimensionError("axis " + std::to_string(axis) + " out of range for " +
                         ShapeToString(shape()));
  }
  return node_->shape[axis];
}

std::size_t Tensor::size() const { return node_->values.size(); }

std::span<const double> Tensor::values() const { return node_->values; }

std::span<double> Tensor::mutable_values() { return node_->values; }

double Tensor::item() const {
  if (size() != 1) {
    throw UsageError("item() on tensor of shape " + ShapeToString(shape()));
  }
  return node_->values[0];
}

bool Tensor::requires_grad() const { return node_->requires_grad; }

bool Tensor::has_grad() const {
  return node_->requires_grad && node_->grad.size() == node_->values.size();
}

std::span<const double> Tensor::grad() const {
  if (!has_grad()) throw UsageError("tensor has no gradient buffer");
  return node_->grad;
}

std::span<double> Tensor::mutable_grad() {
  if (!has_grad()) throw UsageError("tensor has no gradient buffer");
  return node_->grad;
}

void Tensor::ZeroGrad() {
  if (node_->requires_grad) std::fill(node_->grad.begin(), node_->grad.end(), 0.0);
}

void Tensor::Backward() const {
  if (size() != 1) {
    throw UsageError("Backward() needs a scalar, got shape " +
                     ShapeToString(shape()));
  }
  if (!node_->requires_grad) return;

  // Iterative post-order DFS gives a topological order (parents first).
  std::vector<internal::Node*> order;
  std::unordered_set<internal::Node*> visited;
  std::vector<std::pair<internal::Node*, std::size_t>> stack;
  stack.emplace_back(node_.get(), 0);
  visited.insert(node_.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      internal::Node* parent = node->parents[next++].get();
      if (parent->requires_grad && visited.insert(parent).second) {
        stack.emplace_back(parent, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  // Interior gradients are recomputed from scratch on every call; leaf
  // gradients accumulate until ZeroGrad().
  for (internal::Node* node : order) {
    if (!node->is_leaf) {
      node->grad.assign(node->values.size(), 0.0);
    }
  }
  node_->EnsureGrad()[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    internal::Node* node = *it;
    if (node->backward) node->backward(*node);
  }
}

Tensor Tensor::Detach() const {
  return Tensor(node_->shape, node_->values, false);
}

}  // namespace framebert
