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

#ifndef FRAMEBERT_OPS_H_
#define FRAMEBERT_OPS_H_

// Differentiable tensor operations. Every op validates extents and throws
// DimensionError naming the offending shapes.

#include <cstddef>
#include <span>
#include <vector>

#include "framebert/tensor.h"

namespace framebert {

// Clamp applied to probabilities before taking logs in both cross-entropies.
inline constexpr double kLogClamp = 1e-7;

// [m x k] x [k x n] -> [m x n].
Tensor MatMul(const Tensor& a, const Tensor& b);

// x [..., in] * weight[out x in]^T + bias[out] -> [..., out]. `bias` may be
// an undefined tensor.
Tensor Linear(const Tensor& x, const Tensor& weight, const Tensor& bias);

Tensor Add(const Tensor& a, const Tensor& b);
Tensor Sub(const Tensor& a, const Tensor& b);
Tensor Mul(const Tensor& a, const Tensor& b);
Tensor Scale(const Tensor& a, double factor);

// Reductions to a single-element tensor.
Tensor Sum(const Tensor& a);
Tensor Mean(const Tensor& a);

Tensor Reshape(const Tensor& a, Shape shape);

// Joins tensors along `axis`; all other extents must agree.
Tensor Concat(const std::vector<Tensor>& parts, std::size_t axis);

Tensor Softmax(const Tensor& a, std::size_t axis);
Tensor Sigmoid(const Tensor& a);
Tensor Gelu(const Tensor& a);

// Normalizes over the last axis.
Tensor LayerNorm(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                 double eps = 1e-5);

// Rows of table [vocab x d] selected by ids -> [ids.size() x d]. Throws
// VocabularyError for ids outside the table.
Tensor Embedding(const Tensor& table, std::span<const int> ids);

// Selects slices along axis 0: out[i] = x[indices[i]].
Tensor IndexRows(const Tensor& x, std::span<const std::size_t> indices);

// Multi-head scaled dot-product attention over [batch x seq x d] inputs.
// `mask` is [batch x seq]; keys with mask 0 are never attended to.
Tensor SelfAttention(const Tensor& q, const Tensor& k, const Tensor& v,
                     std::span<const int> mask, std::size_t heads);

// Mean over elements of -[y log p + (1-y) log(1-p)], p clamped to
// [kLogClamp, 1 - kLogClamp]. Targets must be exactly 0 or 1.
Tensor BinaryCrossEntropy(const Tensor& pred, std::span<const double> target);
// Same terms, summed instead of averaged.
Tensor BinaryCrossEntropySum(const Tensor& pred,
                             std::span<const double> target);

// Mean over rows of -log p[row, gold[row]] for probabilities [n x classes].
Tensor CategoricalCrossEntropy(const Tensor& probs, std::span<const int> gold);

}  // namespace framebert

#endif  // FRAMEBERT_OPS_H_
