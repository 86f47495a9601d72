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

#ifndef FRAMEBERT_KERNELS_H_
#define FRAMEBERT_KERNELS_H_

// Dense row-major compute kernels. The functions in `framebert::kernels`
// are the OpenMP-parallel versions used by the tensor library. The ones in
// `framebert::kernels::reference` are plain serial loops kept as the test
// oracle and benchmark baseline; they must agree with the parallel kernels
// to rounding.
//
// Every parallel kernel assigns each output element to exactly one thread
// and accumulates it in a fixed order, so results are bitwise reproducible
// regardless of the thread count.

#include <cstddef>
#include <span>

namespace framebert::kernels {

// C[m x n] = op(A) * op(B) (+ C when `accumulate`), op = transpose if flagged.
// A is [m x k] (or [k x m] when trans_a); B is [k x n] (or [n x k]).
void Gemm(bool trans_a, bool trans_b, std::size_t m, std::size_t n,
          std::size_t k, std::span<const double> a, std::span<const double> b,
          std::span<double> c, bool accumulate);

// Row-wise softmax with max subtraction.
void SoftmaxRows(std::size_t rows, std::size_t cols,
                 std::span<const double> in, std::span<double> out);

// grad_in (+)= softmax Jacobian^T grad_out, given the softmax output.
void SoftmaxRowsBackward(std::size_t rows, std::size_t cols,
                         std::span<const double> out,
                         std::span<const double> grad_out,
                         std::span<double> grad_in);

// y = gamma * (x - mean) * rstd + beta over each row. Saves mean and rstd.
void LayerNormForward(std::size_t rows, std::size_t cols, double eps,
                      std::span<const double> x, std::span<const double> gamma,
                      std::span<const double> beta, std::span<double> y,
                      std::span<double> mean, std::span<double> rstd);

// Accumulates into grad_x, grad_gamma and grad_beta. Any of the spans may be
// empty to skip that gradient.
void LayerNormBackward(std::size_t rows, std::size_t cols,
                       std::span<const double> x, std::span<const double> gamma,
                       std::span<const double> mean,
                       std::span<const double> rstd,
                       std::span<const double> grad_y,
                       std::span<double> grad_x, std::span<double> grad_gamma,
                       std::span<double> grad_beta);

// Exact (erf) GELU.
void GeluForward(std::span<const double> x, std::span<double> y);
void GeluBackward(std::span<const double> x, std::span<const double> grad_y,
                  std::span<double> grad_x);

// Multi-head scaled dot-product self-attention over q, k, v of shape
// [batch x seq x heads*head_dim]. mask is [batch x seq]; keys with mask 0
// receive exactly zero probability. probs is [batch x heads x seq x seq].
struct AttentionShape {
  std::size_t batch;
  std::size_t seq;
  std::size_t heads;
  std::size_t head_dim;
};

void AttentionForward(const AttentionShape& s, std::span<const double> q,
                      std::span<const double> k, std::span<const double> v,
                      std::span<const int> mask, std::span<double> probs,
                      std::span<double> out);

// Accumulates into grad_q, grad_k, grad_v (empty span skips).
void AttentionBackward(const AttentionShape& s, std::span<const double> q,
                       std::span<const double> k, std::span<const double> v,
                       std::span<const double> probs,
                       std::span<const double> grad_out,
                       std::span<double> grad_q, std::span<double> grad_k,
                       std::span<double> grad_v);

namespace reference {

void Gemm(bool trans_a, bool trans_b, std::size_t m, std::size_t n,
          std::size_t k, std::span<const double> a, std::span<const double> b,
          std::span<double> c, bool accumulate);
void SoftmaxRows(std::size_t rows, std::size_t cols,
                 std::span<const double> in, std::span<double> out);
void SoftmaxRowsBackward(std::size_t rows, std::size_t cols,
                         std::span<const double> out,
                         std::span<const double> grad_out,
                         std::span<double> grad_in);
void LayerNormForward(std::size_t rows, std::size_t cols, double eps,
                      std::span<const double> x, std::span<const double> gamma,
                      std::span<const double> beta, std::span<double> y,
                      std::span<double> mean, std::span<double> rstd);
void LayerNormBackward(std::size_t rows, std::size_t cols,
                       std::span<const double> x, std::span<const double> gamma,
                       std::span<const double> mean,
                       std::span<const double> rstd,
                       std::span<const double> grad_y,
                       std::span<double> grad_x, std::span<double> grad_gamma,
                       std::span<double> grad_beta);
void GeluForward(std::span<const double> x, std::span<double> y);
void GeluBackward(std::span<const double> x, std::span<const double> grad_y,
                  std::span<double> grad_x);
void AttentionForward(const AttentionShape& s, std::span<const double> q,
                      std::span<const double> k, std::span<const double> v,
                      std::span<const int> mask, std::span<double> probs,
                      std::span<double> out);
void AttentionBackward(const AttentionShape& s, std::span<const double> q,
                       std::span<const double> k, std::span<const double> v,
                       std::span<const double> probs,
                       std::span<const double> grad_out,
                       std::span<double> grad_q, std::span<double> grad_k,
                       std::span<double> grad_v);

}  // namespace reference

}  // namespace framebert::kernels

#endif  // FRAMEBERT_KERNELS_H_
