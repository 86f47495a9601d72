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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "framebert/kernels.h"

namespace framebert::kernels {

namespace {

// Below this many multiply-adds a parallel region costs more than it saves.
constexpr std::size_t kParallelWork = 1 << 15;

using Index = std::int64_t;

}  // namespace

void Gemm(bool trans_a, bool trans_b, std::size_t m, std::size_t n,
          std::size_t k, std::span<const double> a, std::span<const double> b,
          std::span<double> c, bool accumulate) {
  const Index rows = static_cast<Index>(m);
  const bool parallel = m * n * k >= kParallelWork;
  const double* ap = a.data();
  const double* bp = b.data();
  double* cp = c.data();

  if (!trans_b) {
    // Row of C accumulates scaled rows of B; the inner loop is contiguous.
#pragma omp parallel for schedule(static) if (parallel)
    for (Index i = 0; i < rows; ++i) {
      double* crow = cp + i * n;
      if (!accumulate) std::fill(crow, crow + n, 0.0);
      for (std::size_t p = 0; p < k; ++p) {
        const double av = trans_a ? ap[p * m + i] : ap[i * k + p];
        const double* brow = bp + p * n;
        for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
      }
    }
    return;
  }

  if (!trans_a) {
    // C = A B^T: every entry is a dot product of two contiguous rows.
#pragma omp parallel for schedule(static) if (parallel)
    for (Index i = 0; i < rows; ++i) {
      const double* arow = ap + i * k;
      double* crow = cp + i * n;
      for (std::size_t j = 0; j < n; ++j) {
        const double* brow = bp + j * k;
        double sum = 0.0;
        for (std::size_t p = 0; p < k; ++p) sum += arow[p] * brow[p];
        crow[j] = accumulate ? crow[j] + sum : sum;
      }
    }
    return;
  }

#pragma omp parallel for schedule(static) if (parallel)
  for (Index i = 0; i < rows; ++i) {
    double* crow = cp + i * n;
    for (std::size_t j = 0; j < n; ++j) {
      const double* brow = bp + j * k;
      double sum = 0.0;
      for (std::size_t p = 0; p < k; ++p) sum += ap[p * m + i] * brow[p];
      crow[j] = accumulate ? crow[j] + sum : sum;
    }
  }
}

void SoftmaxRows(std::size_t rows, std::size_t cols,
                 std::span<const double> in, std::span<double> out) {
  const bool parallel = rows * cols >= kParallelWork;
#pragma omp parallel for schedule(static) if (parallel)
  for (Index r = 0; r < static_cast<Index>(rows); ++r) {
    const double* x = in.data() + r * cols;
    double* y = out.data() + r * cols;
    const double max = *std::max_element(x, x + cols);
    double total = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      y[j] = std::exp(x[j] - max);
      total += y[j];
    }
    const double inv = 1.0 / total;
    for (std::size_t j = 0; j < cols; ++j) y[j] *= inv;
  }
}

void SoftmaxRowsBackward(std::size_t rows, std::size_t cols,
                         std::span<const double> out,
                         std::span<const double> grad_out,
                         std::span<double> grad_in) {
  const bool parallel = rows * cols >= kParallelWork;
#pragma omp parallel for schedule(static) if (parallel)
  for (Index r = 0; r < static_cast<Index>(rows); ++r) {
    const double* y = out.data() + r * cols;
    const double* gy = grad_out.data() + r * cols;
    double* gx = grad_in.data() + r * cols;
    double dot = 0.0;
    for (std::size_t j = 0; j < cols; ++j) dot += y[j] * gy[j];
    for (std::size_t j = 0; j < cols; ++j) gx[j] += y[j] * (gy[j] - dot);
  }
}

void LayerNormForward(std::size_t rows, std::size_t cols, double eps,
                      std::span<const double> x, std::span<const double> gamma,
                      std::span<const double> beta, std::span<double> y,
                      std::span<double> mean, std::span<double> rstd) {
  const bool parallel = rows * cols >= kParallelWork;
  const double inv_n = 1.0 / static_cast<double>(cols);
#pragma omp parallel for schedule(static) if (parallel)
  for (Index r = 0; r < static_cast<Index>(rows); ++r) {
    const double* xr = x.data() + r * cols;
    double* yr = y.data() + r * cols;
    double mu = 0.0;
    for (std::size_t j = 0; j < cols; ++j) mu += xr[j];
    mu *= inv_n;
    double var = 0.0;
    for (std::size_t j = 0; j < cols; ++j) var += (xr[j] - mu) * (xr[j] - mu);
    var *= inv_n;
    const double rs = 1.0 / std::sqrt(var + eps);
    mean[r] = mu;
    rstd[r] = rs;
    for (std::size_t j = 0; j < cols; ++j) {
      yr[j] = gamma[j] * (xr[j] - mu) * rs + beta[j];
    }
  }
}

void LayerNormBackward(std::size_t rows, std::size_t cols,
                       std::span<const double> x, std::span<const double> gamma,
                       std::span<const double> mean,
                       std::span<const double> rstd,
                       std::span<const double> grad_y,
                       std::span<double> grad_x, std::span<double> grad_gamma,
                       std::span<double> grad_beta) {
  const bool parallel = rows * cols >= kParallelWork;
  const double inv_n = 1.0 / static_cast<double>(cols);
  if (!grad_x.empty()) {
#pragma omp parallel for schedule(static) if (parallel)
    for (Index r = 0; r < static_cast<Index>(rows); ++r) {
      const double* xr = x.data() + r * cols;
      const double* gy = grad_y.data() + r * cols;
      double* gx = grad_x.data() + r * cols;
      double sum_g = 0.0;
      double sum_gx = 0.0;
      for (std::size_t j = 0; j < cols; ++j) {
        const double xhat = (xr[j] - mean[r]) * rstd[r];
        const double g = gy[j] * gamma[j];
        sum_g += g;
        sum_gx += g * xhat;
      }
      for (std::size_t j = 0; j < cols; ++j) {
        const double xhat = (xr[j] - mean[r]) * rstd[r];
        const double g = gy[j] * gamma[j];
        gx[j] += rstd[r] * (g - sum_g * inv_n - xhat * sum_gx * inv_n);
      }
    }
  }
  if (grad_gamma.empty() && grad_beta.empty()) return;
  // Column reductions; each column is owned by one thread and summed in
  // row order.
#pragma omp parallel for schedule(static) if (parallel)
  for (Index j = 0; j < static_cast<Index>(cols); ++j) {
    double sg = 0.0;
    double sb = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      const double gy = grad_y[r * cols + j];
      sg += gy * (x[r * cols + j] - mean[r]) * rstd[r];
      sb += gy;
    }
    if (!grad_gamma.empty()) grad_gamma[j] += sg;
    if (!grad_beta.empty()) grad_beta[j] += sb;
  }
}

void GeluForward(std::span<const double> x, std::span<double> y) {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const bool parallel = x.size() >= kParallelWork;
#pragma omp parallel for schedule(static) if (parallel)
  for (Index i = 0; i < static_cast<Index>(x.size()); ++i) {
    y[i] = 0.5 * x[i] * (1.0 + std::erf(x[i] * inv_sqrt2));
  }
}

void GeluBackward(std::span<const double> x, std::span<const double> grad_y,
                  std::span<double> grad_x) {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const double inv_sqrt2pi = 1.0 / std::sqrt(2.0 * M_PI);
  const bool parallel = x.size() >= kParallelWork;
#pragma omp parallel for schedule(static) if (parallel)
  for (Index i = 0; i < static_cast<Index>(x.size()); ++i) {
    const double cdf = 0.5 * (1.0 + std::erf(x[i] * inv_sqrt2));
    const double pdf = inv_sqrt2pi * std::exp(-0.5 * x[i] * x[i]);
    grad_x[i] += grad_y[i] * (cdf + x[i] * pdf);
  }
}

namespace {

// Copies the columns of one head of one batch row-block into a dense
// [seq x head_dim] buffer.
void GatherHead(const AttentionShape& s, std::span<const double> src,
                std::size_t b, std::size_t h, double* dst) {
  const std::size_t d = s.heads * s.head_dim;
  for (std::size_t i = 0; i < s.seq; ++i) {
    const double* row = src.data() + (b * s.seq + i) * d + h * s.head_dim;
    std::copy(row, row + s.head_dim, dst + i * s.head_dim);
  }
}

void ScatterAddHead(const AttentionShape& s, const double* src, std::size_t b,
                    std::size_t h, std::span<double> dst) {
  const std::size_t d = s.heads * s.head_dim;
  for (std::size_t i = 0; i < s.seq; ++i) {
    double* row = dst.data() + (b * s.seq + i) * d + h * s.head_dim;
    for (std::size_t c = 0; c < s.head_dim; ++c) row[c] += src[i * s.head_dim + c];
  }
}

}  // namespace

void AttentionForward(const AttentionShape& s, std::span<const double> q,
                      std::span<const double> k, std::span<const double> v,
                      std::span<const int> mask, std::span<double> probs,
                      std::span<double> out) {
  const std::size_t d = s.heads * s.head_dim;
  const std::size_t dh = s.head_dim;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const Index pairs = static_cast<Index>(s.batch * s.heads);
  const bool parallel = s.batch * s.heads * s.seq * s.seq * dh >= kParallelWork;

#pragma omp parallel if (parallel)
  {
    std::vector<double> qh(s.seq * dh), kh(s.seq * dh), vh(s.seq * dh);
#pragma omp for schedule(static)
    for (Index pair = 0; pair < pairs; ++pair) {
      const std::size_t b = static_cast<std::size_t>(pair) / s.heads;
      const std::size_t h = static_cast<std::size_t>(pair) % s.heads;
      GatherHead(s, q, b, h, qh.data());
      GatherHead(s, k, b, h, kh.data());
      GatherHead(s, v, b, h, vh.data());
      const int* m = mask.data() + b * s.seq;
      double* p = probs.data() + (b * s.heads + h) * s.seq * s.seq;
      for (std::size_t i = 0; i < s.seq; ++i) {
        double* prow = p + i * s.seq;
        double max = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < s.seq; ++j) {
          if (m[j] == 0) continue;
          double dot = 0.0;
          for (std::size_t c = 0; c < dh; ++c) dot += qh[i * dh + c] * kh[j * dh + c];
          prow[j] = dot * scale;
          max = std::max(max, prow[j]);
        }
        double total = 0.0;
        for (std::size_t j = 0; j < s.seq; ++j) {
          prow[j] = m[j] == 0 ? 0.0 : std::exp(prow[j] - max);
          total += prow[j];
        }
        const double inv = 1.0 / total;
        for (std::size_t j = 0; j < s.seq; ++j) prow[j] *= inv;
        double* orow = out.data() + (b * s.seq + i) * d + h * dh;
        std::fill(orow, orow + dh, 0.0);
        for (std::size_t j = 0; j < s.seq; ++j) {
          const double pj = prow[j];
          for (std::size_t c = 0; c < dh; ++c) orow[c] += pj * vh[j * dh + c];
        }
      }
    }
  }
}

void AttentionBackward(const AttentionShape& s, std::span<const double> q,
                       std::span<const double> k, std::span<const double> v,
                       std::span<const double> probs,
                       std::span<const double> grad_out,
                       std::span<double> grad_q, std::span<double> grad_k,
                       std::span<double> grad_v) {
  const std::size_t dh = s.head_dim;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const Index pairs = static_cast<Index>(s.batch * s.heads);
  const bool parallel = s.batch * s.heads * s.seq * s.seq * dh >= kParallelWork;

#pragma omp parallel if (parallel)
  {
    const std::size_t block = s.seq * dh;
    std::vector<double> qh(block), kh(block), vh(block), go(block);
    std::vector<double> gq(block), gk(block), gv(block), ds(s.seq);
#pragma omp for schedule(static)
    for (Index pair = 0; pair < pairs; ++pair) {
      const std::size_t b = static_cast<std::size_t>(pair) / s.heads;
      const std::size_t h = static_cast<std::size_t>(pair) % s.heads;
      GatherHead(s, q, b, h, qh.data());
      GatherHead(s, k, b, h, kh.data());
      GatherHead(s, v, b, h, vh.data());
      GatherHead(s, grad_out, b, h, go.data());
      std::fill(gq.begin(), gq.end(), 0.0);
      std::fill(gk.begin(), gk.end(), 0.0);
      std::fill(gv.begin(), gv.end(), 0.0);
      const double* p = probs.data() + (b * s.heads + h) * s.seq * s.seq;
      for (std::size_t i = 0; i < s.seq; ++i) {
        const double* prow = p + i * s.seq;
        const double* goi = go.data() + i * dh;
        double dot = 0.0;
        for (std::size_t j = 0; j < s.seq; ++j) {
          double acc = 0.0;
          for (std::size_t c = 0; c < dh; ++c) acc += goi[c] * vh[j * dh + c];
          ds[j] = acc;
          dot += prow[j] * acc;
        }
        for (std::size_t j = 0; j < s.seq; ++j) {
          const double pj = prow[j];
          if (pj == 0.0) continue;
          const double dsj = pj * (ds[j] - dot) * scale;
          for (std::size_t c = 0; c < dh; ++c) {
            gq[i * dh + c] += dsj * kh[j * dh + c];
            gk[j * dh + c] += dsj * qh[i * dh + c];
            gv[j * dh + c] += pj * goi[c];
          }
        }
      }
      if (!grad_q.empty()) ScatterAddHead(s, gq.data(), b, h, grad_q);
      if (!grad_k.empty()) ScatterAddHead(s, gk.data(), b, h, grad_k);
      if (!grad_v.empty()) ScatterAddHead(s, gv.data(), b, h, grad_v);
    }
  }
}

}  // namespace framebert::kernels
