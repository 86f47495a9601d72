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

// Serial reference kernels. Straightforward loops, no blocking, no threads.

#include <cmath>
#include <limits>
#include <vector>

#include "framebert/kernels.h"

namespace framebert::kernels::reference {

void Gemm(bool trans_a, bool trans_b, std::size_t m, std::size_t n,
          std::size_t k, std::span<const double> a, std::span<const double> b,
          std::span<double> c, bool accumulate) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double sum = 0.0;
      for (std::size_t p = 0; p < k; ++p) {
        double av = trans_a ? a[p * m + i] : a[i * k + p];
        double bv = trans_b ? b[j * k + p] : b[p * n + j];
        sum += av * bv;
      }
      c[i * n + j] = accumulate ? c[i * n + j] + sum : sum;
    }
  }
}

void SoftmaxRows(std::size_t rows, std::size_t cols,
                 std::span<const double> in, std::span<double> out) {
  for (std::size_t r = 0; r < rows; ++r) {
    double max = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < cols; ++j) max = std::max(max, in[r * cols + j]);
    double total = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      out[r * cols + j] = std::exp(in[r * cols + j] - max);
      total += out[r * cols + j];
    }
    for (std::size_t j = 0; j < cols; ++j) out[r * cols + j] /= total;
  }
}

void SoftmaxRowsBackward(std::size_t rows, std::size_t cols,
                         std::span<const double> out,
                         std::span<const double> grad_out,
                         std::span<double> grad_in) {
  for (std::size_t r = 0; r < rows; ++r) {
    double dot = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      dot += out[r * cols + j] * grad_out[r * cols + j];
    }
    for (std::size_t j = 0; j < cols; ++j) {
      grad_in[r * cols + j] += out[r * cols + j] * (grad_out[r * cols + j] - dot);
    }
  }
}

void LayerNormForward(std::size_t rows, std::size_t cols, double eps,
                      std::span<const double> x, std::span<const double> gamma,
                      std::span<const double> beta, std::span<double> y,
                      std::span<double> mean, std::span<double> rstd) {
  for (std::size_t r = 0; r < rows; ++r) {
    double mu = 0.0;
    for (std::size_t j = 0; j < cols; ++j) mu += x[r * cols + j];
    mu /= static_cast<double>(cols);
    double var = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      double d = x[r * cols + j] - mu;
      var += d * d;
    }
    var /= static_cast<double>(cols);
    double rs = 1.0 / std::sqrt(var + eps);
    mean[r] = mu;
    rstd[r] = rs;
    for (std::size_t j = 0; j < cols; ++j) {
      y[r * cols + j] = gamma[j] * (x[r * cols + j] - mu) * rs + beta[j];
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
  const double n = static_cast<double>(cols);
  for (std::size_t r = 0; r < rows; ++r) {
    double sum_g = 0.0;
    double sum_gx = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      double xhat = (x[r * cols + j] - mean[r]) * rstd[r];
      double g = grad_y[r * cols + j] * gamma[j];
      sum_g += g;
      sum_gx += g * xhat;
      if (!grad_gamma.empty()) grad_gamma[j] += grad_y[r * cols + j] * xhat;
      if (!grad_beta.empty()) grad_beta[j] += grad_y[r * cols + j];
    }
    if (grad_x.empty()) continue;
    for (std::size_t j = 0; j < cols; ++j) {
      double xhat = (x[r * cols + j] - mean[r]) * rstd[r];
      double g = grad_y[r * cols + j] * gamma[j];
      grad_x[r * cols + j] += rstd[r] * (g - sum_g / n - xhat * sum_gx / n);
    }
  }
}

void GeluForward(std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = 0.5 * x[i] * (1.0 + std::erf(x[i] / std::sqrt(2.0)));
  }
}

void GeluBackward(std::span<const double> x, std::span<const double> grad_y,
                  std::span<double> grad_x) {
  const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * M_PI);
  for (std::size_t i = 0; i < x.size(); ++i) {
    double cdf = 0.5 * (1.0 + std::erf(x[i] / std::sqrt(2.0)));
    double pdf = kInvSqrt2Pi * std::exp(-0.5 * x[i] * x[i]);
    grad_x[i] += grad_y[i] * (cdf + x[i] * pdf);
  }
}

void AttentionForward(const AttentionShape& s, std::span<const double> q,
                      std::span<const double> k, std::span<const double> v,
                      std::span<const int> mask, std::span<double> probs,
                      std::span<double> out) {
  const std::size_t d = s.heads * s.head_dim;
  const double scale = 1.0 / std::sqrt(static_cast<double>(s.head_dim));
  std::vector<double> scores(s.seq);
  for (std::size_t b = 0; b < s.batch; ++b) {
    for (std::size_t h = 0; h < s.heads; ++h) {
      for (std::size_t i = 0; i < s.seq; ++i) {
        double max = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < s.seq; ++j) {
          if (mask[b * s.seq + j] == 0) continue;
          double dot = 0.0;
          for (std::size_t c = 0; c < s.head_dim; ++c) {
            std::size_t col = h * s.head_dim + c;
            dot += q[(b * s.seq + i) * d + col] * k[(b * s.seq + j) * d + col];
          }
          scores[j] = dot * scale;
          max = std::max(max, scores[j]);
        }
        double total = 0.0;
        double* p = &probs[((b * s.heads + h) * s.seq + i) * s.seq];
        for (std::size_t j = 0; j < s.seq; ++j) {
          p[j] = mask[b * s.seq + j] == 0 ? 0.0 : std::exp(scores[j] - max);
          total += p[j];
        }
        for (std::size_t j = 0; j < s.seq; ++j) p[j] /= total;
        for (std::size_t c = 0; c < s.head_dim; ++c) {
          std::size_t col = h * s.head_dim + c;
          double acc = 0.0;
          for (std::size_t j = 0; j < s.seq; ++j) {
            acc += p[j] * v[(b * s.seq + j) * d + col];
          }
          out[(b * s.seq + i) * d + col] = acc;
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
  const std::size_t d = s.heads * s.head_dim;
  const double scale = 1.0 / std::sqrt(static_cast<double>(s.head_dim));
  std::vector<double> dp(s.seq);
  for (std::size_t b = 0; b < s.batch; ++b) {
    for (std::size_t h = 0; h < s.heads; ++h) {
      for (std::size_t i = 0; i < s.seq; ++i) {
        const double* p = &probs[((b * s.heads + h) * s.seq + i) * s.seq];
        double dot = 0.0;
        for (std::size_t j = 0; j < s.seq; ++j) {
          double acc = 0.0;
          for (std::size_t c = 0; c < s.head_dim; ++c) {
            std::size_t col = h * s.head_dim + c;
            acc += grad_out[(b * s.seq + i) * d + col] *
                   v[(b * s.seq + j) * d + col];
          }
          dp[j] = acc;
          dot += p[j] * acc;
        }
        for (std::size_t j = 0; j < s.seq; ++j) {
          double ds = p[j] * (dp[j] - dot) * scale;
          for (std::size_t c = 0; c < s.head_dim; ++c) {
            std::size_t col = h * s.head_dim + c;
            std::size_t qi = (b * s.seq + i) * d + col;
            std::size_t kj = (b * s.seq + j) * d + col;
            if (!grad_q.empty()) grad_q[qi] += ds * k[kj];
            if (!grad_k.empty()) grad_k[kj] += ds * q[qi];
            if (!grad_v.empty()) grad_v[kj] += p[j] * grad_out[qi];
          }
        }
      }
    }
  }
}

}  // namespace framebert::kernels::reference
