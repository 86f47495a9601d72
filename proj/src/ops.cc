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

#include "framebert/ops.h"

#include <algorithm>
#include <cmath>
#include <memory>

#include "framebert/errors.h"
#include "framebert/kernels.h"

namespace framebert {

namespace {

using internal::Node;

// Gradient buffer of parent `i`, or an empty span if it needs none.
std::span<double> ParentGrad(Node& self, std::size_t i) {
  Node& parent = *self.parents[i];
  if (!parent.requires_grad) return {};
  return parent.EnsureGrad();
}

std::span<const double> ParentValues(const Node& self, std::size_t i) {
  return self.parents[i]->values;
}

void RequireSameShape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": shapes " +
                         ShapeToString(a.shape()) + " and " +
                         ShapeToString(b.shape()) + " differ");
  }
}

double StableSigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

double ClampProb(double p) {
  return std::clamp(p, kLogClamp, 1.0 - kLogClamp);
}

void CheckBinaryTargets(const Tensor& pred, std::span<const double> target) {
  if (target.size() != pred.size()) {
    throw DimensionError("binary cross-entropy: " +
                         std::to_string(target.size()) + " targets for pred " +
                         ShapeToString(pred.shape()));
  }
  for (double y : target) {
    if (y != 0.0 && y != 1.0) {
      throw DomainError("binary cross-entropy target must be 0 or 1, got " +
                        std::to_string(y));
    }
  }
}

Tensor BinaryCrossEntropyScaled(const Tensor& pred,
                                std::span<const double> target, double scale) {
  CheckBinaryTargets(pred, target);
  std::span<const double> p = pred.values();
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double pc = ClampProb(p[i]);
    total -= target[i] * std::log(pc) + (1.0 - target[i]) * std::log(1.0 - pc);
  }
  std::vector<double> y(target.begin(), target.end());
  return Tensor::FromOp(
      {1}, {total * scale}, {pred},
      [y = std::move(y), scale](Node& self) {
        std::span<double> gp = ParentGrad(self, 0);
        if (gp.empty()) return;
        std::span<const double> pv = ParentValues(self, 0);
        const double g = self.grad[0] * scale;
        for (std::size_t i = 0; i < pv.size(); ++i) {
          // The clamp is flat outside [eps, 1 - eps].
          if (pv[i] < kLogClamp || pv[i] > 1.0 - kLogClamp) continue;
          gp[i] += g * (-y[i] / pv[i] + (1.0 - y[i]) / (1.0 - pv[i]));
        }
      });
}

}  // namespace

Tensor MatMul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0)) {
    throw DimensionError("matmul: cannot multiply " + ShapeToString(a.shape()) +
                         " by " + ShapeToString(b.shape()));
  }
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  std::vector<double> out(m * n);
  kernels::Gemm(false, false, m, n, k, a.values(), b.values(), out, false);
  return Tensor::FromOp({m, n}, std::move(out), {a, b}, [m, n, k](Node& self) {
    std::span<double> ga = ParentGrad(self, 0);
    std::span<double> gb = ParentGrad(self, 1);
    if (!ga.empty()) {
      kernels::Gemm(false, true, m, k, n, self.grad, ParentValues(self, 1), ga,
                    true);
    }
    if (!gb.empty()) {
      kernels::Gemm(true, false, k, n, m, ParentValues(self, 0), self.grad, gb,
                    true);
    }
  });
}

Tensor Linear(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  if (weight.rank() != 2 || x.rank() == 0 || x.shape().back() != weight.dim(1)) {
    throw DimensionError("linear: input " + ShapeToString(x.shape()) +
                         " does not match weight " +
                         ShapeToString(weight.shape()));
  }
  const std::size_t in = weight.dim(1), out = weight.dim(0);
  const std::size_t rows = x.size() / in;
  if (bias.defined() && (bias.rank() != 1 || bias.dim(0) != out)) {
    throw DimensionError("linear: bias " + ShapeToString(bias.shape()) +
                         " does not match weight " +
                         ShapeToString(weight.shape()));
  }
  std::vector<double> y(rows * out);
  kernels::Gemm(false, true, rows, out, in, x.values(), weight.values(), y,
                false);
  if (bias.defined()) {
    std::span<const double> bv = bias.values();
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t j = 0; j < out; ++j) y[r * out + j] += bv[j];
    }
  }
  Shape shape = x.shape();
  shape.back() = out;
  std::vector<Tensor> inputs = {x, weight};
  if (bias.defined()) inputs.push_back(bias);
  const bool has_bias = bias.defined();
  return Tensor::FromOp(
      std::move(shape), std::move(y), inputs,
      [rows, in, out, has_bias](Node& self) {
        std::span<double> gx = ParentGrad(self, 0);
        std::span<double> gw = ParentGrad(self, 1);
        if (!gx.empty()) {
          kernels::Gemm(false, false, rows, in, out, self.grad,
                        ParentValues(self, 1), gx, true);
        }
        if (!gw.empty()) {
          kernels::Gemm(true, false, out, in, rows, self.grad,
                        ParentValues(self, 0), gw, true);
        }
        if (has_bias) {
          std::span<double> gb = ParentGrad(self, 2);
          if (gb.empty()) return;
          for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t j = 0; j < out; ++j) gb[j] += self.grad[r * out + j];
          }
        }
      });
}

Tensor Add(const Tensor& a, const Tensor& b) {
  RequireSameShape(a, b, "add");
  std::vector<double> out(a.values().begin(), a.values().end());
  std::span<const double> bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
  return Tensor::FromOp(a.shape(), std::move(out), {a, b}, [](Node& self) {
    for (std::size_t p = 0; p < 2; ++p) {
      std::span<double> g = ParentGrad(self, p);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
  });
}

Tensor Sub(const Tensor& a, const Tensor& b) {
  RequireSameShape(a, b, "sub");
  std::vector<double> out(a.values().begin(), a.values().end());
  std::span<const double> bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
  return Tensor::FromOp(a.shape(), std::move(out), {a, b}, [](Node& self) {
    std::span<double> ga = ParentGrad(self, 0);
    std::span<double> gb = ParentGrad(self, 1);
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += self.grad[i];
    for (std::size_t i = 0; i < gb.size(); ++i) gb[i] -= self.grad[i];
  });
}

Tensor Mul(const Tensor& a, const Tensor& b) {
  RequireSameShape(a, b, "mul");
  std::vector<double> out(a.size());
  std::span<const double> av = a.values(), bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  return Tensor::FromOp(a.shape(), std::move(out), {a, b}, [](Node& self) {
    std::span<double> ga = ParentGrad(self, 0);
    std::span<double> gb = ParentGrad(self, 1);
    std::span<const double> av = ParentValues(self, 0);
    std::span<const double> bv = ParentValues(self, 1);
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += self.grad[i] * bv[i];
    for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += self.grad[i] * av[i];
  });
}

Tensor Scale(const Tensor& a, double factor) {
  std::vector<double> out(a.values().begin(), a.values().end());
  for (double& v : out) v *= factor;
  return Tensor::FromOp(a.shape(), std::move(out), {a}, [factor](Node& self) {
    std::span<double> g = ParentGrad(self, 0);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * factor;
  });
}

Tensor Sum(const Tensor& a) {
  double total = 0.0;
  for (double v : a.values()) total += v;
  return Tensor::FromOp({1}, {total}, {a}, [](Node& self) {
    std::span<double> g = ParentGrad(self, 0);
    for (double& v : g) v += self.grad[0];
  });
}

Tensor Mean(const Tensor& a) {
  return Scale(Sum(a), 1.0 / static_cast<double>(a.size()));
}

Tensor Reshape(const Tensor& a, Shape shape) {
  if (NumElements(shape) != a.size()) {
    throw DimensionError("reshape: cannot view " + ShapeToString(a.shape()) +
                         " as " + ShapeToString(shape));
  }
  std::vector<double> out(a.values().begin(), a.values().end());
  return Tensor::FromOp(std::move(shape), std::move(out), {a}, [](Node& self) {
    std::span<double> g = ParentGrad(self, 0);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
  });
}

Tensor Concat(const std::vector<Tensor>& parts, std::size_t axis) {
  if (parts.empty()) throw UsageError("concat: no parts");
  const Shape& first = parts.front().shape();
  if (axis >= first.size()) {
    throw DimensionError("concat: axis " + std::to_string(axis) +
                         " out of range for " + ShapeToString(first));
  }
  Shape shape = first;
  shape[axis] = 0;
  for (const Tensor& part : parts) {
    const Shape& ps = part.shape();
    bool ok = ps.size() == first.size();
    for (std::size_t d = 0; ok && d < ps.size(); ++d) {
      if (d != axis && ps[d] != first[d]) ok = false;
    }
    if (!ok) {
      throw DimensionError("concat: part " + ShapeToString(ps) +
                           " incompatible with " + ShapeToString(first) +
                           " on axis " + std::to_string(axis));
    }
    shape[axis] += ps[axis];
  }
  std::size_t outer = 1, inner = 1;
  for (std::size_t d = 0; d < axis; ++d) outer *= first[d];
  for (std::size_t d = axis + 1; d < first.size(); ++d) inner *= first[d];
  const std::size_t out_row = shape[axis] * inner;

  std::vector<std::size_t> widths;
  std::vector<double> out(NumElements(shape));
  std::size_t offset = 0;
  for (const Tensor& part : parts) {
    const std::size_t width = part.shape()[axis] * inner;
    std::span<const double> pv = part.values();
    for (std::size_t o = 0; o < outer; ++o) {
      std::copy_n(pv.begin() + o * width, width,
                  out.begin() + o * out_row + offset);
    }
    widths.push_back(width);
    offset += width;
  }
  return Tensor::FromOp(
      std::move(shape), std::move(out), parts,
      [widths = std::move(widths), outer, out_row](Node& self) {
        std::size_t offset = 0;
        for (std::size_t p = 0; p < widths.size(); ++p) {
          std::span<double> g = ParentGrad(self, p);
          if (!g.empty()) {
            for (std::size_t o = 0; o < outer; ++o) {
              for (std::size_t j = 0; j < widths[p]; ++j) {
                g[o * widths[p] + j] += self.grad[o * out_row + offset + j];
              }
            }
          }
          offset += widths[p];
        }
      });
}

Tensor Softmax(const Tensor& a, std::size_t axis) {
  if (axis >= a.rank()) {
    throw DimensionError("softmax: axis " + std::to_string(axis) +
                         " out of range for " + ShapeToString(a.shape()));
  }
  const Shape& s = a.shape();
  std::size_t outer = 1, inner = 1;
  for (std::size_t d = 0; d < axis; ++d) outer *= s[d];
  for (std::size_t d = axis + 1; d < s.size(); ++d) inner *= s[d];
  const std::size_t len = s[axis];

  std::vector<double> out(a.size());
  if (inner == 1) {
    kernels::SoftmaxRows(outer, len, a.values(), out);
    return Tensor::FromOp(s, std::move(out), {a}, [outer, len](Node& self) {
      std::span<double> g = ParentGrad(self, 0);
      if (!g.empty()) {
        kernels::SoftmaxRowsBackward(outer, len, self.values, self.grad, g);
      }
    });
  }

  // Strided case: walk each (outer, inner) fiber.
  std::span<const double> x = a.values();
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t i = 0; i < inner; ++i) {
      const std::size_t base = o * len * inner + i;
      double max = x[base];
      for (std::size_t j = 1; j < len; ++j) max = std::max(max, x[base + j * inner]);
      double total = 0.0;
      for (std::size_t j = 0; j < len; ++j) {
        out[base + j * inner] = std::exp(x[base + j * inner] - max);
        total += out[base + j * inner];
      }
      for (std::size_t j = 0; j < len; ++j) out[base + j * inner] /= total;
    }
  }
  return Tensor::FromOp(s, std::move(out), {a}, [outer, inner, len](Node& self) {
    std::span<double> g = ParentGrad(self, 0);
    if (g.empty()) return;
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t i = 0; i < inner; ++i) {
        const std::size_t base = o * len * inner + i;
        double dot = 0.0;
        for (std::size_t j = 0; j < len; ++j) {
          dot += self.values[base + j * inner] * self.grad[base + j * inner];
        }
        for (std::size_t j = 0; j < len; ++j) {
          const std::size_t at = base + j * inner;
          g[at] += self.values[at] * (self.grad[at] - dot);
        }
      }
    }
  });
}

Tensor Sigmoid(const Tensor& a) {
  std::vector<double> out(a.size());
  std::span<const double> x = a.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = StableSigmoid(x[i]);
  return Tensor::FromOp(a.shape(), std::move(out), {a}, [](Node& self) {
    std::span<double> g = ParentGrad(self, 0);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double y = self.values[i];
      g[i] += self.grad[i] * y * (1.0 - y);
    }
  });
}

Tensor Gelu(const Tensor& a) {
  std::vector<double> out(a.size());
  kernels::GeluForward(a.values(), out);
  return Tensor::FromOp(a.shape(), std::move(out), {a}, [](Node& self) {
    std::span<double> g = ParentGrad(self, 0);
    if (!g.empty()) kernels::GeluBackward(ParentValues(self, 0), self.grad, g);
  });
}

Tensor LayerNorm(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                 double eps) {
  const std::size_t cols = x.shape().back();
  if (gamma.shape() != Shape{cols} || beta.shape() != Shape{cols}) {
    throw DimensionError("layer norm: input " + ShapeToString(x.shape()) +
                         " with gamma " + ShapeToString(gamma.shape()) +
                         " and beta " + ShapeToString(beta.shape()));
  }
  const std::size_t rows = x.size() / cols;
  std::vector<double> out(x.size());
  auto stats = std::make_shared<std::vector<double>>(2 * rows);
  std::span<double> mean(stats->data(), rows);
  std::span<double> rstd(stats->data() + rows, rows);
  kernels::LayerNormForward(rows, cols, eps, x.values(), gamma.values(),
                            beta.values(), out, mean, rstd);
  return Tensor::FromOp(
      x.shape(), std::move(out), {x, gamma, beta},
      [rows, cols, stats](Node& self) {
        std::span<const double> mean(stats->data(), rows);
        std::span<const double> rstd(stats->data() + rows, rows);
        kernels::LayerNormBackward(rows, cols, ParentValues(self, 0),
                                   ParentValues(self, 1), mean, rstd, self.grad,
                                   ParentGrad(self, 0), ParentGrad(self, 1),
                                   ParentGrad(self, 2));
      });
}

Tensor Embedding(const Tensor& table, std::span<const int> ids) {
  if (table.rank() != 2) {
    throw DimensionError("embedding: table must be 2-D, got " +
                         ShapeToString(table.shape()));
  }
  const std::size_t vocab = table.dim(0), d = table.dim(1);
  std::vector<double> out(ids.size() * d);
  std::span<const double> tv = table.values();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || static_cast<std::size_t>(ids[i]) >= vocab) {
      throw VocabularyError("token id " + std::to_string(ids[i]) +
                            " outside vocabulary of size " +
                            std::to_string(vocab));
    }
    std::copy_n(tv.begin() + ids[i] * d, d, out.begin() + i * d);
  }
  std::vector<int> saved(ids.begin(), ids.end());
  return Tensor::FromOp(
      {ids.size(), d}, std::move(out), {table},
      [saved = std::move(saved), d](Node& self) {
        std::span<double> g = ParentGrad(self, 0);
        if (g.empty()) return;
        for (std::size_t i = 0; i < saved.size(); ++i) {
          for (std::size_t j = 0; j < d; ++j) {
            g[saved[i] * d + j] += self.grad[i * d + j];
          }
        }
      });
}

Tensor IndexRows(const Tensor& x, std::span<const std::size_t> indices) {
  if (x.rank() == 0) throw DimensionError("index rows: scalar input");
  const std::size_t rows = x.dim(0);
  const std::size_t width = x.size() / rows;
  std::vector<double> out(indices.size() * width);
  std::span<const double> xv = x.values();
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= rows) {
      throw DimensionError("index rows: index " + std::to_string(indices[i]) +
                           " out of range for " + ShapeToString(x.shape()));
    }
    std::copy_n(xv.begin() + indices[i] * width, width, out.begin() + i * width);
  }
  Shape shape = x.shape();
  shape[0] = indices.size();
  std::vector<std::size_t> saved(indices.begin(), indices.end());
  return Tensor::FromOp(
      std::move(shape), std::move(out), {x},
      [saved = std::move(saved), width](Node& self) {
        std::span<double> g = ParentGrad(self, 0);
        if (g.empty()) return;
        for (std::size_t i = 0; i < saved.size(); ++i) {
          for (std::size_t j = 0; j < width; ++j) {
            g[saved[i] * width + j] += self.grad[i * width + j];
          }
        }
      });
}

Tensor SelfAttention(const Tensor& q, const Tensor& k, const Tensor& v,
                     std::span<const int> mask, std::size_t heads) {
  RequireSameShape(q, k, "attention");
  RequireSameShape(q, v, "attention");
  if (q.rank() != 3 || heads == 0 || q.dim(2) % heads != 0) {
    throw DimensionError("attention: input " + ShapeToString(q.shape()) +
                         " cannot be split into " + std::to_string(heads) +
                         " heads");
  }
  const kernels::AttentionShape s{q.dim(0), q.dim(1), heads, q.dim(2) / heads};
  if (mask.size() != s.batch * s.seq) {
    throw DimensionError("attention: mask of " + std::to_string(mask.size()) +
                         " entries for input " + ShapeToString(q.shape()));
  }
  auto probs = std::make_shared<std::vector<double>>(s.batch * heads * s.seq *
                                                     s.seq);
  std::vector<double> out(q.size());
  kernels::AttentionForward(s, q.values(), k.values(), v.values(), mask, *probs,
                            out);
  return Tensor::FromOp(q.shape(), std::move(out), {q, k, v},
                        [s, probs](Node& self) {
                          kernels::AttentionBackward(
                              s, ParentValues(self, 0), ParentValues(self, 1),
                              ParentValues(self, 2), *probs, self.grad,
                              ParentGrad(self, 0), ParentGrad(self, 1),
                              ParentGrad(self, 2));
                        });
}

Tensor BinaryCrossEntropy(const Tensor& pred, std::span<const double> target) {
  return BinaryCrossEntropyScaled(pred, target,
                                  1.0 / static_cast<double>(pred.size()));
}

Tensor BinaryCrossEntropySum(const Tensor& pred,
                             std::span<const double> target) {
  return BinaryCrossEntropyScaled(pred, target, 1.0);
}

Tensor CategoricalCrossEntropy(const Tensor& probs, std::span<const int> gold) {
  if (probs.rank() != 2 || probs.dim(0) != gold.size()) {
    throw DimensionError("categorical cross-entropy: probs " +
                         ShapeToString(probs.shape()) + " with " +
                         std::to_string(gold.size()) + " gold labels");
  }
  const std::size_t n = probs.dim(0), classes = probs.dim(1);
  std::span<const double> p = probs.values();
  double total = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    if (gold[r] < 0 || static_cast<std::size_t>(gold[r]) >= classes) {
      throw DomainError("gold class " + std::to_string(gold[r]) +
                        " outside [0, " + std::to_string(classes) + ")");
    }
    total -= std::log(ClampProb(p[r * classes + gold[r]]));
  }
  const double scale = 1.0 / static_cast<double>(n);
  std::vector<int> saved(gold.begin(), gold.end());
  return Tensor::FromOp(
      {1}, {total * scale}, {probs},
      [saved = std::move(saved), classes, scale](Node& self) {
        std::span<double> g = ParentGrad(self, 0);
        if (g.empty()) return;
        std::span<const double> pv = ParentValues(self, 0);
        for (std::size_t r = 0; r < saved.size(); ++r) {
          const std::size_t at = r * classes + saved[r];
          if (pv[at] < kLogClamp || pv[at] > 1.0 - kLogClamp) continue;
          g[at] -= self.grad[0] * scale / pv[at];
        }
      });
}

}  // namespace framebert
