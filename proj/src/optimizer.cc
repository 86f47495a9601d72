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

#include "framebert/optimizer.h"

#include <cmath>

#include "framebert/errors.h"

namespace framebert {

Adam::Adam(std::vector<Tensor> params, AdamOptions options)
    : params_(std::move(params)), options_(options) {
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (const Tensor& p : params_) {
    m_.emplace_back(p.size(), 0.0);
    v_.emplace_back(p.size(), 0.0);
  }
}

void Adam::Step() {
  for (const Tensor& p : params_) {
    if (!p.has_grad()) {
      throw UsageError("adam: parameter of shape " + ShapeToString(p.shape()) +
                       " has no gradient");
    }
  }
  ++step_;
  const double b1 = options_.beta1, b2 = options_.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(step_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    std::span<double> w = params_[i].mutable_values();
    std::span<double> g = params_[i].mutable_grad();
    std::vector<double>& m = m_[i];
    std::vector<double>& v = v_[i];
    for (std::size_t j = 0; j < w.size(); ++j) {
      m[j] = b1 * m[j] + (1.0 - b1) * g[j];
      v[j] = b2 * v[j] + (1.0 - b2) * g[j] * g[j];
      const double m_hat = m[j] / correction1;
      const double v_hat = v[j] / correction2;
      w[j] -= options_.learning_rate * m_hat / (std::sqrt(v_hat) + options_.epsilon);
    }
  }
  ZeroGrad();
}

void Adam::ZeroGrad() {
  for (Tensor& p : params_) p.ZeroGrad();
}

}  // namespace framebert
