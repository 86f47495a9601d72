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

#ifndef FRAMEBERT_OPTIMIZER_H_
#define FRAMEBERT_OPTIMIZER_H_

#include <cstdint>
#include <span>
#include <vector>

#include "framebert/tensor.h"

namespace framebert {

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adam with bias-corrected moments. Step() applies one update to every
// parameter and then zeroes their gradients.
class Adam {
 public:
  explicit Adam(std::vector<Tensor> params, AdamOptions options = {});

  // Throws UsageError if a parameter carries no gradient buffer.
  void Step();
  void ZeroGrad();

  std::int64_t step_count() const { return step_; }
  const AdamOptions& options() const { return options_; }
  std::span<const double> first_moment(std::size_t i) const { return m_[i]; }
  std::span<const double> second_moment(std::size_t i) const { return v_[i]; }

 private:
  std::vector<Tensor> params_;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  AdamOptions options_;
  std::int64_t step_ = 0;
};

}  // namespace framebert

#endif  // FRAMEBERT_OPTIMIZER_H_
