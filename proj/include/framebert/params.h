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

#ifndef FRAMEBERT_PARAMS_H_
#define FRAMEBERT_PARAMS_H_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "framebert/tensor.h"

namespace framebert {

using Rng = std::mt19937_64;

// A trainable tensor registered under a hierarchical dotted name such as
// "sentence_encoder.layer0.attn.wq".
struct NamedParameter {
  std::string name;
  Tensor tensor;
};

using ParameterList = std::vector<NamedParameter>;

// Leaf tensors with requires_grad set.
Tensor NormalParameter(Shape shape, double stddev, Rng& rng);
Tensor XavierParameter(std::size_t fan_out, std::size_t fan_in, Rng& rng);
Tensor ConstantParameter(Shape shape, double value);

std::vector<Tensor> Tensors(const ParameterList& params);

// Independent stream for a named purpose, derived from one run seed.
std::uint64_t DeriveSeed(std::uint64_t seed, std::string_view purpose);

}  // namespace framebert

#endif  // FRAMEBERT_PARAMS_H_
