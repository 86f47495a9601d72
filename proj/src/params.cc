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

#include "framebert/params.h"

#include <cmath>

namespace framebert {

Tensor NormalParameter(Shape shape, double stddev, Rng& rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  std::vector<double> values(NumElements(shape));
  for (double& v : values) v = dist(rng);
  return Tensor(std::move(shape), std::move(values), true);
}

Tensor XavierParameter(std::size_t fan_out, std::size_t fan_in, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-bound, bound);
  std::vector<double> values(fan_out * fan_in);
  for (double& v : values) v = dist(rng);
  return Tensor({fan_out, fan_in}, std::move(values), true);
}

Tensor ConstantParameter(Shape shape, double value) {
  return Tensor::Full(std::move(shape), value, true);
}

std::vector<Tensor> Tensors(const ParameterList& params) {
  std::vector<Tensor> out;
  out.reserve(params.size());
  for (const NamedParameter& p : params) out.push_back(p.tensor);
  return out;
}

std::uint64_t DeriveSeed(std::uint64_t seed, std::string_view purpose) {
  // FNV-1a over the purpose, mixed into the seed with splitmix64.
  std::uint64_t h = 1469598103934665603ull;
  for (char c : purpose) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (h | 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace framebert
