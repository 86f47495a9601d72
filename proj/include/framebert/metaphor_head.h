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

#ifndef FRAMEBERT_METAPHOR_HEAD_H_
#define FRAMEBERT_METAPHOR_HEAD_H_

// MIP/SPV fusion of sentence-encoder vectors with concept-encoder frame
// embeddings, and the final metaphor prediction:
//
//   h_MIP = v_t (+) v_{S,t} (+) h_t   (+) h_{S,t}
//   h_SPV = v_S (+) v_{S,t} (+) h_cls (+) h_{S,t}
//   y_hat = sigmoid(W_T (h_MIP (+) h_SPV) + b)
//
// where (+) is concatenation along the feature axis.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "framebert/data.h"
#include "framebert/encoder.h"
#include "framebert/params.h"
#include "framebert/tensor.h"

namespace framebert {

struct FusionInputs {
  // Sentence encoder, each [batch x d_s].
  Tensor v_s, v_st, v_t;
  // Concept encoder, each [batch x d_f].
  Tensor h_cls, h_st, h_t;

  // Throws DimensionError unless batch extents agree and each triple shares
  // its width.
  void Validate() const;
};

Tensor BuildMip(const FusionInputs& in);
Tensor BuildSpv(const FusionInputs& in);

struct PredictionHead {
  Tensor weight;  // [1 x 2 * (2 d_s + 2 d_f)]
  Tensor bias;    // [1]

  PredictionHead() = default;
  PredictionHead(std::size_t input_dim, Rng& rng);

  std::size_t input_dim() const { return weight.dim(1); }
  ParameterList Parameters(const std::string& prefix) const;
};

// [batch] probabilities.
Tensor Predict(const Tensor& mip, const Tensor& spv, const PredictionHead& head);

// Mean binary cross-entropy against 0/1 labels.
Tensor MetaphorLoss(const Tensor& pred, std::span<const double> labels);

enum class FrameMode {
  kNormal,
  // Frame embeddings (h_cls, h_{S,t}, h_t) are permuted across the batch
  // with one shared permutation before fusion.
  kShuffleFrames,
};

// Uniform random cyclic permutation (no fixed points) for n >= 2. For n == 1
// returns the identity and logs a warning.
std::vector<std::size_t> MakeShufflePermutation(std::size_t n, Rng& rng);

// Runs both encoders on the batch and fuses. In kShuffleFrames mode
// `permutation` must hold batch-size entries; frame row i is taken from
// sample permutation[i].
FusionInputs GatherFusionInputs(const SentenceBatch& batch,
                                const TransformerEncoder& sentence_encoder,
                                const TransformerEncoder& concept_encoder,
                                FrameMode mode,
                                std::span<const std::size_t> permutation = {});

Tensor Forward(const SentenceBatch& batch,
               const TransformerEncoder& sentence_encoder,
               const TransformerEncoder& concept_encoder,
               const PredictionHead& head, FrameMode mode,
               std::span<const std::size_t> permutation = {});

struct MetaphorBatch {
  SentenceBatch sentences;
  std::vector<double> labels;
};

std::vector<MetaphorBatch> MakeMetaphorBatches(
    const std::vector<MetaphorSample>& samples, const Vocabulary& vocab,
    std::size_t max_len, std::size_t batch_size,
    std::span<const std::size_t> order = {},
    std::vector<RejectedSample>* rejected = nullptr);

}  // namespace framebert

#endif  // FRAMEBERT_METAPHOR_HEAD_H_
