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

#ifndef FRAMEBERT_CONCEPT_ENCODER_H_
#define FRAMEBERT_CONCEPT_ENCODER_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "framebert/data.h"
#include "framebert/encoder.h"
#include "framebert/frame_inventory.h"
#include "framebert/optimizer.h"
#include "framebert/params.h"
#include "framebert/tensor.h"

namespace framebert {

// Frame-classification heads on top of the concept encoder.
//   sentence head: sigmoid(W_0 h_cls + b_0), one independent probability per
//                  frame (a sentence may evoke any subset of frames);
//   target head:   softmax(W_1 h + b_1), a distribution over frames for the
//                  target token.
struct FrameHeads {
  Tensor w0, b0;  // [L x d], [L]
  Tensor w1, b1;  // [L x d], [L]

  FrameHeads() = default;
  FrameHeads(std::size_t num_frames, std::size_t hidden_dim, Rng& rng);

  std::size_t num_frames() const { return w0.dim(0); }
  std::size_t hidden_dim() const { return w0.dim(1); }
  ParameterList Parameters(const std::string& prefix) const;
};

// [batch x d] -> [batch x L] sigmoid probabilities.
Tensor FrameProbsCls(const FrameHeads& heads, const Tensor& h_cls);
// [batch x d] -> [batch x L] softmax distribution.
Tensor FrameProbsTarget(const FrameHeads& heads, const Tensor& h_target);

struct FrameLossTerms {
  Tensor total;   // lambda * cls + target
  Tensor cls;     // binary cross-entropy summed over frames, mean over batch
  Tensor target;  // categorical cross-entropy, mean over batch
};

// Joint frame objective. gold_sets[b] lists the frames evoked by sentence b.
// Throws DomainError for indices outside [0, L) or a negative lambda.
FrameLossTerms FrameLoss(const Tensor& pred_target,
                         std::span<const int> gold_target,
                         const Tensor& pred_cls,
                         const std::vector<std::vector<int>>& gold_sets,
                         double lambda);

// Sentences with frame annotations, ready for the concept encoder.
struct FrameBatch {
  SentenceBatch sentences;
  std::vector<int> gold_target;
  std::vector<std::vector<int>> gold_sets;
};

// Batches in `order` (corpus order if empty). Samples that cannot fit max_len are reported in
// `rejected` (if given) and skipped.
std::vector<FrameBatch> MakeFrameBatches(const std::vector<FrameSample>& samples,
                                         const FrameInventory& inventory,
                                         const Vocabulary& vocab,
                                         std::size_t max_len,
                                         std::size_t batch_size,
                                         std::span<const std::size_t> order = {},
                                         std::vector<RejectedSample>* rejected = nullptr);

struct ScoredFrame {
  std::string name;
  std::size_t index;
  double probability;
};

// The frame-pretrained encoder with its classification heads.
class ConceptEncoder {
 public:
  static constexpr const char* kEncoderName = "concept_encoder";
  static constexpr const char* kHeadsName = "frame_heads";

  ConceptEncoder(EncoderConfig config, FrameInventory inventory, Rng& rng);

  const TransformerEncoder& encoder() const { return encoder_; }
  const FrameHeads& heads() const { return heads_; }
  const FrameInventory& inventory() const { return inventory_; }

  // h_cls, h_{S,t}, h_t.
  EncoderViews Views(const SentenceBatch& batch) const;

  FrameLossTerms Loss(const FrameBatch& batch, double lambda) const;

  // One forward/backward/update on encoder + heads; returns the pre-step
  // loss. Throws UsageError on an empty batch.
  double PretrainStep(const FrameBatch& batch, double lambda, Adam& optimizer);

  // k most probable frames of the target head for one hidden state h
  // ([d] or [1 x d]), by descending probability then ascending index.
  std::vector<ScoredFrame> TopKFrames(const Tensor& h, std::size_t k) const;

  // Encoder parameters followed by head parameters.
  ParameterList Parameters() const;

 private:
  TransformerEncoder encoder_;
  FrameHeads heads_;
  FrameInventory inventory_;
};

}  // namespace framebert

#endif  // FRAMEBERT_CONCEPT_ENCODER_H_
