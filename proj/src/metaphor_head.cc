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

#include "framebert/metaphor_head.h"

#include <iostream>
#include <numeric>

#include "framebert/errors.h"
#include "framebert/ops.h"

namespace framebert {

namespace {

void RequireWidth(const Tensor& t, std::size_t batch, std::size_t width,
                  const char* what) {
  if (t.rank() != 2 || t.dim(0) != batch || t.dim(1) != width) {
    throw DimensionError(std::string("fusion input ") + what + " has shape " +
                         ShapeToString(t.shape()) + ", expected [" +
                         std::to_string(batch) + "x" + std::to_string(width) +
                         "]");
  }
}

}  // namespace

void FusionInputs::Validate() const {
  if (v_s.rank() != 2 || h_cls.rank() != 2) {
    throw DimensionError("fusion inputs must be [batch x d]");
  }
  const std::size_t batch = v_s.dim(0);
  const std::size_t ds = v_s.dim(1), df = h_cls.dim(1);
  RequireWidth(v_st, batch, ds, "v_{S,t}");
  RequireWidth(v_t, batch, ds, "v_t");
  RequireWidth(h_cls, batch, df, "h_cls");
  RequireWidth(h_st, batch, df, "h_{S,t}");
  RequireWidth(h_t, batch, df, "h_t");
}

Tensor BuildMip(const FusionInputs& in) {
  in.Validate();
  return Concat({in.v_t, in.v_st, in.h_t, in.h_st}, 1);
}

Tensor BuildSpv(const FusionInputs& in) {
  in.Validate();
  return Concat({in.v_s, in.v_st, in.h_cls, in.h_st}, 1);
}

PredictionHead::PredictionHead(std::size_t input_dim, Rng& rng)
    : weight(XavierParameter(1, input_dim, rng)),
      bias(ConstantParameter({1}, 0.0)) {}

ParameterList PredictionHead::Parameters(const std::string& prefix) const {
  return {{prefix + ".weight", weight}, {prefix + ".bias", bias}};
}

Tensor Predict(const Tensor& mip, const Tensor& spv, const PredictionHead& head) {
  Tensor joined = Concat({mip, spv}, 1);
  if (joined.dim(1) != head.input_dim()) {
    throw DimensionError("prediction head expects width " +
                         std::to_string(head.input_dim()) + ", got " +
                         ShapeToString(joined.shape()));
  }
  Tensor logits = Linear(joined, head.weight, head.bias);
  return Reshape(Sigmoid(logits), {logits.dim(0)});
}

Tensor MetaphorLoss(const Tensor& pred, std::span<const double> labels) {
  return BinaryCrossEntropy(pred, labels);
}

std::vector<std::size_t> MakeShufflePermutation(std::size_t n, Rng& rng) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  if (n == 1) {
    std::clog << "WARNING: frame shuffle on a batch of one sample is the "
                 "identity permutation\n";
    return perm;
  }
  // Sattolo's algorithm: a single n-cycle, hence no fixed points.
  for (std::size_t i = n - 1; i > 0; --i) {
    std::size_t j = std::uniform_int_distribution<std::size_t>(0, i - 1)(rng);
    std::swap(perm[i], perm[j]);
  }
  return perm;
}

FusionInputs GatherFusionInputs(const SentenceBatch& batch,
                                const TransformerEncoder& sentence_encoder,
                                const TransformerEncoder& concept_encoder,
                                FrameMode mode,
                                std::span<const std::size_t> permutation) {
  EncoderViews v = ComputeViews(sentence_encoder, batch);
  EncoderViews h = ComputeViews(concept_encoder, batch);
  if (mode == FrameMode::kShuffleFrames) {
    if (permutation.size() != batch.size()) {
      throw UsageError("frame shuffle needs a permutation of " +
                       std::to_string(batch.size()) + " entries, got " +
                       std::to_string(permutation.size()));
    }
    h.cls = IndexRows(h.cls, permutation);
    h.contextual = IndexRows(h.contextual, permutation);
    h.isolated = IndexRows(h.isolated, permutation);
  }
  return {v.cls, v.contextual, v.isolated, h.cls, h.contextual, h.isolated};
}

Tensor Forward(const SentenceBatch& batch,
               const TransformerEncoder& sentence_encoder,
               const TransformerEncoder& concept_encoder,
               const PredictionHead& head, FrameMode mode,
               std::span<const std::size_t> permutation) {
  FusionInputs in = GatherFusionInputs(batch, sentence_encoder, concept_encoder,
                                       mode, permutation);
  return Predict(BuildMip(in), BuildSpv(in), head);
}

std::vector<MetaphorBatch> MakeMetaphorBatches(
    const std::vector<MetaphorSample>& samples, const Vocabulary& vocab,
    std::size_t max_len, std::size_t batch_size,
    std::span<const std::size_t> order, std::vector<RejectedSample>* rejected) {
  std::vector<MetaphorBatch> out;
  for (SentenceBatch& sb :
       MakeSentenceBatches(samples, vocab, max_len, batch_size, order, rejected)) {
    MetaphorBatch mb;
    for (std::size_t index : sb.sample_indices) {
      mb.labels.push_back(static_cast<double>(samples[index].label));
    }
    mb.sentences = std::move(sb);
    out.push_back(std::move(mb));
  }
  return out;
}

}  // namespace framebert
