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

#include "framebert/concept_encoder.h"

#include <algorithm>
#include <numeric>

#include "framebert/errors.h"
#include "framebert/ops.h"

namespace framebert {

FrameInventory::FrameInventory(std::vector<std::string> names)
    : names_(std::move(names)) {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i].empty()) throw ValidationError("empty frame name");
    if (!index_.emplace(names_[i], static_cast<int>(i)).second) {
      throw ValidationError("duplicate frame name '" + names_[i] + "'");
    }
  }
}

bool FrameInventory::Contains(const std::string& name) const {
  return index_.contains(name);
}

int FrameInventory::Index(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) {
    throw ValidationError("frame '" + name + "' not in inventory");
  }
  return it->second;
}

FrameHeads::FrameHeads(std::size_t num_frames, std::size_t hidden_dim, Rng& rng)
    : w0(XavierParameter(num_frames, hidden_dim, rng)),
      b0(ConstantParameter({num_frames}, 0.0)),
      w1(XavierParameter(num_frames, hidden_dim, rng)),
      b1(ConstantParameter({num_frames}, 0.0)) {}

ParameterList FrameHeads::Parameters(const std::string& prefix) const {
  return {{prefix + ".w0", w0},
          {prefix + ".b0", b0},
          {prefix + ".w1", w1},
          {prefix + ".b1", b1}};
}

Tensor FrameProbsCls(const FrameHeads& heads, const Tensor& h_cls) {
  return Sigmoid(Linear(h_cls, heads.w0, heads.b0));
}

Tensor FrameProbsTarget(const FrameHeads& heads, const Tensor& h_target) {
  Tensor logits = Linear(h_target, heads.w1, heads.b1);
  return Softmax(logits, logits.rank() - 1);
}

FrameLossTerms FrameLoss(const Tensor& pred_target,
                         std::span<const int> gold_target,
                         const Tensor& pred_cls,
                         const std::vector<std::vector<int>>& gold_sets,
                         double lambda) {
  if (!(lambda >= 0.0)) {
    throw DomainError("lambda must be non-negative, got " + std::to_string(lambda));
  }
  if (pred_cls.rank() != 2 || pred_cls.dim(0) != gold_sets.size()) {
    throw DimensionError("frame loss: sentence predictions " +
                         ShapeToString(pred_cls.shape()) + " for " +
                         std::to_string(gold_sets.size()) + " gold sets");
  }
  const std::size_t batch = pred_cls.dim(0);
  const std::size_t frames = pred_cls.dim(1);
  std::vector<double> targets(batch * frames, 0.0);
  for (std::size_t b = 0; b < batch; ++b) {
    for (int f : gold_sets[b]) {
      if (f < 0 || static_cast<std::size_t>(f) >= frames) {
        throw DomainError("gold frame " + std::to_string(f) + " outside [0, " +
                          std::to_string(frames) + ")");
      }
      targets[b * frames + f] = 1.0;
    }
  }
  FrameLossTerms terms;
  terms.cls = Scale(BinaryCrossEntropySum(pred_cls, targets),
                    1.0 / static_cast<double>(batch));
  terms.target = CategoricalCrossEntropy(pred_target, gold_target);
  terms.total = Add(Scale(terms.cls, lambda), terms.target);
  return terms;
}

std::vector<FrameBatch> MakeFrameBatches(const std::vector<FrameSample>& samples,
                                         const FrameInventory& inventory,
                                         const Vocabulary& vocab,
                                         std::size_t max_len,
                                         std::size_t batch_size,
                                         std::span<const std::size_t> order,
                                         std::vector<RejectedSample>* rejected) {
  std::vector<FrameBatch> out;
  for (SentenceBatch& sb :
       MakeSentenceBatches(samples, vocab, max_len, batch_size, order, rejected)) {
    FrameBatch fb;
    for (std::size_t index : sb.sample_indices) {
      const FrameSample& s = samples[index];
      fb.gold_target.push_back(inventory.Index(s.target_frame));
      std::vector<int> set;
      for (const std::string& f : s.sentence_frames) set.push_back(inventory.Index(f));
      fb.gold_sets.push_back(std::move(set));
    }
    fb.sentences = std::move(sb);
    out.push_back(std::move(fb));
  }
  return out;
}

namespace {

std::size_t CheckedFrameCount(const FrameInventory& inventory) {
  if (inventory.size() == 0) throw UsageError("empty frame inventory");
  return inventory.size();
}

}  // namespace

ConceptEncoder::ConceptEncoder(EncoderConfig config, FrameInventory inventory,
                               Rng& rng)
    : encoder_(kEncoderName, config, rng),
      heads_(CheckedFrameCount(inventory), config.hidden_dim, rng),
      inventory_(std::move(inventory)) {}

EncoderViews ConceptEncoder::Views(const SentenceBatch& batch) const {
  return ComputeViews(encoder_, batch);
}

FrameLossTerms ConceptEncoder::Loss(const FrameBatch& batch, double lambda) const {
  EncoderOutput out = encoder_.Encode(batch.sentences.context);
  return FrameLoss(FrameProbsTarget(heads_, out.Target()), batch.gold_target,
                   FrameProbsCls(heads_, out.Cls()), batch.gold_sets, lambda);
}

double ConceptEncoder::PretrainStep(const FrameBatch& batch, double lambda,
                                    Adam& optimizer) {
  if (batch.sentences.size() == 0) throw UsageError("empty pretraining batch");
  optimizer.ZeroGrad();
  FrameLossTerms terms = Loss(batch, lambda);
  const double loss = terms.total.item();
  terms.total.Backward();
  optimizer.Step();
  return loss;
}

std::vector<ScoredFrame> ConceptEncoder::TopKFrames(const Tensor& h,
                                                    std::size_t k) const {
  const std::size_t frames = inventory_.size();
  if (k < 1 || k > frames) {
    throw UsageError("k must be in [1, " + std::to_string(frames) + "], got " +
                     std::to_string(k));
  }
  NoGradGuard no_grad;
  Tensor row = h.rank() == 1 ? Reshape(h, {1, h.dim(0)}) : h;
  if (row.rank() != 2 || row.dim(0) != 1) {
    throw DimensionError("top-k frames expects one hidden state, got " +
                         ShapeToString(h.shape()));
  }
  Tensor probs = FrameProbsTarget(heads_, row);
  std::span<const double> p = probs.values();
  std::vector<std::size_t> order(frames);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p[a] > p[b]; });
  std::vector<ScoredFrame> out;
  for (std::size_t i = 0; i < k; ++i) {
    out.push_back({inventory_.name(order[i]), order[i], p[order[i]]});
  }
  return out;
}

ParameterList ConceptEncoder::Parameters() const {
  ParameterList params = encoder_.Parameters();
  for (NamedParameter& p : heads_.Parameters(kHeadsName)) params.push_back(std::move(p));
  return params;
}

}  // namespace framebert
