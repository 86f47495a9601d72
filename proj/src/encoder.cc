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

#include "framebert/encoder.h"

#include "framebert/errors.h"
#include "framebert/ops.h"

namespace framebert {

namespace {

constexpr double kEmbeddingStddev = 0.02;

}  // namespace

void EncoderConfig::Validate() const {
  if (vocab_size == 0 || hidden_dim == 0 || num_layers == 0 ||
      num_heads == 0 || max_seq_len == 0) {
    throw UsageError("encoder config: all extents must be positive");
  }
  if (hidden_dim % num_heads != 0) {
    throw UsageError("encoder config: hidden_dim " + std::to_string(hidden_dim) +
                     " not divisible by num_heads " + std::to_string(num_heads));
  }
}

void TokenBatch::Validate() const {
  const std::size_t n = batch_size * seq_len;
  if (batch_size == 0 || seq_len == 0 || token_ids.size() != n ||
      type_ids.size() != n || mask.size() != n ||
      target_positions.size() != batch_size) {
    throw DimensionError("token batch: inconsistent buffer sizes for " +
                         std::to_string(batch_size) + "x" +
                         std::to_string(seq_len));
  }
  for (std::size_t b = 0; b < batch_size; ++b) {
    const std::size_t row = b * seq_len;
    if (token_ids[row] != kClsId || mask[row] != 1) {
      throw UsageError("token batch: row " + std::to_string(b) +
                       " does not start with CLS");
    }
    const std::size_t t = target_positions[b];
    if (t == 0 || t >= seq_len || mask[row + t] != 1) {
      throw UsageError("token batch: bad target position in row " +
                       std::to_string(b));
    }
    for (std::size_t i = 0; i < seq_len; ++i) {
      if (type_ids[row + i] != (i == t ? 1 : 0)) {
        throw UsageError("token batch: row " + std::to_string(b) +
                         " must mark exactly the target with type 1");
      }
    }
  }
}

TokenBatch MakeIsolatedBatch(std::span<const int> target_ids) {
  TokenBatch batch;
  batch.batch_size = target_ids.size();
  batch.seq_len = 2;
  for (int id : target_ids) {
    batch.token_ids.insert(batch.token_ids.end(), {kClsId, id});
    batch.type_ids.insert(batch.type_ids.end(), {0, 1});
    batch.mask.insert(batch.mask.end(), {1, 1});
    batch.target_positions.push_back(1);
  }
  return batch;
}

EncoderOutput::EncoderOutput(Tensor hidden,
                             std::vector<std::size_t> target_positions)
    : hidden_(std::move(hidden)),
      target_positions_(std::move(target_positions)) {
  rows_ = Reshape(hidden_, {hidden_.dim(0) * hidden_.dim(1), hidden_.dim(2)});
}

Tensor EncoderOutput::Cls() const {
  const std::size_t seq = hidden_.dim(1);
  std::vector<std::size_t> rows(hidden_.dim(0));
  for (std::size_t b = 0; b < rows.size(); ++b) rows[b] = b * seq;
  return IndexRows(rows_, rows);
}

Tensor EncoderOutput::Target() const {
  const std::size_t seq = hidden_.dim(1);
  std::vector<std::size_t> rows(hidden_.dim(0));
  for (std::size_t b = 0; b < rows.size(); ++b) {
    rows[b] = b * seq + target_positions_[b];
  }
  return IndexRows(rows_, rows);
}

TransformerEncoder::TransformerEncoder(std::string name, EncoderConfig config,
                                       Rng& rng)
    : name_(std::move(name)), config_(config) {
  config_.Validate();
  const std::size_t d = config_.hidden_dim;
  const std::size_t ff = config_.ffn_dim();
  word_embeddings_ = NormalParameter({config_.vocab_size, d}, kEmbeddingStddev, rng);
  position_embeddings_ =
      NormalParameter({config_.max_seq_len, d}, kEmbeddingStddev, rng);
  type_embeddings_ = NormalParameter({2, d}, kEmbeddingStddev, rng);
  for (std::size_t l = 0; l < config_.num_layers; ++l) {
    Layer layer;
    layer.ln1_gamma = ConstantParameter({d}, 1.0);
    layer.ln1_beta = ConstantParameter({d}, 0.0);
    layer.wq = XavierParameter(d, d, rng);
    layer.bq = ConstantParameter({d}, 0.0);
    layer.wk = XavierParameter(d, d, rng);
    layer.bk = ConstantParameter({d}, 0.0);
    layer.wv = XavierParameter(d, d, rng);
    layer.bv = ConstantParameter({d}, 0.0);
    layer.wo = XavierParameter(d, d, rng);
    layer.bo = ConstantParameter({d}, 0.0);
    layer.ln2_gamma = ConstantParameter({d}, 1.0);
    layer.ln2_beta = ConstantParameter({d}, 0.0);
    layer.w1 = XavierParameter(ff, d, rng);
    layer.b1 = ConstantParameter({ff}, 0.0);
    layer.w2 = XavierParameter(d, ff, rng);
    layer.b2 = ConstantParameter({d}, 0.0);
    layers_.push_back(std::move(layer));
  }
  final_gamma_ = ConstantParameter({d}, 1.0);
  final_beta_ = ConstantParameter({d}, 0.0);
}

Tensor TransformerEncoder::Embed(const TokenBatch& batch) const {
  batch.Validate();
  if (batch.seq_len > config_.max_seq_len) {
    throw UsageError("sequence length " + std::to_string(batch.seq_len) +
                     " exceeds max_seq_len " +
                     std::to_string(config_.max_seq_len));
  }
  std::vector<int> positions(batch.token_ids.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    positions[i] = static_cast<int>(i % batch.seq_len);
  }
  Tensor sum = Add(Add(Embedding(word_embeddings_, batch.token_ids),
                       Embedding(position_embeddings_, positions)),
                   Embedding(type_embeddings_, batch.type_ids));
  return Reshape(sum, {batch.batch_size, batch.seq_len, config_.hidden_dim});
}

EncoderOutput TransformerEncoder::Encode(const TokenBatch& batch) const {
  Tensor x = Embed(batch);
  for (const Layer& layer : layers_) {
    Tensor h = LayerNorm(x, layer.ln1_gamma, layer.ln1_beta);
    Tensor attended = SelfAttention(Linear(h, layer.wq, layer.bq),
                                    Linear(h, layer.wk, layer.bk),
                                    Linear(h, layer.wv, layer.bv), batch.mask,
                                    config_.num_heads);
    x = Add(x, Linear(attended, layer.wo, layer.bo));
    h = LayerNorm(x, layer.ln2_gamma, layer.ln2_beta);
    x = Add(x, Linear(Gelu(Linear(h, layer.w1, layer.b1)), layer.w2, layer.b2));
  }
  x = LayerNorm(x, final_gamma_, final_beta_);
  return EncoderOutput(std::move(x), batch.target_positions);
}

Tensor TransformerEncoder::EncodeIsolated(const TokenBatch& batch) const {
  batch.Validate();
  for (std::size_t b = 0; b < batch.batch_size; ++b) {
    int unmasked = 0;
    for (std::size_t i = 0; i < batch.seq_len; ++i) {
      unmasked += batch.mask[b * batch.seq_len + i];
    }
    if (unmasked != 2 || batch.target_positions[b] != 1) {
      throw UsageError("isolated pass: row " + std::to_string(b) +
                       " must hold only CLS and the target word");
    }
  }
  return Encode(batch).Target();
}

ParameterList TransformerEncoder::Parameters() const {
  ParameterList params = {
      {name_ + ".embeddings.word", word_embeddings_},
      {name_ + ".embeddings.position", position_embeddings_},
      {name_ + ".embeddings.type", type_embeddings_},
  };
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Layer& layer = layers_[l];
    const std::string p = name_ + ".layer" + std::to_string(l) + ".";
    params.push_back({p + "ln1.gamma", layer.ln1_gamma});
    params.push_back({p + "ln1.beta", layer.ln1_beta});
    params.push_back({p + "attn.wq", layer.wq});
    params.push_back({p + "attn.bq", layer.bq});
    params.push_back({p + "attn.wk", layer.wk});
    params.push_back({p + "attn.bk", layer.bk});
    params.push_back({p + "attn.wv", layer.wv});
    params.push_back({p + "attn.bv", layer.bv});
    params.push_back({p + "attn.wo", layer.wo});
    params.push_back({p + "attn.bo", layer.bo});
    params.push_back({p + "ln2.gamma", layer.ln2_gamma});
    params.push_back({p + "ln2.beta", layer.ln2_beta});
    params.push_back({p + "ffn.w1", layer.w1});
    params.push_back({p + "ffn.b1", layer.b1});
    params.push_back({p + "ffn.w2", layer.w2});
    params.push_back({p + "ffn.b2", layer.b2});
  }
  params.push_back({name_ + ".final_ln.gamma", final_gamma_});
  params.push_back({name_ + ".final_ln.beta", final_beta_});
  return params;
}

EncoderViews ComputeViews(const TransformerEncoder& encoder,
                          const SentenceBatch& batch) {
  EncoderOutput out = encoder.Encode(batch.context);
  return {out.Cls(), out.Target(), encoder.EncodeIsolated(batch.isolated)};
}

}  // namespace framebert
