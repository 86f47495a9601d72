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

#ifndef FRAMEBERT_ENCODER_H_
#define FRAMEBERT_ENCODER_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "framebert/params.h"
#include "framebert/tensor.h"

namespace framebert {

// Reserved vocabulary ids.
inline constexpr int kClsId = 0;
inline constexpr int kPadId = 1;
inline constexpr int kUnkId = 2;

struct EncoderConfig {
  std::size_t vocab_size = 3;
  std::size_t hidden_dim = 64;
  std::size_t num_layers = 2;
  std::size_t num_heads = 4;
  std::size_t max_seq_len = 64;
  // 0 means 4 * hidden_dim.
  std::size_t feedforward_dim = 0;

  std::size_t ffn_dim() const {
    return feedforward_dim == 0 ? 4 * hidden_dim : feedforward_dim;
  }
  // Throws UsageError on non-positive extents or hidden_dim % num_heads != 0.
  void Validate() const;
};

// Token ids, target-marker type ids and attention mask, all [batch x seq]
// row-major. Position 0 of every row holds the CLS id.
struct TokenBatch {
  std::size_t batch_size = 0;
  std::size_t seq_len = 0;
  std::vector<int> token_ids;
  std::vector<int> type_ids;
  std::vector<int> mask;
  std::vector<std::size_t> target_positions;

  // Checks buffer sizes, CLS placement, a single type-1 token per row at the
  // target position, and that the target is unmasked.
  void Validate() const;
};

// [CLS, target] rows for the isolated (literal) pass.
TokenBatch MakeIsolatedBatch(std::span<const int> target_ids);

// A batch of sentences with marked targets plus the matching [CLS, target]
// rows for the isolated pass. sample_indices maps rows back to the corpus.
struct SentenceBatch {
  TokenBatch context;
  TokenBatch isolated;
  std::vector<std::size_t> sample_indices;

  std::size_t size() const { return context.batch_size; }
};

// Hidden states H = (h_cls, h_0, ..., h_n) of a batch.
class EncoderOutput {
 public:
  EncoderOutput(Tensor hidden, std::vector<std::size_t> target_positions);

  // [batch x seq x d]
  const Tensor& hidden() const { return hidden_; }
  // Row 0 of every sequence, [batch x d].
  Tensor Cls() const;
  // Row at the target position of every sequence, [batch x d].
  Tensor Target() const;

 private:
  Tensor hidden_;
  Tensor rows_;  // hidden_ as [batch*seq x d]
  std::vector<std::size_t> target_positions_;
};

// Pre-norm transformer encoder over summed word, position and target-type
// embeddings.
class TransformerEncoder {
 public:
  TransformerEncoder(std::string name, EncoderConfig config, Rng& rng);

  const std::string& name() const { return name_; }
  const EncoderConfig& config() const { return config_; }

  // emb_w[id] + emb_pos[i] + emb_type[type], [batch x seq x d].
  Tensor Embed(const TokenBatch& batch) const;
  EncoderOutput Encode(const TokenBatch& batch) const;
  // Hidden state of the target in a [CLS, target] batch, [batch x d].
  // Throws UsageError if any row carries context words.
  Tensor EncodeIsolated(const TokenBatch& batch) const;

  ParameterList Parameters() const;

 private:
  struct Layer {
    Tensor ln1_gamma, ln1_beta;
    Tensor wq, bq, wk, bk, wv, bv, wo, bo;
    Tensor ln2_gamma, ln2_beta;
    Tensor w1, b1, w2, b2;
  };

  std::string name_;
  EncoderConfig config_;
  Tensor word_embeddings_;
  Tensor position_embeddings_;
  Tensor type_embeddings_;
  std::vector<Layer> layers_;
  Tensor final_gamma_, final_beta_;
};

// The three per-sample vectors every encoder contributes: CLS state and
// contextual target state from the in-sentence pass, target state from the
// isolated pass. For the sentence encoder these are v_S, v_{S,t}, v_t; for
// the concept encoder h_cls, h_{S,t}, h_t.
struct EncoderViews {
  Tensor cls;
  Tensor contextual;
  Tensor isolated;
};

EncoderViews ComputeViews(const TransformerEncoder& encoder,
                          const SentenceBatch& batch);

}  // namespace framebert

#endif  // FRAMEBERT_ENCODER_H_
