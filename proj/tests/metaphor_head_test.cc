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

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "framebert/errors.h"
#include "framebert/metaphor_head.h"
#include "framebert/ops.h"
#include "test_util.h"

namespace framebert {
namespace {

using testing::RandomTensor;

FusionInputs RandomInputs(std::size_t batch, std::size_t ds, std::size_t df,
                          std::uint64_t seed = 1) {
  std::mt19937_64 r(seed);
  return {RandomTensor({batch, ds}, r), RandomTensor({batch, ds}, r),
          RandomTensor({batch, ds}, r), RandomTensor({batch, df}, r),
          RandomTensor({batch, df}, r), RandomTensor({batch, df}, r)};
}

void ExpectSlot(const Tensor& fused, const Tensor& part, std::size_t offset) {
  const std::size_t width = fused.dim(1), d = part.dim(1);
  for (std::size_t b = 0; b < part.dim(0); ++b) {
    for (std::size_t j = 0; j < d; ++j) {
      ASSERT_EQ(fused.values()[b * width + offset + j], part.values()[b * d + j]);
    }
  }
}

TEST(Fusion, WidthsFollowTheConcatenation) {
  FusionInputs in = RandomInputs(3, 16, 8);
  Tensor mip = BuildMip(in), spv = BuildSpv(in);
  EXPECT_EQ(mip.shape(), (Shape{3, 48}));
  EXPECT_EQ(spv.shape(), (Shape{3, 48}));
  Rng rng(2);
  PredictionHead head(mip.dim(1) + spv.dim(1), rng);
  EXPECT_EQ(head.input_dim(), 4 * 16u + 4 * 8u);
}

TEST(Fusion, MipLayoutIsTargetContextualFrameTargetFrameContextual) {
  FusionInputs in = RandomInputs(2, 16, 8);
  Tensor mip = BuildMip(in);
  ExpectSlot(mip, in.v_t, 0);
  ExpectSlot(mip, in.v_st, 16);
  ExpectSlot(mip, in.h_t, 32);
  ExpectSlot(mip, in.h_st, 40);
}

TEST(Fusion, SpvLayoutSharesContextualSlots) {
  FusionInputs in = RandomInputs(2, 16, 8);
  Tensor spv = BuildSpv(in), mip = BuildMip(in);
  ExpectSlot(spv, in.v_s, 0);
  ExpectSlot(spv, in.v_st, 16);
  ExpectSlot(spv, in.h_cls, 32);
  ExpectSlot(spv, in.h_st, 40);
  for (std::size_t b = 0; b < 2; ++b) {
    for (std::size_t j = 16; j < 32; ++j) {
      EXPECT_EQ(spv.values()[b * 48 + j], mip.values()[b * 48 + j]);
    }
    for (std::size_t j = 40; j < 48; ++j) {
      EXPECT_EQ(spv.values()[b * 48 + j], mip.values()[b * 48 + j]);
    }
  }
}

TEST(Fusion, ZeroInputsGiveZeroOutput) {
  FusionInputs in{Tensor::Zeros({2, 4}), Tensor::Zeros({2, 4}), Tensor::Zeros({2, 4}),
                  Tensor::Zeros({2, 3}), Tensor::Zeros({2, 3}), Tensor::Zeros({2, 3})};
  const Tensor spv = BuildSpv(in);
  const Tensor mip = BuildMip(in);
  for (double v : spv.values()) EXPECT_EQ(v, 0.0);
  for (double v : mip.values()) EXPECT_EQ(v, 0.0);
}

TEST(Fusion, MismatchedInputsAreDimensionErrors) {
  FusionInputs in = RandomInputs(2, 4, 3);
  in.h_t = Tensor::Zeros({3, 3});
  EXPECT_THROW(BuildMip(in), DimensionError);
  in = RandomInputs(2, 4, 3);
  in.v_s = Tensor::Zeros({2, 5});
  EXPECT_THROW(BuildSpv(in), DimensionError);
}

TEST(Fusion, GradientRoutesToEachSlot) {
  FusionInputs in = RandomInputs(2, 3, 2, 3);
  std::mt19937_64 r(4);
  Tensor w = RandomTensor({2, 10}, r, false);
  auto check = [&](auto build, std::vector<Tensor> used, Tensor unused) {
    auto res = testing::GradCheck([&] { return Sum(Mul(build(in), w)); }, used);
    EXPECT_LT(res.max_rel_error, 1e-4) << res.worst;
    unused.ZeroGrad();
    Sum(Mul(build(in), w)).Backward();
    for (double g : unused.grad()) EXPECT_EQ(g, 0.0);
  };
  check(BuildMip, {in.v_t, in.v_st, in.h_t, in.h_st}, in.v_s);
  check(BuildSpv, {in.v_s, in.v_st, in.h_cls, in.h_st}, in.h_t);
}

TEST(Predict, ZeroWeightsGiveHalfAndBiasLogThreeGivesThreeQuarters) {
  FusionInputs in = RandomInputs(3, 4, 2);
  Rng rng(5);
  PredictionHead head(24, rng);
  auto w = head.weight.mutable_values();
  std::fill(w.begin(), w.end(), 0.0);
  head.bias.mutable_values()[0] = 0.0;
  Tensor y = Predict(BuildMip(in), BuildSpv(in), head);
  EXPECT_EQ(y.shape(), (Shape{3}));
  for (double v : y.values()) EXPECT_EQ(v, 0.5);
  head.bias.mutable_values()[0] = std::log(3.0);
  const Tensor shifted = Predict(BuildMip(in), BuildSpv(in), head);
  for (double v : shifted.values()) {
    EXPECT_NEAR(v, 0.75, 1e-15);
  }
}

TEST(Predict, MonotoneInTheLogit) {
  FusionInputs in = RandomInputs(2, 4, 2);
  Rng rng(6);
  PredictionHead head(24, rng);
  double previous = -1;
  for (double bias = -5; bias <= 5; bias += 0.5) {
    head.bias.mutable_values()[0] = bias;
    const double y = Predict(BuildMip(in), BuildSpv(in), head).values()[0];
    EXPECT_GT(y, previous);
    EXPECT_GT(y, 0.0);
    EXPECT_LT(y, 1.0);
    previous = y;
  }
}

TEST(Predict, WrongWidthIsDimensionError) {
  FusionInputs in = RandomInputs(2, 4, 2);
  Rng rng(7);
  PredictionHead head(25, rng);
  EXPECT_THROW(Predict(BuildMip(in), BuildSpv(in), head), DimensionError);
}

TEST(MetaphorLoss, Examples) {
  const std::vector<double> y = {1, 0};
  EXPECT_LE(MetaphorLoss(Tensor({2}, {1.0, 0.0}), y).item(), 1.1e-7);
  for (double label : {0.0, 1.0}) {
    const std::vector<double> one = {label};
    EXPECT_NEAR(MetaphorLoss(Tensor({1}, {0.5}), one).item(), std::log(2.0),
                1e-15);
  }
  for (double p : {0.1, 0.6, 0.93}) {
    const std::vector<double> a = {1.0}, b = {0.0};
    EXPECT_NEAR(MetaphorLoss(Tensor({1}, {p}), a).item(),
                MetaphorLoss(Tensor({1}, {1 - p}), b).item(), 1e-12);
  }
}

TEST(ShufflePermutation, IsADerangementForTwoOrMore) {
  Rng rng(8);
  for (std::size_t n = 2; n < 40; ++n) {
    auto perm = MakeShufflePermutation(n, rng);
    std::set<std::size_t> seen(perm.begin(), perm.end());
    EXPECT_EQ(seen.size(), n);
    EXPECT_EQ(*seen.rbegin(), n - 1);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NE(perm[i], i);
  }
}

TEST(ShufflePermutation, SizeOneIsIdentity) {
  Rng rng(9);
  EXPECT_EQ(MakeShufflePermutation(1, rng), (std::vector<std::size_t>{0}));
}

TEST(ShufflePermutation, SeededAndReproducible) {
  Rng a(10), b(10);
  EXPECT_EQ(MakeShufflePermutation(17, a), MakeShufflePermutation(17, b));
}

// Two short sentences over a 12-word vocabulary.
struct Pipeline {
  Vocabulary vocab;
  std::vector<MetaphorSample> samples;
  Rng rng{11};
  TransformerEncoder sentence;
  TransformerEncoder concept_encoder;
  PredictionHead head;

  static EncoderConfig Config(std::size_t vocab) {
    EncoderConfig c;
    c.vocab_size = vocab;
    c.hidden_dim = 8;
    c.num_layers = 1;
    c.num_heads = 2;
    c.max_seq_len = 8;
    return c;
  }

  explicit Pipeline(std::vector<MetaphorSample> s)
      : vocab(BuildVocab({&s}, {}, 1)),
        samples(std::move(s)),
        sentence("sentence_encoder", Config(vocab.size()), rng),
        concept_encoder("concept_encoder", Config(vocab.size()), rng),
        head(64, rng) {}
};

std::vector<MetaphorSample> FourSamples() {
  return {{{"she", "faced", "the", "problem"}, 1, 1},
          {{"hot", "computers", "are", "slow"}, 0, 0},
          {{"he", "kicked", "the", "idea"}, 1, 1},
          {{"the", "warm", "soup"}, 1, 0}};
}

TEST(Forward, NormalModeIsDeterministic) {
  Pipeline p(FourSamples());
  auto batch = MakeMetaphorBatches(p.samples, p.vocab, 8, 4)[0];
  Tensor a = Forward(batch.sentences, p.sentence, p.concept_encoder, p.head,
                     FrameMode::kNormal);
  Tensor b = Forward(batch.sentences, p.sentence, p.concept_encoder, p.head,
                     FrameMode::kNormal);
  EXPECT_EQ(std::vector<double>(a.values().begin(), a.values().end()),
            std::vector<double>(b.values().begin(), b.values().end()));
}

TEST(Forward, IdentityShuffleEqualsNormalMode) {
  Pipeline p(FourSamples());
  auto batch = MakeMetaphorBatches(p.samples, p.vocab, 8, 4)[0];
  const std::vector<std::size_t> identity = {0, 1, 2, 3};
  Tensor a = Forward(batch.sentences, p.sentence, p.concept_encoder, p.head,
                     FrameMode::kNormal);
  Tensor b = Forward(batch.sentences, p.sentence, p.concept_encoder, p.head,
                     FrameMode::kShuffleFrames, identity);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(a.values()[i], b.values()[i]);
}

TEST(Forward, ShufflePermutesAllThreeFrameViewsTogether) {
  Pipeline p(FourSamples());
  auto batch = MakeMetaphorBatches(p.samples, p.vocab, 8, 4)[0];
  const std::vector<std::size_t> perm = {2, 0, 3, 1};
  FusionInputs normal = GatherFusionInputs(batch.sentences, p.sentence,
                                           p.concept_encoder, FrameMode::kNormal);
  FusionInputs shuffled =
      GatherFusionInputs(batch.sentences, p.sentence, p.concept_encoder,
                         FrameMode::kShuffleFrames, perm);
  for (std::size_t b = 0; b < 4; ++b) {
    for (std::size_t j = 0; j < 8; ++j) {
      const std::size_t src = perm[b] * 8 + j, dst = b * 8 + j;
      EXPECT_EQ(shuffled.h_cls.values()[dst], normal.h_cls.values()[src]);
      EXPECT_EQ(shuffled.h_st.values()[dst], normal.h_st.values()[src]);
      EXPECT_EQ(shuffled.h_t.values()[dst], normal.h_t.values()[src]);
      EXPECT_EQ(shuffled.v_s.values()[dst], normal.v_s.values()[dst]);
    }
  }
  EXPECT_THROW(GatherFusionInputs(batch.sentences, p.sentence, p.concept_encoder,
                                  FrameMode::kShuffleFrames),
               UsageError);
}

TEST(Forward, DoesNotMutateParameters) {
  Pipeline p(FourSamples());
  auto batch = MakeMetaphorBatches(p.samples, p.vocab, 8, 4)[0];
  std::vector<std::vector<double>> before;
  for (const auto& t : Tensors(p.sentence.Parameters())) {
    before.emplace_back(t.values().begin(), t.values().end());
  }
  Tensor loss = MetaphorLoss(Forward(batch.sentences, p.sentence,
                                     p.concept_encoder, p.head,
                                     FrameMode::kNormal),
                             batch.labels);
  loss.Backward();
  auto after = Tensors(p.sentence.Parameters());
  for (std::size_t i = 0; i < after.size(); ++i) {
    EXPECT_EQ(before[i],
              std::vector<double>(after[i].values().begin(), after[i].values().end()));
  }
}

TEST(Forward, FullPipelineGradientMatchesFiniteDifferences) {
  std::vector<MetaphorSample> two = FourSamples();
  two.resize(2);
  Pipeline p(two);
  auto batch = MakeMetaphorBatches(p.samples, p.vocab, 8, 2)[0];
  ParameterList params = p.sentence.Parameters();
  for (auto& q : p.concept_encoder.Parameters()) params.push_back(q);
  for (auto& q : p.head.Parameters("prediction_head")) params.push_back(q);
  std::vector<std::string> names;
  for (const auto& q : params) names.push_back(q.name);
  auto r = testing::GradCheck(
      [&] {
        return MetaphorLoss(Forward(batch.sentences, p.sentence,
                                    p.concept_encoder, p.head,
                                    FrameMode::kNormal),
                            batch.labels);
      },
      Tensors(params), names);
  EXPECT_LT(r.max_rel_error, 1e-4) << r.worst;
}

}  // namespace
}  // namespace framebert
