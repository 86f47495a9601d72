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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "framebert/data.h"
#include "framebert/errors.h"

namespace framebert {
namespace {

std::vector<MetaphorSample> ParseMetaphor(const std::string& text) {
  std::istringstream in(text);
  return ParseMetaphorTsv(in, "test");
}

FrameCorpus ParseFrames(const std::string& text) {
  std::istringstream in(text);
  return ParseFrameTsv(in, "test");
}

TEST(MetaphorTsv, ParsesTheDocumentedFormat) {
  auto samples = ParseMetaphor("he kicked the idea\t1\t1\n");
  ASSERT_EQ(samples.size(), 1u);
  EXPECT_EQ(samples[0].tokens,
            (std::vector<std::string>{"he", "kicked", "the", "idea"}));
  EXPECT_EQ(samples[0].target_index, 1u);
  EXPECT_EQ(samples[0].label, 1);
}

TEST(MetaphorTsv, EmptyInputIsEmptyList) {
  EXPECT_TRUE(ParseMetaphor("").empty());
}

TEST(MetaphorTsv, IndexPastEndIsParseErrorAtThatLine) {
  try {
    ParseMetaphor("a b\t0\t0\nc d\t2\t1\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
  }
}

TEST(MetaphorTsv, BadLabelAndFieldCountAreParseErrors) {
  EXPECT_THROW(ParseMetaphor("a b\t0\t2\n"), ParseError);
  EXPECT_THROW(ParseMetaphor("a b\t0\n"), ParseError);
  EXPECT_THROW(ParseMetaphor("a b\tx\t1\n"), ParseError);
  EXPECT_THROW(ParseMetaphor("\t0\t1\n"), ParseError);
}

TEST(FrameTsv, ParsesTheDocumentedExample) {
  FrameCorpus c = ParseFrames(
      "she faced the problem\t1\tConfronting_problem\t"
      "Confronting_problem,Resolve_problem\n");
  ASSERT_EQ(c.samples.size(), 1u);
  EXPECT_EQ(c.samples[0].target_frame, "Confronting_problem");
  EXPECT_EQ(c.samples[0].sentence_frames,
            (std::set<std::string>{"Confronting_problem", "Resolve_problem"}));
  EXPECT_EQ(c.inventory.names(),
            (std::vector<std::string>{"Confronting_problem", "Resolve_problem"}));
}

TEST(FrameTsv, DuplicateFramesAreDeduplicated) {
  FrameCorpus c = ParseFrames("x\t0\tA\tA,B,A\n");
  EXPECT_EQ(c.samples[0].sentence_frames, (std::set<std::string>{"A", "B"}));
  EXPECT_EQ(c.inventory.size(), 2u);
}

TEST(FrameTsv, TargetFrameMissingFromSetIsValidationError) {
  EXPECT_THROW(ParseFrames("x y\t0\tA\tB,C\n"), ValidationError);
}

TEST(FrameTsv, InventoryIsSortedUnion) {
  FrameCorpus c = ParseFrames("x\t0\tZeta\tZeta\ny\t0\tAlpha\tAlpha,Mu\n");
  EXPECT_EQ(c.inventory.names(), (std::vector<std::string>{"Alpha", "Mu", "Zeta"}));
}

TEST(Tsv, RoundTripThroughFiles) {
  SynthOptions o;
  o.n_train = 40;
  o.n_eval = 10;
  SynthCorpus corpus = GenerateSynthetic(o);
  const auto dir = std::filesystem::temp_directory_path() / "framebert_data_test";
  std::filesystem::create_directories(dir);
  SaveMetaphorTsv((dir / "m.tsv").string(), corpus.metaphor_train);
  SaveFrameTsv((dir / "f.tsv").string(), corpus.frame_train);
  EXPECT_EQ(LoadMetaphorTsv((dir / "m.tsv").string()), corpus.metaphor_train);
  FrameCorpus frames = LoadFrameTsv((dir / "f.tsv").string());
  EXPECT_EQ(frames.samples, corpus.frame_train);
  std::filesystem::remove_all(dir);
}

TEST(Tsv, MissingFileIsIoError) {
  EXPECT_THROW(LoadMetaphorTsv("/nonexistent/m.tsv"), IoError);
  EXPECT_THROW(LoadFrameTsv("/nonexistent/f.tsv"), IoError);
}

TEST(Vocabulary, EmptyCorpusHasOnlyReservedTokens) {
  Vocabulary v = BuildVocab({}, {}, 1);
  EXPECT_EQ(v.size(), 3u);
  EXPECT_EQ(v.Id(Vocabulary::kCls), 0);
  EXPECT_EQ(v.Id(Vocabulary::kPad), 1);
  EXPECT_EQ(v.Id(Vocabulary::kUnk), 2);
  EXPECT_EQ(v.Id("anything"), 2);
  EXPECT_THROW(v.Word(3), VocabularyError);
}

TEST(Vocabulary, OrderedByCountThenLexicographic) {
  std::vector<MetaphorSample> s = {{{"b", "a", "c", "c"}, 0, 0},
                                   {{"b", "d"}, 0, 0}};
  Vocabulary v = BuildVocab({&s}, {}, 1);
  EXPECT_EQ(v.words(), (std::vector<std::string>{"[CLS]", "[PAD]", "[UNK]", "b",
                                                 "c", "a", "d"}));
  Vocabulary frequent = BuildVocab({&s}, {}, 2);
  EXPECT_EQ(frequent.size(), 5u);
  EXPECT_EQ(frequent.Id("a"), kUnkId);
  EXPECT_EQ(BuildVocab({&s}, {}, 1), v);
  EXPECT_THROW(BuildVocab({&s}, {}, 0), UsageError);
}

TEST(Vocabulary, IsABijection) {
  SynthOptions o;
  o.n_train = 100;
  o.n_eval = 10;
  SynthCorpus c = GenerateSynthetic(o);
  Vocabulary v = BuildVocab({&c.metaphor_train}, {&c.frame_train}, 1);
  for (std::size_t i = 0; i < v.size(); ++i) {
    EXPECT_EQ(v.Id(v.Word(static_cast<int>(i))), static_cast<int>(i));
  }
  for (const auto& sample : c.metaphor_train) {
    for (const auto& w : sample.tokens) EXPECT_TRUE(v.Contains(w));
  }
}

TEST(Batching, SizesFollowBatchSize) {
  std::vector<MetaphorSample> s = {{{"a"}, 0, 0}, {{"b"}, 0, 1}, {{"c"}, 0, 0}};
  Vocabulary v = BuildVocab({&s}, {}, 1);
  auto batches = MakeSentenceBatches(s, v, 8, 2);
  ASSERT_EQ(batches.size(), 2u);
  EXPECT_EQ(batches[0].size(), 2u);
  EXPECT_EQ(batches[1].size(), 1u);
  EXPECT_EQ(batches[0].sample_indices, (std::vector<std::size_t>{0, 1}));
}

TEST(Batching, ClsShiftAndTypeIds) {
  std::vector<MetaphorSample> s = {{{"a", "b"}, 1, 0}};
  Vocabulary v = BuildVocab({&s}, {}, 1);
  SentenceBatch b = MakeSentenceBatches(s, v, 8, 1)[0];
  EXPECT_EQ(b.context.token_ids,
            (std::vector<int>{kClsId, v.Id("a"), v.Id("b")}));
  EXPECT_EQ(b.context.type_ids, (std::vector<int>{0, 0, 1}));
  EXPECT_EQ(b.context.target_positions, (std::vector<std::size_t>{2}));
  EXPECT_EQ(b.isolated.token_ids, (std::vector<int>{kClsId, v.Id("b")}));
  EXPECT_EQ(b.isolated.type_ids, (std::vector<int>{0, 1}));
}

TEST(Batching, PadPositionsAreMasked) {
  std::vector<MetaphorSample> s = {{{"a", "b", "c"}, 0, 0}, {{"d"}, 0, 0}};
  Vocabulary v = BuildVocab({&s}, {}, 1);
  SentenceBatch b = MakeSentenceBatches(s, v, 8, 2)[0];
  EXPECT_EQ(b.context.seq_len, 4u);
  EXPECT_EQ(b.context.mask, (std::vector<int>{1, 1, 1, 1, 1, 1, 0, 0}));
  EXPECT_EQ(b.context.token_ids[6], kPadId);
  EXPECT_NO_THROW(b.context.Validate());
}

TEST(Batching, TruncatesTailButRejectsLateTargets) {
  std::vector<MetaphorSample> s = {{{"a", "b", "c", "d", "e"}, 1, 0},
                                   {{"a", "b", "c", "d", "e"}, 4, 1}};
  Vocabulary v = BuildVocab({&s}, {}, 1);
  std::vector<RejectedSample> rejected;
  auto batches = MakeSentenceBatches(s, v, 4, 4, {}, &rejected);
  ASSERT_EQ(batches.size(), 1u);
  EXPECT_EQ(batches[0].size(), 1u);
  EXPECT_EQ(batches[0].context.seq_len, 4u);
  ASSERT_EQ(rejected.size(), 1u);
  EXPECT_EQ(rejected[0].index, 1u);
  EXPECT_FALSE(rejected[0].reason.empty());
}

TEST(Batching, KeepsOrderUnlessGivenOne) {
  std::vector<MetaphorSample> s;
  for (int i = 0; i < 7; ++i) s.push_back({{"w" + std::to_string(i)}, 0, 0});
  Vocabulary v = BuildVocab({&s}, {}, 1);
  std::vector<std::size_t> seen;
  for (const auto& b : MakeSentenceBatches(s, v, 8, 3)) {
    seen.insert(seen.end(), b.sample_indices.begin(), b.sample_indices.end());
  }
  EXPECT_EQ(seen, (std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6}));
  const std::vector<std::size_t> order = {6, 2, 0, 1, 5, 3, 4};
  seen.clear();
  for (const auto& b : MakeSentenceBatches(s, v, 8, 3, order)) {
    seen.insert(seen.end(), b.sample_indices.begin(), b.sample_indices.end());
  }
  EXPECT_EQ(seen, order);
}

TEST(Synthetic, SameSeedIsBitwiseIdentical) {
  SynthOptions o;
  o.n_train = 200;
  o.n_eval = 50;
  SynthCorpus a = GenerateSynthetic(o), b = GenerateSynthetic(o);
  EXPECT_EQ(a.frame_train, b.frame_train);
  EXPECT_EQ(a.metaphor_eval, b.metaphor_eval);
  o.seed = 43;
  EXPECT_NE(GenerateSynthetic(o).metaphor_train, a.metaphor_train);
}

TEST(Synthetic, ThousandSamplesAreBalanced) {
  SynthCorpus c = GenerateSynthetic(SynthOptions{});
  ASSERT_EQ(c.metaphor_train.size(), 1000u);
  int positives = 0;
  for (const auto& s : c.metaphor_train) positives += s.label;
  EXPECT_GE(positives, 480);
  EXPECT_LE(positives, 520);
}

TEST(Synthetic, ConstructionInvariants) {
  SynthCorpus c = GenerateSynthetic(SynthOptions{});
  EXPECT_EQ(c.inventory.size(), 12u);
  std::map<std::string, std::size_t> home;
  std::set<std::string> all;
  for (std::size_t f = 0; f < c.frame_words.size(); ++f) {
    EXPECT_EQ(c.frame_words[f].size(), 8u);
    for (const auto& w : c.frame_words[f]) {
      EXPECT_TRUE(all.insert(w).second) << "word sets overlap at " << w;
      home[w] = f;
    }
  }
  for (const auto& s : c.frame_train) {
    EXPECT_TRUE(s.sentence_frames.count(s.target_frame));
    EXPECT_LT(s.target_index, s.tokens.size());
  }
  // Label 1 iff the target's home frame differs from the context frame.
  for (const auto& s : c.metaphor_eval) {
    std::set<std::size_t> context;
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      if (i != s.target_index && home.count(s.tokens[i])) {
        context.insert(home[s.tokens[i]]);
      }
    }
    ASSERT_EQ(context.size(), 1u);
    EXPECT_EQ(s.label, *context.begin() != home.at(s.tokens[s.target_index]));
  }
}

TEST(Synthetic, TooFewFramesIsUsageError) {
  SynthOptions o;
  o.n_frames = 1;
  EXPECT_THROW(GenerateSynthetic(o), UsageError);
}

}  // namespace
}  // namespace framebert
