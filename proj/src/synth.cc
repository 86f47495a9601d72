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

// Synthetic frame-tagged corpus generator.

#include <algorithm>
#include <cctype>
#include <random>

#include "framebert/data.h"
#include "framebert/errors.h"
#include "framebert/params.h"

namespace framebert {

namespace {

const char* const kFrameNames[] = {
    "Body_parts",    "Temperature",      "Confronting_problem",
    "Motion",        "Commerce_buy",     "Ingestion",
    "Weather",       "Emotion_directed", "Cause_harm",
    "Communication", "Buildings",        "Education_teaching",
};

const char* const kFunctionWords[] = {"the", "a",  "of", "and", "in",
                                      "with", "to", "on", "at",  "was"};

// Fraction of frame-corpus samples that are literal sentences, metaphorical
// sentences, and bare target words. Bare words teach the isolated pass.
constexpr double kFrameLiteralShare = 0.7;
constexpr double kFrameMetaphorShare = 0.2;

constexpr std::size_t kMinContextWords = 3;
constexpr std::size_t kMaxContextWords = 5;
constexpr std::size_t kMaxFunctionWords = 3;

std::string Lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

class Generator {
 public:
  Generator(const SynthOptions& options, const SynthCorpus& corpus)
      : options_(options),
        corpus_(corpus),
        rng_(DeriveSeed(options.seed, "synth")) {}

  std::size_t Pick(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
  }

  std::size_t OtherFrame(std::size_t frame) {
    std::size_t other = Pick(options_.n_frames - 1);
    return other >= frame ? other + 1 : other;
  }

  // Sentence with a target word from `home` in a context evoking `context`.
  // Returns tokens and the target position.
  std::pair<std::vector<std::string>, std::size_t> Sentence(std::size_t home,
                                                            std::size_t context) {
    const auto& home_words = corpus_.frame_words[home];
    const std::string target = home_words[Pick(home_words.size())];

    std::vector<std::string> pool;
    for (const std::string& w : corpus_.frame_words[context]) {
      if (w != target) pool.push_back(w);
    }
    std::shuffle(pool.begin(), pool.end(), rng_);
    const std::size_t n_context =
        kMinContextWords + Pick(kMaxContextWords - kMinContextWords + 1);
    std::vector<std::string> words(pool.begin(),
                                   pool.begin() + std::min(n_context, pool.size()));
    const std::size_t n_function = 1 + Pick(kMaxFunctionWords);
    for (std::size_t i = 0; i < n_function; ++i) {
      words.push_back(kFunctionWords[Pick(std::size(kFunctionWords))]);
    }
    std::shuffle(words.begin(), words.end(), rng_);
    const std::size_t position = Pick(words.size() + 1);
    words.insert(words.begin() + position, target);
    return {std::move(words), position};
  }

  FrameSample FrameRecord() {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
    const std::size_t context = Pick(options_.n_frames);
    FrameSample sample;
    if (u < kFrameLiteralShare + kFrameMetaphorShare) {
      const std::size_t home = u < kFrameLiteralShare ? context : OtherFrame(context);
      auto [tokens, position] = Sentence(home, context);
      sample.tokens = std::move(tokens);
      sample.target_index = position;
      sample.target_frame = corpus_.inventory.name(context);
      sample.sentence_frames = {corpus_.inventory.name(context),
                                corpus_.inventory.name(home)};
    } else {
      const auto& words = corpus_.frame_words[context];
      sample.tokens = {words[Pick(words.size())]};
      sample.target_index = 0;
      sample.target_frame = corpus_.inventory.name(context);
      sample.sentence_frames = {sample.target_frame};
    }
    return sample;
  }

  // Exactly n/2 (rounded) metaphorical samples, in shuffled order.
  std::vector<MetaphorSample> MetaphorSplit(std::size_t n) {
    std::vector<int> labels(n, 0);
    std::fill(labels.begin(), labels.begin() + (n + 1) / 2, 1);
    std::shuffle(labels.begin(), labels.end(), rng_);
    std::vector<MetaphorSample> out;
    out.reserve(n);
    for (int label : labels) {
      const std::size_t context = Pick(options_.n_frames);
      const std::size_t home = label == 1 ? OtherFrame(context) : context;
      auto [tokens, position] = Sentence(home, context);
      out.push_back({std::move(tokens), position, label});
    }
    return out;
  }

 private:
  const SynthOptions& options_;
  const SynthCorpus& corpus_;
  Rng rng_;
};

}  // namespace

SynthCorpus GenerateSynthetic(const SynthOptions& options) {
  if (options.n_frames < 2) {
    throw UsageError("synthetic corpus needs at least 2 frames, got " +
                     std::to_string(options.n_frames));
  }
  if (options.words_per_frame < 2) {
    throw UsageError("synthetic corpus needs at least 2 words per frame");
  }

  std::vector<std::string> names;
  for (std::size_t f = 0; f < options.n_frames; ++f) {
    names.push_back(f < std::size(kFrameNames)
                        ? std::string(kFrameNames[f])
                        : "Frame_" + std::to_string(f));
  }
  std::sort(names.begin(), names.end());

  SynthCorpus corpus;
  corpus.inventory = FrameInventory(names);
  for (const std::string& name : names) {
    std::vector<std::string> words;
    for (std::size_t w = 0; w < options.words_per_frame; ++w) {
      words.push_back(Lower(name) + "_" + std::to_string(w));
    }
    corpus.frame_words.push_back(std::move(words));
  }

  Generator gen(options, corpus);
  for (std::size_t i = 0; i < options.n_train; ++i) {
    corpus.frame_train.push_back(gen.FrameRecord());
  }
  for (std::size_t i = 0; i < options.n_eval; ++i) {
    corpus.frame_eval.push_back(gen.FrameRecord());
  }
  corpus.metaphor_train = gen.MetaphorSplit(options.n_train);
  corpus.metaphor_eval = gen.MetaphorSplit(options.n_eval);
  return corpus;
}

}  // namespace framebert
