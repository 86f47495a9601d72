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

#ifndef FRAMEBERT_DATA_H_
#define FRAMEBERT_DATA_H_

// Corpus records, the two TSV carrier formats, vocabulary construction and
// batching.
//
// Metaphor TSV, one record per line (UTF-8, LF):
//   <space-separated sentence> TAB <0-based target index> TAB <0|1>
// Frame TSV:
//   <sentence> TAB <target index> TAB <target frame> TAB <frame,frame,...>
// Blank lines are ignored.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "framebert/encoder.h"
#include "framebert/frame_inventory.h"

namespace framebert {

struct MetaphorSample {
  std::vector<std::string> tokens;
  std::size_t target_index = 0;
  int label = 0;  // 1 = metaphorical

  bool operator==(const MetaphorSample&) const = default;
};

struct FrameSample {
  std::vector<std::string> tokens;
  std::size_t target_index = 0;
  std::string target_frame;
  std::set<std::string> sentence_frames;

  bool operator==(const FrameSample&) const = default;
};

struct FrameCorpus {
  FrameInventory inventory;  // sorted set of every frame in the file
  std::vector<FrameSample> samples;
};

std::vector<MetaphorSample> ParseMetaphorTsv(std::istream& in,
                                             const std::string& source);
std::vector<MetaphorSample> LoadMetaphorTsv(const std::string& path);
void WriteMetaphorTsv(std::ostream& out,
                      const std::vector<MetaphorSample>& samples);
void SaveMetaphorTsv(const std::string& path,
                     const std::vector<MetaphorSample>& samples);

FrameCorpus ParseFrameTsv(std::istream& in, const std::string& source);
FrameCorpus LoadFrameTsv(const std::string& path);
void WriteFrameTsv(std::ostream& out, const std::vector<FrameSample>& samples);
void SaveFrameTsv(const std::string& path,
                  const std::vector<FrameSample>& samples);

// Word <-> id bijection. Ids 0, 1, 2 are CLS, PAD and UNK.
class Vocabulary {
 public:
  static constexpr const char* kCls = "[CLS]";
  static constexpr const char* kPad = "[PAD]";
  static constexpr const char* kUnk = "[UNK]";

  Vocabulary();
  // `words` in id order; must start with the three reserved tokens.
  static Vocabulary FromWords(std::vector<std::string> words);

  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }
  bool Contains(const std::string& word) const;
  // UNK for unknown words.
  int Id(const std::string& word) const;
  const std::string& Word(int id) const;

  bool operator==(const Vocabulary& other) const {
    return words_ == other.words_;
  }

 private:
  struct Empty {};
  explicit Vocabulary(Empty) {}

  std::vector<std::string> words_;
  std::map<std::string, int> ids_;
};

// Words with count >= min_count, ordered by count desc then lexicographic.
class VocabularyBuilder {
 public:
  void Add(const std::vector<std::string>& tokens);
  Vocabulary Build(std::size_t min_count) const;

 private:
  std::map<std::string, std::size_t> counts_;
};

Vocabulary BuildVocab(const std::vector<const std::vector<MetaphorSample>*>& metaphor,
                      const std::vector<const std::vector<FrameSample>*>& frames,
                      std::size_t min_count);

struct RejectedSample {
  std::size_t index;
  std::string reason;
};

// Prepends CLS (shifting the target by one), pads to the batch maximum and
// marks the target with type id 1. Sentences longer than max_len are cut at
// the tail unless the cut would drop the target, in which case the sample is
// rejected. `order` selects and orders corpus indices; empty means corpus
// order.
std::vector<SentenceBatch> MakeSentenceBatches(
    const std::vector<MetaphorSample>& samples, const Vocabulary& vocab,
    std::size_t max_len, std::size_t batch_size,
    std::span<const std::size_t> order = {},
    std::vector<RejectedSample>* rejected = nullptr);
std::vector<SentenceBatch> MakeSentenceBatches(
    const std::vector<FrameSample>& samples, const Vocabulary& vocab,
    std::size_t max_len, std::size_t batch_size,
    std::span<const std::size_t> order = {},
    std::vector<RejectedSample>* rejected = nullptr);

struct SynthOptions {
  std::uint64_t seed = 42;
  std::size_t n_frames = 12;
  std::size_t n_train = 1000;
  std::size_t n_eval = 300;
  std::size_t words_per_frame = 8;
};

// Desk-scale stand-in for FrameNet + a metaphor corpus. Each frame owns a
// disjoint set of evoking words. A sentence has a context frame (most of its
// content words) and a target word from the target's home frame; the
// metaphor label is 1 iff the two frames differ. In the frame corpus the
// target's gold frame is the context frame and the sentence evokes both.
struct SynthCorpus {
  FrameInventory inventory;
  std::vector<std::vector<std::string>> frame_words;  // by inventory index
  std::vector<FrameSample> frame_train;
  std::vector<FrameSample> frame_eval;
  std::vector<MetaphorSample> metaphor_train;
  std::vector<MetaphorSample> metaphor_eval;
};

// Deterministic in options. Throws UsageError if n_frames < 2.
SynthCorpus GenerateSynthetic(const SynthOptions& options);

}  // namespace framebert

#endif  // FRAMEBERT_DATA_H_
