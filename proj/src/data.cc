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

#include "framebert/data.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "framebert/errors.h"

namespace framebert {

namespace {

std::vector<std::string> SplitOn(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    std::size_t end = text.find(sep, start);
    parts.push_back(text.substr(start, end - start));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return parts;
}

std::vector<std::string> SplitWords(const std::string& text) {
  std::vector<std::string> words;
  std::istringstream in(text);
  std::string word;
  while (in >> word) words.push_back(word);
  return words;
}

std::string JoinWords(const std::vector<std::string>& words, char sep) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i > 0) out += sep;
    out += words[i];
  }
  return out;
}

std::size_t ParseIndex(const std::string& field, const std::string& source,
                       int line) {
  std::size_t value = 0;
  auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw ParseError(source, line, "bad target index '" + field + "'");
  }
  return value;
}

// Reads lines, dropping a trailing CR and skipping blank lines. Calls
// fn(line_text, line_number).
template <typename Fn>
void ForEachRecord(std::istream& in, Fn fn) {
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    fn(line, number);
  }
}

std::ifstream OpenInput(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return in;
}

std::ofstream OpenOutput(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

struct SentenceRef {
  const std::vector<std::string>* tokens;
  std::size_t target_index;
};

std::vector<SentenceBatch> BatchSentences(const std::vector<SentenceRef>& refs,
                                          const Vocabulary& vocab,
                                          std::size_t max_len,
                                          std::size_t batch_size,
                                          std::span<const std::size_t> order,
                                          std::vector<RejectedSample>* rejected) {
  if (batch_size == 0) throw UsageError("batch size must be at least 1");
  if (max_len < 2) throw UsageError("max_len must be at least 2");

  std::vector<std::size_t> selected;
  if (order.empty()) {
    selected.resize(refs.size());
    for (std::size_t i = 0; i < refs.size(); ++i) selected[i] = i;
  } else {
    selected.assign(order.begin(), order.end());
  }

  std::vector<std::size_t> kept;
  for (std::size_t index : selected) {
    if (index >= refs.size()) throw UsageError("batch order index out of range");
    const SentenceRef& ref = refs[index];
    if (ref.target_index + 1 > max_len - 1) {
      if (rejected) {
        rejected->push_back(
            {index, "target at word " + std::to_string(ref.target_index) +
                        " does not fit max_len " + std::to_string(max_len)});
      }
      continue;
    }
    kept.push_back(index);
  }

  std::vector<SentenceBatch> batches;
  for (std::size_t start = 0; start < kept.size(); start += batch_size) {
    const std::size_t end = std::min(kept.size(), start + batch_size);
    SentenceBatch batch;
    std::size_t seq = 0;
    for (std::size_t i = start; i < end; ++i) {
      seq = std::max(seq, std::min(refs[kept[i]].tokens->size() + 1, max_len));
    }
    TokenBatch& ctx = batch.context;
    ctx.batch_size = end - start;
    ctx.seq_len = seq;
    ctx.token_ids.assign(ctx.batch_size * seq, kPadId);
    ctx.type_ids.assign(ctx.batch_size * seq, 0);
    ctx.mask.assign(ctx.batch_size * seq, 0);
    std::vector<int> target_ids;
    for (std::size_t i = start; i < end; ++i) {
      const SentenceRef& ref = refs[kept[i]];
      const std::size_t row = (i - start) * seq;
      const std::size_t len = std::min(ref.tokens->size() + 1, max_len);
      ctx.token_ids[row] = kClsId;
      ctx.mask[row] = 1;
      for (std::size_t w = 0; w + 1 < len; ++w) {
        ctx.token_ids[row + w + 1] = vocab.Id((*ref.tokens)[w]);
        ctx.mask[row + w + 1] = 1;
      }
      const std::size_t target = ref.target_index + 1;
      ctx.type_ids[row + target] = 1;
      ctx.target_positions.push_back(target);
      target_ids.push_back(ctx.token_ids[row + target]);
      batch.sample_indices.push_back(kept[i]);
    }
    batch.isolated = MakeIsolatedBatch(target_ids);
    batches.push_back(std::move(batch));
  }
  return batches;
}

}  // namespace

std::vector<MetaphorSample> ParseMetaphorTsv(std::istream& in,
                                             const std::string& source) {
  std::vector<MetaphorSample> samples;
  ForEachRecord(in, [&](const std::string& line, int number) {
    std::vector<std::string> fields = SplitOn(line, '\t');
    if (fields.size() != 3) {
      throw ParseError(source, number,
                       "expected 3 tab-separated fields, got " +
                           std::to_string(fields.size()));
    }
    MetaphorSample sample;
    sample.tokens = SplitWords(fields[0]);
    if (sample.tokens.empty()) throw ParseError(source, number, "empty sentence");
    sample.target_index = ParseIndex(fields[1], source, number);
    if (sample.target_index >= sample.tokens.size()) {
      throw ParseError(source, number,
                       "target index " + fields[1] + " outside sentence of " +
                           std::to_string(sample.tokens.size()) + " words");
    }
    if (fields[2] != "0" && fields[2] != "1") {
      throw ParseError(source, number, "label must be 0 or 1, got '" +
                                           fields[2] + "'");
    }
    sample.label = fields[2] == "1" ? 1 : 0;
    samples.push_back(std::move(sample));
  });
  return samples;
}

std::vector<MetaphorSample> LoadMetaphorTsv(const std::string& path) {
  std::ifstream in = OpenInput(path);
  return ParseMetaphorTsv(in, path);
}

void WriteMetaphorTsv(std::ostream& out,
                      const std::vector<MetaphorSample>& samples) {
  for (const MetaphorSample& s : samples) {
    out << JoinWords(s.tokens, ' ') << '\t' << s.target_index << '\t' << s.label
        << '\n';
  }
}

void SaveMetaphorTsv(const std::string& path,
                     const std::vector<MetaphorSample>& samples) {
  std::ofstream out = OpenOutput(path);
  WriteMetaphorTsv(out, samples);
  if (!out) throw IoError("failed writing " + path);
}

FrameCorpus ParseFrameTsv(std::istream& in, const std::string& source) {
  std::vector<FrameSample> samples;
  std::set<std::string> all_frames;
  ForEachRecord(in, [&](const std::string& line, int number) {
    std::vector<std::string> fields = SplitOn(line, '\t');
    if (fields.size() != 4) {
      throw ParseError(source, number,
                       "expected 4 tab-separated fields, got " +
                           std::to_string(fields.size()));
    }
    FrameSample sample;
    sample.tokens = SplitWords(fields[0]);
    if (sample.tokens.empty()) throw ParseError(source, number, "empty sentence");
    sample.target_index = ParseIndex(fields[1], source, number);
    if (sample.target_index >= sample.tokens.size()) {
      throw ParseError(source, number,
                       "target index " + fields[1] + " outside sentence of " +
                           std::to_string(sample.tokens.size()) + " words");
    }
    sample.target_frame = fields[2];
    if (sample.target_frame.empty()) {
      throw ParseError(source, number, "empty target frame");
    }
    for (const std::string& frame : SplitOn(fields[3], ',')) {
      if (frame.empty()) throw ParseError(source, number, "empty frame name");
      sample.sentence_frames.insert(frame);
    }
    if (!sample.sentence_frames.contains(sample.target_frame)) {
      throw ValidationError(source + ":" + std::to_string(number) +
                            ": target frame " + sample.target_frame +
                            " missing from sentence frames");
    }
    all_frames.insert(sample.sentence_frames.begin(),
                      sample.sentence_frames.end());
    samples.push_back(std::move(sample));
  });
  return {FrameInventory(std::vector<std::string>(all_frames.begin(),
                                                  all_frames.end())),
          std::move(samples)};
}

FrameCorpus LoadFrameTsv(const std::string& path) {
  std::ifstream in = OpenInput(path);
  return ParseFrameTsv(in, path);
}

void WriteFrameTsv(std::ostream& out, const std::vector<FrameSample>& samples) {
  for (const FrameSample& s : samples) {
    out << JoinWords(s.tokens, ' ') << '\t' << s.target_index << '\t'
        << s.target_frame << '\t'
        << JoinWords(std::vector<std::string>(s.sentence_frames.begin(),
                                              s.sentence_frames.end()),
                     ',')
        << '\n';
  }
}

void SaveFrameTsv(const std::string& path,
                  const std::vector<FrameSample>& samples) {
  std::ofstream out = OpenOutput(path);
  WriteFrameTsv(out, samples);
  if (!out) throw IoError("failed writing " + path);
}

Vocabulary::Vocabulary() : Vocabulary(FromWords({kCls, kPad, kUnk})) {}

Vocabulary Vocabulary::FromWords(std::vector<std::string> words) {
  if (words.size() < 3 || words[kClsId] != kCls || words[kPadId] != kPad ||
      words[kUnkId] != kUnk) {
    throw ValidationError("vocabulary must start with [CLS], [PAD], [UNK]");
  }
  Vocabulary vocab{Empty{}};
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (!vocab.ids_.emplace(words[i], static_cast<int>(i)).second) {
      throw ValidationError("duplicate vocabulary word '" + words[i] + "'");
    }
  }
  vocab.words_ = std::move(words);
  return vocab;
}

bool Vocabulary::Contains(const std::string& word) const {
  return ids_.contains(word);
}

int Vocabulary::Id(const std::string& word) const {
  auto it = ids_.find(word);
  return it == ids_.end() ? kUnkId : it->second;
}

const std::string& Vocabulary::Word(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= words_.size()) {
    throw VocabularyError("token id " + std::to_string(id) +
                          " outside vocabulary of size " +
                          std::to_string(words_.size()));
  }
  return words_[id];
}

void VocabularyBuilder::Add(const std::vector<std::string>& tokens) {
  for (const std::string& t : tokens) ++counts_[t];
}

Vocabulary VocabularyBuilder::Build(std::size_t min_count) const {
  if (min_count == 0) throw UsageError("min_count must be at least 1");
  std::vector<std::pair<std::string, std::size_t>> entries;
  for (const auto& [word, count] : counts_) {
    if (count >= min_count && word != Vocabulary::kCls &&
        word != Vocabulary::kPad && word != Vocabulary::kUnk) {
      entries.emplace_back(word, count);
    }
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> words = {Vocabulary::kCls, Vocabulary::kPad,
                                    Vocabulary::kUnk};
  for (auto& [word, count] : entries) words.push_back(word);
  return Vocabulary::FromWords(std::move(words));
}

Vocabulary BuildVocab(const std::vector<const std::vector<MetaphorSample>*>& metaphor,
                      const std::vector<const std::vector<FrameSample>*>& frames,
                      std::size_t min_count) {
  VocabularyBuilder builder;
  for (const auto* corpus : metaphor) {
    for (const MetaphorSample& s : *corpus) builder.Add(s.tokens);
  }
  for (const auto* corpus : frames) {
    for (const FrameSample& s : *corpus) builder.Add(s.tokens);
  }
  return builder.Build(min_count);
}

std::vector<SentenceBatch> MakeSentenceBatches(
    const std::vector<MetaphorSample>& samples, const Vocabulary& vocab,
    std::size_t max_len, std::size_t batch_size,
    std::span<const std::size_t> order, std::vector<RejectedSample>* rejected) {
  std::vector<SentenceRef> refs;
  refs.reserve(samples.size());
  for (const MetaphorSample& s : samples) refs.push_back({&s.tokens, s.target_index});
  return BatchSentences(refs, vocab, max_len, batch_size, order, rejected);
}

std::vector<SentenceBatch> MakeSentenceBatches(
    const std::vector<FrameSample>& samples, const Vocabulary& vocab,
    std::size_t max_len, std::size_t batch_size,
    std::span<const std::size_t> order, std::vector<RejectedSample>* rejected) {
  std::vector<SentenceRef> refs;
  refs.reserve(samples.size());
  for (const FrameSample& s : samples) refs.push_back({&s.tokens, s.target_index});
  return BatchSentences(refs, vocab, max_len, batch_size, order, rejected);
}

}  // namespace framebert
