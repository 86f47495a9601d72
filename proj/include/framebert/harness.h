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

#ifndef FRAMEBERT_HARNESS_H_
#define FRAMEBERT_HARNESS_H_

// Two-stage training (frame pretraining, then joint metaphor training),
// evaluation, the frame-shuffle ablations and the concept analysis report.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "framebert/concept_encoder.h"
#include "framebert/data.h"
#include "framebert/encoder.h"
#include "framebert/metaphor_head.h"
#include "json.hpp"

namespace framebert {

enum class AblationMode {
  kNone,
  kRandInEval,          // frames shuffled in the batch at evaluation only
  kRandInTrainAndEval,  // frames shuffled during training and evaluation
  kNoFrameFinetune,     // concept encoder never pretrained
};

inline constexpr AblationMode kAllAblationModes[] = {
    AblationMode::kNone, AblationMode::kRandInEval,
    AblationMode::kRandInTrainAndEval, AblationMode::kNoFrameFinetune};

std::string ToString(AblationMode mode);
// Throws UsageError for unknown names.
AblationMode ParseAblationMode(const std::string& name);

// Frame shuffling applied when training / evaluating under `mode`.
FrameMode TrainFrameMode(AblationMode mode);
FrameMode EvalFrameMode(AblationMode mode);

struct ExperimentConfig {
  std::uint64_t seed = 1;
  double lambda = 2.0;
  std::size_t pretrain_epochs = 20;
  std::size_t train_epochs = 15;
  std::size_t batch_size = 32;
  double learning_rate = 1e-3;
  std::size_t max_seq_len = 64;
  std::size_t min_count = 1;
  // vocab_size is filled from the vocabulary at model construction.
  EncoderConfig sentence_encoder;
  EncoderConfig concept_encoder;
  AblationMode mode = AblationMode::kNone;

  // Throws UsageError when an invariant fails (lambda <= 0, zero sizes).
  void Validate() const;
  nlohmann::ordered_json ToJson() const;
  // Applies the keys present in `json` on top of *this. Unknown keys throw
  // UsageError.
  void MergeJson(const nlohmann::json& json);
};

// Everything a checkpoint persists. A pretraining checkpoint holds only the
// concept encoder; a trained one also holds the sentence encoder and the
// prediction head.
struct Model {
  ExperimentConfig config;
  Vocabulary vocab;
  FrameInventory inventory;
  std::optional<ConceptEncoder> concept_encoder;
  std::optional<TransformerEncoder> sentence;
  std::optional<PredictionHead> head;

  bool trained() const { return concept_encoder && sentence && head; }
  ParameterList Parameters() const;
  // Deep copy; tensors of the copy share no storage with *this.
  Model Clone() const;
};

// Builds a model with freshly initialized modules. `with_metaphor_parts`
// adds the sentence encoder and prediction head.
Model InitModel(const ExperimentConfig& config, const Vocabulary& vocab,
                const FrameInventory& inventory, bool with_metaphor_parts);

inline constexpr const char* kSentenceEncoderName = "sentence_encoder";
inline constexpr const char* kPredictionHeadName = "prediction_head";

// Checkpoint directory: manifest.json (config, vocabulary, frame inventory,
// parameter names/shapes/offsets) and params.bin (raw little-endian doubles
// in manifest order).
void SaveCheckpoint(const Model& model, const std::string& dir);
// Throws IoError for unreadable files and CompatibilityError when the
// parameter payload does not match the manifest.
Model LoadCheckpoint(const std::string& dir);

struct Metrics {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  double precision = 0.0, recall = 0.0, f1 = 0.0;

  bool operator==(const Metrics&) const = default;
};

// Throws UsageError on length mismatch or empty input.
Metrics ComputeMetrics(std::span<const int> preds, std::span<const int> golds);

nlohmann::ordered_json MetricsToJson(const Metrics& m);
// One tab-separated line: mode tp fp fn tn precision recall f1.
std::string FormatMetricsRow(AblationMode mode, const Metrics& m);

inline constexpr double kDecisionThreshold = 0.5;

struct Prediction {
  std::size_t id;
  double probability;
  int label;

  int predicted() const { return probability >= kDecisionThreshold ? 1 : 0; }
};

// Lines "id TAB probability TAB label".
void WritePredictions(std::ostream& out, const std::vector<Prediction>& preds);
std::vector<Prediction> ParsePredictions(std::istream& in);

// All inputs of one experiment.
struct ExperimentData {
  FrameInventory inventory;
  std::vector<FrameSample> frame_train;
  std::vector<FrameSample> frame_eval;
  std::vector<MetaphorSample> metaphor_train;
  std::vector<MetaphorSample> metaphor_eval;
};

inline constexpr const char* kFrameTrainFile = "frames_train.tsv";
inline constexpr const char* kFrameEvalFile = "frames_eval.tsv";
inline constexpr const char* kMetaphorTrainFile = "metaphor_train.tsv";
inline constexpr const char* kMetaphorEvalFile = "metaphor_eval.tsv";

ExperimentData FromSynthetic(const SynthCorpus& corpus);
void SaveExperimentData(const ExperimentData& data, const std::string& dir);
// Frame inventory is the union of both frame files.
ExperimentData LoadExperimentData(const std::string& dir);

// Vocabulary over the training splits of both corpora.
Vocabulary BuildExperimentVocab(const ExperimentData& data, std::size_t min_count);

// Line-delimited JSON records; a null sink drops them.
class RunLog {
 public:
  explicit RunLog(std::ostream* sink = nullptr) : sink_(sink) {}
  void Record(const nlohmann::ordered_json& record);

 private:
  std::ostream* sink_;
};

struct FrameAccuracy {
  double top1 = 0.0;
  double top3 = 0.0;
};

// Target-head accuracy of the contextual pass.
FrameAccuracy EvaluateFrames(const ConceptEncoder& concept_encoder,
                             const std::vector<FrameSample>& samples,
                             const Vocabulary& vocab, std::size_t max_len,
                             std::size_t batch_size);

struct PretrainEpoch {
  std::size_t epoch;
  double loss;
  FrameAccuracy eval;
};

struct PretrainResult {
  Model model;
  std::vector<PretrainEpoch> epochs;
};

// Trains the concept encoder and frame heads. `eval` may be empty. Throws
// UsageError for an empty corpus or mode == kNoFrameFinetune.
PretrainResult RunPretrain(const ExperimentConfig& config,
                           const std::vector<FrameSample>& train,
                           const std::vector<FrameSample>& eval,
                           const FrameInventory& inventory,
                           const Vocabulary& vocab, RunLog log = RunLog());

struct TrainResult {
  Model model;
  std::vector<double> epoch_losses;
};

// Joint metaphor training of both encoders and the prediction head. Requires
// `pretrained` unless config.mode == kNoFrameFinetune, in which case the
// concept encoder starts from random weights. Without a pretrained model,
// `vocab` and `inventory` must be supplied.
TrainResult RunTrain(const ExperimentConfig& config,
                     const std::vector<MetaphorSample>& train,
                     const Model* pretrained,
                     const Vocabulary* vocab = nullptr,
                     const FrameInventory* inventory = nullptr,
                     RunLog log = RunLog());

struct EvalResult {
  AblationMode mode;
  std::size_t batch_size;
  Metrics metrics;
  std::vector<Prediction> predictions;
};

// Evaluates a trained model. Frames are shuffled per batch (seeded by
// seed) when mode shuffles at evaluation. `data_inventory`, when given,
// must equal the checkpoint's (CompatibilityError otherwise).
EvalResult RunEval(const Model& model, const std::vector<MetaphorSample>& eval,
                   AblationMode mode, std::size_t batch_size, std::uint64_t seed,
                   const FrameInventory* data_inventory = nullptr);

nlohmann::ordered_json EvalReportJson(const EvalResult& result,
                                      std::uint64_t seed);

struct AblationResult {
  FrameAccuracy pretrain_accuracy;
  std::map<AblationMode, EvalResult> runs;
  Model pretrained;
  Model trained;  // mode kNone, shared with kRandInEval
};

// Runs all four modes from one pretraining, in kAllAblationModes order.
AblationResult RunAblation(const ExperimentConfig& config,
                           const ExperimentData& data, RunLog log = RunLog());

// Concatenated metrics rows in kAllAblationModes order.
std::string FormatAblationTable(const AblationResult& result);

struct ConceptEntry {
  std::size_t id;
  std::string target_word;
  int predicted_label;
  int gold_label;
  double probability;
  std::vector<ScoredFrame> literal_frames;     // isolated pass
  std::vector<ScoredFrame> contextual_frames;  // in-sentence pass
};

struct ConceptReport {
  std::size_t k;
  std::vector<ConceptEntry> entries;
};

// Throws UsageError unless 1 <= k <= L; a model without metaphor parts
// reports predicted_label -1.
ConceptReport AnalyzeConcepts(const Model& model,
                              const std::vector<MetaphorSample>& samples,
                              std::size_t k, std::size_t batch_size);

nlohmann::ordered_json ConceptReportJson(const ConceptReport& report);

}  // namespace framebert

#endif  // FRAMEBERT_HARNESS_H_
