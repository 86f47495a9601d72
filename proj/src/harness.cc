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

#include "framebert/harness.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <sstream>

#include "framebert/errors.h"
#include "framebert/ops.h"
#include "framebert/optimizer.h"

namespace framebert {

namespace {

using Json = nlohmann::ordered_json;

Json EncoderJson(const EncoderConfig& c) {
  return {{"hidden_dim", c.hidden_dim},
          {"num_layers", c.num_layers},
          {"num_heads", c.num_heads},
          {"feedforward_dim", c.ffn_dim()}};
}

void MergeEncoderJson(const nlohmann::json& j, EncoderConfig& c,
                      const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (key == "hidden_dim") {
      c.hidden_dim = value.get<std::size_t>();
    } else if (key == "num_layers") {
      c.num_layers = value.get<std::size_t>();
    } else if (key == "num_heads") {
      c.num_heads = value.get<std::size_t>();
    } else if (key == "feedforward_dim") {
      c.feedforward_dim = value.get<std::size_t>();
    } else {
      throw UsageError("unknown config key " + where + "." + key);
    }
  }
}

// Rank of `gold` under descending probability, ties by ascending index.
std::size_t RankOf(std::span<const double> p, std::size_t gold) {
  std::size_t rank = 0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (p[j] > p[gold] || (p[j] == p[gold] && j < gold)) ++rank;
  }
  return rank;
}

std::vector<std::size_t> ShuffledOrder(std::size_t n, Rng& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

void CopyValues(const ParameterList& from, const ParameterList& to) {
  std::map<std::string, Tensor> target;
  for (const NamedParameter& p : to) target.emplace(p.name, p.tensor);
  for (const NamedParameter& p : from) {
    Tensor t = target.at(p.name);
    std::span<const double> src = p.tensor.values();
    std::copy(src.begin(), src.end(), t.mutable_values().begin());
  }
}

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

Json FrameListJson(const std::vector<ScoredFrame>& frames) {
  Json out = Json::array();
  for (const ScoredFrame& f : frames) {
    out.push_back({{"frame", f.name}, {"probability", f.probability}});
  }
  return out;
}

}  // namespace

std::string ToString(AblationMode mode) {
  switch (mode) {
    case AblationMode::kNone:
      return "none";
    case AblationMode::kRandInEval:
      return "rand_in_eval";
    case AblationMode::kRandInTrainAndEval:
      return "rand_in_train_and_eval";
    case AblationMode::kNoFrameFinetune:
      return "no_frame_finetune";
  }
  return "unknown";
}

AblationMode ParseAblationMode(const std::string& name) {
  for (AblationMode mode : kAllAblationModes) {
    if (ToString(mode) == name) return mode;
  }
  throw UsageError("unknown mode '" + name +
                   "' (expected none, rand_in_eval, rand_in_train_and_eval "
                   "or no_frame_finetune)");
}

FrameMode TrainFrameMode(AblationMode mode) {
  return mode == AblationMode::kRandInTrainAndEval ? FrameMode::kShuffleFrames
                                                   : FrameMode::kNormal;
}

FrameMode EvalFrameMode(AblationMode mode) {
  return mode == AblationMode::kRandInEval ||
                 mode == AblationMode::kRandInTrainAndEval
             ? FrameMode::kShuffleFrames
             : FrameMode::kNormal;
}

void ExperimentConfig::Validate() const {
  if (!(lambda > 0.0)) throw UsageError("lambda must be positive");
  if (!(learning_rate > 0.0)) throw UsageError("learning rate must be positive");
  if (batch_size == 0) throw UsageError("batch size must be at least 1");
  if (max_seq_len < 2) throw UsageError("max_seq_len must be at least 2");
  if (min_count == 0) throw UsageError("min_count must be at least 1");
  EncoderConfig s = sentence_encoder, c = concept_encoder;
  s.max_seq_len = c.max_seq_len = max_seq_len;
  s.Validate();
  c.Validate();
}

nlohmann::ordered_json ExperimentConfig::ToJson() const {
  return {{"seed", seed},
          {"lambda", lambda},
          {"pretrain_epochs", pretrain_epochs},
          {"train_epochs", train_epochs},
          {"batch_size", batch_size},
          {"learning_rate", learning_rate},
          {"max_seq_len", max_seq_len},
          {"min_count", min_count},
          {"mode", ToString(mode)},
          {"sentence_encoder", EncoderJson(sentence_encoder)},
          {"concept_encoder", EncoderJson(concept_encoder)}};
}

void ExperimentConfig::MergeJson(const nlohmann::json& json) {
  if (!json.is_object()) throw UsageError("config must be a JSON object");
  try {
    for (const auto& [key, value] : json.items()) {
      if (key == "seed") {
        seed = value.get<std::uint64_t>();
      } else if (key == "lambda") {
        lambda = value.get<double>();
      } else if (key == "pretrain_epochs") {
        pretrain_epochs = value.get<std::size_t>();
      } else if (key == "train_epochs") {
        train_epochs = value.get<std::size_t>();
      } else if (key == "batch_size") {
        batch_size = value.get<std::size_t>();
      } else if (key == "learning_rate") {
        learning_rate = value.get<double>();
      } else if (key == "max_seq_len") {
        max_seq_len = value.get<std::size_t>();
      } else if (key == "min_count") {
        min_count = value.get<std::size_t>();
      } else if (key == "mode") {
        mode = ParseAblationMode(value.get<std::string>());
      } else if (key == "sentence_encoder") {
        MergeEncoderJson(value, sentence_encoder, key);
      } else if (key == "concept_encoder") {
        MergeEncoderJson(value, concept_encoder, key);
      } else {
        throw UsageError("unknown config key " + key);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("bad config value: ") + e.what());
  }
}

ParameterList Model::Parameters() const {
  ParameterList params;
  auto append = [&params](ParameterList more) {
    for (NamedParameter& p : more) params.push_back(std::move(p));
  };
  if (concept_encoder) append(concept_encoder->Parameters());
  if (sentence) append(sentence->Parameters());
  if (head) append(head->Parameters(kPredictionHeadName));
  return params;
}

Model Model::Clone() const {
  Model copy = InitModel(config, vocab, inventory, sentence.has_value());
  if (!concept_encoder) copy.concept_encoder.reset();
  CopyValues(Parameters(), copy.Parameters());
  return copy;
}

Model InitModel(const ExperimentConfig& config, const Vocabulary& vocab,
                const FrameInventory& inventory, bool with_metaphor_parts) {
  config.Validate();
  Model model;
  model.config = config;
  model.vocab = vocab;
  model.inventory = inventory;

  EncoderConfig concept_cfg = config.concept_encoder;
  concept_cfg.vocab_size = vocab.size();
  concept_cfg.max_seq_len = config.max_seq_len;
  Rng concept_rng(DeriveSeed(config.seed, "concept_encoder-init"));
  model.concept_encoder.emplace(concept_cfg, inventory, concept_rng);

  if (with_metaphor_parts) {
    EncoderConfig sentence_cfg = config.sentence_encoder;
    sentence_cfg.vocab_size = vocab.size();
    sentence_cfg.max_seq_len = config.max_seq_len;
    Rng sentence_rng(DeriveSeed(config.seed, "sentence-init"));
    model.sentence.emplace(kSentenceEncoderName, sentence_cfg, sentence_rng);
    const std::size_t width =
        4 * sentence_cfg.hidden_dim + 4 * concept_cfg.hidden_dim;
    model.head.emplace(width, sentence_rng);
  }
  return model;
}

Metrics ComputeMetrics(std::span<const int> preds, std::span<const int> golds) {
  if (preds.size() != golds.size()) {
    throw UsageError("metrics: " + std::to_string(preds.size()) +
                     " predictions for " + std::to_string(golds.size()) +
                     " gold labels");
  }
  if (preds.empty()) throw UsageError("metrics: no samples");
  Metrics m;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const bool p = preds[i] != 0, g = golds[i] != 0;
    if (p && g) ++m.tp;
    else if (p) ++m.fp;
    else if (g) ++m.fn;
    else ++m.tn;
  }
  const double tp = static_cast<double>(m.tp);
  m.precision = m.tp + m.fp == 0 ? 0.0 : tp / static_cast<double>(m.tp + m.fp);
  m.recall = m.tp + m.fn == 0 ? 0.0 : tp / static_cast<double>(m.tp + m.fn);
  m.f1 = m.precision + m.recall == 0.0
             ? 0.0
             : 2.0 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

nlohmann::ordered_json MetricsToJson(const Metrics& m) {
  return {{"tp", m.tp},
          {"fp", m.fp},
          {"fn", m.fn},
          {"tn", m.tn},
          {"precision", m.precision},
          {"recall", m.recall},
          {"f1", m.f1}};
}

std::string FormatMetricsRow(AblationMode mode, const Metrics& m) {
  std::ostringstream out;
  out << ToString(mode) << '\t' << m.tp << '\t' << m.fp << '\t' << m.fn << '\t'
      << m.tn << '\t' << FormatDouble(m.precision) << '\t'
      << FormatDouble(m.recall) << '\t' << FormatDouble(m.f1) << '\n';
  return out.str();
}

void WritePredictions(std::ostream& out, const std::vector<Prediction>& preds) {
  char buf[64];
  for (const Prediction& p : preds) {
    std::snprintf(buf, sizeof(buf), "%.17g", p.probability);
    out << p.id << '\t' << buf << '\t' << p.label << '\n';
  }
}

std::vector<Prediction> ParsePredictions(std::istream& in) {
  std::vector<Prediction> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    std::istringstream fields(line);
    Prediction p{};
    if (!(fields >> p.id >> p.probability >> p.label) ||
        (p.label != 0 && p.label != 1)) {
      throw ParseError("predictions", number, "malformed prediction line");
    }
    out.push_back(p);
  }
  return out;
}

ExperimentData FromSynthetic(const SynthCorpus& corpus) {
  return {corpus.inventory, corpus.frame_train, corpus.frame_eval,
          corpus.metaphor_train, corpus.metaphor_eval};
}

void SaveExperimentData(const ExperimentData& data, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir + ": " + ec.message());
  SaveFrameTsv(dir + "/" + kFrameTrainFile, data.frame_train);
  SaveFrameTsv(dir + "/" + kFrameEvalFile, data.frame_eval);
  SaveMetaphorTsv(dir + "/" + kMetaphorTrainFile, data.metaphor_train);
  SaveMetaphorTsv(dir + "/" + kMetaphorEvalFile, data.metaphor_eval);
}

ExperimentData LoadExperimentData(const std::string& dir) {
  ExperimentData data;
  FrameCorpus train = LoadFrameTsv(dir + "/" + kFrameTrainFile);
  FrameCorpus eval = LoadFrameTsv(dir + "/" + kFrameEvalFile);
  std::set<std::string> frames(train.inventory.names().begin(),
                               train.inventory.names().end());
  frames.insert(eval.inventory.names().begin(), eval.inventory.names().end());
  data.inventory =
      FrameInventory(std::vector<std::string>(frames.begin(), frames.end()));
  data.frame_train = std::move(train.samples);
  data.frame_eval = std::move(eval.samples);
  data.metaphor_train = LoadMetaphorTsv(dir + "/" + kMetaphorTrainFile);
  data.metaphor_eval = LoadMetaphorTsv(dir + "/" + kMetaphorEvalFile);
  return data;
}

Vocabulary BuildExperimentVocab(const ExperimentData& data,
                                std::size_t min_count) {
  return BuildVocab({&data.metaphor_train}, {&data.frame_train}, min_count);
}

void RunLog::Record(const nlohmann::ordered_json& record) {
  if (sink_ == nullptr) return;
  *sink_ << record.dump() << '\n';
  sink_->flush();
}

FrameAccuracy EvaluateFrames(const ConceptEncoder& concept_encoder,
                             const std::vector<FrameSample>& samples,
                             const Vocabulary& vocab, std::size_t max_len,
                             std::size_t batch_size) {
  NoGradGuard no_grad;
  std::size_t total = 0, top1 = 0, top3 = 0;
  for (const FrameBatch& batch : MakeFrameBatches(
           samples, concept_encoder.inventory(), vocab, max_len, batch_size)) {
    EncoderOutput out = concept_encoder.encoder().Encode(batch.sentences.context);
    Tensor probs = FrameProbsTarget(concept_encoder.heads(), out.Target());
    const std::size_t frames = probs.dim(1);
    for (std::size_t b = 0; b < batch.gold_target.size(); ++b) {
      std::span<const double> row = probs.values().subspan(b * frames, frames);
      const std::size_t rank = RankOf(row, batch.gold_target[b]);
      top1 += rank == 0;
      top3 += rank < 3;
      ++total;
    }
  }
  if (total == 0) return {};
  return {static_cast<double>(top1) / static_cast<double>(total),
          static_cast<double>(top3) / static_cast<double>(total)};
}

PretrainResult RunPretrain(const ExperimentConfig& config,
                           const std::vector<FrameSample>& train,
                           const std::vector<FrameSample>& eval,
                           const FrameInventory& inventory,
                           const Vocabulary& vocab, RunLog log) {
  config.Validate();
  if (config.mode == AblationMode::kNoFrameFinetune) {
    throw UsageError("no_frame_finetune skips frame pretraining");
  }
  if (train.empty()) throw UsageError("empty frame corpus");

  PretrainResult result{InitModel(config, vocab, inventory, false), {}};
  ConceptEncoder& concept_encoder = *result.model.concept_encoder;
  Adam optimizer(Tensors(concept_encoder.Parameters()),
                 AdamOptions{.learning_rate = config.learning_rate});
  Rng order_rng(DeriveSeed(config.seed, "pretrain-order"));

  for (std::size_t epoch = 1; epoch <= config.pretrain_epochs; ++epoch) {
    const std::vector<std::size_t> order = ShuffledOrder(train.size(), order_rng);
    double loss_sum = 0.0;
    std::size_t count = 0;
    for (const FrameBatch& batch :
         MakeFrameBatches(train, inventory, vocab, config.max_seq_len,
                          config.batch_size, order)) {
      const double loss = concept_encoder.PretrainStep(batch, config.lambda, optimizer);
      loss_sum += loss * static_cast<double>(batch.sentences.size());
      count += batch.sentences.size();
    }
    PretrainEpoch record{epoch, count ? loss_sum / static_cast<double>(count) : 0.0,
                         {}};
    Json line = {{"stage", "pretrain"}, {"epoch", epoch}, {"loss", record.loss}};
    if (!eval.empty()) {
      record.eval = EvaluateFrames(concept_encoder, eval, vocab, config.max_seq_len,
                                   config.batch_size);
      line["eval_top1"] = record.eval.top1;
      line["eval_top3"] = record.eval.top3;
    }
    log.Record(line);
    result.epochs.push_back(record);
  }
  return result;
}

TrainResult RunTrain(const ExperimentConfig& config,
                     const std::vector<MetaphorSample>& train,
                     const Model* pretrained, const Vocabulary* vocab,
                     const FrameInventory* inventory, RunLog log) {
  config.Validate();
  if (train.empty()) throw UsageError("empty metaphor corpus");
  const bool from_scratch = config.mode == AblationMode::kNoFrameFinetune;
  if (!from_scratch && (pretrained == nullptr || !pretrained->concept_encoder)) {
    throw UsageError("mode " + ToString(config.mode) +
                     " requires a frame-pretraining checkpoint");
  }
  if (pretrained != nullptr) {
    vocab = &pretrained->vocab;
    inventory = &pretrained->inventory;
  }
  if (vocab == nullptr || inventory == nullptr) {
    throw UsageError("training without a checkpoint needs a vocabulary and "
                     "frame inventory");
  }

  ExperimentConfig cfg = config;
  if (!from_scratch) cfg.concept_encoder = pretrained->config.concept_encoder;
  TrainResult result{InitModel(cfg, *vocab, *inventory, true), {}};
  Model& model = result.model;
  if (!from_scratch) {
    CopyValues(pretrained->concept_encoder->Parameters(), model.concept_encoder->Parameters());
  }

  // Frame heads are not part of the metaphor objective.
  ParameterList trainable = model.sentence->Parameters();
  for (NamedParameter& p : model.concept_encoder->encoder().Parameters()) {
    trainable.push_back(std::move(p));
  }
  for (NamedParameter& p : model.head->Parameters(kPredictionHeadName)) {
    trainable.push_back(std::move(p));
  }
  Adam optimizer(Tensors(trainable),
                 AdamOptions{.learning_rate = cfg.learning_rate});

  Rng order_rng(DeriveSeed(cfg.seed, "train-order"));
  Rng shuffle_rng(DeriveSeed(cfg.seed, "train-shuffle"));
  const FrameMode frame_mode = TrainFrameMode(cfg.mode);
  for (std::size_t epoch = 1; epoch <= cfg.train_epochs; ++epoch) {
    const std::vector<std::size_t> order = ShuffledOrder(train.size(), order_rng);
    double loss_sum = 0.0;
    std::size_t count = 0;
    for (const MetaphorBatch& batch : MakeMetaphorBatches(
             train, *vocab, cfg.max_seq_len, cfg.batch_size, order)) {
      std::vector<std::size_t> perm;
      if (frame_mode == FrameMode::kShuffleFrames) {
        perm = MakeShufflePermutation(batch.sentences.size(), shuffle_rng);
      }
      optimizer.ZeroGrad();
      Tensor pred = Forward(batch.sentences, *model.sentence,
                            model.concept_encoder->encoder(), *model.head, frame_mode,
                            perm);
      Tensor loss = MetaphorLoss(pred, batch.labels);
      loss.Backward();
      optimizer.Step();
      loss_sum += loss.item() * static_cast<double>(batch.labels.size());
      count += batch.labels.size();
    }
    const double mean = count ? loss_sum / static_cast<double>(count) : 0.0;
    result.epoch_losses.push_back(mean);
    log.Record({{"stage", "train"},
                {"mode", ToString(cfg.mode)},
                {"epoch", epoch},
                {"loss", mean}});
  }
  return result;
}

EvalResult RunEval(const Model& model, const std::vector<MetaphorSample>& eval,
                   AblationMode mode, std::size_t batch_size, std::uint64_t seed,
                   const FrameInventory* data_inventory) {
  if (!model.trained()) {
    throw UsageError("evaluation needs a checkpoint from the training stage");
  }
  if (data_inventory != nullptr && !(*data_inventory == model.inventory)) {
    throw CompatibilityError("frame inventory of the data (" +
                             std::to_string(data_inventory->size()) +
                             " frames) differs from the checkpoint's (" +
                             std::to_string(model.inventory.size()) + ")");
  }
  if (eval.empty()) throw UsageError("empty evaluation corpus");

  NoGradGuard no_grad;
  EvalResult result{mode, batch_size, {}, {}};
  Rng shuffle_rng(DeriveSeed(seed, "eval-shuffle"));
  const FrameMode frame_mode = EvalFrameMode(mode);
  std::vector<RejectedSample> rejected;
  for (const MetaphorBatch& batch :
       MakeMetaphorBatches(eval, model.vocab, model.config.max_seq_len,
                           batch_size, {}, &rejected)) {
    std::vector<std::size_t> perm;
    if (frame_mode == FrameMode::kShuffleFrames) {
      perm = MakeShufflePermutation(batch.sentences.size(), shuffle_rng);
    }
    Tensor pred = Forward(batch.sentences, *model.sentence,
                          model.concept_encoder->encoder(), *model.head, frame_mode,
                          perm);
    for (std::size_t b = 0; b < batch.labels.size(); ++b) {
      result.predictions.push_back({batch.sentences.sample_indices[b],
                                    pred.values()[b],
                                    static_cast<int>(batch.labels[b])});
    }
  }
  for (const RejectedSample& r : rejected) {
    std::clog << "WARNING: evaluation skipped sample " << r.index << ": "
              << r.reason << '\n';
  }
  std::vector<int> preds, golds;
  for (const Prediction& p : result.predictions) {
    preds.push_back(p.predicted());
    golds.push_back(p.label);
  }
  result.metrics = ComputeMetrics(preds, golds);
  return result;
}

nlohmann::ordered_json EvalReportJson(const EvalResult& result,
                                      std::uint64_t seed) {
  return {{"mode", ToString(result.mode)},
          {"seed", seed},
          {"batch_size", result.batch_size},
          {"threshold", kDecisionThreshold},
          {"samples", result.predictions.size()},
          {"metrics", MetricsToJson(result.metrics)}};
}

AblationResult RunAblation(const ExperimentConfig& config,
                           const ExperimentData& data, RunLog log) {
  const Vocabulary vocab = BuildExperimentVocab(data, config.min_count);
  ExperimentConfig cfg = config;

  cfg.mode = AblationMode::kNone;
  PretrainResult pretrain = RunPretrain(cfg, data.frame_train, data.frame_eval,
                                        data.inventory, vocab, log);
  AblationResult result{{}, {}, std::move(pretrain.model), Model{}};
  result.pretrain_accuracy = EvaluateFrames(*result.pretrained.concept_encoder,
                                            data.frame_eval, vocab,
                                            cfg.max_seq_len, cfg.batch_size);

  // none and rand_in_eval share one trained model.
  result.trained = RunTrain(cfg, data.metaphor_train, &result.pretrained,
                            nullptr, nullptr, log)
                       .model;
  for (AblationMode mode : {AblationMode::kNone, AblationMode::kRandInEval}) {
    result.runs[mode] = RunEval(result.trained, data.metaphor_eval, mode,
                                cfg.batch_size, cfg.seed, &data.inventory);
  }

  cfg.mode = AblationMode::kRandInTrainAndEval;
  Model shuffled =
      RunTrain(cfg, data.metaphor_train, &result.pretrained, nullptr, nullptr, log)
          .model;
  result.runs[cfg.mode] = RunEval(shuffled, data.metaphor_eval, cfg.mode,
                                  cfg.batch_size, cfg.seed, &data.inventory);

  cfg.mode = AblationMode::kNoFrameFinetune;
  Model scratch = RunTrain(cfg, data.metaphor_train, nullptr, &vocab,
                           &data.inventory, log)
                      .model;
  result.runs[cfg.mode] = RunEval(scratch, data.metaphor_eval, cfg.mode,
                                  cfg.batch_size, cfg.seed, &data.inventory);
  return result;
}

std::string FormatAblationTable(const AblationResult& result) {
  std::string table;
  for (AblationMode mode : kAllAblationModes) {
    table += FormatMetricsRow(mode, result.runs.at(mode).metrics);
  }
  return table;
}

ConceptReport AnalyzeConcepts(const Model& model,
                              const std::vector<MetaphorSample>& samples,
                              std::size_t k, std::size_t batch_size) {
  if (!model.concept_encoder) throw UsageError("model has no concept encoder");
  const std::size_t frames = model.inventory.size();
  if (k < 1 || k > frames) {
    throw UsageError("k must be in [1, " + std::to_string(frames) + "], got " +
                     std::to_string(k));
  }
  NoGradGuard no_grad;
  ConceptReport report{k, {}};
  const ConceptEncoder& concept_encoder = *model.concept_encoder;
  const std::size_t d = concept_encoder.encoder().config().hidden_dim;
  for (const MetaphorBatch& batch : MakeMetaphorBatches(
           samples, model.vocab, model.config.max_seq_len, batch_size)) {
    EncoderViews views = concept_encoder.Views(batch.sentences);
    Tensor pred;
    if (model.trained()) {
      pred = Forward(batch.sentences, *model.sentence, concept_encoder.encoder(),
                     *model.head, FrameMode::kNormal);
    }
    for (std::size_t b = 0; b < batch.labels.size(); ++b) {
      const std::size_t id = batch.sentences.sample_indices[b];
      const MetaphorSample& sample = samples[id];
      auto row = [&](const Tensor& t) {
        std::span<const double> v = t.values().subspan(b * d, d);
        return Tensor({d}, std::vector<double>(v.begin(), v.end()));
      };
      ConceptEntry entry;
      entry.id = id;
      entry.target_word = sample.tokens[sample.target_index];
      entry.gold_label = sample.label;
      entry.probability = pred.defined() ? pred.values()[b] : -1.0;
      entry.predicted_label =
          pred.defined() ? (pred.values()[b] >= kDecisionThreshold ? 1 : 0) : -1;
      entry.literal_frames = concept_encoder.TopKFrames(row(views.isolated), k);
      entry.contextual_frames = concept_encoder.TopKFrames(row(views.contextual), k);
      report.entries.push_back(std::move(entry));
    }
  }
  return report;
}

nlohmann::ordered_json ConceptReportJson(const ConceptReport& report) {
  Json entries = Json::array();
  for (const ConceptEntry& e : report.entries) {
    entries.push_back({{"id", e.id},
                       {"target", e.target_word},
                       {"predicted_label", e.predicted_label},
                       {"gold_label", e.gold_label},
                       {"probability", e.probability},
                       {"literal_frames", FrameListJson(e.literal_frames)},
                       {"contextual_frames", FrameListJson(e.contextual_frames)}});
  }
  return {{"k", report.k}, {"samples", std::move(entries)}};
}

}  // namespace framebert
