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

#include "framebert/cli.h"

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "framebert/errors.h"
#include "framebert/harness.h"
#include "json.hpp"

namespace framebert {
namespace {

using Json = nlohmann::ordered_json;

struct Flags {
  std::string config;
  std::string out;
  std::string checkpoint;
  std::string data;
  std::optional<std::string> mode;
  std::optional<std::uint64_t> seed;
  std::optional<double> lambda;
  std::optional<std::size_t> epochs;
  std::optional<std::size_t> batch_size;
  std::size_t k = 3;
};

enum class Stage { kPretrain, kTrain, kOther };

void MakeDirectory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir + ": " + ec.message());
}

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("write failed for " + path);
}

std::string JsonText(const Json& json) { return json.dump(2) + "\n"; }

ExperimentConfig ResolveConfig(const Flags& flags, const ExperimentConfig& base,
                               Stage stage) {
  ExperimentConfig config = base;
  if (!flags.config.empty()) {
    std::ifstream in(flags.config);
    if (!in) throw IoError("cannot open config " + flags.config);
    nlohmann::json json;
    try {
      json = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw UsageError("config " + flags.config + ": " + e.what());
    }
    config.MergeJson(json);
  }
  if (flags.seed) config.seed = *flags.seed;
  if (flags.lambda) config.lambda = *flags.lambda;
  if (flags.batch_size) config.batch_size = *flags.batch_size;
  if (flags.mode) config.mode = ParseAblationMode(*flags.mode);
  if (flags.epochs) {
    if (stage != Stage::kTrain) config.pretrain_epochs = *flags.epochs;
    if (stage != Stage::kPretrain) config.train_epochs = *flags.epochs;
  }
  config.Validate();
  return config;
}

ExperimentData ResolveData(const Flags& flags, std::uint64_t seed) {
  if (!flags.data.empty()) return LoadExperimentData(flags.data);
  SynthOptions options;
  options.seed = seed;
  return FromSynthetic(GenerateSynthetic(options));
}

Json DataSource(const Flags& flags, std::uint64_t seed) {
  if (!flags.data.empty()) return {{"dir", flags.data}};
  SynthOptions options;
  return {{"synthetic_seed", seed},
          {"n_frames", options.n_frames},
          {"n_train", options.n_train},
          {"n_eval", options.n_eval},
          {"words_per_frame", options.words_per_frame}};
}

void WriteRunConfig(const std::string& dir, const ExperimentConfig& config,
                    const Json& extra) {
  Json json = config.ToJson();
  for (const auto& [key, value] : extra.items()) json[key] = value;
  WriteText(dir + "/config.json", JsonText(json));
}

void WriteEvalOutputs(const std::string& dir, const EvalResult& result,
                      std::uint64_t seed) {
  MakeDirectory(dir);
  WriteText(dir + "/metrics.json", JsonText(EvalReportJson(result, seed)));
  WriteText(dir + "/metrics.tsv", FormatMetricsRow(result.mode, result.metrics));
  std::ostringstream preds;
  WritePredictions(preds, result.predictions);
  WriteText(dir + "/predictions.tsv", preds.str());
}

int GenData(const Flags& flags, std::ostream& out) {
  const ExperimentConfig config = ResolveConfig(flags, {}, Stage::kOther);
  MakeDirectory(flags.out);
  SaveExperimentData(ResolveData(Flags{}, config.seed), flags.out);
  WriteText(flags.out + "/config.json",
            JsonText({{"seed", config.seed},
                      {"data", DataSource(Flags{}, config.seed)}}));
  out << "wrote synthetic corpus to " << flags.out << '\n';
  return 0;
}

int PretrainFrames(const Flags& flags, std::ostream& out) {
  const ExperimentConfig config = ResolveConfig(flags, {}, Stage::kPretrain);
  const ExperimentData data = ResolveData(flags, config.seed);
  const Vocabulary vocab = BuildExperimentVocab(data, config.min_count);
  MakeDirectory(flags.out);
  std::ofstream log_file(flags.out + "/log.jsonl", std::ios::binary);
  if (!log_file) throw IoError("cannot write " + flags.out + "/log.jsonl");
  PretrainResult result =
      RunPretrain(config, data.frame_train, data.frame_eval, data.inventory,
                  vocab, RunLog(&log_file));
  SaveCheckpoint(result.model, flags.out + "/checkpoint");
  WriteRunConfig(flags.out, config, {{"data", DataSource(flags, config.seed)}});
  Json metrics = {{"stage", "pretrain"}, {"seed", config.seed}};
  if (!result.epochs.empty()) {
    const PretrainEpoch& last = result.epochs.back();
    metrics["final_loss"] = last.loss;
    metrics["eval_top1"] = last.eval.top1;
    metrics["eval_top3"] = last.eval.top3;
    out << "pretrain loss " << last.loss << " top1 " << last.eval.top1
        << " top3 " << last.eval.top3 << '\n';
  }
  WriteText(flags.out + "/metrics.json", JsonText(metrics));
  return 0;
}

int Train(const Flags& flags, std::ostream& out) {
  std::optional<Model> pretrained;
  if (!flags.checkpoint.empty()) pretrained = LoadCheckpoint(flags.checkpoint);
  const ExperimentConfig base = pretrained ? pretrained->config : ExperimentConfig{};
  const ExperimentConfig config = ResolveConfig(flags, base, Stage::kTrain);
  const ExperimentData data = ResolveData(flags, config.seed);
  std::optional<Vocabulary> vocab;
  if (!pretrained) vocab = BuildExperimentVocab(data, config.min_count);
  MakeDirectory(flags.out);
  std::ofstream log_file(flags.out + "/log.jsonl", std::ios::binary);
  if (!log_file) throw IoError("cannot write " + flags.out + "/log.jsonl");
  TrainResult result =
      RunTrain(config, data.metaphor_train, pretrained ? &*pretrained : nullptr,
               vocab ? &*vocab : nullptr, &data.inventory, RunLog(&log_file));
  SaveCheckpoint(result.model, flags.out + "/checkpoint");
  Json extra = {{"data", DataSource(flags, config.seed)}};
  if (!flags.checkpoint.empty()) extra["pretrained_checkpoint"] = flags.checkpoint;
  WriteRunConfig(flags.out, config, extra);
  WriteText(flags.out + "/metrics.json",
            JsonText({{"stage", "train"},
                      {"seed", config.seed},
                      {"mode", ToString(config.mode)},
                      {"epoch_losses", result.epoch_losses}}));
  if (!result.epoch_losses.empty()) {
    out << "train loss " << result.epoch_losses.front() << " -> "
        << result.epoch_losses.back() << '\n';
  }
  return 0;
}

int Eval(const Flags& flags, std::ostream& out) {
  const Model model = LoadCheckpoint(flags.checkpoint);
  const ExperimentConfig config = ResolveConfig(flags, model.config, Stage::kOther);
  const ExperimentData data = ResolveData(flags, config.seed);
  const EvalResult result =
      RunEval(model, data.metaphor_eval, config.mode, config.batch_size,
              config.seed, &data.inventory);
  if (!flags.out.empty()) {
    WriteEvalOutputs(flags.out, result, config.seed);
    WriteRunConfig(flags.out, config,
                   {{"data", DataSource(flags, config.seed)},
                    {"checkpoint", flags.checkpoint}});
  }
  out << FormatMetricsRow(result.mode, result.metrics);
  return 0;
}

int Ablate(const Flags& flags, std::ostream& out) {
  const ExperimentConfig config = ResolveConfig(flags, {}, Stage::kOther);
  const ExperimentData data = ResolveData(flags, config.seed);
  MakeDirectory(flags.out);
  std::ofstream log_file(flags.out + "/log.jsonl", std::ios::binary);
  if (!log_file) throw IoError("cannot write " + flags.out + "/log.jsonl");
  const AblationResult result = RunAblation(config, data, RunLog(&log_file));

  Json modes = Json::array();
  for (AblationMode mode : kAllAblationModes) {
    const EvalResult& run = result.runs.at(mode);
    WriteEvalOutputs(flags.out + "/" + ToString(mode), run, config.seed);
    modes.push_back(EvalReportJson(run, config.seed));
  }
  SaveCheckpoint(result.pretrained, flags.out + "/pretrained");
  SaveCheckpoint(result.trained, flags.out + "/trained");
  WriteRunConfig(flags.out, config, {{"data", DataSource(flags, config.seed)}});
  WriteText(flags.out + "/metrics.json",
            JsonText({{"seed", config.seed},
                      {"pretrain_top1", result.pretrain_accuracy.top1},
                      {"pretrain_top3", result.pretrain_accuracy.top3},
                      {"runs", modes}}));
  const std::string table = FormatAblationTable(result);
  WriteText(flags.out + "/ablation.tsv", table);
  out << table;
  return 0;
}

int Analyze(const Flags& flags, std::ostream& out) {
  const Model model = LoadCheckpoint(flags.checkpoint);
  const ExperimentConfig config = ResolveConfig(flags, model.config, Stage::kOther);
  const ExperimentData data = ResolveData(flags, config.seed);
  const ConceptReport report =
      AnalyzeConcepts(model, data.metaphor_eval, flags.k, config.batch_size);
  std::size_t pos = 0, pos_differ = 0, neg = 0, neg_same = 0;
  for (const ConceptEntry& e : report.entries) {
    const bool same =
        e.literal_frames.front().index == e.contextual_frames.front().index;
    if (e.gold_label == 1) {
      ++pos;
      pos_differ += !same;
    } else {
      ++neg;
      neg_same += same;
    }
  }
  Json json = ConceptReportJson(report);
  json["positives"] = pos;
  json["positives_top1_differ"] = pos_differ;
  json["negatives"] = neg;
  json["negatives_top1_same"] = neg_same;
  if (!flags.out.empty()) {
    MakeDirectory(flags.out);
    WriteText(flags.out + "/concepts.json", JsonText(json));
    WriteRunConfig(flags.out, config,
                   {{"data", DataSource(flags, config.seed)},
                    {"checkpoint", flags.checkpoint},
                    {"k", flags.k}});
  }
  out << "positives with differing top-1 frames: " << pos_differ << "/" << pos
      << "\nnegatives with identical top-1 frames: " << neg_same << "/" << neg
      << '\n';
  return 0;
}

}  // namespace

int Dispatch(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err) {
  CLI::App app("Metaphor detection with a frame-pretrained concept encoder",
               "framebert");
  app.require_subcommand(1);
  Flags flags;

  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config, "JSON config file")
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", flags.seed, "Random seed");
  };
  auto add_data = [&](CLI::App* sub) {
    sub->add_option("--data", flags.data,
                    "Directory written by gen-data (default: synthesize from "
                    "the seed)");
  };
  auto add_training = [&](CLI::App* sub) {
    sub->add_option("--epochs", flags.epochs, "Epochs");
    sub->add_option("--batch-size", flags.batch_size, "Batch size");
  };

  CLI::App* gen = app.add_subcommand("gen-data", "Write the synthetic corpora");
  add_config(gen);
  gen->add_option("--out", flags.out, "Output directory")->required();

  CLI::App* pretrain =
      app.add_subcommand("pretrain-frames", "Pretrain the concept encoder");
  add_config(pretrain);
  add_data(pretrain);
  add_training(pretrain);
  pretrain->add_option("--lambda", flags.lambda, "Weight of the sentence-frame loss");
  pretrain->add_option("--out", flags.out, "Output directory")->required();

  CLI::App* train = app.add_subcommand("train", "Train the metaphor detector");
  add_config(train);
  add_data(train);
  add_training(train);
  train->add_option("--checkpoint", flags.checkpoint,
                    "Pretraining checkpoint (not needed for no_frame_finetune)");
  train->add_option("--mode", flags.mode, "Ablation mode");
  train->add_option("--out", flags.out, "Output directory")->required();

  CLI::App* eval = app.add_subcommand("eval", "Evaluate a trained checkpoint");
  add_config(eval);
  add_data(eval);
  eval->add_option("--checkpoint", flags.checkpoint, "Trained checkpoint")
      ->required();
  eval->add_option("--mode", flags.mode, "Ablation mode");
  eval->add_option("--batch-size", flags.batch_size, "Shuffle batch size");
  eval->add_option("--out", flags.out, "Output directory");

  CLI::App* ablate =
      app.add_subcommand("ablate", "Run all four ablation modes from one pretraining");
  add_config(ablate);
  add_data(ablate);
  add_training(ablate);
  ablate->add_option("--lambda", flags.lambda, "Weight of the sentence-frame loss");
  ablate->add_option("--out", flags.out, "Output directory")->required();

  CLI::App* analyze =
      app.add_subcommand("analyze", "Report literal and contextual frames");
  add_config(analyze);
  add_data(analyze);
  analyze->add_option("--checkpoint", flags.checkpoint, "Checkpoint")->required();
  analyze->add_option("--k", flags.k, "Frames per list");
  analyze->add_option("--batch-size", flags.batch_size, "Batch size");
  analyze->add_option("--out", flags.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (gen->parsed()) return GenData(flags, out);
    if (pretrain->parsed()) return PretrainFrames(flags, out);
    if (train->parsed()) return Train(flags, out);
    if (eval->parsed()) return Eval(flags, out);
    if (ablate->parsed()) return Ablate(flags, out);
    if (analyze->parsed()) return Analyze(flags, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace framebert
