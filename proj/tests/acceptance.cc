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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "framebert/cli.h"
#include "framebert/concept_encoder.h"
#include "framebert/harness.h"
#include "framebert/metaphor_head.h"
#include "framebert/ops.h"
#include "test_util.h"

namespace framebert {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass;
  std::string detail;
};

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string Fmt(const char* format, double a, double b = 0, double c = 0,
                double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c, d);
  return buf;
}

Outcome GradientIntegrity() {
  const auto start = Clock::now();
  std::vector<MetaphorSample> samples = {{{"staff", "face", "sarcasm"}, 1, 1},
                                         {{"hot", "computers", "are", "slow"}, 0, 0}};
  const Vocabulary vocab = BuildVocab({&samples}, {}, 1);
  EncoderConfig c;
  c.vocab_size = vocab.size();
  c.hidden_dim = 8;
  c.num_layers = 1;
  c.num_heads = 2;
  c.max_seq_len = 8;
  Rng rng(1);
  TransformerEncoder sentence(kSentenceEncoderName, c, rng);
  TransformerEncoder concept_encoder(ConceptEncoder::kEncoderName, c, rng);
  PredictionHead head(4 * 8 + 4 * 8, rng);
  const MetaphorBatch batch = MakeMetaphorBatches(samples, vocab, 8, 2)[0];

  ParameterList params = sentence.Parameters();
  for (auto& p : concept_encoder.Parameters()) params.push_back(p);
  for (auto& p : head.Parameters(kPredictionHeadName)) params.push_back(p);
  std::vector<std::string> names;
  for (const auto& p : params) names.push_back(p.name);
  auto r = testing::GradCheck(
      [&] {
        return MetaphorLoss(Forward(batch.sentences, sentence, concept_encoder,
                                    head, FrameMode::kNormal),
                            batch.labels);
      },
      Tensors(params), names);
  const double secs = Seconds(start);
  return {r.max_rel_error < 1e-4 && secs < 30.0,
          Fmt("%.0f values, max relative error %.2e, %.1f s", r.checked,
              r.max_rel_error, secs) +
              (r.max_rel_error < 1e-4 ? "" : " worst " + r.worst)};
}

Outcome EquationFidelity() {
  const std::size_t ds = 16, df = 8, batch = 3;
  std::mt19937_64 r(2);
  FusionInputs in{testing::RandomTensor({batch, ds}, r), testing::RandomTensor({batch, ds}, r),
                  testing::RandomTensor({batch, ds}, r), testing::RandomTensor({batch, df}, r),
                  testing::RandomTensor({batch, df}, r), testing::RandomTensor({batch, df}, r)};
  Tensor mip = BuildMip(in), spv = BuildSpv(in);
  bool ok = mip.dim(1) == 2 * ds + 2 * df && spv.dim(1) == 2 * ds + 2 * df;
  Rng rng(3);
  PredictionHead head(mip.dim(1) + spv.dim(1), rng);
  ok &= head.input_dim() == 4 * ds + 4 * df;

  auto w = head.weight.mutable_values();
  std::fill(w.begin(), w.end(), 0.0);
  head.bias.mutable_values()[0] = 0.0;
  const Tensor y_hat = Predict(mip, spv, head);
  for (double y : y_hat.values()) ok &= y == 0.5;

  const std::size_t frames = 5;
  FrameHeads heads(frames, df, rng);
  for (Tensor t : {heads.w0, heads.b0, heads.w1, heads.b1}) {
    auto v = t.mutable_values();
    std::fill(v.begin(), v.end(), 0.0);
  }
  const Tensor target_probs = FrameProbsTarget(heads, in.h_t);
  const Tensor cls_probs = FrameProbsCls(heads, in.h_cls);
  const Tensor sigmoid_zero = Sigmoid(Tensor::Zeros({4}));
  for (double p : target_probs.values()) ok &= p == 1.0 / frames;
  for (double p : cls_probs.values()) ok &= p == 0.5;
  for (double p : sigmoid_zero.values()) ok &= p == 0.5;
  return {ok, "h_MIP/h_SPV width 2d_s+2d_f=" + std::to_string(mip.dim(1)) +
                  ", head input 4d_s+4d_f=" + std::to_string(head.input_dim()) +
                  ", zero weights give 0.5 and 1/L exactly"};
}

Outcome LossComposition() {
  const double lambda = ExperimentConfig{}.lambda;
  std::mt19937_64 r(4);
  const std::size_t n = 4, l = 6;
  Tensor logits = testing::RandomTensor({n, l}, r, false);
  Tensor pt = Softmax(logits, 1), pc = Sigmoid(Scale(logits, 1.3));
  const std::vector<int> gold = {0, 5, 2, 2};
  const std::vector<std::vector<int>> sets = {{0, 1}, {5}, {2, 3, 4}, {2}};
  double cls = 0, target = 0;
  for (std::size_t b = 0; b < n; ++b) {
    target -= std::log(std::max(pt.values()[b * l + gold[b]], 1e-7));
    for (std::size_t f = 0; f < l; ++f) {
      const bool y = std::count(sets[b].begin(), sets[b].end(), int(f)) > 0;
      const double p = std::clamp(pc.values()[b * l + f], 1e-7, 1 - 1e-7);
      cls -= y ? std::log(p) : std::log(1 - p);
    }
  }
  cls /= n;
  target /= n;
  const double total = FrameLoss(pt, gold, pc, sets, lambda).total.item();
  const double err = std::abs(total - (lambda * cls + target));
  return {lambda == 2.0 && err <= 1e-12,
          Fmt("lambda=%.0f, |loss - (lambda*L_cls + L_target)| = %.1e", lambda, err)};
}

Outcome FramePretraining(const ExperimentData& data, const Vocabulary& vocab) {
  const auto start = Clock::now();
  ExperimentConfig cfg;
  PretrainResult result = RunPretrain(cfg, data.frame_train, data.frame_eval,
                                      data.inventory, vocab);
  const FrameAccuracy acc = result.epochs.back().eval;
  const double secs = Seconds(start);
  return {acc.top1 > 0.90 && acc.top3 >= acc.top1 && secs < 300.0,
          Fmt("held-out top-1 %.3f, top-3 %.3f, %.0f s", acc.top1, acc.top3, secs)};
}

struct SeedRun {
  std::uint64_t seed;
  std::map<AblationMode, double> f1;
  bool ordered;
  ConceptReport concepts;
};

Outcome AblationOrdering(std::vector<SeedRun>& runs) {
  const auto start = Clock::now();
  int passing = 0;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    ExperimentConfig cfg;
    cfg.seed = seed;
    SynthOptions o;
    o.seed = seed;
    const ExperimentData data = FromSynthetic(GenerateSynthetic(o));
    AblationResult result = RunAblation(cfg, data);
    SeedRun run{seed, {}, false, {}};
    for (const auto& [mode, eval] : result.runs) run.f1[mode] = eval.metrics.f1;
    const double none = run.f1[AblationMode::kNone];
    const double eval_only = run.f1[AblationMode::kRandInEval];
    const double both = run.f1[AblationMode::kRandInTrainAndEval];
    const double scratch = run.f1[AblationMode::kNoFrameFinetune];
    run.ordered = none > both && both > eval_only && none > scratch &&
                  none - eval_only >= 0.05;
    run.concepts = AnalyzeConcepts(result.trained, data.metaphor_eval, 3,
                                   cfg.batch_size);
    passing += run.ordered;
    detail += Fmt("\n    seed %.0f: none %.3f rand_in_train_and_eval %.3f ",
                  double(seed), none, both) +
              Fmt("rand_in_eval %.3f no_frame_finetune %.3f", eval_only, scratch) +
              (run.ordered ? " ok" : " out of order");
    runs.push_back(std::move(run));
  }
  const double secs = Seconds(start);
  return {passing >= 4 && secs < 1800.0,
          Fmt("%.0f/5 seeds ordered, %.0f s", passing, secs) + detail};
}

Outcome MetricsOracle() {
  std::mt19937_64 r(6);
  std::vector<Prediction> preds;
  for (std::size_t i = 0; i < 1000; ++i) {
    preds.push_back({i, std::uniform_real_distribution<double>()(r),
                     static_cast<int>(r() % 2)});
  }
  std::stringstream dump;
  WritePredictions(dump, preds);
  std::vector<int> p, g;
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  for (const Prediction& x : ParsePredictions(dump)) {
    p.push_back(x.predicted());
    g.push_back(x.label);
    const bool yhat = x.probability >= kDecisionThreshold;
    (yhat ? (x.label ? tp : fp) : (x.label ? fn : tn))++;
  }
  Metrics m = ComputeMetrics(p, g);
  Metrics brute;
  brute.tp = tp;
  brute.fp = fp;
  brute.fn = fn;
  brute.tn = tn;
  brute.precision = tp + fp ? double(tp) / double(tp + fp) : 0.0;
  brute.recall = tp + fn ? double(tp) / double(tp + fn) : 0.0;
  brute.f1 = brute.precision + brute.recall > 0
                 ? 2 * brute.precision * brute.recall / (brute.precision + brute.recall)
                 : 0.0;
  return {m == brute, Fmt("1000 pairs: tp %.0f fp %.0f fn %.0f tn %.0f", tp, fp, fn, tn)};
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int Cli(std::vector<std::string> args) {
  args.insert(args.begin(), "framebert");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  return Dispatch(static_cast<int>(argv.size()), argv.data(), out, std::cerr);
}

Outcome Determinism() {
  const fs::path root = fs::temp_directory_path() /
                        ("framebert_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  bool ok = true;
  for (const char* run : {"a", "b"}) {
    const std::string dir = (root / run).string();
    ok &= Cli({"pretrain-frames", "--seed", "11", "--out", dir + "/pre"}) == 0;
    ok &= Cli({"train", "--seed", "11", "--checkpoint", dir + "/pre/checkpoint",
               "--out", dir + "/train"}) == 0;
    ok &= Cli({"eval", "--seed", "11", "--mode", "rand_in_eval", "--checkpoint",
               dir + "/train/checkpoint", "--out", dir + "/eval"}) == 0;
  }
  std::size_t compared = 0;
  for (const auto& entry : fs::recursive_directory_iterator(root / "a")) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), root / "a");
    if (rel.filename() == "config.json") continue;  // records its own paths
    ok &= ReadFile(entry.path()) == ReadFile(root / "b" / rel);
    ++compared;
  }
  fs::remove_all(root);
  return {ok && compared >= 10,
          std::to_string(compared) +
              " files (checkpoints, metrics, predictions, logs) byte-identical"};
}

Outcome ConceptAnalysis(const std::vector<SeedRun>& runs) {
  if (runs.empty()) return {false, "no trained model"};
  const ConceptReport& report = runs.front().concepts;
  std::size_t pos = 0, differ = 0, neg = 0, same = 0;
  for (const ConceptEntry& e : report.entries) {
    const bool equal = e.literal_frames[0].index == e.contextual_frames[0].index;
    if (e.gold_label) {
      ++pos;
      differ += !equal;
    } else {
      ++neg;
      same += equal;
    }
  }
  const double pos_rate = double(differ) / double(pos);
  const double neg_rate = double(same) / double(neg);
  std::string detail = Fmt("seed 1: positives differ %.3f, negatives identical %.3f",
                           pos_rate, neg_rate);
  return {pos_rate >= 0.8 && neg_rate >= 0.8, detail};
}

}  // namespace
}  // namespace framebert

int main() {
  using namespace framebert;
  std::vector<std::pair<std::string, std::function<Outcome()>>> checks;
  SynthOptions options;
  options.seed = ExperimentConfig{}.seed;
  const ExperimentData data = FromSynthetic(GenerateSynthetic(options));
  const Vocabulary vocab = BuildExperimentVocab(data, 1);
  std::vector<SeedRun> runs;

  checks.emplace_back("gradient integrity", GradientIntegrity);
  checks.emplace_back("equation fidelity", EquationFidelity);
  checks.emplace_back("loss composition", LossComposition);
  checks.emplace_back("frame pretraining", [&] { return FramePretraining(data, vocab); });
  checks.emplace_back("ablation ordering", [&] { return AblationOrdering(runs); });
  checks.emplace_back("metrics oracle", MetricsOracle);
  checks.emplace_back("determinism", Determinism);
  checks.emplace_back("concept analysis", [&] { return ConceptAnalysis(runs); });

  int failures = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    Outcome o;
    try {
      o = checks[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " ("
              << checks[i].first << "): " << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
