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

#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>

#include "framebert/errors.h"
#include "framebert/harness.h"

namespace framebert {

namespace {

constexpr const char* kManifestFile = "manifest.json";
constexpr const char* kParamsFile = "params.bin";
constexpr const char* kFormat = "framebert-checkpoint";
constexpr int kVersion = 1;

}  // namespace

void SaveCheckpoint(const Model& model, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir + ": " + ec.message());

  nlohmann::ordered_json manifest;
  manifest["format"] = kFormat;
  manifest["version"] = kVersion;
  manifest["stage"] = model.trained() ? "trained" : "pretrained";
  manifest["has_concept_encoder"] = model.concept_encoder.has_value();
  manifest["config"] = model.config.ToJson();
  manifest["vocabulary"] = model.vocab.words();
  manifest["frames"] = model.inventory.names();
  nlohmann::ordered_json entries = nlohmann::ordered_json::array();
  std::size_t offset = 0;
  const ParameterList params = model.Parameters();
  for (const NamedParameter& p : params) {
    entries.push_back({{"name", p.name},
                       {"shape", p.tensor.shape()},
                       {"offset", offset}});
    offset += p.tensor.size();
  }
  manifest["parameters"] = std::move(entries);
  manifest["total_values"] = offset;

  const std::string manifest_path = dir + "/" + kManifestFile;
  std::ofstream mout(manifest_path, std::ios::binary);
  if (!mout) throw IoError("cannot write " + manifest_path);
  mout << manifest.dump(2) << '\n';
  if (!mout) throw IoError("failed writing " + manifest_path);

  const std::string params_path = dir + "/" + kParamsFile;
  std::ofstream pout(params_path, std::ios::binary);
  if (!pout) throw IoError("cannot write " + params_path);
  for (const NamedParameter& p : params) {
    std::span<const double> v = p.tensor.values();
    pout.write(reinterpret_cast<const char*>(v.data()),
               static_cast<std::streamsize>(v.size_bytes()));
  }
  if (!pout) throw IoError("failed writing " + params_path);
}

Model LoadCheckpoint(const std::string& dir) {
  const std::string manifest_path = dir + "/" + kManifestFile;
  std::ifstream min(manifest_path);
  if (!min) throw IoError("cannot open " + manifest_path);
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(min);
  } catch (const nlohmann::json::exception& e) {
    throw CompatibilityError(manifest_path + ": " + e.what());
  }
  if (manifest.value("format", "") != kFormat ||
      manifest.value("version", 0) != kVersion) {
    throw CompatibilityError(manifest_path + ": not a version " +
                             std::to_string(kVersion) + " checkpoint");
  }

  Model model;
  try {
    model.config.MergeJson(manifest.at("config"));
    model.vocab = Vocabulary::FromWords(
        manifest.at("vocabulary").get<std::vector<std::string>>());
    model.inventory =
        FrameInventory(manifest.at("frames").get<std::vector<std::string>>());
  } catch (const nlohmann::json::exception& e) {
    throw CompatibilityError(manifest_path + ": " + e.what());
  }
  const bool trained = manifest.value("stage", "") == "trained";
  model = InitModel(model.config, model.vocab, model.inventory, trained);
  if (!manifest.value("has_concept_encoder", true)) model.concept_encoder.reset();

  std::map<std::string, Tensor> by_name;
  for (NamedParameter& p : model.Parameters()) by_name.emplace(p.name, p.tensor);

  const std::string params_path = dir + "/" + kParamsFile;
  std::ifstream pin(params_path, std::ios::binary);
  if (!pin) throw IoError("cannot open " + params_path);
  std::vector<char> raw((std::istreambuf_iterator<char>(pin)),
                        std::istreambuf_iterator<char>());
  const std::size_t total = manifest.value("total_values", std::size_t{0});
  if (raw.size() != total * sizeof(double)) {
    throw CompatibilityError(params_path + ": expected " +
                             std::to_string(total * sizeof(double)) +
                             " bytes, found " + std::to_string(raw.size()));
  }
  const auto& entries = manifest.at("parameters");
  if (entries.size() != by_name.size()) {
    throw CompatibilityError(manifest_path + ": " +
                             std::to_string(entries.size()) +
                             " parameters, model expects " +
                             std::to_string(by_name.size()));
  }
  for (const auto& entry : entries) {
    const std::string name = entry.at("name").get<std::string>();
    auto it = by_name.find(name);
    if (it == by_name.end()) {
      throw CompatibilityError("checkpoint parameter " + name +
                               " unknown to the model");
    }
    Tensor& t = it->second;
    if (entry.at("shape").get<Shape>() != t.shape()) {
      throw CompatibilityError("checkpoint parameter " + name + " has shape " +
                               entry.at("shape").dump() + ", model expects " +
                               ShapeToString(t.shape()));
    }
    const std::size_t offset = entry.at("offset").get<std::size_t>();
    if (offset + t.size() > total) {
      throw CompatibilityError("checkpoint parameter " + name +
                               " runs past the payload");
    }
    std::memcpy(t.mutable_values().data(), raw.data() + offset * sizeof(double),
                t.size() * sizeof(double));
  }
  return model;
}

}  // namespace framebert
