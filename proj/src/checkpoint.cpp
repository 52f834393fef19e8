// Copyright 2026 The entlearn Authors
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

#include <fstream>

#include "entlearn/error.hpp"
#include "entlearn/neural.hpp"

namespace entlearn::neural {
namespace {

constexpr const char* kCheckpointFormat = "entlearn-checkpoint";
constexpr const char* kPredictionFormat = "entlearn-predictions";
constexpr int kVersion = 1;

}  // namespace

Json checkpoint_to_json(const ModelCheckpoint& checkpoint) {
  Json params = Json::array();
  for (const auto& [name, tensor] : checkpoint.model.export_tensors()) {
    params.push_back(Json{{"name", name}, {"shape", tensor.shape}, {"data", tensor.data}});
  }
  const auto& t = checkpoint.training;
  return Json{{"format", kCheckpointFormat},
              {"version", kVersion},
              {"architecture", to_json(checkpoint.model.arch())},
              {"parameters", std::move(params)},
              {"training", Json{{"seed", t.seed},
                                {"epochs_run", t.epochs_run},
                                {"best_epoch", t.best_epoch},
                                {"train_loss", t.train_loss},
                                {"val_loss", t.val_loss}}}};
}

ModelCheckpoint checkpoint_from_json(const Json& j) {
  try {
    if (j.at("format").get<std::string>() != kCheckpointFormat) throw ValidationError("not an entlearn checkpoint");
    if (j.at("version").get<int>() != kVersion) throw ValidationError("unsupported checkpoint version");
    Model model(arch_from_json(j.at("architecture")));
    std::vector<std::pair<std::string, Tensor>> tensors;
    for (const auto& p : j.at("parameters")) {
      tensors.emplace_back(p.at("name").get<std::string>(),
                           Tensor{p.at("shape").get<std::vector<int>>(), p.at("data").get<std::vector<double>>()});
    }
    model.import_tensors(tensors);
    const auto& t = j.at("training");
    TrainingMeta meta{t.at("seed").get<std::uint64_t>(), t.at("epochs_run").get<int>(),
                      t.at("best_epoch").get<int>(), t.at("train_loss").get<double>(),
                      t.at("val_loss").get<double>()};
    return {std::move(model), meta};
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const ModelCheckpoint& checkpoint) {
  write_text_file(path, dump_json(checkpoint_to_json(checkpoint)) + "\n");
}

ModelCheckpoint load_checkpoint(const std::filesystem::path& path) {
  return checkpoint_from_json(read_json_file(path));
}

void write_predictions(const std::filesystem::path& path, const PredictionSet& set) {
  ensure_parent_directory(path);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << dump_json(Json{{"format", kPredictionFormat},
                        {"version", kVersion},
                        {"output_dim", set.output_dim},
                        {"dataset", datagen::to_json(set.dataset)}})
      << '\n';
  for (const auto& p : set.predictions) {
    if (static_cast<int>(p.values.size()) != set.output_dim) {
      throw ValidationError("prediction length disagrees with output_dim");
    }
    out << dump_json(Json{{"predictions", p.values}, {"meta", p.meta}}) << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

PredictionSet read_predictions(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open predictions " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("prediction file is empty");
  try {
    const Json header = Json::parse(line);
    if (header.at("format").get<std::string>() != kPredictionFormat) {
      throw ValidationError("not an entlearn prediction file");
    }
    PredictionSet set{datagen::header_from_json(header.at("dataset")), header.at("output_dim").get<int>(), {}};
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const Json j = Json::parse(line);
      Prediction p{j.at("predictions").get<std::vector<double>>(), j.value("meta", Json::object())};
      if (static_cast<int>(p.values.size()) != set.output_dim) {
        throw ValidationError("prediction length disagrees with output_dim");
      }
      set.predictions.push_back(std::move(p));
    }
    return set;
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed prediction file: ") + e.what());
  }
}

}  // namespace entlearn::neural
