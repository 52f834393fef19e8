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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "entlearn/error.hpp"
#include "entlearn/neural.hpp"

namespace entlearn::neural {
namespace {

constexpr Eigen::Index kEvalChunk = 1024;

Matrix gather_columns(const Matrix& source, std::span<const std::size_t> columns) {
  Matrix out(source.rows(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t k = 0; k < columns.size(); ++k) {
    out.col(static_cast<Eigen::Index>(k)) = source.col(static_cast<Eigen::Index>(columns[k]));
  }
  return out;
}

// Mean per-sample MSE over the given columns.
double dataset_loss(const Model& model, const Matrix& inputs, const Matrix& targets,
                    std::span<const std::size_t> columns) {
  double total = 0.0;
  for (std::size_t start = 0; start < columns.size(); start += kEvalChunk) {
    const auto chunk = columns.subspan(start, std::min<std::size_t>(kEvalChunk, columns.size() - start));
    const Matrix diff = model_forward(model, gather_columns(inputs, chunk)) - gather_columns(targets, chunk);
    total += diff.squaredNorm();
  }
  return total / (static_cast<double>(columns.size()) * static_cast<double>(targets.rows()));
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ValidationError("learning rate must be positive");
  if (batch_size < 1) throw ValidationError("batch size must be positive");
  if (max_epochs < 1) throw ValidationError("max epochs must be positive");
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw ValidationError("validation fraction must lie strictly between 0 and 1");
  }
  if (patience < 1) throw ValidationError("patience must be positive");
}

Json to_json(const TrainConfig& c) {
  return Json{{"learning_rate", c.learning_rate}, {"batch_size", c.batch_size},
              {"max_epochs", c.max_epochs},       {"validation_fraction", c.validation_fraction},
              {"patience", c.patience},           {"seed", c.seed}};
}

TrainConfig train_config_from_json(const Json& j, TrainConfig c) {
  try {
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.max_epochs = j.value("max_epochs", c.max_epochs);
    c.validation_fraction = j.value("validation_fraction", c.validation_fraction);
    c.patience = j.value("patience", c.patience);
    c.seed = j.value("seed", c.seed);
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed training config: ") + e.what());
  }
  c.validate();
  return c;
}

Matrix inputs_matrix(const datagen::Dataset& dataset) {
  Matrix m(dataset.header.input_dim, static_cast<Eigen::Index>(dataset.samples.size()));
  for (std::size_t k = 0; k < dataset.samples.size(); ++k) {
    m.col(static_cast<Eigen::Index>(k)) =
        Eigen::Map<const Vector>(dataset.samples[k].inputs.data(), dataset.header.input_dim);
  }
  return m;
}

Matrix targets_matrix(const datagen::Dataset& dataset) {
  Matrix m(dataset.header.target_dim, static_cast<Eigen::Index>(dataset.samples.size()));
  for (std::size_t k = 0; k < dataset.samples.size(); ++k) {
    m.col(static_cast<Eigen::Index>(k)) =
        Eigen::Map<const Vector>(dataset.samples[k].targets.data(), dataset.header.target_dim);
  }
  return m;
}

void check_compatible(const datagen::DatasetHeader& header, const ArchDescriptor& arch) {
  const bool dynamic = header.kind == datagen::DatasetKind::Dynamic;
  if (dynamic != (arch.kind == ModelKind::DynamicLstm)) {
    throw ValidationError("dataset kind '" + datagen::to_string(header.kind) + "' does not match architecture '" +
                          to_string(arch.kind) + "'");
  }
  if (arch.total_input_dim() != header.input_dim) {
    throw ValidationError("architecture input width " + std::to_string(arch.total_input_dim()) +
                          " does not match dataset input_dim " + std::to_string(header.input_dim));
  }
  if (arch.output_dim != header.target_dim) {
    throw ValidationError("architecture output width " + std::to_string(arch.output_dim) +
                          " does not match dataset target_dim " + std::to_string(header.target_dim));
  }
  if (dynamic && (arch.steps != header.grid->steps || arch.k_out != header.grid->k_out)) {
    throw ValidationError("architecture time grid does not match the dataset grid");
  }
}

TrainResult train(const datagen::Dataset& dataset, const ArchDescriptor& arch, const TrainConfig& config) {
  config.validate();
  arch.validate();
  check_compatible(dataset.header, arch);
  if (dataset.samples.empty()) throw ValidationError("cannot train on an empty dataset");

  const Matrix inputs = inputs_matrix(dataset);
  const Matrix targets = targets_matrix(dataset);
  const std::size_t n = dataset.samples.size();

  std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32), 0x7a1bu};
  std::mt19937_64 rng(seq);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_val = static_cast<std::size_t>(std::floor(static_cast<double>(n) * config.validation_fraction));
  const std::span<const std::size_t> val_idx(order.data(), n_val);
  std::vector<std::size_t> train_idx(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());

  Model model = Model::initialized(arch, config.seed);
  AdamState adam = AdamState::for_model(AdamHyper{config.learning_rate}, model);

  TrainResult result{ModelCheckpoint{model, TrainingMeta{config.seed}}, {}};
  double best = std::numeric_limits<double>::infinity();
  int since_best = 0;
  const auto batch = static_cast<std::size_t>(config.batch_size);
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::shuffle(train_idx.begin(), train_idx.end(), rng);
    double running = 0.0;
    for (std::size_t start = 0; start < train_idx.size(); start += batch) {
      const std::span<const std::size_t> cols(train_idx.data() + start, std::min(batch, train_idx.size() - start));
      auto step = backward(model, gather_columns(inputs, cols), gather_columns(targets, cols));
      adam_step(adam, model, step.gradients);
      running += step.loss * static_cast<double>(cols.size());
    }
    const double train_loss = running / static_cast<double>(train_idx.size());
    const double val_loss = n_val > 0 ? dataset_loss(model, inputs, targets, val_idx) : train_loss;
    if (!std::isfinite(train_loss) || !std::isfinite(val_loss)) {
      throw ValidationError("training diverged at epoch " + std::to_string(epoch));
    }
    result.log.push_back({epoch, train_loss, val_loss});
    result.checkpoint.training.epochs_run = epoch;
    if (val_loss < best) {
      best = val_loss;
      since_best = 0;
      result.checkpoint.model = model;
      result.checkpoint.training.best_epoch = epoch;
      result.checkpoint.training.train_loss = train_loss;
      result.checkpoint.training.val_loss = val_loss;
    } else if (++since_best >= config.patience) {
      break;
    }
  }
  return result;
}

std::string format_training_log(const std::vector<EpochLog>& log) {
  std::string out = "epoch,train_loss,val_loss\n";
  for (const auto& e : log) {
    out += std::to_string(e.epoch) + "," + format_double(e.train_loss) + "," + format_double(e.val_loss) + "\n";
  }
  return out;
}

std::vector<double> predict(const Model& model, std::span<const double> inputs) {
  const Vector y = model_forward(model, inputs);
  return {y.data(), y.data() + y.size()};
}

PredictionSet predict(const ModelCheckpoint& checkpoint, const datagen::Dataset& dataset) {
  const auto& model = checkpoint.model;
  check_compatible(dataset.header, model.arch());
  PredictionSet out{dataset.header, model.arch().output_dim, {}};
  out.predictions.reserve(dataset.samples.size());
  const auto n = static_cast<Eigen::Index>(dataset.samples.size());
  const Matrix inputs = inputs_matrix(dataset);
  for (Eigen::Index start = 0; start < n; start += kEvalChunk) {
    const Eigen::Index len = std::min(kEvalChunk, n - start);
    const Matrix y = model_forward(model, Matrix(inputs.middleCols(start, len)));
    for (Eigen::Index c = 0; c < len; ++c) {
      out.predictions.push_back({std::vector<double>(y.col(c).data(), y.col(c).data() + y.rows()),
                                 dataset.samples[static_cast<std::size_t>(start + c)].meta});
    }
  }
  return out;
}

}  // namespace entlearn::neural
