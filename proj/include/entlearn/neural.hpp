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

#pragma once

// Feed-forward and LSTM regressors with hand-written reverse-mode gradients
// and Adam. Batches are column-major: column k of an input matrix is sample k.
//
// static_fcnn:  x -> dense(relu)... -> dense(linear)
// dynamic_lstm: trace rows x_1..x_S -> LSTM -> h_S -> dense(relu)... -> linear
//
// LSTM gate blocks are stacked in the order (i, f, g, o):
//   i = sig(W_i x + U_i h + b_i), f = sig(...), g = tanh(...), o = sig(...)
//   c_s = f * c_{s-1} + i * g,  h_s = o * tanh(c_s),  h_0 = c_0 = 0.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "entlearn/datagen.hpp"
#include "entlearn/json_io.hpp"

namespace entlearn::neural {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Activation { Relu, Tanh, Linear };
enum class ModelKind { StaticFcnn, DynamicLstm };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& name);
std::string to_string(ModelKind k);
ModelKind model_kind_from_string(const std::string& name);

/// Shape plus row-major data: the serialized form of a parameter.
struct Tensor {
  std::vector<int> shape;
  std::vector<double> data;

  static Tensor from_matrix(const Matrix& m);
  static Tensor from_vector(const Vector& v);
  Matrix to_matrix() const;
  Vector to_vector() const;
  void validate() const;
};

struct DenseLayer {
  Matrix weights;  // out x in
  Vector bias;     // out
  Activation activation = Activation::Linear;
};

struct LstmCell {
  Matrix input_weights;      // 4H x input_dim, gate blocks (i, f, g, o)
  Matrix recurrent_weights;  // 4H x H
  Vector bias;               // 4H

  int input_dim() const { return static_cast<int>(input_weights.cols()); }
  int hidden_dim() const { return static_cast<int>(recurrent_weights.cols()); }
};

/// Names the measurement set that produced the network inputs.
struct MeasurementDescriptor {
  std::string kind;  // "two_local_nearest_neighbour" or "single_qubit_traces"
  int n_qubits = 0;
};

struct ArchDescriptor {
  ModelKind kind = ModelKind::StaticFcnn;
  int input_dim = 0;   // static: full width; dynamic: width of one time step
  int output_dim = 0;  // static: M; dynamic: K_out * M
  std::vector<int> hidden;  // dense hidden widths (the decoder for dynamic)
  Activation hidden_activation = Activation::Relu;
  int lstm_hidden = 0;
  int steps = 0;  // S, dynamic only
  int k_out = 0;  // dynamic only
  std::vector<entmetrics::MetricSpec> metric_specs;
  MeasurementDescriptor measurement;

  int total_input_dim() const { return kind == ModelKind::DynamicLstm ? steps * input_dim : input_dim; }
  void validate() const;

  /// Default architecture for a dataset: 512-512-256 relu FCNN, or an LSTM
  /// with 128 hidden units and a 256-wide relu decoder.
  static ArchDescriptor for_dataset(const datagen::DatasetHeader& header);
};

Json to_json(const ArchDescriptor& arch);
ArchDescriptor arch_from_json(const Json& j);

struct ParameterRef {
  std::string name;
  std::span<double> values;
};

/// Parameters of one architecture. A Model with zeroed parameters doubles as
/// the gradient container for that architecture.
class Model {
 public:
  /// All parameters zero.
  explicit Model(ArchDescriptor arch);
  /// Glorot-uniform weights, zero biases, LSTM forget-gate bias 1.
  static Model initialized(ArchDescriptor arch, std::uint64_t seed);

  const ArchDescriptor& arch() const { return arch_; }
  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }
  LstmCell& lstm() { return *lstm_; }
  const LstmCell& lstm() const { return *lstm_; }
  bool has_lstm() const { return lstm_.has_value(); }

  /// Stable order; gradient models list their tensors in the same order.
  std::vector<ParameterRef> parameters();
  std::size_t parameter_count() const;

  /// Named row-major tensors; LSTM blocks are split per gate (W_i, U_f, ...).
  std::vector<std::pair<std::string, Tensor>> export_tensors() const;
  void import_tensors(const std::vector<std::pair<std::string, Tensor>>& tensors);

 private:
  ArchDescriptor arch_;
  std::optional<LstmCell> lstm_;
  std::vector<DenseLayer> layers_;
};

// -- Forward passes ---------------------------------------------------------

Vector mlp_forward(const std::vector<DenseLayer>& layers, const Vector& x);
Matrix mlp_forward(const std::vector<DenseLayer>& layers, const Matrix& batch);

/// Per-step states of one sequence; index 0 holds h_0 = c_0 = 0.
struct LstmTrace {
  std::vector<Vector> hidden;
  std::vector<Vector> cell;
  std::vector<Vector> input_gate, forget_gate, candidate, output_gate;  // steps 1..S

  const Vector& final_hidden() const { return hidden.back(); }
};

/// `sequence` is S x input_dim, one time step per row.
LstmTrace lstm_forward(const LstmCell& cell, const Matrix& sequence);

Vector model_forward(const Model& model, std::span<const double> inputs);
Matrix model_forward(const Model& model, const Matrix& batch);

// -- Loss and gradients -----------------------------------------------------

double mse_loss(std::span<const double> prediction, std::span<const double> target);

struct BatchGradient {
  Model gradients;
  double loss = 0.0;  // mean over samples of the per-sample MSE
};

/// Exact gradients of the batch MSE; BPTT through all S steps for LSTMs.
BatchGradient backward(const Model& model, const Matrix& inputs, const Matrix& targets);

// -- Optimizer --------------------------------------------------------------

struct AdamHyper {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamHyper hyper;
  std::int64_t step = 0;
  std::vector<Vector> first_moment;
  std::vector<Vector> second_moment;

  /// Zero accumulators shaped like `params`.
  static AdamState for_parameters(AdamHyper hyper, const std::vector<std::span<double>>& params);
  static AdamState for_model(AdamHyper hyper, Model& model);
};

void adam_step(AdamState& state, const std::vector<std::span<double>>& params,
               const std::vector<std::span<const double>>& grads);
void adam_step(AdamState& state, Model& params, Model& grads);

// -- Training ---------------------------------------------------------------

struct TrainConfig {
  double learning_rate = 1e-3;
  int batch_size = 256;
  int max_epochs = 500;
  double validation_fraction = 0.05;
  int patience = 20;
  std::uint64_t seed = 0;

  void validate() const;
};

Json to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const Json& j, TrainConfig defaults = {});

struct TrainingMeta {
  std::uint64_t seed = 0;
  int epochs_run = 0;
  int best_epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct ModelCheckpoint {
  Model model;
  TrainingMeta training;
};

struct EpochLog {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct TrainResult {
  ModelCheckpoint checkpoint;
  std::vector<EpochLog> log;
};

/// Checks dataset kind and dimensions against the architecture.
void check_compatible(const datagen::DatasetHeader& header, const ArchDescriptor& arch);

/// Deterministic minibatch Adam on MSE with a held-out validation split and
/// early stopping; returns the best-validation parameters. A dataset too small
/// to hold anything out selects on training loss instead.
TrainResult train(const datagen::Dataset& dataset, const ArchDescriptor& arch, const TrainConfig& config);

/// "epoch,train_loss,val_loss" header plus one row per epoch.
std::string format_training_log(const std::vector<EpochLog>& log);

Json checkpoint_to_json(const ModelCheckpoint& checkpoint);
ModelCheckpoint checkpoint_from_json(const Json& j);
void save_checkpoint(const std::filesystem::path& path, const ModelCheckpoint& checkpoint);
ModelCheckpoint load_checkpoint(const std::filesystem::path& path);

// -- Prediction -------------------------------------------------------------

struct Prediction {
  std::vector<double> values;
  Json meta = Json::object();
};

struct PredictionSet {
  datagen::DatasetHeader dataset;  // header of the dataset the inputs came from
  int output_dim = 0;
  std::vector<Prediction> predictions;
};

Matrix inputs_matrix(const datagen::Dataset& dataset);
Matrix targets_matrix(const datagen::Dataset& dataset);

std::vector<double> predict(const Model& model, std::span<const double> inputs);
PredictionSet predict(const ModelCheckpoint& checkpoint, const datagen::Dataset& dataset);

void write_predictions(const std::filesystem::path& path, const PredictionSet& predictions);
PredictionSet read_predictions(const std::filesystem::path& path);

// -- Verification -----------------------------------------------------------

/// Small architecture suitable for finite-difference checks.
ArchDescriptor gradient_check_arch(ModelKind kind);

struct GradientCheckReport {
  double max_relative_error = 0.0;
  std::string worst_parameter;
  std::size_t parameters_checked = 0;
};

/// Hook applied to the analytic gradients before comparison (test fixtures
/// use it to plant bugs).
using GradientTamper = std::function<void(Model& gradients)>;

/// Compares backward() with central differences (h = 1e-5) on a random model
/// and batch. Relative error is |a - n| / max(|a|, |n|, 1e-8).
GradientCheckReport gradient_check(const ArchDescriptor& arch, std::uint64_t seed,
                                   const GradientTamper& tamper = {});

}  // namespace entlearn::neural
