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
#include <random>

#include "entlearn/error.hpp"
#include "entlearn/neural.hpp"

namespace entlearn::neural {
namespace {

void apply_activation(Activation a, Matrix& z) {
  switch (a) {
    case Activation::Relu: z = z.cwiseMax(0.0); break;
    case Activation::Tanh: z = z.array().tanh().matrix(); break;
    case Activation::Linear: break;
  }
}

// dZ = dA * act'(Z), given the preactivation Z and activation A.
Matrix activation_backward(Activation a, const Matrix& upstream, const Matrix& pre, const Matrix& post) {
  switch (a) {
    case Activation::Relu: return (pre.array() > 0.0).select(upstream, 0.0);
    case Activation::Tanh: return upstream.cwiseProduct((1.0 - post.array().square()).matrix());
    case Activation::Linear: return upstream;
  }
  return upstream;
}

Matrix sigmoid(const Matrix& z) { return (1.0 / (1.0 + (-z.array()).exp())).matrix(); }

void fill_uniform(Eigen::Ref<Matrix> m, double limit, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-limit, limit);
  // Row-major fill keeps the draw order independent of storage order.
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = u(rng);
  }
}

double glorot_limit(Eigen::Index fan_in, Eigen::Index fan_out) {
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

// Forward caches of a batched pass.
struct DenseCache {
  std::vector<Matrix> pre;   // Z_l
  std::vector<Matrix> post;  // A_l; post[0] is the layer input
};

struct LstmBatchCache {
  std::vector<Matrix> h, c;              // index 0 = zero state
  std::vector<Matrix> i, f, g, o, tanh_c;  // steps 1..S stored at index s-1
};

Matrix dense_forward_cached(const std::vector<DenseLayer>& layers, Matrix input, DenseCache& cache) {
  cache.pre.clear();
  cache.post.clear();
  cache.post.push_back(std::move(input));
  for (const auto& layer : layers) {
    Matrix z = layer.weights * cache.post.back();
    z.colwise() += layer.bias;
    Matrix a = z;
    apply_activation(layer.activation, a);
    cache.pre.push_back(std::move(z));
    cache.post.push_back(std::move(a));
  }
  return cache.post.back();
}

// Returns dL/d(input) and accumulates parameter gradients into `grads`.
Matrix dense_backward(const std::vector<DenseLayer>& layers, const DenseCache& cache, Matrix upstream,
                      std::vector<DenseLayer>& grads) {
  for (std::size_t l = layers.size(); l-- > 0;) {
    const Matrix dz = activation_backward(layers[l].activation, upstream, cache.pre[l], cache.post[l + 1]);
    grads[l].weights.noalias() += dz * cache.post[l].transpose();
    grads[l].bias += dz.rowwise().sum();
    upstream = layers[l].weights.transpose() * dz;
  }
  return upstream;
}

Matrix lstm_forward_batch(const LstmCell& cell, const Matrix& inputs, int steps, LstmBatchCache* cache) {
  const Eigen::Index hdim = cell.hidden_dim();
  const Eigen::Index in = cell.input_dim();
  const Eigen::Index batch = inputs.cols();
  Matrix h = Matrix::Zero(hdim, batch);
  Matrix c = Matrix::Zero(hdim, batch);
  if (cache) {
    *cache = {};
    cache->h.push_back(h);
    cache->c.push_back(c);
  }
  for (int s = 0; s < steps; ++s) {
    Matrix gates = cell.input_weights * inputs.middleRows(s * in, in);
    gates.noalias() += cell.recurrent_weights * h;
    gates.colwise() += cell.bias;
    Matrix ig = sigmoid(gates.middleRows(0, hdim));
    Matrix fg = sigmoid(gates.middleRows(hdim, hdim));
    Matrix gg = gates.middleRows(2 * hdim, hdim).array().tanh().matrix();
    Matrix og = sigmoid(gates.middleRows(3 * hdim, hdim));
    c = fg.cwiseProduct(c) + ig.cwiseProduct(gg);
    Matrix tc = c.array().tanh().matrix();
    h = og.cwiseProduct(tc);
    if (cache) {
      cache->i.push_back(std::move(ig));
      cache->f.push_back(std::move(fg));
      cache->g.push_back(std::move(gg));
      cache->o.push_back(std::move(og));
      cache->tanh_c.push_back(std::move(tc));
      cache->h.push_back(h);
      cache->c.push_back(c);
    }
  }
  return h;
}

void lstm_backward(const LstmCell& cell, const LstmBatchCache& cache, const Matrix& inputs, Matrix dh,
                   LstmCell& grads) {
  const Eigen::Index hdim = cell.hidden_dim();
  const Eigen::Index in = cell.input_dim();
  const auto steps = static_cast<int>(cache.i.size());
  Matrix dc = Matrix::Zero(hdim, inputs.cols());
  Matrix dgates(4 * hdim, inputs.cols());
  for (int s = steps; s-- > 0;) {
    const auto& ig = cache.i[s];
    const auto& fg = cache.f[s];
    const auto& gg = cache.g[s];
    const auto& og = cache.o[s];
    const auto& tc = cache.tanh_c[s];
    dc += dh.cwiseProduct(og).cwiseProduct((1.0 - tc.array().square()).matrix());
    dgates.middleRows(0, hdim) = dc.cwiseProduct(gg).cwiseProduct((ig.array() * (1.0 - ig.array())).matrix());
    dgates.middleRows(hdim, hdim) =
        dc.cwiseProduct(cache.c[s]).cwiseProduct((fg.array() * (1.0 - fg.array())).matrix());
    dgates.middleRows(2 * hdim, hdim) = dc.cwiseProduct(ig).cwiseProduct((1.0 - gg.array().square()).matrix());
    dgates.middleRows(3 * hdim, hdim) =
        dh.cwiseProduct(tc).cwiseProduct((og.array() * (1.0 - og.array())).matrix());
    grads.input_weights.noalias() += dgates * inputs.middleRows(s * in, in).transpose();
    grads.recurrent_weights.noalias() += dgates * cache.h[s].transpose();
    grads.bias += dgates.rowwise().sum();
    dh = cell.recurrent_weights.transpose() * dgates;
    dc = dc.cwiseProduct(fg);
  }
}

void check_batch(const Model& model, const Matrix& batch) {
  if (batch.rows() != model.arch().total_input_dim()) {
    throw ValidationError("input width " + std::to_string(batch.rows()) + " does not match the model's " +
                          std::to_string(model.arch().total_input_dim()));
  }
}

}  // namespace

std::string to_string(Activation a) {
  switch (a) {
    case Activation::Relu: return "relu";
    case Activation::Tanh: return "tanh";
    case Activation::Linear: return "linear";
  }
  return "?";
}

Activation activation_from_string(const std::string& name) {
  if (name == "relu") return Activation::Relu;
  if (name == "tanh") return Activation::Tanh;
  if (name == "linear") return Activation::Linear;
  throw ValidationError("unknown activation '" + name + "'");
}

std::string to_string(ModelKind k) { return k == ModelKind::StaticFcnn ? "static_fcnn" : "dynamic_lstm"; }

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "static_fcnn" || name == "static") return ModelKind::StaticFcnn;
  if (name == "dynamic_lstm" || name == "dynamic") return ModelKind::DynamicLstm;
  throw ValidationError("unknown model kind '" + name + "'");
}

Tensor Tensor::from_matrix(const Matrix& m) {
  Tensor t{{static_cast<int>(m.rows()), static_cast<int>(m.cols())}, {}};
  t.data.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) t.data.push_back(m(r, c));
  }
  return t;
}

Tensor Tensor::from_vector(const Vector& v) {
  return Tensor{{static_cast<int>(v.size())}, std::vector<double>(v.data(), v.data() + v.size())};
}

Matrix Tensor::to_matrix() const {
  validate();
  if (shape.size() != 2) throw ValidationError("tensor is not a matrix");
  Matrix m(shape[0], shape[1]);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = data[k++];
  }
  return m;
}

Vector Tensor::to_vector() const {
  validate();
  if (shape.size() != 1) throw ValidationError("tensor is not a vector");
  return Eigen::Map<const Vector>(data.data(), shape[0]);
}

void Tensor::validate() const {
  std::size_t n = 1;
  for (int d : shape) {
    if (d < 0) throw ValidationError("negative tensor dimension");
    n *= static_cast<std::size_t>(d);
  }
  if (n != data.size()) throw ValidationError("tensor data length does not match its shape");
  for (double v : data) {
    if (!std::isfinite(v)) throw ValidationError("tensor holds a non-finite value");
  }
}

void ArchDescriptor::validate() const {
  if (input_dim < 1 || output_dim < 1) throw ValidationError("architecture needs positive input/output dims");
  for (int w : hidden) {
    if (w < 1) throw ValidationError("hidden widths must be positive");
  }
  if (kind == ModelKind::DynamicLstm) {
    if (lstm_hidden < 1) throw ValidationError("dynamic architecture needs lstm_hidden >= 1");
    if (steps < 1) throw ValidationError("dynamic architecture needs S >= 1");
    if (k_out < 1) throw ValidationError("dynamic architecture needs K_out >= 1");
    if (!metric_specs.empty() && output_dim != k_out * static_cast<int>(metric_specs.size())) {
      throw ValidationError("dynamic output_dim must equal K_out * number of metrics");
    }
  } else if (!metric_specs.empty() && output_dim != static_cast<int>(metric_specs.size())) {
    throw ValidationError("static output_dim must equal the number of metrics");
  }
}

ArchDescriptor ArchDescriptor::for_dataset(const datagen::DatasetHeader& header) {
  ArchDescriptor a;
  a.metric_specs = header.metric_specs;
  a.measurement.n_qubits = header.n_qubits;
  if (header.kind == datagen::DatasetKind::Dynamic) {
    a.kind = ModelKind::DynamicLstm;
    a.input_dim = 3 * header.n_qubits;
    a.steps = header.grid->steps;
    a.k_out = header.grid->k_out;
    a.output_dim = header.target_dim;
    a.lstm_hidden = 128;
    a.hidden = {256};
    a.measurement.kind = "single_qubit_traces";
  } else {
    a.kind = ModelKind::StaticFcnn;
    a.input_dim = header.input_dim;
    a.output_dim = header.target_dim;
    a.hidden = {512, 512, 256};
    a.measurement.kind = "two_local_nearest_neighbour";
  }
  return a;
}

Json to_json(const ArchDescriptor& a) {
  Json activations = Json::array();
  for (std::size_t k = 0; k < a.hidden.size(); ++k) activations.push_back(to_string(a.hidden_activation));
  activations.push_back("linear");
  Json j{{"kind", to_string(a.kind)},  {"input_dim", a.input_dim}, {"output_dim", a.output_dim},
         {"hidden", a.hidden},         {"activations", activations}};
  if (a.kind == ModelKind::DynamicLstm) {
    j["lstm_hidden"] = a.lstm_hidden;
    j["S"] = a.steps;
    j["K_out"] = a.k_out;
  }
  j["metric_specs"] = Json::array();
  for (const auto& s : a.metric_specs) j["metric_specs"].push_back(entmetrics::to_json(s));
  j["measurement_set"] = Json{{"kind", a.measurement.kind}, {"n_qubits", a.measurement.n_qubits}};
  return j;
}

ArchDescriptor arch_from_json(const Json& j) {
  try {
    ArchDescriptor a;
    a.kind = model_kind_from_string(j.at("kind").get<std::string>());
    a.input_dim = j.at("input_dim").get<int>();
    a.output_dim = j.at("output_dim").get<int>();
    a.hidden = j.at("hidden").get<std::vector<int>>();
    const auto acts = j.at("activations").get<std::vector<std::string>>();
    if (acts.size() != a.hidden.size() + 1 || acts.back() != "linear") {
      throw ValidationError("activations must list every hidden layer and end with linear");
    }
    if (!a.hidden.empty()) {
      a.hidden_activation = activation_from_string(acts.front());
      for (std::size_t k = 0; k < a.hidden.size(); ++k) {
        if (activation_from_string(acts[k]) != a.hidden_activation) {
          throw ValidationError("mixed hidden activations are not supported");
        }
      }
    }
    if (a.kind == ModelKind::DynamicLstm) {
      a.lstm_hidden = j.at("lstm_hidden").get<int>();
      a.steps = j.at("S").get<int>();
      a.k_out = j.at("K_out").get<int>();
    }
    for (const auto& s : j.value("metric_specs", Json::array())) {
      a.metric_specs.push_back(entmetrics::metric_from_json(s));
    }
    if (j.contains("measurement_set")) {
      a.measurement.kind = j["measurement_set"].value("kind", "");
      a.measurement.n_qubits = j["measurement_set"].value("n_qubits", 0);
    }
    a.validate();
    return a;
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed architecture: ") + e.what());
  }
}

Model::Model(ArchDescriptor arch) : arch_(std::move(arch)) {
  arch_.validate();
  int width = arch_.input_dim;
  if (arch_.kind == ModelKind::DynamicLstm) {
    const int h = arch_.lstm_hidden;
    lstm_ = LstmCell{Matrix::Zero(4 * h, arch_.input_dim), Matrix::Zero(4 * h, h), Vector::Zero(4 * h)};
    width = h;
  }
  for (int w : arch_.hidden) {
    layers_.push_back({Matrix::Zero(w, width), Vector::Zero(w), arch_.hidden_activation});
    width = w;
  }
  layers_.push_back({Matrix::Zero(arch_.output_dim, width), Vector::Zero(arch_.output_dim), Activation::Linear});
}

Model Model::initialized(ArchDescriptor arch, std::uint64_t seed) {
  Model m(std::move(arch));
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x1417u};
  std::mt19937_64 rng(seq);
  if (m.lstm_) {
    auto& cell = *m.lstm_;
    const Eigen::Index h = cell.hidden_dim();
    for (int gate = 0; gate < 4; ++gate) {
      fill_uniform(cell.input_weights.middleRows(gate * h, h), glorot_limit(cell.input_dim(), h), rng);
      fill_uniform(cell.recurrent_weights.middleRows(gate * h, h), glorot_limit(h, h), rng);
    }
    cell.bias.segment(h, h).setOnes();
  }
  for (auto& layer : m.layers_) {
    fill_uniform(layer.weights, glorot_limit(layer.weights.cols(), layer.weights.rows()), rng);
  }
  return m;
}

std::vector<ParameterRef> Model::parameters() {
  std::vector<ParameterRef> refs;
  auto add = [&refs](std::string name, auto& eigen) {
    refs.push_back({std::move(name), std::span<double>(eigen.data(), static_cast<std::size_t>(eigen.size()))});
  };
  if (lstm_) {
    add("lstm.W", lstm_->input_weights);
    add("lstm.U", lstm_->recurrent_weights);
    add("lstm.b", lstm_->bias);
  }
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    add("dense" + std::to_string(l) + ".weight", layers_[l].weights);
    add("dense" + std::to_string(l) + ".bias", layers_[l].bias);
  }
  return refs;
}

std::size_t Model::parameter_count() const {
  std::size_t n = 0;
  if (lstm_) n += static_cast<std::size_t>(lstm_->input_weights.size() + lstm_->recurrent_weights.size() + lstm_->bias.size());
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.weights.size() + l.bias.size());
  return n;
}

std::vector<std::pair<std::string, Tensor>> Model::export_tensors() const {
  static constexpr const char* kGates[4] = {"i", "f", "g", "o"};
  std::vector<std::pair<std::string, Tensor>> out;
  if (lstm_) {
    const Eigen::Index h = lstm_->hidden_dim();
    for (int g = 0; g < 4; ++g) {
      out.emplace_back(std::string("lstm.W_") + kGates[g], Tensor::from_matrix(lstm_->input_weights.middleRows(g * h, h)));
    }
    for (int g = 0; g < 4; ++g) {
      out.emplace_back(std::string("lstm.U_") + kGates[g],
                       Tensor::from_matrix(lstm_->recurrent_weights.middleRows(g * h, h)));
    }
    for (int g = 0; g < 4; ++g) {
      out.emplace_back(std::string("lstm.b_") + kGates[g], Tensor::from_vector(lstm_->bias.segment(g * h, h)));
    }
  }
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    out.emplace_back("dense" + std::to_string(l) + ".weight", Tensor::from_matrix(layers_[l].weights));
    out.emplace_back("dense" + std::to_string(l) + ".bias", Tensor::from_vector(layers_[l].bias));
  }
  return out;
}

void Model::import_tensors(const std::vector<std::pair<std::string, Tensor>>& tensors) {
  const auto expected = export_tensors();
  if (tensors.size() != expected.size()) throw ValidationError("checkpoint tensor count does not match the architecture");
  for (std::size_t k = 0; k < tensors.size(); ++k) {
    if (tensors[k].first != expected[k].first || tensors[k].second.shape != expected[k].second.shape) {
      throw ValidationError("checkpoint tensor '" + tensors[k].first + "' does not match the architecture");
    }
    tensors[k].second.validate();
  }
  std::size_t k = 0;
  if (lstm_) {
    const Eigen::Index h = lstm_->hidden_dim();
    for (int g = 0; g < 4; ++g) lstm_->input_weights.middleRows(g * h, h) = tensors[k++].second.to_matrix();
    for (int g = 0; g < 4; ++g) lstm_->recurrent_weights.middleRows(g * h, h) = tensors[k++].second.to_matrix();
    for (int g = 0; g < 4; ++g) lstm_->bias.segment(g * h, h) = tensors[k++].second.to_vector();
  }
  for (auto& layer : layers_) {
    layer.weights = tensors[k++].second.to_matrix();
    layer.bias = tensors[k++].second.to_vector();
  }
}

Vector mlp_forward(const std::vector<DenseLayer>& layers, const Vector& x) {
  return mlp_forward(layers, Matrix(x)).col(0);
}

Matrix mlp_forward(const std::vector<DenseLayer>& layers, const Matrix& batch) {
  Matrix a = batch;
  for (const auto& layer : layers) {
    if (layer.weights.cols() != a.rows()) throw ValidationError("dense layer input width mismatch");
    Matrix z = layer.weights * a;
    z.colwise() += layer.bias;
    apply_activation(layer.activation, z);
    a = std::move(z);
  }
  return a;
}

LstmTrace lstm_forward(const LstmCell& cell, const Matrix& sequence) {
  if (sequence.cols() != cell.input_dim()) throw ValidationError("sequence width does not match the LSTM input");
  const auto steps = static_cast<int>(sequence.rows());
  // Stack the rows into one column, the layout used by batched passes.
  Matrix stacked(sequence.size(), 1);
  for (Eigen::Index s = 0; s < sequence.rows(); ++s) {
    stacked.middleRows(s * sequence.cols(), sequence.cols()) = sequence.row(s).transpose();
  }
  LstmBatchCache cache;
  lstm_forward_batch(cell, stacked, steps, &cache);
  LstmTrace trace;
  for (const auto& m : cache.h) trace.hidden.push_back(m.col(0));
  for (const auto& m : cache.c) trace.cell.push_back(m.col(0));
  for (int s = 0; s < steps; ++s) {
    trace.input_gate.push_back(cache.i[s].col(0));
    trace.forget_gate.push_back(cache.f[s].col(0));
    trace.candidate.push_back(cache.g[s].col(0));
    trace.output_gate.push_back(cache.o[s].col(0));
  }
  return trace;
}

Matrix model_forward(const Model& model, const Matrix& batch) {
  check_batch(model, batch);
  if (!model.has_lstm()) return mlp_forward(model.layers(), batch);
  const Matrix h = lstm_forward_batch(model.lstm(), batch, model.arch().steps, nullptr);
  return mlp_forward(model.layers(), h);
}

Vector model_forward(const Model& model, std::span<const double> inputs) {
  const Matrix x = Eigen::Map<const Matrix>(inputs.data(), static_cast<Eigen::Index>(inputs.size()), 1);
  return model_forward(model, x).col(0);
}

double mse_loss(std::span<const double> prediction, std::span<const double> target) {
  if (prediction.size() != target.size()) throw ValidationError("prediction and target lengths differ");
  if (prediction.empty()) throw ValidationError("mse_loss of empty vectors");
  double sum = 0.0;
  for (std::size_t k = 0; k < prediction.size(); ++k) {
    const double d = prediction[k] - target[k];
    sum += d * d;
  }
  return sum / static_cast<double>(prediction.size());
}

BatchGradient backward(const Model& model, const Matrix& inputs, const Matrix& targets) {
  check_batch(model, inputs);
  if (targets.rows() != model.arch().output_dim || targets.cols() != inputs.cols()) {
    throw ValidationError("target batch shape does not match the model output");
  }
  if (inputs.cols() == 0) throw ValidationError("empty batch");
  BatchGradient result{Model(model.arch()), 0.0};

  LstmBatchCache lstm_cache;
  Matrix dense_input = model.has_lstm()
                           ? lstm_forward_batch(model.lstm(), inputs, model.arch().steps, &lstm_cache)
                           : inputs;
  DenseCache cache;
  const Matrix output = dense_forward_cached(model.layers(), std::move(dense_input), cache);
  const Matrix diff = output - targets;
  const double scale = static_cast<double>(diff.size());
  result.loss = diff.squaredNorm() / scale;

  Matrix upstream = dense_backward(model.layers(), cache, (2.0 / scale) * diff, result.gradients.layers());
  if (model.has_lstm()) lstm_backward(model.lstm(), lstm_cache, inputs, std::move(upstream), result.gradients.lstm());
  return result;
}

AdamState AdamState::for_parameters(AdamHyper hyper, const std::vector<std::span<double>>& params) {
  AdamState s;
  s.hyper = hyper;
  for (const auto& p : params) {
    s.first_moment.push_back(Vector::Zero(static_cast<Eigen::Index>(p.size())));
    s.second_moment.push_back(Vector::Zero(static_cast<Eigen::Index>(p.size())));
  }
  return s;
}

AdamState AdamState::for_model(AdamHyper hyper, Model& model) {
  std::vector<std::span<double>> spans;
  for (auto& p : model.parameters()) spans.push_back(p.values);
  return for_parameters(hyper, spans);
}

void adam_step(AdamState& state, const std::vector<std::span<double>>& params,
               const std::vector<std::span<const double>>& grads) {
  if (params.size() != grads.size() || params.size() != state.first_moment.size()) {
    throw ValidationError("Adam parameter/gradient/state tensor counts differ");
  }
  for (std::size_t t = 0; t < params.size(); ++t) {
    if (params[t].size() != grads[t].size() ||
        static_cast<Eigen::Index>(params[t].size()) != state.first_moment[t].size()) {
      throw ValidationError("Adam tensor shapes differ");
    }
  }
  const auto& hp = state.hyper;
  ++state.step;
  const double c1 = 1.0 - std::pow(hp.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(hp.beta2, static_cast<double>(state.step));
  for (std::size_t t = 0; t < params.size(); ++t) {
    auto& m = state.first_moment[t];
    auto& v = state.second_moment[t];
    for (std::size_t k = 0; k < params[t].size(); ++k) {
      const double g = grads[t][k];
      const auto e = static_cast<Eigen::Index>(k);
      m[e] = hp.beta1 * m[e] + (1.0 - hp.beta1) * g;
      v[e] = hp.beta2 * v[e] + (1.0 - hp.beta2) * g * g;
      params[t][k] -= hp.learning_rate * (m[e] / c1) / (std::sqrt(v[e] / c2) + hp.epsilon);
    }
  }
}

void adam_step(AdamState& state, Model& params, Model& grads) {
  std::vector<std::span<double>> p;
  std::vector<std::span<const double>> g;
  for (auto& ref : params.parameters()) p.push_back(ref.values);
  for (auto& ref : grads.parameters()) g.emplace_back(ref.values.data(), ref.values.size());
  adam_step(state, p, g);
}

ArchDescriptor gradient_check_arch(ModelKind kind) {
  ArchDescriptor a;
  a.kind = kind;
  if (kind == ModelKind::StaticFcnn) {
    a.input_dim = 6;
    a.hidden = {8, 7};
    a.output_dim = 3;
  } else {
    a.input_dim = 3;
    a.steps = 5;
    a.k_out = 3;
    a.lstm_hidden = 4;
    a.hidden = {5};
    a.output_dim = 6;
  }
  return a;
}

GradientCheckReport gradient_check(const ArchDescriptor& arch, std::uint64_t seed, const GradientTamper& tamper) {
  for (int w : arch.hidden) {
    if (w > 16) throw ValidationError("gradient_check expects hidden widths <= 16");
  }
  if (arch.lstm_hidden > 16) throw ValidationError("gradient_check expects lstm_hidden <= 16");
  constexpr int kBatch = 4;
  constexpr double kStep = 1e-5;
  constexpr double kKinkMargin = 1e-3;

  Model model = Model::initialized(arch, seed);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x9c4du};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto randomize = [&](Eigen::Ref<Matrix> m) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = u(rng);
    }
  };
  // Nonzero biases so every code path carries signal.
  if (model.has_lstm()) {
    model.lstm().bias += Vector::NullaryExpr(model.lstm().bias.size(), [&] { return 0.5 * u(rng); });
  }
  for (auto& layer : model.layers()) {
    layer.bias = Vector::NullaryExpr(layer.bias.size(), [&] { return 0.3 * u(rng); });
  }

  Matrix inputs(arch.total_input_dim(), kBatch);
  Matrix targets(arch.output_dim, kBatch);
  randomize(targets);
  // Resample inputs until no relu preactivation sits within the kink margin,
  // where central differences are not meaningful.
  for (int attempt = 0;; ++attempt) {
    randomize(inputs);
    if (arch.hidden_activation != Activation::Relu || arch.hidden.empty()) break;
    Matrix a = model.has_lstm() ? lstm_forward_batch(model.lstm(), inputs, arch.steps, nullptr) : inputs;
    DenseCache cache;
    dense_forward_cached(model.layers(), a, cache);
    bool clear = true;
    for (std::size_t l = 0; l + 1 < cache.pre.size(); ++l) clear = clear && cache.pre[l].cwiseAbs().minCoeff() > kKinkMargin;
    if (clear || attempt > 1000) break;
  }

  auto grads = backward(model, inputs, targets).gradients;
  if (tamper) tamper(grads);

  const auto loss_at = [&] { return backward(model, inputs, targets).loss; };
  GradientCheckReport report;
  auto params = model.parameters();
  auto analytic = grads.parameters();
  for (std::size_t t = 0; t < params.size(); ++t) {
    for (std::size_t k = 0; k < params[t].values.size(); ++k) {
      double& theta = params[t].values[k];
      const double saved = theta;
      theta = saved + kStep;
      const double up = loss_at();
      theta = saved - kStep;
      const double down = loss_at();
      theta = saved;
      const double numeric = (up - down) / (2 * kStep);
      const double a = analytic[t].values[k];
      const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-8});
      if (rel > report.max_relative_error) {
        report.max_relative_error = rel;
        report.worst_parameter = params[t].name + "[" + std::to_string(k) + "]";
      }
      ++report.parameters_checked;
    }
  }
  return report;
}

}  // namespace entlearn::neural
