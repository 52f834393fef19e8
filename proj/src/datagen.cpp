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

#include "entlearn/datagen.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "entlearn/error.hpp"
#include "entlearn/measure.hpp"

namespace entlearn::datagen {
namespace {

using qcore::Hamiltonian;
using qcore::Pauli;
using qcore::PauliString;

constexpr Pauli kAxes[3] = {Pauli::X, Pauli::Y, Pauli::Z};

void check_metrics(const std::vector<MetricSpec>& specs, int n_qubits) {
  if (specs.empty()) throw ValidationError("at least one metric spec is required");
  for (const auto& s : specs) s.validate(n_qubits);
}

Json ground_meta(std::size_t index, const qcore::GroundStateResult& gs) {
  return Json{{"index", index}, {"energy", gs.energy}, {"gap", gs.gap}, {"degenerate", gs.degenerate}};
}

Sample static_sample(int n_qubits, std::size_t index, const Model1Coefficients& coeffs,
                     const std::vector<MetricSpec>& specs) {
  const auto gs = qcore::ground_state(model1_hamiltonian(n_qubits, coeffs));
  Sample s;
  s.inputs = measure::measure_expectations(gs.state, measure::static_measurement_set(n_qubits));
  s.targets = entmetrics::evaluate_metrics(gs.state, specs);
  s.meta = ground_meta(index, gs);
  s.meta["omega"] = coeffs.field;
  s.meta["J"] = coeffs.coupling;
  return s;
}

Sample dynamic_sample(int n_qubits, std::size_t index, double coupling, double field,
                      const DynamicGrid& grid, const std::vector<MetricSpec>& specs) {
  const qcore::Propagator propagator(quench_hamiltonian(n_qubits, coupling, field));
  const auto psi0 = qcore::prepare_initial_state(n_qubits, grid.theta_y, grid.theta_z);
  Sample s;
  s.inputs = measure::time_traces(propagator, psi0, grid.steps, grid.tau()).flattened();

  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(grid.k_out));
  for (int k = 1; k <= grid.k_out; ++k) times.push_back(grid.target_time(k));
  const auto states = propagator.evolve_many(psi0, times);
  s.targets.reserve(states.size() * specs.size());
  for (const auto& psi : states) {
    const auto row = entmetrics::evaluate_metrics(psi, specs);
    s.targets.insert(s.targets.end(), row.begin(), row.end());
  }
  s.meta = Json{{"index", index}, {"J", coupling}, {"g", field}};
  return s;
}

Sample sweep_sample(const SweepInfo& sweep, int n_qubits, std::size_t index, double value,
                    const std::vector<MetricSpec>& specs) {
  const auto gs = qcore::ground_state(sweep_hamiltonian(sweep, n_qubits, value));
  Sample s;
  s.inputs = measure::measure_expectations(gs.state, measure::static_measurement_set(n_qubits));
  s.targets = entmetrics::evaluate_metrics(gs.state, specs);
  s.meta = ground_meta(index, gs);
  s.meta["model"] = to_string(sweep.model);
  s.meta["J"] = sweep.coupling;
  s.meta["sweep_value"] = value;
  return s;
}

std::size_t meta_index(const Json& meta) {
  try {
    return meta.at("index").get<std::size_t>();
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("sample meta lacks an index: ") + e.what());
  }
}

std::vector<double> checked_vector(const Json& line, const char* key, int expected) {
  auto values = line.at(key).get<std::vector<double>>();
  if (static_cast<int>(values.size()) != expected) {
    throw ValidationError(std::string("sample ") + key + " has length " +
                          std::to_string(values.size()) + ", header says " + std::to_string(expected));
  }
  return values;
}

template <typename Generate>
std::size_t write_file(const std::filesystem::path& path, const DatasetHeader& header,
                       Generate&& generate) {
  ensure_parent_directory(path);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  DatasetWriter writer(out, header);
  generate(writer);
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
  return writer.count();
}

}  // namespace

std::string to_string(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::Static: return "static";
    case DatasetKind::Dynamic: return "dynamic";
    case DatasetKind::Sweep: return "sweep";
  }
  return "?";
}

DatasetKind dataset_kind_from_string(const std::string& name) {
  if (name == "static") return DatasetKind::Static;
  if (name == "dynamic") return DatasetKind::Dynamic;
  if (name == "sweep") return DatasetKind::Sweep;
  throw ValidationError("unknown dataset kind '" + name + "'");
}

std::string to_string(SweepModel model) { return model == SweepModel::XXZ ? "xxz" : "xx"; }

SweepModel sweep_model_from_string(const std::string& name) {
  if (name == "xxz" || name == "XXZ") return SweepModel::XXZ;
  if (name == "xx" || name == "XX") return SweepModel::XX;
  throw ValidationError("unknown sweep model '" + name + "'");
}

void DynamicGrid::validate() const {
  if (steps < 1) throw ValidationError("grid needs S >= 1");
  if (k_out < 1) throw ValidationError("grid needs K_out >= 1");
  if (!(t_train > 0.0) || !std::isfinite(t_train)) throw ValidationError("T_tra must be positive");
  if (!(t_total >= t_train) || !std::isfinite(t_total)) throw ValidationError("T_tot must be >= T_tra");
  if (!std::isfinite(theta_y) || !std::isfinite(theta_z)) throw ValidationError("bad initial angles");
}

std::vector<double> SweepInfo::values() const {
  validate();
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> v;
  v.reserve(count);
  for (std::size_t k = 0; k < count; ++k) v.push_back(start + static_cast<double>(k) * step);
  return v;
}

void SweepInfo::validate() const {
  if (!std::isfinite(start) || !std::isfinite(stop) || !std::isfinite(coupling)) {
    throw ValidationError("sweep bounds must be finite");
  }
  if (!(step > 0.0)) throw ValidationError("sweep step must be positive");
  if (stop < start) throw ValidationError("sweep stop lies below start");
}

void DatasetHeader::validate() const {
  qcore::register_dim(n_qubits);
  check_metrics(metric_specs, n_qubits);
  const int m = static_cast<int>(metric_specs.size());
  switch (kind) {
    case DatasetKind::Static:
    case DatasetKind::Sweep: {
      const int expected = 3 * n_qubits + 9 * (n_qubits - 1);
      if (input_dim != expected) throw ValidationError("static input_dim must be 3N + 9(N-1)");
      if (target_dim != m) throw ValidationError("target_dim must equal the number of metrics");
      if (kind == DatasetKind::Sweep && !sweep) throw ValidationError("sweep dataset lacks sweep info");
      break;
    }
    case DatasetKind::Dynamic:
      if (!grid) throw ValidationError("dynamic dataset lacks grid parameters");
      grid->validate();
      if (input_dim != grid->steps * 3 * n_qubits) throw ValidationError("dynamic input_dim must be S*3N");
      if (target_dim != grid->k_out * m) throw ValidationError("dynamic target_dim must be K_out*M");
      break;
  }
}

Json to_json(const DatasetHeader& h) {
  Json j{{"format", kDatasetFormat},
         {"version", kDatasetVersion},
         {"kind", to_string(h.kind)},
         {"n_qubits", h.n_qubits},
         {"input_dim", h.input_dim},
         {"target_dim", h.target_dim},
         {"seed", h.seed}};
  j["metric_specs"] = Json::array();
  for (const auto& s : h.metric_specs) j["metric_specs"].push_back(entmetrics::to_json(s));
  if (h.grid) {
    j["grid"] = Json{{"S", h.grid->steps},          {"tau", h.grid->tau()},
                     {"K_out", h.grid->k_out},      {"T_tra", h.grid->t_train},
                     {"T_tot", h.grid->t_total},    {"theta_y", h.grid->theta_y},
                     {"theta_z", h.grid->theta_z}};
  }
  if (h.sweep) {
    j["sweep"] = Json{{"model", to_string(h.sweep->model)}, {"J", h.sweep->coupling},
                      {"start", h.sweep->start},           {"stop", h.sweep->stop},
                      {"step", h.sweep->step}};
  }
  return j;
}

DatasetHeader header_from_json(const Json& j) {
  try {
    if (j.at("format").get<std::string>() != kDatasetFormat) {
      throw ValidationError("not an entlearn dataset");
    }
    if (j.at("version").get<int>() != kDatasetVersion) throw ValidationError("unsupported dataset version");
    DatasetHeader h;
    h.kind = dataset_kind_from_string(j.at("kind").get<std::string>());
    h.n_qubits = j.at("n_qubits").get<int>();
    h.input_dim = j.at("input_dim").get<int>();
    h.target_dim = j.at("target_dim").get<int>();
    h.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& s : j.at("metric_specs")) h.metric_specs.push_back(entmetrics::metric_from_json(s));
    if (j.contains("grid")) {
      const auto& g = j["grid"];
      DynamicGrid grid;
      grid.steps = g.at("S").get<int>();
      grid.k_out = g.at("K_out").get<int>();
      grid.t_train = g.at("T_tra").get<double>();
      grid.t_total = g.at("T_tot").get<double>();
      grid.theta_y = g.at("theta_y").get<double>();
      grid.theta_z = g.at("theta_z").get<double>();
      h.grid = grid;
    }
    if (j.contains("sweep")) {
      const auto& s = j["sweep"];
      h.sweep = SweepInfo{sweep_model_from_string(s.at("model").get<std::string>()),
                          s.at("J").get<double>(), s.at("start").get<double>(),
                          s.at("stop").get<double>(), s.at("step").get<double>()};
    }
    h.validate();
    return h;
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed dataset header: ") + e.what());
  }
}

DatasetWriter::DatasetWriter(std::ostream& out, DatasetHeader header)
    : out_(out), header_(std::move(header)) {
  header_.validate();
  out_ << dump_json(to_json(header_)) << '\n';
}

void DatasetWriter::append(const Sample& sample) {
  if (static_cast<int>(sample.inputs.size()) != header_.input_dim ||
      static_cast<int>(sample.targets.size()) != header_.target_dim) {
    throw ValidationError("sample dimensions disagree with the dataset header");
  }
  Json line{{"inputs", sample.inputs}, {"targets", sample.targets}, {"meta", sample.meta}};
  out_ << dump_json(line) << '\n';
  ++count_;
}

Dataset read_dataset(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("dataset is empty (no header line)");
  Dataset ds;
  try {
    ds.header = header_from_json(Json::parse(line));
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const Json j = Json::parse(line);
      Sample s;
      s.inputs = checked_vector(j, "inputs", ds.header.input_dim);
      s.targets = checked_vector(j, "targets", ds.header.target_dim);
      s.meta = j.value("meta", Json::object());
      ds.samples.push_back(std::move(s));
    }
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed dataset line: ") + e.what());
  }
  return ds;
}

Dataset read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset " + path.string());
  return read_dataset(in);
}

void write_dataset(const std::filesystem::path& path, const Dataset& dataset) {
  write_file(path, dataset.header, [&](DatasetWriter& w) {
    for (const auto& s : dataset.samples) w.append(s);
  });
}

Rng sample_rng(std::uint64_t master_seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

Model1Coefficients sample_model1_coefficients(int n_qubits, Rng& rng) {
  if (n_qubits < 2) throw ValidationError("Model-1 Hamiltonians need at least 2 qubits");
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  Model1Coefficients c;
  c.field.resize(static_cast<std::size_t>(3 * n_qubits));
  c.coupling.resize(static_cast<std::size_t>(9 * (n_qubits - 1)));
  for (double& v : c.field) v = uniform(rng);
  for (double& v : c.coupling) v = uniform(rng);
  return c;
}

Hamiltonian model1_hamiltonian(int n_qubits, const Model1Coefficients& c) {
  if (c.field.size() != static_cast<std::size_t>(3 * n_qubits) ||
      c.coupling.size() != static_cast<std::size_t>(9 * (n_qubits - 1))) {
    throw ValidationError("Model-1 coefficient counts do not match the register size");
  }
  Hamiltonian h(n_qubits);
  std::size_t k = 0;
  for (int i = 1; i <= n_qubits; ++i) {
    for (auto a : kAxes) h.add(c.field[k++], PauliString::single(n_qubits, i, a));
  }
  k = 0;
  for (int j = 1; j < n_qubits; ++j) {
    for (auto a : kAxes) {
      for (auto b : kAxes) h.add(c.coupling[k++], PauliString::pair(n_qubits, j, a, j + 1, b));
    }
  }
  return h;
}

Hamiltonian sample_model1_hamiltonian(int n_qubits, Rng& rng) {
  return model1_hamiltonian(n_qubits, sample_model1_coefficients(n_qubits, rng));
}

Hamiltonian quench_hamiltonian(int n_qubits, double coupling, double field) {
  Hamiltonian h(n_qubits);
  for (int i = 1; i < n_qubits; ++i) h.add(coupling, PauliString::pair(n_qubits, i, Pauli::Z, i + 1, Pauli::Z));
  for (int i = 1; i <= n_qubits; ++i) h.add(field, PauliString::single(n_qubits, i, Pauli::X));
  return h;
}

Hamiltonian xxz_hamiltonian(int n_qubits, double coupling, double delta) {
  if (n_qubits < 2) throw ValidationError("XXZ chain needs at least 2 qubits");
  Hamiltonian h(n_qubits);
  for (int i = 1; i < n_qubits; ++i) {
    h.add(-coupling, PauliString::pair(n_qubits, i, Pauli::X, i + 1, Pauli::X));
    h.add(-coupling, PauliString::pair(n_qubits, i, Pauli::Y, i + 1, Pauli::Y));
    h.add(delta, PauliString::pair(n_qubits, i, Pauli::Z, i + 1, Pauli::Z));
  }
  return h;
}

Hamiltonian xx_hamiltonian(int n_qubits, double coupling, double field) {
  if (n_qubits < 2) throw ValidationError("XX chain needs at least 2 qubits");
  Hamiltonian h(n_qubits);
  for (int i = 1; i < n_qubits; ++i) {
    h.add(-coupling, PauliString::pair(n_qubits, i, Pauli::X, i + 1, Pauli::X));
    h.add(-coupling, PauliString::pair(n_qubits, i, Pauli::Y, i + 1, Pauli::Y));
  }
  for (int i = 1; i <= n_qubits; ++i) h.add(field, PauliString::single(n_qubits, i, Pauli::Z));
  return h;
}

Hamiltonian sweep_hamiltonian(const SweepInfo& sweep, int n_qubits, double value) {
  return sweep.model == SweepModel::XXZ ? xxz_hamiltonian(n_qubits, sweep.coupling, value)
                                        : xx_hamiltonian(n_qubits, sweep.coupling, value);
}

DatasetHeader make_header(const StaticConfig& config) {
  DatasetHeader h;
  h.kind = DatasetKind::Static;
  h.n_qubits = config.n_qubits;
  h.input_dim = 3 * config.n_qubits + 9 * (config.n_qubits - 1);
  h.target_dim = static_cast<int>(config.metric_specs.size());
  h.metric_specs = config.metric_specs;
  h.seed = config.seed;
  h.validate();
  return h;
}

DatasetHeader make_header(const DynamicConfig& config) {
  DatasetHeader h;
  h.kind = DatasetKind::Dynamic;
  h.n_qubits = config.n_qubits;
  h.input_dim = config.grid.steps * 3 * config.n_qubits;
  h.target_dim = config.grid.k_out * static_cast<int>(config.metric_specs.size());
  h.metric_specs = config.metric_specs;
  h.grid = config.grid;
  h.seed = config.seed;
  h.validate();
  return h;
}

DatasetHeader make_header(const SweepConfig& config) {
  DatasetHeader h;
  h.kind = DatasetKind::Sweep;
  h.n_qubits = config.n_qubits;
  h.input_dim = 3 * config.n_qubits + 9 * (config.n_qubits - 1);
  h.target_dim = static_cast<int>(config.metric_specs.size());
  h.metric_specs = config.metric_specs;
  h.sweep = config.sweep;
  h.validate();
  return h;
}

void generate_static_dataset(const StaticConfig& config, DatasetWriter& writer) {
  for (std::size_t k = 0; k < config.n_samples; ++k) {
    Rng rng = sample_rng(config.seed, k);
    const auto coeffs = sample_model1_coefficients(config.n_qubits, rng);
    writer.append(static_sample(config.n_qubits, k, coeffs, config.metric_specs));
  }
}

void generate_dynamic_dataset(const DynamicConfig& config, DatasetWriter& writer) {
  config.grid.validate();
  if (!config.fixed_parameters.empty()) {
    for (std::size_t k = 0; k < config.fixed_parameters.size(); ++k) {
      const auto [coupling, field] = config.fixed_parameters[k];
      writer.append(dynamic_sample(config.n_qubits, k, coupling, field, config.grid, config.metric_specs));
    }
    return;
  }
  for (std::size_t k = 0; k < config.n_samples; ++k) {
    Rng rng = sample_rng(config.seed, k);
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    const double coupling = uniform(rng);
    const double field = uniform(rng);
    writer.append(dynamic_sample(config.n_qubits, k, coupling, field, config.grid, config.metric_specs));
  }
}

void generate_ground_state_sweep(const SweepConfig& config, DatasetWriter& writer) {
  const auto values = config.sweep.values();
  for (std::size_t k = 0; k < values.size(); ++k) {
    writer.append(sweep_sample(config.sweep, config.n_qubits, k, values[k], config.metric_specs));
  }
}

std::size_t generate_static_dataset(const StaticConfig& config, const std::filesystem::path& path) {
  return write_file(path, make_header(config), [&](DatasetWriter& w) { generate_static_dataset(config, w); });
}

std::size_t generate_dynamic_dataset(const DynamicConfig& config, const std::filesystem::path& path) {
  return write_file(path, make_header(config), [&](DatasetWriter& w) { generate_dynamic_dataset(config, w); });
}

std::size_t generate_ground_state_sweep(const SweepConfig& config, const std::filesystem::path& path) {
  return write_file(path, make_header(config),
                    [&](DatasetWriter& w) { generate_ground_state_sweep(config, w); });
}

std::vector<std::pair<double, double>> field_grid(double coupling, double g_start, double g_stop,
                                                  int count) {
  if (count < 1) throw ValidationError("field grid needs at least one point");
  std::vector<std::pair<double, double>> out;
  for (int k = 0; k < count; ++k) {
    const double g = count == 1 ? g_start : g_start + (g_stop - g_start) * k / (count - 1);
    out.emplace_back(coupling, g);
  }
  return out;
}

Sample regenerate_sample(const DatasetHeader& header, const Json& meta) {
  const std::size_t index = meta_index(meta);
  try {
    switch (header.kind) {
      case DatasetKind::Static: {
        Model1Coefficients c{meta.at("omega").get<std::vector<double>>(),
                             meta.at("J").get<std::vector<double>>()};
        return static_sample(header.n_qubits, index, c, header.metric_specs);
      }
      case DatasetKind::Dynamic:
        return dynamic_sample(header.n_qubits, index, meta.at("J").get<double>(),
                              meta.at("g").get<double>(), *header.grid, header.metric_specs);
      case DatasetKind::Sweep:
        return sweep_sample(*header.sweep, header.n_qubits, index, meta.at("sweep_value").get<double>(),
                            header.metric_specs);
    }
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("sample meta is incomplete: ") + e.what());
  }
  throw ValidationError("unknown dataset kind");
}

}  // namespace entlearn::datagen
