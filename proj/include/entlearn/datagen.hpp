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

// Training and evaluation datasets: random 2-local ground states, quench
// trajectories of the transverse-field Ising chain, and XXZ / XX ground-state
// sweeps. Datasets are JSON-lines files: a header object on the first line,
// then one {"inputs", "targets", "meta"} object per sample.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "entlearn/entmetrics.hpp"
#include "entlearn/json_io.hpp"
#include "entlearn/qcore.hpp"

namespace entlearn::datagen {

using entmetrics::MetricSpec;
using Rng = std::mt19937_64;

inline constexpr const char* kDatasetFormat = "entlearn-dataset";
inline constexpr int kDatasetVersion = 1;

enum class DatasetKind { Static, Dynamic, Sweep };
enum class SweepModel { XXZ, XX };

std::string to_string(DatasetKind kind);
DatasetKind dataset_kind_from_string(const std::string& name);
std::string to_string(SweepModel model);
SweepModel sweep_model_from_string(const std::string& name);

/// Time grid of a quench dataset. Inputs are sampled at s * tau for
/// s = 1..steps with tau = t_train / steps; targets at k * t_total / k_out
/// for k = 1..k_out.
struct DynamicGrid {
  int steps = 50;
  double t_train = 3.14159265358979323846;
  double t_total = 2 * 3.14159265358979323846;
  int k_out = 100;
  double theta_y = 3.14159265358979323846 / 8;
  double theta_z = 3.14159265358979323846 / 8;

  double tau() const { return t_train / steps; }
  double target_time(int k) const { return k * t_total / k_out; }
  void validate() const;
};

struct SweepInfo {
  SweepModel model = SweepModel::XXZ;
  double coupling = -0.5;  // J
  double start = -1.0;
  double stop = 1.0;
  double step = 0.04;

  /// Inclusive grid start + k*step while <= stop (up to 1e-9 slack).
  std::vector<double> values() const;
  void validate() const;
};

struct DatasetHeader {
  DatasetKind kind = DatasetKind::Static;
  int n_qubits = 0;
  int input_dim = 0;
  int target_dim = 0;
  std::vector<MetricSpec> metric_specs;
  std::optional<DynamicGrid> grid;
  std::optional<SweepInfo> sweep;
  std::uint64_t seed = 0;

  void validate() const;
};

Json to_json(const DatasetHeader& header);
DatasetHeader header_from_json(const Json& j);

struct Sample {
  std::vector<double> inputs;
  std::vector<double> targets;
  Json meta = Json::object();
};

struct Dataset {
  DatasetHeader header;
  std::vector<Sample> samples;
};

/// Streams a dataset: the header is written on construction.
class DatasetWriter {
 public:
  DatasetWriter(std::ostream& out, DatasetHeader header);

  void append(const Sample& sample);
  const DatasetHeader& header() const { return header_; }
  std::size_t count() const { return count_; }

 private:
  std::ostream& out_;
  DatasetHeader header_;
  std::size_t count_ = 0;
};

Dataset read_dataset(std::istream& in);
Dataset read_dataset(const std::filesystem::path& path);
void write_dataset(const std::filesystem::path& path, const Dataset& dataset);

/// Independent generator for sample `index` of a run seeded with `master_seed`.
Rng sample_rng(std::uint64_t master_seed, std::uint64_t index);

// -- Hamiltonian families ---------------------------------------------------

/// Model-1 coefficients: field[(i-1)*3 + a] multiplies sigma_a^i and
/// coupling[(j-1)*9 + 3a + b] multiplies sigma_a^j sigma_b^{j+1}; the
/// concatenation lines up with static_measurement_set.
struct Model1Coefficients {
  std::vector<double> field;
  std::vector<double> coupling;
};

Model1Coefficients sample_model1_coefficients(int n_qubits, Rng& rng);
qcore::Hamiltonian model1_hamiltonian(int n_qubits, const Model1Coefficients& c);
qcore::Hamiltonian sample_model1_hamiltonian(int n_qubits, Rng& rng);

/// J sum sigma_z^i sigma_z^{i+1} + g sum sigma_x^i.
qcore::Hamiltonian quench_hamiltonian(int n_qubits, double coupling, double field);
/// -J sum (XX + YY) + delta sum ZZ over nearest neighbours.
qcore::Hamiltonian xxz_hamiltonian(int n_qubits, double coupling, double delta);
/// -J sum (XX + YY) + h_z sum Z.
qcore::Hamiltonian xx_hamiltonian(int n_qubits, double coupling, double field);
qcore::Hamiltonian sweep_hamiltonian(const SweepInfo& sweep, int n_qubits, double value);

// -- Generators -------------------------------------------------------------

struct StaticConfig {
  int n_qubits = 6;
  std::size_t n_samples = 0;
  std::vector<MetricSpec> metric_specs;
  std::uint64_t seed = 0;
};

struct DynamicConfig {
  int n_qubits = 6;
  std::size_t n_samples = 0;
  std::vector<MetricSpec> metric_specs;
  DynamicGrid grid;
  std::uint64_t seed = 0;
  /// When non-empty, these (J, g) pairs replace random draws and n_samples.
  std::vector<std::pair<double, double>> fixed_parameters;
};

struct SweepConfig {
  int n_qubits = 4;
  SweepInfo sweep;
  std::vector<MetricSpec> metric_specs;
};

DatasetHeader make_header(const StaticConfig& config);
DatasetHeader make_header(const DynamicConfig& config);
DatasetHeader make_header(const SweepConfig& config);

void generate_static_dataset(const StaticConfig& config, DatasetWriter& writer);
void generate_dynamic_dataset(const DynamicConfig& config, DatasetWriter& writer);
void generate_ground_state_sweep(const SweepConfig& config, DatasetWriter& writer);

/// Convenience wrappers writing a whole file. Return the sample count.
std::size_t generate_static_dataset(const StaticConfig& config, const std::filesystem::path& path);
std::size_t generate_dynamic_dataset(const DynamicConfig& config, const std::filesystem::path& path);
std::size_t generate_ground_state_sweep(const SweepConfig& config, const std::filesystem::path& path);

/// Evenly spaced (J, g) pairs with fixed J and `count` values of g on
/// [g_start, g_stop], endpoints included.
std::vector<std::pair<double, double>> field_grid(double coupling, double g_start, double g_stop,
                                                  int count);

/// Rebuilds a sample from the header and the stored meta alone. This is the
/// regeneration oracle: stored inputs and targets must match it.
Sample regenerate_sample(const DatasetHeader& header, const Json& meta);

}  // namespace entlearn::datagen
