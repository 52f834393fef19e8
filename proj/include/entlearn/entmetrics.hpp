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

// Exact entanglement quantities of small qubit states: Renyi and von Neumann
// entropies, moments of the partially transposed density matrix, and the
// relative-entropy coherence. Entropies are reported in bits.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "entlearn/json_io.hpp"
#include "entlearn/qcore.hpp"

namespace entlearn::entmetrics {

using qcore::CMatrix;

/// Hermitian, unit-trace matrix on `n_qubits` qubits.
class DensityMatrix {
 public:
  /// Validates Hermiticity and unit trace within 1e-10. Positivity is checked
  /// where eigenvalues are computed.
  DensityMatrix(int n_qubits, CMatrix matrix);

  int n_qubits() const { return n_qubits_; }
  const CMatrix& matrix() const { return matrix_; }

 private:
  int n_qubits_;
  CMatrix matrix_;
};

/// Sorted set of 1-based qubit labels.
class SubsystemSpec {
 public:
  explicit SubsystemSpec(std::vector<int> qubits);

  const std::vector<int>& qubits() const { return qubits_; }
  int size() const { return static_cast<int>(qubits_.size()); }
  bool contains(int qubit) const;
  /// Throws ValidationError if any label exceeds `n_qubits`.
  void check_within(int n_qubits) const;
  /// Basis-index bit mask of these qubits in an n-qubit register.
  std::uint32_t mask(int n_qubits) const;
  std::string to_string() const;  // "1,2"

  bool operator==(const SubsystemSpec&) const = default;

 private:
  std::vector<int> qubits_;
};

enum class MetricKind { Renyi, PtMoment, Coherence };

/// One output slot of an entanglement target vector.
///  - Renyi: S^(order) of the reduced state on region_a.
///  - PtMoment: P_order of the reduced state on region_a u region_b with the
///    transpose taken on region_a.
///  - Coherence: coherence of the reduced state on region_a (order unused).
struct MetricSpec {
  MetricKind kind = MetricKind::Renyi;
  int order = 2;
  SubsystemSpec region_a{{1}};
  std::optional<SubsystemSpec> region_b;

  static MetricSpec renyi(int order, SubsystemSpec a);
  static MetricSpec pt_moment(int order, SubsystemSpec a, SubsystemSpec b);
  static MetricSpec coherence(SubsystemSpec a);

  /// Compact form: "renyi:2:1,2", "pt:3:1:2" (A then B), "coherence:1,2".
  static MetricSpec parse(std::string_view text);
  std::string to_string() const;
  /// File-name friendly label, e.g. "renyi2_A1-2".
  std::string label() const;

  /// Structural checks, plus range checks when n_qubits > 0.
  void validate(int n_qubits = 0) const;

  bool operator==(const MetricSpec&) const = default;
};

Json to_json(const MetricSpec& spec);
/// Accepts the object form or the compact string form.
MetricSpec metric_from_json(const Json& j);

DensityMatrix density_matrix(const qcore::StateVector& psi);
DensityMatrix partial_trace(const DensityMatrix& rho, const SubsystemSpec& keep);
CMatrix partial_transpose(const DensityMatrix& rho, const SubsystemSpec& region_a);

/// Eigenvalues of a density matrix clamped to [0, 1]; values below -1e-8
/// raise ValidationError.
Eigen::VectorXd density_spectrum(const DensityMatrix& rho);

double renyi_entropy(const DensityMatrix& rho, int order);
double von_neumann_entropy(const DensityMatrix& rho);
double pt_moment(const DensityMatrix& rho, const SubsystemSpec& region_a, int order);
double coherence(const DensityMatrix& rho);

std::vector<double> evaluate_metrics(const qcore::StateVector& psi,
                                     const std::vector<MetricSpec>& specs);

}  // namespace entlearn::entmetrics
