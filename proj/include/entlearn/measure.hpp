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

// Local measurement records fed to the networks: one- and two-body Pauli
// expectation vectors for static states, and single-qubit time traces for
// quenched dynamics.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "entlearn/qcore.hpp"

namespace entlearn::measure {

/// Ordered list of Pauli operators. The order is part of the dataset format:
/// network input slot k always holds the k-th operator.
struct MeasurementSet {
  int n_qubits = 0;
  std::vector<qcore::PauliString> operators;

  std::size_t size() const { return operators.size(); }
};

/// sigma_a^i for i = 1..N, a = x,y,z; then sigma_a^i sigma_b^{i+1} for
/// i = 1..N-1 with (a, b) row-major over {x,y,z}^2. Size 3N + 9(N-1).
MeasurementSet static_measurement_set(int n_qubits);

/// sigma_a^i with i outer, a = x,y,z inner. Size 3N.
MeasurementSet single_qubit_set(int n_qubits);

std::vector<double> measure_expectations(const qcore::StateVector& psi, const MeasurementSet& set);

struct TimeTraceGrid {
  int n_qubits = 0;
  int n_steps = 0;
  double tau = 0.0;
  Eigen::MatrixXd values;  // n_steps x 3N; row s-1 holds time s*tau

  /// Row-major flattening, the layout stored in dynamic datasets.
  std::vector<double> flattened() const;
};

/// Single-qubit expectations at t = s*tau, s = 1..n_steps.
TimeTraceGrid time_traces(const qcore::Propagator& propagator, const qcore::StateVector& psi0,
                          int n_steps, double tau);
TimeTraceGrid time_traces(const qcore::Hamiltonian& h, const qcore::StateVector& psi0,
                          int n_steps, double tau);

}  // namespace entlearn::measure
