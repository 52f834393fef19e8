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

#include "entlearn/measure.hpp"

#include "entlearn/error.hpp"

namespace entlearn::measure {
namespace {

constexpr qcore::Pauli kAxes[3] = {qcore::Pauli::X, qcore::Pauli::Y, qcore::Pauli::Z};

}  // namespace

MeasurementSet static_measurement_set(int n_qubits) {
  if (n_qubits < 2) throw ValidationError("static measurement set needs at least 2 qubits");
  qcore::register_dim(n_qubits);
  MeasurementSet set{n_qubits, {}};
  set.operators.reserve(static_cast<std::size_t>(3 * n_qubits + 9 * (n_qubits - 1)));
  for (int i = 1; i <= n_qubits; ++i) {
    for (auto a : kAxes) set.operators.push_back(qcore::PauliString::single(n_qubits, i, a));
  }
  for (int i = 1; i < n_qubits; ++i) {
    for (auto a : kAxes) {
      for (auto b : kAxes) set.operators.push_back(qcore::PauliString::pair(n_qubits, i, a, i + 1, b));
    }
  }
  return set;
}

MeasurementSet single_qubit_set(int n_qubits) {
  qcore::register_dim(n_qubits);
  MeasurementSet set{n_qubits, {}};
  for (int i = 1; i <= n_qubits; ++i) {
    for (auto a : kAxes) set.operators.push_back(qcore::PauliString::single(n_qubits, i, a));
  }
  return set;
}

std::vector<double> measure_expectations(const qcore::StateVector& psi, const MeasurementSet& set) {
  if (psi.n_qubits() != set.n_qubits) {
    throw ValidationError("measurement set and state disagree on qubit count");
  }
  std::vector<double> out;
  out.reserve(set.size());
  for (const auto& op : set.operators) out.push_back(qcore::expectation(psi, op));
  return out;
}

std::vector<double> TimeTraceGrid::flattened() const {
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(values.size()));
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) flat.push_back(values(r, c));
  }
  return flat;
}

TimeTraceGrid time_traces(const qcore::Propagator& propagator, const qcore::StateVector& psi0,
                          int n_steps, double tau) {
  if (n_steps < 1) throw ValidationError("time traces need at least one step");
  if (!(tau > 0.0)) throw ValidationError("time step must be positive");
  const int n = psi0.n_qubits();
  const auto set = single_qubit_set(n);
  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(n_steps));
  for (int s = 1; s <= n_steps; ++s) times.push_back(s * tau);
  const auto states = propagator.evolve_many(psi0, times);

  TimeTraceGrid grid{n, n_steps, tau, Eigen::MatrixXd(n_steps, 3 * n)};
  for (int s = 0; s < n_steps; ++s) {
    const auto row = measure_expectations(states[static_cast<std::size_t>(s)], set);
    for (int c = 0; c < 3 * n; ++c) grid.values(s, c) = row[static_cast<std::size_t>(c)];
  }
  return grid;
}

TimeTraceGrid time_traces(const qcore::Hamiltonian& h, const qcore::StateVector& psi0, int n_steps,
                          double tau) {
  return time_traces(qcore::Propagator(h), psi0, n_steps, tau);
}

}  // namespace entlearn::measure
