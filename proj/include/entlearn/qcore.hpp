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

// Pauli algebra, spin Hamiltonians, exact diagonalization and unitary time
// evolution for small qubit registers.
//
// Qubit convention: qubits are labelled 1..n; qubit 1 is the leftmost tensor
// factor, i.e. the most significant bit of a basis-state index.

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace entlearn::qcore {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr int kMaxQubits = 8;

enum class Pauli : std::uint8_t { I, X, Y, Z };

char to_char(Pauli p);
Pauli pauli_from_char(char c);

/// Tensor product of single-qubit Pauli operators.
class PauliString {
 public:
  explicit PauliString(std::vector<Pauli> axes);

  /// Parses labels such as "XZI"; the first character acts on qubit 1.
  static PauliString parse(std::string_view labels);
  static PauliString identity(int n_qubits);
  static PauliString single(int n_qubits, int qubit, Pauli axis);
  static PauliString pair(int n_qubits, int first, Pauli first_axis, int second,
                          Pauli second_axis);

  int n_qubits() const { return static_cast<int>(axes_.size()); }
  Pauli axis(int qubit) const { return axes_.at(static_cast<std::size_t>(qubit - 1)); }
  const std::vector<Pauli>& axes() const { return axes_; }
  bool is_identity() const;
  std::string to_string() const;

  // Bit masks over basis-state indices. P|b> = phase(b) |b ^ flip_mask()>.
  std::uint32_t flip_mask() const { return flip_mask_; }
  std::uint32_t sign_mask() const { return sign_mask_; }
  int y_count() const { return y_count_; }

  /// Phase acquired by basis state |b> under this operator.
  Complex phase(std::uint32_t basis_index) const;

  bool operator==(const PauliString& other) const { return axes_ == other.axes_; }

 private:
  std::vector<Pauli> axes_;
  std::uint32_t flip_mask_ = 0;
  std::uint32_t sign_mask_ = 0;
  int y_count_ = 0;
};

struct HamiltonianTerm {
  double coefficient = 0.0;
  PauliString pauli;
};

/// Real-weighted sum of Pauli strings on a fixed register size.
class Hamiltonian {
 public:
  explicit Hamiltonian(int n_qubits);
  Hamiltonian(int n_qubits, std::vector<HamiltonianTerm> terms);

  void add(double coefficient, PauliString pauli);

  int n_qubits() const { return n_qubits_; }
  const std::vector<HamiltonianTerm>& terms() const { return terms_; }

 private:
  int n_qubits_;
  std::vector<HamiltonianTerm> terms_;
};

/// Normalized pure state of `n_qubits` qubits.
class StateVector {
 public:
  /// Throws ValidationError unless the norm is 1 within 1e-10.
  StateVector(int n_qubits, CVector amplitudes);

  static StateVector basis(int n_qubits, std::uint32_t index);
  /// Rescales `amplitudes` to unit norm first.
  static StateVector normalized(int n_qubits, CVector amplitudes);

  int n_qubits() const { return n_qubits_; }
  Eigen::Index dim() const { return amplitudes_.size(); }
  const CVector& amplitudes() const { return amplitudes_; }
  Complex operator[](Eigen::Index i) const { return amplitudes_[i]; }

 private:
  int n_qubits_;
  CVector amplitudes_;
};

struct EigenDecomposition {
  Eigen::VectorXd eigenvalues;  // ascending
  CMatrix eigenvectors;         // columns
};

struct GroundStateResult {
  double energy = 0.0;
  StateVector state;
  double gap = 0.0;
  bool degenerate = false;  // gap below kDegeneracyTolerance
};

inline constexpr double kDegeneracyTolerance = 1e-10;

/// Dimension of an n-qubit register; throws ValidationError above kMaxQubits.
Eigen::Index register_dim(int n_qubits);

CMatrix pauli_matrix(const PauliString& p);
CMatrix hamiltonian_matrix(const Hamiltonian& h);

/// Hermitian eigendecomposition, eigenvalues ascending. Input must be
/// Hermitian within 1e-10 (max-abs) and of dimension at most 256.
EigenDecomposition eig_hermitian(const CMatrix& m);

/// Lowest eigenvector, with the global phase fixed so that the
/// largest-magnitude amplitude is real and positive.
GroundStateResult ground_state(const Hamiltonian& h);

/// exp(-iHt) through a cached eigendecomposition of H.
class Propagator {
 public:
  explicit Propagator(const Hamiltonian& h);

  StateVector evolve(const StateVector& psi0, double t) const;
  /// Evolves to each time in `times`, sharing the basis change of psi0.
  std::vector<StateVector> evolve_many(const StateVector& psi0,
                                       const std::vector<double>& times) const;

  int n_qubits() const { return n_qubits_; }
  const EigenDecomposition& spectrum() const { return spectrum_; }

 private:
  int n_qubits_;
  EigenDecomposition spectrum_;
};

StateVector evolve(const Hamiltonian& h, const StateVector& psi0, double t);

/// Product state with every qubit in R_z(theta_z) R_y(theta_y) |0>, where
/// R_a(theta) = exp(-i theta sigma_a / 2).
StateVector prepare_initial_state(int n_qubits, double theta_y, double theta_z);

/// <psi|P|psi>, real part.
double expectation(const StateVector& psi, const PauliString& p);

}  // namespace entlearn::qcore
