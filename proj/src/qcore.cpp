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

#include "entlearn/qcore.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "entlearn/error.hpp"

namespace entlearn::qcore {
namespace {

constexpr double kHermitianTolerance = 1e-10;
constexpr double kNormTolerance = 1e-10;
constexpr Eigen::Index kMaxEigenDim = 256;

void check_dims(const StateVector& psi, int n_qubits, const char* what) {
  if (psi.n_qubits() != n_qubits) {
    throw ValidationError(std::string(what) + ": state has " + std::to_string(psi.n_qubits()) +
                          " qubits, operator has " + std::to_string(n_qubits));
  }
}

}  // namespace

char to_char(Pauli p) {
  switch (p) {
    case Pauli::I: return 'I';
    case Pauli::X: return 'X';
    case Pauli::Y: return 'Y';
    case Pauli::Z: return 'Z';
  }
  return '?';
}

Pauli pauli_from_char(char c) {
  switch (c) {
    case 'I': case 'i': return Pauli::I;
    case 'X': case 'x': return Pauli::X;
    case 'Y': case 'y': return Pauli::Y;
    case 'Z': case 'z': return Pauli::Z;
    default: throw ValidationError(std::string("unknown Pauli label '") + c + "'");
  }
}

PauliString::PauliString(std::vector<Pauli> axes) : axes_(std::move(axes)) {
  const int n = n_qubits();
  if (n < 1) throw ValidationError("PauliString needs at least one qubit");
  if (n > kMaxQubits) {
    throw ValidationError("PauliString on " + std::to_string(n) + " qubits exceeds the " +
                          std::to_string(kMaxQubits) + "-qubit limit");
  }
  for (int q = 0; q < n; ++q) {
    const std::uint32_t bit = 1u << (n - 1 - q);
    switch (axes_[static_cast<std::size_t>(q)]) {
      case Pauli::I: break;
      case Pauli::X: flip_mask_ |= bit; break;
      case Pauli::Y:
        flip_mask_ |= bit;
        sign_mask_ |= bit;
        ++y_count_;
        break;
      case Pauli::Z: sign_mask_ |= bit; break;
    }
  }
}

PauliString PauliString::parse(std::string_view labels) {
  std::vector<Pauli> axes;
  axes.reserve(labels.size());
  for (char c : labels) axes.push_back(pauli_from_char(c));
  return PauliString(std::move(axes));
}

PauliString PauliString::identity(int n_qubits) {
  if (n_qubits < 1) throw ValidationError("identity needs at least one qubit");
  return PauliString(std::vector<Pauli>(static_cast<std::size_t>(n_qubits), Pauli::I));
}

PauliString PauliString::single(int n_qubits, int qubit, Pauli axis) {
  if (qubit < 1 || qubit > n_qubits) throw ValidationError("qubit label out of range");
  std::vector<Pauli> axes(static_cast<std::size_t>(n_qubits), Pauli::I);
  axes[static_cast<std::size_t>(qubit - 1)] = axis;
  return PauliString(std::move(axes));
}

PauliString PauliString::pair(int n_qubits, int first, Pauli first_axis, int second,
                              Pauli second_axis) {
  if (first == second) throw ValidationError("pair operator needs two distinct qubits");
  if (first < 1 || first > n_qubits || second < 1 || second > n_qubits) {
    throw ValidationError("qubit label out of range");
  }
  std::vector<Pauli> axes(static_cast<std::size_t>(n_qubits), Pauli::I);
  axes[static_cast<std::size_t>(first - 1)] = first_axis;
  axes[static_cast<std::size_t>(second - 1)] = second_axis;
  return PauliString(std::move(axes));
}

bool PauliString::is_identity() const { return flip_mask_ == 0 && sign_mask_ == 0; }

std::string PauliString::to_string() const {
  std::string s;
  s.reserve(axes_.size());
  for (Pauli p : axes_) s += to_char(p);
  return s;
}

Complex PauliString::phase(std::uint32_t basis_index) const {
  // Y|0> = i|1>, Y|1> = -i|0>, Z|1> = -|1>.
  static constexpr Complex kIPowers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  Complex ph = kIPowers[y_count_ & 3];
  if (std::popcount(basis_index & sign_mask_) & 1) ph = -ph;
  return ph;
}

Hamiltonian::Hamiltonian(int n_qubits) : n_qubits_(n_qubits) {
  register_dim(n_qubits);
}

Hamiltonian::Hamiltonian(int n_qubits, std::vector<HamiltonianTerm> terms)
    : Hamiltonian(n_qubits) {
  terms_.reserve(terms.size());
  for (auto& t : terms) add(t.coefficient, std::move(t.pauli));
}

void Hamiltonian::add(double coefficient, PauliString pauli) {
  if (pauli.n_qubits() != n_qubits_) {
    throw ValidationError("Hamiltonian term " + pauli.to_string() + " does not act on " +
                          std::to_string(n_qubits_) + " qubits");
  }
  if (!std::isfinite(coefficient)) throw ValidationError("Hamiltonian coefficient is not finite");
  terms_.push_back({coefficient, std::move(pauli)});
}

StateVector::StateVector(int n_qubits, CVector amplitudes)
    : n_qubits_(n_qubits), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != register_dim(n_qubits)) {
    throw ValidationError("state vector length does not match 2^n_qubits");
  }
  if (std::abs(amplitudes_.norm() - 1.0) > kNormTolerance) {
    throw ValidationError("state vector is not normalized");
  }
}

StateVector StateVector::basis(int n_qubits, std::uint32_t index) {
  const Eigen::Index dim = register_dim(n_qubits);
  if (index >= static_cast<std::uint32_t>(dim)) throw ValidationError("basis index out of range");
  CVector amps = CVector::Zero(dim);
  amps[index] = 1.0;
  return StateVector(n_qubits, std::move(amps));
}

StateVector StateVector::normalized(int n_qubits, CVector amplitudes) {
  const double norm = amplitudes.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw ValidationError("cannot normalize zero state");
  amplitudes /= norm;
  return StateVector(n_qubits, std::move(amplitudes));
}

Eigen::Index register_dim(int n_qubits) {
  if (n_qubits < 1) throw ValidationError("register needs at least one qubit");
  if (n_qubits > kMaxQubits) {
    throw ValidationError(std::to_string(n_qubits) + " qubits exceeds the " +
                          std::to_string(kMaxQubits) + "-qubit limit");
  }
  return Eigen::Index{1} << n_qubits;
}

CMatrix pauli_matrix(const PauliString& p) {
  const Eigen::Index dim = register_dim(p.n_qubits());
  CMatrix m = CMatrix::Zero(dim, dim);
  for (std::uint32_t b = 0; b < dim; ++b) m(b ^ p.flip_mask(), b) = p.phase(b);
  return m;
}

CMatrix hamiltonian_matrix(const Hamiltonian& h) {
  if (h.terms().empty()) throw ValidationError("Hamiltonian has no terms");
  const Eigen::Index dim = register_dim(h.n_qubits());
  CMatrix m = CMatrix::Zero(dim, dim);
  for (const auto& term : h.terms()) {
    const auto& p = term.pauli;
    for (std::uint32_t b = 0; b < dim; ++b) m(b ^ p.flip_mask(), b) += term.coefficient * p.phase(b);
  }
  return m;
}

EigenDecomposition eig_hermitian(const CMatrix& m) {
  if (m.rows() != m.cols()) throw ValidationError("eig_hermitian needs a square matrix");
  if (m.rows() > kMaxEigenDim) throw ValidationError("eig_hermitian supports dimension <= 256");
  if (m.size() > 0 && (m - m.adjoint()).cwiseAbs().maxCoeff() > kHermitianTolerance) {
    throw ValidationError("eig_hermitian input is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(m);
  if (solver.info() != Eigen::Success) throw ValidationError("eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

GroundStateResult ground_state(const Hamiltonian& h) {
  const auto eig = eig_hermitian(hamiltonian_matrix(h));
  CVector psi = eig.eigenvectors.col(0);
  Eigen::Index pivot = 0;
  psi.cwiseAbs().maxCoeff(&pivot);
  psi *= std::conj(psi[pivot]) / std::abs(psi[pivot]);
  psi[pivot] = std::abs(psi[pivot]);
  const double gap = eig.eigenvalues.size() > 1 ? eig.eigenvalues[1] - eig.eigenvalues[0] : 0.0;
  return {eig.eigenvalues[0], StateVector::normalized(h.n_qubits(), std::move(psi)), gap,
          gap < kDegeneracyTolerance};
}

Propagator::Propagator(const Hamiltonian& h)
    : n_qubits_(h.n_qubits()), spectrum_(eig_hermitian(hamiltonian_matrix(h))) {}

StateVector Propagator::evolve(const StateVector& psi0, double t) const {
  return evolve_many(psi0, {t}).front();
}

std::vector<StateVector> Propagator::evolve_many(const StateVector& psi0,
                                                 const std::vector<double>& times) const {
  check_dims(psi0, n_qubits_, "evolve");
  const auto& V = spectrum_.eigenvectors;
  const auto& lambda = spectrum_.eigenvalues;
  const CVector coeffs = V.adjoint() * psi0.amplitudes();
  std::vector<StateVector> out;
  out.reserve(times.size());
  for (double t : times) {
    if (!std::isfinite(t)) throw ValidationError("evolution time is not finite");
    if (t == 0.0) {
      out.push_back(psi0);
      continue;
    }
    CVector rotated(coeffs.size());
    for (Eigen::Index k = 0; k < coeffs.size(); ++k) {
      rotated[k] = std::polar(1.0, -lambda[k] * t) * coeffs[k];
    }
    out.push_back(StateVector::normalized(n_qubits_, V * rotated));
  }
  return out;
}

StateVector evolve(const Hamiltonian& h, const StateVector& psi0, double t) {
  check_dims(psi0, h.n_qubits(), "evolve");
  if (t == 0.0) return psi0;
  return Propagator(h).evolve(psi0, t);
}

StateVector prepare_initial_state(int n_qubits, double theta_y, double theta_z) {
  const Eigen::Index dim = register_dim(n_qubits);
  const Complex up = std::polar(std::cos(theta_y / 2), -theta_z / 2);
  const Complex down = std::polar(std::sin(theta_y / 2), theta_z / 2);
  CVector amps(dim);
  for (Eigen::Index b = 0; b < dim; ++b) {
    Complex a = 1.0;
    for (int q = 0; q < n_qubits; ++q) a *= ((b >> q) & 1) ? down : up;
    amps[b] = a;
  }
  return StateVector::normalized(n_qubits, std::move(amps));
}

double expectation(const StateVector& psi, const PauliString& p) {
  check_dims(psi, p.n_qubits(), "expectation");
  const auto& a = psi.amplitudes();
  Complex acc = 0.0;
  for (std::uint32_t b = 0; b < a.size(); ++b) {
    acc += std::conj(a[b ^ p.flip_mask()]) * p.phase(b) * a[b];
  }
  return std::clamp(acc.real(), -1.0, 1.0);
}

}  // namespace entlearn::qcore
