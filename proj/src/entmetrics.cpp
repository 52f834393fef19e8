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

#include "entlearn/entmetrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "entlearn/error.hpp"

namespace entlearn::entmetrics {
namespace {

constexpr double kHermitianTolerance = 1e-10;
constexpr double kTraceTolerance = 1e-10;
constexpr double kNegativeEigenvalueLimit = -1e-8;

// Basis indices of the full register spanned by the listed qubits, enumerated
// in the order of the reduced register (first listed qubit most significant).
std::vector<std::uint32_t> deposit_table(const std::vector<int>& qubits, int n_qubits) {
  const int k = static_cast<int>(qubits.size());
  std::vector<std::uint32_t> table(std::size_t{1} << k);
  for (std::uint32_t a = 0; a < table.size(); ++a) {
    std::uint32_t full = 0;
    for (int j = 0; j < k; ++j) {
      if ((a >> (k - 1 - j)) & 1u) full |= 1u << (n_qubits - qubits[static_cast<std::size_t>(j)]);
    }
    table[a] = full;
  }
  return table;
}

std::vector<int> complement(const SubsystemSpec& s, int n_qubits) {
  std::vector<int> rest;
  for (int q = 1; q <= n_qubits; ++q) {
    if (!s.contains(q)) rest.push_back(q);
  }
  return rest;
}

double log2_clamped(double x) { return std::log2(std::clamp(x, std::numeric_limits<double>::min(), 1.0)); }

double shannon_bits(const Eigen::VectorXd& p) {
  double s = 0.0;
  for (double v : p) {
    if (v > 0.0) s -= v * std::log2(v);
  }
  return std::max(s, 0.0);
}

Eigen::VectorXd clamp_spectrum(const Eigen::VectorXd& values) {
  Eigen::VectorXd out = values;
  for (double& v : out) {
    if (v < kNegativeEigenvalueLimit) {
      throw ValidationError("density matrix has a negative eigenvalue " + std::to_string(v));
    }
    v = std::clamp(v, 0.0, 1.0);
  }
  return out;
}

std::vector<int> parse_qubit_list(std::string_view text) {
  std::vector<int> qubits;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const auto token = text.substr(pos, comma == std::string_view::npos ? text.npos : comma - pos);
    int q = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), q);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
      throw ValidationError("bad qubit list '" + std::string(text) + "'");
    }
    qubits.push_back(q);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return qubits;
}

const char* kind_name(MetricKind kind) {
  switch (kind) {
    case MetricKind::Renyi: return "renyi";
    case MetricKind::PtMoment: return "pt_moment";
    case MetricKind::Coherence: return "coherence";
  }
  return "?";
}

MetricKind kind_from_name(const std::string& name) {
  if (name == "renyi") return MetricKind::Renyi;
  if (name == "pt_moment" || name == "pt") return MetricKind::PtMoment;
  if (name == "coherence") return MetricKind::Coherence;
  throw ValidationError("unknown metric kind '" + name + "'");
}

}  // namespace

DensityMatrix::DensityMatrix(int n_qubits, CMatrix matrix)
    : n_qubits_(n_qubits), matrix_(std::move(matrix)) {
  const auto dim = qcore::register_dim(n_qubits);
  if (matrix_.rows() != dim || matrix_.cols() != dim) {
    throw ValidationError("density matrix shape does not match 2^n_qubits");
  }
  if ((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() > kHermitianTolerance) {
    throw ValidationError("density matrix is not Hermitian");
  }
  if (std::abs(matrix_.trace() - 1.0) > kTraceTolerance) {
    throw ValidationError("density matrix trace is not 1");
  }
}

SubsystemSpec::SubsystemSpec(std::vector<int> qubits) : qubits_(std::move(qubits)) {
  if (qubits_.empty()) throw ValidationError("subsystem must contain at least one qubit");
  std::sort(qubits_.begin(), qubits_.end());
  if (std::adjacent_find(qubits_.begin(), qubits_.end()) != qubits_.end()) {
    throw ValidationError("subsystem lists a qubit twice");
  }
  if (qubits_.front() < 1) throw ValidationError("qubit labels start at 1");
  if (qubits_.back() > qcore::kMaxQubits) throw ValidationError("qubit label exceeds register limit");
}

bool SubsystemSpec::contains(int qubit) const {
  return std::binary_search(qubits_.begin(), qubits_.end(), qubit);
}

void SubsystemSpec::check_within(int n_qubits) const {
  if (qubits_.back() > n_qubits) {
    throw ValidationError("subsystem {" + to_string() + "} exceeds a " + std::to_string(n_qubits) +
                          "-qubit register");
  }
}

std::uint32_t SubsystemSpec::mask(int n_qubits) const {
  check_within(n_qubits);
  std::uint32_t m = 0;
  for (int q : qubits_) m |= 1u << (n_qubits - q);
  return m;
}

std::string SubsystemSpec::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < qubits_.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(qubits_[i]);
  }
  return s;
}

MetricSpec MetricSpec::renyi(int order, SubsystemSpec a) {
  MetricSpec s{MetricKind::Renyi, order, std::move(a), std::nullopt};
  s.validate();
  return s;
}

MetricSpec MetricSpec::pt_moment(int order, SubsystemSpec a, SubsystemSpec b) {
  MetricSpec s{MetricKind::PtMoment, order, std::move(a), std::move(b)};
  s.validate();
  return s;
}

MetricSpec MetricSpec::coherence(SubsystemSpec a) {
  return MetricSpec{MetricKind::Coherence, 1, std::move(a), std::nullopt};
}

MetricSpec MetricSpec::parse(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (true) {
    const auto colon = text.find(':', pos);
    parts.push_back(text.substr(pos, colon == text.npos ? text.npos : colon - pos));
    if (colon == text.npos) break;
    pos = colon + 1;
  }
  const auto bad = [&] { return ValidationError("bad metric spec '" + std::string(text) + "'"); };
  const auto parse_order = [&](std::string_view s) {
    int order = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), order);
    if (ec != std::errc{} || ptr != s.data() + s.size()) throw bad();
    return order;
  };
  const MetricKind kind = kind_from_name(std::string(parts[0]));
  switch (kind) {
    case MetricKind::Renyi:
      if (parts.size() != 3) throw bad();
      return renyi(parse_order(parts[1]), SubsystemSpec(parse_qubit_list(parts[2])));
    case MetricKind::PtMoment:
      if (parts.size() != 4) throw bad();
      return pt_moment(parse_order(parts[1]), SubsystemSpec(parse_qubit_list(parts[2])),
                       SubsystemSpec(parse_qubit_list(parts[3])));
    case MetricKind::Coherence:
      if (parts.size() != 2) throw bad();
      return coherence(SubsystemSpec(parse_qubit_list(parts[1])));
  }
  throw bad();
}

std::string MetricSpec::to_string() const {
  switch (kind) {
    case MetricKind::Renyi: return "renyi:" + std::to_string(order) + ":" + region_a.to_string();
    case MetricKind::PtMoment:
      return "pt:" + std::to_string(order) + ":" + region_a.to_string() + ":" +
             region_b->to_string();
    case MetricKind::Coherence: return "coherence:" + region_a.to_string();
  }
  return {};
}

std::string MetricSpec::label() const {
  auto dashed = [](const SubsystemSpec& s) {
    std::string out = s.to_string();
    std::replace(out.begin(), out.end(), ',', '-');
    return out;
  };
  switch (kind) {
    case MetricKind::Renyi: return "renyi" + std::to_string(order) + "_A" + dashed(region_a);
    case MetricKind::PtMoment:
      return "pt" + std::to_string(order) + "_A" + dashed(region_a) + "_B" + dashed(*region_b);
    case MetricKind::Coherence: return "coherence_A" + dashed(region_a);
  }
  return {};
}

void MetricSpec::validate(int n_qubits) const {
  switch (kind) {
    case MetricKind::Renyi:
      if (order < 2) throw ValidationError("Renyi entropy needs order >= 2");
      if (region_b) throw ValidationError("Renyi entropy takes a single region");
      break;
    case MetricKind::PtMoment:
      if (order < 1) throw ValidationError("PT moment needs order >= 1");
      if (!region_b) throw ValidationError("PT moment needs region B");
      for (int q : region_a.qubits()) {
        if (region_b->contains(q)) throw ValidationError("PT moment regions must be disjoint");
      }
      break;
    case MetricKind::Coherence:
      if (region_b) throw ValidationError("coherence takes a single region");
      break;
  }
  if (n_qubits > 0) {
    region_a.check_within(n_qubits);
    if (region_b) region_b->check_within(n_qubits);
  }
}

Json to_json(const MetricSpec& spec) {
  Json j;
  j["kind"] = kind_name(spec.kind);
  if (spec.kind != MetricKind::Coherence) j["order"] = spec.order;
  j["region_a"] = spec.region_a.qubits();
  if (spec.region_b) j["region_b"] = spec.region_b->qubits();
  return j;
}

MetricSpec metric_from_json(const Json& j) {
  if (j.is_string()) return MetricSpec::parse(j.get<std::string>());
  try {
    MetricSpec spec;
    spec.kind = kind_from_name(j.at("kind").get<std::string>());
    spec.order = spec.kind == MetricKind::Coherence ? 1 : j.at("order").get<int>();
    spec.region_a = SubsystemSpec(j.at("region_a").get<std::vector<int>>());
    if (j.contains("region_b")) spec.region_b = SubsystemSpec(j.at("region_b").get<std::vector<int>>());
    spec.validate();
    return spec;
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed metric spec: ") + e.what());
  }
}

DensityMatrix density_matrix(const qcore::StateVector& psi) {
  const auto& a = psi.amplitudes();
  CMatrix rho = a * a.adjoint();
  // Exact Hermiticity; the outer product is only Hermitian to rounding.
  rho = (0.5 * (rho + rho.adjoint())).eval();
  return DensityMatrix(psi.n_qubits(), std::move(rho));
}

DensityMatrix partial_trace(const DensityMatrix& rho, const SubsystemSpec& keep) {
  const int n = rho.n_qubits();
  keep.check_within(n);
  if (keep.size() == n) return rho;
  const auto kept = deposit_table(keep.qubits(), n);
  const auto traced = deposit_table(complement(keep, n), n);
  const auto dim = static_cast<Eigen::Index>(kept.size());
  const auto& m = rho.matrix();
  CMatrix out = CMatrix::Zero(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    for (Eigen::Index r = 0; r < dim; ++r) {
      qcore::Complex acc = 0.0;
      for (std::uint32_t e : traced) acc += m(kept[r] | e, kept[c] | e);
      out(r, c) = acc;
    }
  }
  return DensityMatrix(keep.size(), std::move(out));
}

CMatrix partial_transpose(const DensityMatrix& rho, const SubsystemSpec& region_a) {
  const std::uint32_t mask = region_a.mask(rho.n_qubits());
  const auto& m = rho.matrix();
  const auto dim = static_cast<std::uint32_t>(m.rows());
  CMatrix out(m.rows(), m.cols());
  for (std::uint32_t c = 0; c < dim; ++c) {
    for (std::uint32_t r = 0; r < dim; ++r) {
      const std::uint32_t r2 = (r & ~mask) | (c & mask);
      const std::uint32_t c2 = (c & ~mask) | (r & mask);
      out(r2, c2) = m(r, c);
    }
  }
  return out;
}

Eigen::VectorXd density_spectrum(const DensityMatrix& rho) {
  return clamp_spectrum(qcore::eig_hermitian(rho.matrix()).eigenvalues);
}

double renyi_entropy(const DensityMatrix& rho, int order) {
  if (order < 2) throw ValidationError("Renyi entropy needs order >= 2");
  const auto p = density_spectrum(rho);
  double trace_power = 0.0;
  for (double v : p) trace_power += std::pow(v, order);
  return log2_clamped(trace_power) / (1.0 - order);
}

double von_neumann_entropy(const DensityMatrix& rho) { return shannon_bits(density_spectrum(rho)); }

double pt_moment(const DensityMatrix& rho, const SubsystemSpec& region_a, int order) {
  if (order < 1) throw ValidationError("PT moment needs order >= 1");
  const auto mu = qcore::eig_hermitian(partial_transpose(rho, region_a)).eigenvalues;
  double sum = 0.0;
  for (double v : mu) sum += std::pow(v, order);
  return sum;
}

double coherence(const DensityMatrix& rho) {
  const Eigen::VectorXd diag = clamp_spectrum(rho.matrix().diagonal().real());
  return shannon_bits(diag) - von_neumann_entropy(rho);
}

std::vector<double> evaluate_metrics(const qcore::StateVector& psi,
                                     const std::vector<MetricSpec>& specs) {
  const int n = psi.n_qubits();
  for (const auto& spec : specs) spec.validate(n);
  const DensityMatrix rho = density_matrix(psi);
  std::vector<double> values;
  values.reserve(specs.size());
  for (const auto& spec : specs) {
    switch (spec.kind) {
      case MetricKind::Renyi:
        values.push_back(renyi_entropy(partial_trace(rho, spec.region_a), spec.order));
        break;
      case MetricKind::Coherence:
        values.push_back(coherence(partial_trace(rho, spec.region_a)));
        break;
      case MetricKind::PtMoment: {
        std::vector<int> joint = spec.region_a.qubits();
        joint.insert(joint.end(), spec.region_b->qubits().begin(), spec.region_b->qubits().end());
        const SubsystemSpec union_ab(joint);
        // Relabel region A within the reduced register of A u B.
        std::vector<int> local_a;
        for (std::size_t k = 0; k < union_ab.qubits().size(); ++k) {
          if (spec.region_a.contains(union_ab.qubits()[k])) local_a.push_back(static_cast<int>(k) + 1);
        }
        values.push_back(pt_moment(partial_trace(rho, union_ab), SubsystemSpec(local_a), spec.order));
        break;
      }
    }
  }
  return values;
}

}  // namespace entlearn::entmetrics
