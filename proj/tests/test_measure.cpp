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

#include <gtest/gtest.h>

#include <random>

#include "entlearn/error.hpp"
#include "entlearn/measure.hpp"
#include "oracle.hpp"

using namespace entlearn;
using namespace entlearn::measure;
using qcore::StateVector;

TEST(MeasurementSetTest, StaticLayout) {
  const auto set = static_measurement_set(4);
  ASSERT_EQ(set.size(), 39u);
  EXPECT_EQ(set.operators[0].to_string(), "XIII");
  EXPECT_EQ(set.operators[1].to_string(), "YIII");
  EXPECT_EQ(set.operators[2].to_string(), "ZIII");
  EXPECT_EQ(set.operators[11].to_string(), "IIIZ");
  EXPECT_EQ(set.operators[12].to_string(), "XXII");
  EXPECT_EQ(set.operators[13].to_string(), "XYII");
  EXPECT_EQ(set.operators[15].to_string(), "YXII");
  EXPECT_EQ(set.operators[20].to_string(), "ZZII");
  EXPECT_EQ(set.operators[21].to_string(), "IXXI");
  EXPECT_EQ(set.operators[38].to_string(), "IIZZ");
  EXPECT_EQ(static_measurement_set(6).size(), 63u);
  EXPECT_THROW(static_measurement_set(1), ValidationError);
}

TEST(MeasurementSetTest, SingleQubitLayout) {
  const auto set = single_qubit_set(3);
  ASSERT_EQ(set.size(), 9u);
  EXPECT_EQ(set.operators[4].to_string(), "IYI");
}

TEST(MeasureTest, ExpectationsMatchOracle) {
  std::mt19937_64 rng(71);
  const auto psi = StateVector(3, oracle::random_state(8, rng));
  const auto set = static_measurement_set(3);
  const auto values = measure_expectations(psi, set);
  ASSERT_EQ(values.size(), set.size());
  for (std::size_t k = 0; k < set.size(); ++k) {
    EXPECT_NEAR(values[k], oracle::expectation(psi.amplitudes(), oracle::pauli_kron(set.operators[k].to_string())),
                1e-13);
  }
  EXPECT_THROW(measure_expectations(psi, static_measurement_set(4)), ValidationError);
}

TEST(TimeTraceTest, RowsHoldEvolvedExpectations) {
  qcore::Hamiltonian h(3);
  h.add(0.7, qcore::PauliString::parse("ZZI"));
  h.add(0.7, qcore::PauliString::parse("IZZ"));
  for (const char* x : {"XII", "IXI", "IIX"}) h.add(-0.4, qcore::PauliString::parse(x));
  const auto psi0 = qcore::prepare_initial_state(3, 0.3, 0.2);
  const auto grid = time_traces(h, psi0, 5, 0.25);
  EXPECT_EQ(grid.values.rows(), 5);
  EXPECT_EQ(grid.values.cols(), 9);
  const oracle::CMat hm = oracle::pauli_kron("ZZI") * 0.7 + oracle::pauli_kron("IZZ") * 0.7 -
                  0.4 * (oracle::pauli_kron("XII") + oracle::pauli_kron("IXI") + oracle::pauli_kron("IIX"));
  const auto set = single_qubit_set(3);
  for (int s = 1; s <= 5; ++s) {
    const auto psi = oracle::evolve(hm, psi0.amplitudes(), s * 0.25);
    for (int k = 0; k < 9; ++k) {
      EXPECT_NEAR(grid.values(s - 1, k), oracle::expectation(psi, oracle::pauli_kron(set.operators[k].to_string())),
                  1e-10);
    }
  }
  const auto flat = grid.flattened();
  ASSERT_EQ(flat.size(), 45u);
  EXPECT_EQ(flat[9 + 4], grid.values(1, 4));
  EXPECT_THROW(time_traces(h, psi0, 0, 0.25), ValidationError);
  EXPECT_THROW(time_traces(h, psi0, 3, 0.0), ValidationError);
}
