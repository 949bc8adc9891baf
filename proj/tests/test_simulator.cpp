#include "qsband/errors.hpp"
#include "qsband/simulator.hpp"

#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace qsband;

namespace {

Circuit random_circuit(int n, int gates, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> kind(0, 7), qubit(0, n - 1);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  Circuit c(n);
  for (int i = 0; i < gates; ++i) {
    const int q = qubit(rng);
    int r = qubit(rng);
    while (n > 1 && r == q) r = qubit(rng);
    const int k = kind(rng);
    if (n == 1 && k >= 6) {
      c.add(Gate::h(q));
      continue;
    }
    switch (k) {
      case 0: c.add(Gate::x(q)); break;
      case 1: c.add(Gate::h(q)); break;
      case 2: c.add(Gate::s(q)); break;
      case 3: c.add(Gate::sdg(q)); break;
      case 4: c.add(Gate::ry(q, angle(rng))); break;
      case 5: c.add(Gate::rz(q, angle(rng))); break;
      case 6: c.add(Gate::cz(q, r)); break;
      default: c.add(Gate::cnot(q, r)); break;
    }
  }
  return c;
}

MeasurementGroup single_group(const std::string& letters) {
  MeasurementGroup g;
  const auto p = PauliString::from_letters(letters);
  g.members.push_back({p, 1.0});
  g.basis = p;
  return g;
}

}  // namespace

TEST(Statevector, XOnBothQubitsGivesBasisState3) {
  Circuit c(2);
  c.add(Gate::x(0)).add(Gate::x(1));
  const Statevector psi = apply_circuit(basis_state(2, 0), c);
  EXPECT_NEAR(std::abs(psi[3]), 1.0, 1e-15);
  EXPECT_NEAR(psi.norm(), 1.0, 1e-15);
}

TEST(Statevector, RandomCircuitsMatchDenseUnitaries) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + trial % 4;
    const Circuit c = random_circuit(n, 12, rng);
    const Statevector psi = apply_circuit(basis_state(n, 0), c);
    const oracle::Vec expected = oracle::circuit_dense(c).col(0);
    EXPECT_LT((psi - expected).norm(), 1e-12);
  }
}

TEST(Statevector, GateInverseUndoesGate) {
  std::mt19937_64 rng(23);
  const Circuit c = random_circuit(3, 20, rng);
  Statevector psi = apply_circuit(basis_state(3, 5), c);
  for (auto it = c.gates.rbegin(); it != c.gates.rend(); ++it) apply_gate(psi, it->inverse());
  EXPECT_LT((psi - basis_state(3, 5)).norm(), 1e-12);
}

TEST(Statevector, ApplyPauliMatchesDense) {
  std::mt19937_64 rng(29);
  const Circuit c = random_circuit(3, 10, rng);
  const Statevector psi = apply_circuit(basis_state(3, 0), c);
  for (const char* s : {"XYZ", "IYI", "ZZX"}) {
    Statevector phi = psi;
    apply_pauli(phi, PauliString::from_letters(s));
    EXPECT_LT((phi - oracle::pauli_dense(s) * psi).norm(), 1e-12);
    EXPECT_NEAR(std::abs(expectation(psi, PauliString::from_letters(s)) -
                         psi.dot(oracle::pauli_dense(s) * psi)),
                0.0, 1e-12);
  }
}

TEST(Circuit, ValidationRejectsBadGates) {
  Circuit c(2);
  EXPECT_THROW(c.add(Gate::x(2)), std::invalid_argument);
  EXPECT_THROW(c.add(Gate::cz(1, 1)), std::invalid_argument);
  EXPECT_THROW(c.add(Gate::ry(0, std::nan(""))), std::invalid_argument);
}

TEST(BasisChange, RotatesEachLetterOntoZ) {
  for (const char* s : {"X", "Y", "Z", "XY", "YZ", "XZY"}) {
    const auto p = PauliString::from_letters(s);
    const oracle::Mat u = oracle::circuit_dense(basis_change(p));
    std::string z(p.n_qubits(), 'Z');
    const oracle::Mat rotated = u * oracle::pauli_dense(s) * u.adjoint();
    EXPECT_LT((rotated - oracle::pauli_dense(z)).norm(), 1e-12) << s;
  }
}

TEST(ShotResult, BitstringsPutQubitZeroFirst) {
  EXPECT_EQ(ShotResult::bitstring(3, 0b001), "100");
  const auto r = ShotResult::from_map(2, {{"10", 30}, {"01", 70}});
  EXPECT_EQ(r.shots, 100);
  EXPECT_EQ(r.counts[1], 30);
  EXPECT_EQ(r.counts[2], 70);
  EXPECT_EQ(r.count("01"), 70);
  EXPECT_EQ(r.to_map().at("10"), 30);
}

TEST(Sampling, NoiselessBasisStateIsDeterministic) {
  StatePrep prep{Circuit(2), std::nullopt};
  prep.circuit.add(Gate::x(0)).add(Gate::x(1));
  const auto r = sample_group(prep, single_group("ZZ"), 1000, NoiseModel::ideal(), 1, 0);
  EXPECT_EQ(r.count("11"), 1000);
  const auto e = expectation_from_counts(single_group("ZZ"), r);
  EXPECT_NEAR(e.value.real(), 1.0, 1e-15);
  EXPECT_NEAR(e.stderr, 0.0, 1e-15);
}

TEST(Sampling, CountsExampleExpectation) {
  const auto g = single_group("ZI");
  const auto r = ShotResult::from_map(2, {{"00", 60}, {"10", 40}});
  const auto e = expectation_from_counts(g, r);
  EXPECT_NEAR(e.value.real(), 0.2, 1e-15);
  EXPECT_NEAR(e.stderr, std::sqrt((1 - 0.04) / 100), 1e-12);
}

TEST(Sampling, SameSeedSameCountsDifferentSeedDifferentCounts) {
  std::mt19937_64 rng(31);
  StatePrep prep{random_circuit(2, 8, rng), std::nullopt};
  NoiseModel noise;
  noise.readout = {{0.95, 0.97}, {0.98, 0.96}};
  noise.depolarizing_1q = 0.01;
  noise.depolarizing_2q = 0.03;
  const auto g = single_group("XZ");
  const auto a = sample_group(prep, g, 2000, noise, 99, 3);
  const auto b = sample_group(prep, g, 2000, noise, 99, 3);
  const auto c = sample_group(prep, g, 2000, noise, 100, 3);
  EXPECT_EQ(a.counts, b.counts);
  EXPECT_NE(a.counts, c.counts);
}

TEST(Sampling, ReadoutFlipRatesMatchFidelities) {
  NoiseModel noise;
  noise.readout = {{0.9, 0.8}};
  const std::int64_t shots = 200000;
  StatePrep zero{Circuit(1), std::nullopt};
  const auto r0 = sample_circuit(zero, shots, noise, 5, 0);
  const double p10 = static_cast<double>(r0.counts[1]) / shots;
  EXPECT_NEAR(p10, 0.1, 5 * std::sqrt(0.09 / shots));
  StatePrep one{Circuit(1), std::nullopt};
  one.circuit.add(Gate::x(0));
  const auto r1 = sample_circuit(one, shots, noise, 6, 0);
  const double p01 = static_cast<double>(r1.counts[0]) / shots;
  EXPECT_NEAR(p01, 0.2, 5 * std::sqrt(0.16 / shots));
}

TEST(Sampling, NoiselessFrequenciesMatchBornRule) {
  std::mt19937_64 rng(37);
  StatePrep prep{random_circuit(3, 15, rng), std::nullopt};
  const std::int64_t shots = 100000;
  const auto r = sample_circuit(prep, shots, NoiseModel::ideal(), 8, 0);
  const oracle::Vec psi = oracle::circuit_dense(prep.circuit).col(0);
  for (int b = 0; b < 8; ++b) {
    const double p = std::norm(psi[b]);
    EXPECT_NEAR(static_cast<double>(r.counts[b]) / shots, p, 5 * std::sqrt(p * (1 - p) / shots) + 1e-12);
  }
}

TEST(Sampling, DepolarizingShrinksSingleQubitExpectation) {
  NoiseModel noise;
  noise.depolarizing_1q = 0.1;
  StatePrep prep{Circuit(1), std::nullopt};
  prep.circuit.add(Gate::x(0));
  const std::int64_t shots = 200000;
  const auto g = single_group("Z");
  const auto e = expectation_from_counts(g, sample_group(prep, g, shots, noise, 11, 0));
  // One gate, flip probability 2p/3 on Z.
  const double expected = -(1 - 4 * 0.1 / 3);
  EXPECT_NEAR(e.value.real(), expected, 5 * e.stderr);
}

TEST(Sampling, InitialStateIsUsed) {
  StatePrep prep{Circuit(2), basis_state(2, 2)};
  const auto r = sample_circuit(prep, 100, NoiseModel::ideal(), 1, 0);
  EXPECT_EQ(r.count("01"), 100);
}

TEST(ExactGroup, MatchesDenseExpectation) {
  std::mt19937_64 rng(41);
  const Statevector psi = apply_circuit(basis_state(3, 0), random_circuit(3, 12, rng));
  MeasurementGroup g;
  g.basis = PauliString::from_letters("XZY");
  g.members = {{PauliString::from_letters("XZY"), 0.5}, {PauliString::from_letters("XII"), -0.3},
               {PauliString::from_letters("IZY"), 0.2}};
  cplx expected = 0;
  for (const auto& [p, c] : g.members) expected += c * psi.dot(oracle::pauli_dense(p.letters()) * psi);
  EXPECT_NEAR(std::abs(exact_group_expectation(psi, g).value - expected), 0.0, 1e-12);
}

TEST(NoiseModel, ConfusionIsColumnStochasticAndDrifts) {
  NoiseModel noise;
  noise.readout = {{0.981, 0.996}};
  noise.drift = ReadoutDrift{0.01, 40};
  double mean = 0;
  for (int cycle = 0; cycle < 40; ++cycle) {
    const Eigen::Matrix2d m = noise.confusion(0, cycle);
    EXPECT_NEAR(m.col(0).sum(), 1.0, 1e-15);
    EXPECT_NEAR(m.col(1).sum(), 1.0, 1e-15);
    mean += m(0, 0) / 40;
  }
  EXPECT_NEAR(mean, 0.981, 1e-12);
  EXPECT_NEAR(noise.confusion(0, 10)(0, 0), 0.991, 1e-12);
}

TEST(NoiseModel, JsonRoundTripAndErrors) {
  NoiseModel noise;
  noise.readout = {{0.981, 0.981}, {0.996, 0.996}};
  noise.depolarizing_1q = 0.001;
  noise.depolarizing_2q = 0.021;
  noise.drift = ReadoutDrift{0.004, 40};
  const NoiseModel back = NoiseModel::from_json_text(noise.to_json_text());
  ASSERT_EQ(back.readout.size(), 2u);
  EXPECT_EQ(back.readout[1].f11, 0.996);
  EXPECT_EQ(back.depolarizing_2q, 0.021);
  ASSERT_TRUE(back.drift);
  EXPECT_EQ(back.drift->period_cycles, 40);
  EXPECT_THROW(NoiseModel::from_json_text("{not json"), SchemaError);
  EXPECT_THROW(NoiseModel::from_json_text(R"({"depolarizing_1q": 1.5})"), SchemaError);
  EXPECT_THROW(NoiseModel::load("/nonexistent/noise.json"), IoError);
}
