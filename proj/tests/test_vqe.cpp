#include "qsband/pipeline.hpp"
#include "qsband/vqe.hpp"

#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>
#include <random>
#include <sstream>

using namespace qsband;

namespace {

std::string data_path(const std::string& name) { return std::string(QSBAND_DATA_DIR) + "/" + name; }

constexpr double kPi = std::numbers::pi;

EnergyFunction exact_energy(const std::vector<MeasurementGroup>& groups) {
  return [&groups](const AnsatzParams& p, std::uint64_t seed) {
    return estimate_energy(groups, p, Backend::exact(), {}, seed, 0);
  };
}

}  // namespace

TEST(Ansatz, GateLayout) {
  const Circuit c = build_ansatz(AnsatzParams{0.1, 0.2, 0.3, 0.4});
  ASSERT_EQ(c.size(), 7u);
  EXPECT_EQ(c.n_qubits, 2);
  EXPECT_EQ(c.gates[0], Gate::x(0));
  EXPECT_EQ(c.gates[1], Gate::x(1));
  EXPECT_EQ(c.gates[2], Gate::ry(0, 0.1));
  EXPECT_EQ(c.gates[3], Gate::ry(1, 0.2));
  EXPECT_EQ(c.gates[4], Gate::cz(0, 1));
  EXPECT_EQ(c.gates[5], Gate::ry(0, 0.3));
  EXPECT_EQ(c.gates[6], Gate::ry(1, 0.4));
  const std::vector<double> three{1, 2, 3};
  EXPECT_THROW(build_ansatz(three), std::invalid_argument);
}

TEST(Ansatz, ZeroParametersPrepareHartreeFock) {
  const Statevector psi = apply_circuit(basis_state(2, 0), build_ansatz(AnsatzParams{}));
  EXPECT_NEAR(std::abs(psi[3]), 1.0, 1e-15);

  const auto m = build_kpoint_model(load_integrals(data_path("si_gamma.json")));
  const double e = estimate_energy(m.groups, AnsatzParams{}, Backend::exact(), {}, 0, 0).energy;
  const oracle::Mat hd = oracle::hamiltonian_dense(m.ints);
  EXPECT_NEAR(e, hd(0b0101, 0b0101).real(), 1e-12);
}

TEST(Ansatz, ConvergesToSectorGroundState) {
  const auto m = build_kpoint_model(load_integrals(data_path("si_gamma.json")));
  const auto smo = smo_optimize(AnsatzParams{}, exact_energy(m.groups), 30, 1);
  EXPECT_NEAR(smo.final_estimate().energy, m.casci_energy, 1e-9);
}

TEST(Sinusoid, CosineExample) {
  const SinusoidFit fit = fit_sinusoid(0.0, 1.0, std::cos(kPi / 2), std::cos(-kPi / 2));
  EXPECT_NEAR(fit.a0, 0.0, 1e-15);
  EXPECT_NEAR(fit.a1, 1.0, 1e-15);
  EXPECT_NEAR(std::abs(fit.argmin()), kPi, 1e-15);
}

TEST(Sinusoid, RecoversArbitrarySinusoid) {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  for (int trial = 0; trial < 100; ++trial) {
    const double a0 = u(rng), a1 = std::abs(u(rng)), a2 = u(rng), theta = u(rng);
    const auto e = [&](double t) { return a0 + a1 * std::cos(t - a2); };
    const SinusoidFit fit = fit_sinusoid(theta, e(theta), e(theta + kPi / 2), e(theta - kPi / 2));
    EXPECT_NEAR(fit.a0, a0, 1e-12);
    EXPECT_NEAR(fit.a1, a1, 1e-12);
    for (double t : {-2.0, 0.0, 1.0, 3.0}) EXPECT_NEAR(fit.a0 + fit.a1 * std::cos(t - fit.a2), e(t), 1e-12);
    EXPECT_NEAR(e(fit.argmin()), a0 - a1, 1e-12);
    EXPECT_LE(std::abs(fit.argmin()), kPi);
  }
}

TEST(Smo, FlatLandscapeLeavesParametersUnchanged) {
  const EnergyFunction flat = [](const AnsatzParams&, std::uint64_t) { return EnergyEstimate{-1.0, 0.0, 0}; };
  const AnsatzParams start{0.3, -0.2, 0.1, 0.7};
  const auto r = smo_optimize(start, flat, 2, 5);
  EXPECT_EQ(r.params, start);
  EXPECT_EQ(r.trace.iterations(), 8);
}

TEST(Smo, SeparableSinusoidIsSolvedInOneSweep) {
  const EnergyFunction f = [](const AnsatzParams& p, std::uint64_t) {
    double e = 0;
    for (int k = 0; k < kAnsatzParams; ++k) e += (k + 1) * std::cos(p[k] - 0.25 * k);
    return EnergyEstimate{e, 0.0, 0};
  };
  const auto r = smo_optimize(AnsatzParams{}, f, 1, 1);
  EXPECT_NEAR(r.final_estimate().energy, -10.0, 1e-12);
}

TEST(Smo, ExactUpdatesNeverIncreaseEnergy) {
  for (const char* name : {"si_gamma.json", "si_l.json"}) {
    const auto m = build_kpoint_model(load_integrals(data_path(name)));
    const auto r = smo_optimize(AnsatzParams{}, exact_energy(m.groups), 4, 3);
    double prev = r.trace.initial.energy;
    for (const auto& row : r.trace.rows) {
      EXPECT_LE(row.estimate.energy, prev + 1e-12);
      EXPECT_GE(row.estimate.energy, m.casci_energy - 1e-12);
      prev = row.estimate.energy;
    }
  }
}

TEST(Smo, SeedsFollowTheDocumentedDerivation) {
  std::vector<std::uint64_t> seen;
  const EnergyFunction f = [&seen](const AnsatzParams& p, std::uint64_t seed) {
    seen.push_back(seed);
    return EnergyEstimate{std::cos(p[0]) + std::cos(p[1]), 0.0, 1};
  };
  const auto r = smo_optimize(AnsatzParams{}, f, 1, 77);
  ASSERT_EQ(seen.size(), 1u + 3u * 4u);
  EXPECT_EQ(seen[0], derive_seed(77, {0}));
  EXPECT_EQ(seen[1], derive_seed(77, {1, 0}));
  EXPECT_EQ(seen[2], derive_seed(77, {1, 1}));
  EXPECT_EQ(seen[3], derive_seed(77, {1, 2}));
  EXPECT_EQ(r.trace.rows[0].shots, 3);
}

TEST(Smo, ParallelShiftedEvaluationsAreDeterministic) {
  const auto m = build_kpoint_model(load_integrals(data_path("si_gamma.json")));
  const Backend sampled = Backend::sampled();
  const EnergyFunction f = [&](const AnsatzParams& p, std::uint64_t seed) {
    return estimate_energy(m.groups, p, sampled, {1000}, seed, 0);
  };
  const auto a = smo_optimize(AnsatzParams{}, f, 1, 9, 1);
  const auto b = smo_optimize(AnsatzParams{}, f, 1, 9, 2);
  EXPECT_EQ(a.params, b.params);
  EXPECT_EQ(a.final_estimate().energy, b.final_estimate().energy);
}

TEST(Smo, TraceCsvHeaderAndRows) {
  const EnergyFunction f = [](const AnsatzParams& p, std::uint64_t) { return EnergyEstimate{std::cos(p[0]), 0.01, 20}; };
  const auto r = smo_optimize(AnsatzParams{}, f, 1, 0);
  std::ostringstream os;
  write_trace_csv(os, r.trace);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "iteration,theta1,theta2,theta3,theta4,energy_hartree,stderr_hartree,shots");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 4);
  EXPECT_THROW(smo_optimize(AnsatzParams{}, f, 0, 0), std::invalid_argument);
}

TEST(EnergyEstimate, SampledAgreesWithExactWithinErrors) {
  const auto m = build_kpoint_model(load_integrals(data_path("si_gamma.json")));
  const AnsatzParams p{0.2, -0.1, 0.3, 0.05};
  const double exact = estimate_energy(m.groups, p, Backend::exact(), {}, 0, 0).energy;
  const auto s = estimate_energy(m.groups, p, Backend::sampled(), {20000}, 17, 0);
  EXPECT_GT(s.stderr, 0.0);
  EXPECT_EQ(s.shots, 20000 * static_cast<std::int64_t>(m.groups.size() - std::count_if(m.groups.begin(), m.groups.end(), [](const auto& g) { return g.basis.is_identity(); })));
  EXPECT_NEAR(s.energy, exact, 5 * s.stderr);
}
