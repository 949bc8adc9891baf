#include "qsband/errors.hpp"
#include "qsband/hamiltonian.hpp"

#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <json.hpp>

#include <cstdio>
#include <filesystem>

using namespace qsband;

namespace {

std::string data_path(const std::string& name) { return std::string(QSBAND_DATA_DIR) + "/" + name; }

nlohmann::json si_json() {
  return nlohmann::json::parse(integrals_to_json(load_integrals(data_path("si_gamma.json"))));
}

IntegralSet hubbard_dimer(double t, double u) {
  IntegralSet ints;
  ints.n_orbitals = 2;
  ints.n_electrons = 2;
  ints.kpoint.label = "dimer";
  ints.t = Eigen::MatrixXcd::Zero(2, 2);
  ints.t(0, 1) = ints.t(1, 0) = -t;
  // U n_i,up n_i,down = U c+_ia c+_ib c_ib c_ia with the alpha-beta pairing.
  ints.v.push_back({{0, 0, 0, 0}, u / 2});
  ints.v.push_back({{1, 1, 1, 1}, u / 2});
  return ints;
}

}  // namespace

TEST(Integrals, BundledFilesLoadAndValidate) {
  for (const char* name : {"si_gamma.json", "si_l.json"}) {
    const auto ints = load_integrals(data_path(name));
    EXPECT_EQ(ints.n_orbitals, 2);
    EXPECT_EQ(ints.n_electrons, 2);
    EXPECT_EQ(ints.hf_occupation(), "1010");
  }
  EXPECT_TRUE(load_integrals(data_path("si_gamma.json")).kpoint.is_gamma());
  EXPECT_FALSE(load_integrals(data_path("si_l.json")).kpoint.is_gamma());
}

TEST(Integrals, ComplexRoundTripIsExact) {
  const auto ints = oracle::random_integrals(2, 2, 61, true);
  const auto path = (std::filesystem::temp_directory_path() / "qsband_ints_roundtrip.json").string();
  save_integrals(ints, path);
  const auto back = load_integrals(path);
  std::remove(path.c_str());
  EXPECT_EQ(back.t, ints.t);
  ASSERT_EQ(back.v.size(), ints.v.size());
  for (std::size_t i = 0; i < ints.v.size(); ++i) {
    EXPECT_EQ(back.v[i].pqrs, ints.v[i].pqrs);
    EXPECT_EQ(back.v[i].value, ints.v[i].value);
  }
  EXPECT_EQ(back.constant, ints.constant);
}

TEST(Integrals, NonHermitianOneBodyIsRejected) {
  auto j = si_json();
  j["t"][0][1] = {0.014, 0.001};
  EXPECT_THROW(parse_integrals(j.dump()), HermiticityError);
}

TEST(Integrals, NonHermitianTwoBodyIsRejected) {
  auto j = si_json();
  j["v"].push_back({{"pqrs", {0, 1, 1, 1}}, {"value", {0.0, 0.01}}});
  EXPECT_THROW(parse_integrals(j.dump()), HermiticityError);
}

TEST(Integrals, SchemaViolationsAreRejected) {
  {
    auto j = si_json();
    j.erase("n_electrons");
    EXPECT_THROW(parse_integrals(j.dump()), SchemaError);
  }
  {
    auto j = si_json();
    j["n_electrons"] = 5;
    EXPECT_THROW(parse_integrals(j.dump()), SchemaError);
  }
  {
    auto j = si_json();
    j["kpoint"]["frac"] = {0.7, 0.0, 0.0};
    EXPECT_THROW(parse_integrals(j.dump()), SchemaError);
  }
  {
    auto j = si_json();
    j["v"][0]["pqrs"] = {0, 0, 0, 2};
    EXPECT_THROW(parse_integrals(j.dump()), SchemaError);
  }
  {
    auto j = si_json();
    j["t"][0][0] = 1.0;
    EXPECT_THROW(parse_integrals(j.dump()), SchemaError);
  }
  EXPECT_THROW(parse_integrals("[1, 2"), SchemaError);
  EXPECT_THROW(load_integrals("/nonexistent/ints.json"), IoError);
}

TEST(Hamiltonian, QubitOperatorMatchesSecondQuantizedOracle) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto ints = oracle::random_integrals(2, 2, seed, seed % 2 == 0);
    const PauliSum h = jordan_wigner(build_hamiltonian(ints), ints.n_modes());
    EXPECT_TRUE(h.is_hermitian(1e-12));
    EXPECT_LT((oracle::pauli_sum_dense(h) - oracle::hamiltonian_dense(ints)).norm(), 1e-12);
  }
  const auto si = load_integrals(data_path("si_gamma.json"));
  const PauliSum h = jordan_wigner(build_hamiltonian(si), 4);
  EXPECT_LT((oracle::pauli_sum_dense(h) - oracle::hamiltonian_dense(si)).norm(), 1e-12);
}

TEST(ExactSpectrum, MatchesDenseDiagonalizationPerParticleNumber) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto ints = oracle::random_integrals(3, 3, seed, true);
    const PauliSum h = jordan_wigner(build_hamiltonian(ints), ints.n_modes());
    const oracle::Mat hd = oracle::hamiltonian_dense(ints);
    for (int n = 0; n <= 6; ++n) {
      const auto r = exact_spectrum(h, n);
      const auto expected = oracle::sector_eigenvalues(hd, 6, n);
      ASSERT_EQ(r.eigenvalues.size(), expected.size());
      EXPECT_LT((r.eigenvalues - expected).cwiseAbs().maxCoeff(), 1e-10);
      for (Eigen::Index i = 0; i < r.particle_numbers.size(); ++i) EXPECT_EQ(r.particle_numbers[i], n);
    }
    const auto all = exact_spectrum(h);
    EXPECT_EQ(all.eigenvalues.size(), 64);
    EXPECT_LT((all.eigenvalues - oracle::eigenvalues(hd)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(ExactSpectrum, EigenvectorsSatisfyEigenEquation) {
  const auto ints = oracle::random_integrals(2, 2, 67, true);
  const PauliSum h = jordan_wigner(build_hamiltonian(ints), 4);
  const auto r = exact_spectrum(h, 2, nullptr, true);
  ASSERT_TRUE(r.eigenvectors);
  const oracle::Mat hd = oracle::pauli_sum_dense(h);
  for (Eigen::Index k = 0; k < r.eigenvalues.size(); ++k) {
    const oracle::Vec v = r.eigenvectors->col(k);
    EXPECT_NEAR(v.norm(), 1.0, 1e-12);
    EXPECT_LT((hd * v - r.eigenvalues[k] * v).norm(), 1e-10);
  }
}

TEST(ExactSpectrum, HubbardDimerGroundEnergy) {
  for (const auto& [t, u] : std::vector<std::pair<double, double>>{{1.0, 4.0}, {0.5, 1.0}, {1.0, 0.0}}) {
    const auto ints = hubbard_dimer(t, u);
    const PauliSum h = jordan_wigner(build_hamiltonian(ints), 4);
    EXPECT_NEAR(exact_spectrum(h, 2).eigenvalues[0], oracle::hubbard_dimer_ground(t, u), 1e-12);
  }
}

TEST(ExactSpectrum, RejectsNumberNonConservingOperator) {
  PauliSum h(2);
  h.add_term(PauliString::from_letters("XI"), 1.0);
  EXPECT_THROW(exact_spectrum(h), std::invalid_argument);
  EXPECT_THROW(exact_spectrum(PauliSum(15)), std::invalid_argument);
}

TEST(Constants, UnitsAndAccuracyBar) {
  EXPECT_NEAR(kHartreeToEv, 27.211386, 1e-6);
  EXPECT_NEAR(kChemicalAccuracyEv / kHartreeToEv * 627.509, 1.0, 2e-3);
}
