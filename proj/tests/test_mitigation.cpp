#include "qsband/mitigation.hpp"
#include "qsband/vqe.hpp"

#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace qsband;

namespace {

Eigen::VectorXd random_distribution(int dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  Eigen::VectorXd p(dim);
  for (int i = 0; i < dim; ++i) p[i] = u(rng);
  return p / p.sum();
}

CalibrationMatrix product_calibration(const std::vector<ReadoutFidelity>& f) {
  NoiseModel noise;
  noise.readout = f;
  Eigen::MatrixXd m = Eigen::MatrixXd::Ones(1, 1);
  for (std::size_t q = 0; q < f.size(); ++q) {
    const Eigen::Matrix2d c = noise.confusion(static_cast<int>(q), 0);
    Eigen::MatrixXd next(m.rows() * 2, m.cols() * 2);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) next.block(i * m.rows(), j * m.cols(), m.rows(), m.cols()) = c(i, j) * m;
    }
    m = next;
  }
  return {m, 0, 0};
}

}  // namespace

TEST(Calibration, IdealReadoutGivesIdentity) {
  const auto cal = measure_calibration(NoiseModel::ideal(), 2, 1000, 1, 0);
  EXPECT_EQ(cal.m, Eigen::MatrixXd::Identity(4, 4));
  EXPECT_NO_THROW(cal.validate());
  EXPECT_EQ(cal.n_qubits(), 2);
}

TEST(Calibration, SampledMatrixApproachesProductOfConfusions) {
  NoiseModel noise;
  noise.readout = {{0.981, 0.981}, {0.996, 0.996}};
  const std::int64_t shots = 100000;
  const auto cal = measure_calibration(noise, 2, shots, 3, 0);
  cal.validate();
  const auto expected = product_calibration(noise.readout);
  for (Eigen::Index i = 0; i < 4; ++i) {
    for (Eigen::Index j = 0; j < 4; ++j) {
      const double p = expected.m(i, j);
      EXPECT_NEAR(cal.m(i, j), p, 5 * std::sqrt(p * (1 - p) / shots) + 1e-12);
    }
  }
}

TEST(Rem, IdentityCalibrationIsNoOp) {
  std::mt19937_64 rng(83);
  const Eigen::VectorXd p = random_distribution(4, rng);
  const CalibrationMatrix id{Eigen::MatrixXd::Identity(4, 4), 1, 0};
  EXPECT_LT((apply_rem(p, id) - p).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((rem_quasi_probabilities(p, id) - p).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Rem, InvertsKnownConfusion) {
  std::mt19937_64 rng(89);
  const auto cal = product_calibration({{0.9, 0.85}, {0.95, 0.8}});
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::VectorXd p = random_distribution(4, rng);
    const Eigen::VectorXd noisy = cal.m * p;
    EXPECT_LT((apply_rem(noisy, cal) - p).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT(total_variation(apply_rem(noisy, cal), p), total_variation(noisy, p) + 1e-15);
  }
}

TEST(Rem, ClippedOutputIsADistributionAndQuasiKeepsMass) {
  const auto cal = product_calibration({{0.9, 0.9}, {0.9, 0.9}});
  Eigen::VectorXd noisy(4);
  noisy << 1.0, 0.0, 0.0, 0.0;
  const Eigen::VectorXd quasi = rem_quasi_probabilities(noisy, cal);
  EXPECT_NEAR(quasi.sum(), 1.0, 1e-12);
  EXPECT_LT(quasi.minCoeff(), 0.0);
  const Eigen::VectorXd p = apply_rem(noisy, cal);
  EXPECT_GE(p.minCoeff(), 0.0);
  EXPECT_NEAR(p.sum(), 1.0, 1e-12);
}

TEST(Rem, SingularCalibrationIsRejected) {
  Eigen::MatrixXd m(2, 2);
  m << 0.5, 0.5, 0.5, 0.5;
  const CalibrationMatrix cal{m, 1, 0};
  EXPECT_THROW(apply_rem(Eigen::Vector2d(0.5, 0.5), cal), SingularCalibrationError);
}

TEST(Rem, TotalVariationDistance) {
  EXPECT_DOUBLE_EQ(total_variation(Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)), 1.0);
  EXPECT_DOUBLE_EQ(total_variation(Eigen::Vector2d(0.5, 0.5), Eigen::Vector2d(0.75, 0.25)), 0.25);
}

TEST(Folding, GateCountAndUnitaryArePreserved) {
  const Circuit c = build_ansatz(AnsatzParams{0.3, -0.7, 1.1, 0.2});
  const Circuit f3 = fold_circuit(c, FoldFactor(3));
  EXPECT_EQ(f3.size(), 21u);
  EXPECT_EQ(fold_circuit(c, FoldFactor(5)).size(), 35u);
  EXPECT_EQ(fold_circuit(c, FoldFactor(1)).gates, c.gates);
  EXPECT_LT((oracle::circuit_dense(f3) - oracle::circuit_dense(c)).norm(), 1e-12);
  EXPECT_THROW(FoldFactor(2), std::invalid_argument);
  EXPECT_THROW(FoldFactor(0), std::invalid_argument);
}

TEST(Zne, TwoPointExtrapolation) {
  const auto r = zne_extrapolate({{1, -1.0, 0.01}, {3, -0.8, 0.02}});
  EXPECT_NEAR(r.value, (3 * -1.0 - -0.8) / 2, 1e-14);
  EXPECT_NEAR(r.stderr, std::sqrt(2.25 * 1e-4 + 0.25 * 4e-4), 1e-14);
}

TEST(Zne, LeastSquaresLineRecoversIntercept) {
  const auto r = zne_extrapolate({{1, 2.5, 0}, {3, 3.5, 0}, {5, 4.5, 0}});
  EXPECT_NEAR(r.value, 2.0, 1e-12);
  const auto noisy = zne_extrapolate({{1, 1.0, 0}, {3, 2.1, 0}, {5, 2.9, 0}});
  // Closed-form OLS intercept for x = 1, 3, 5.
  EXPECT_NEAR(noisy.value, (35 * 6.0 - 9 * (1.0 + 6.3 + 14.5)) / (3 * 35 - 81), 1e-12);
  EXPECT_THROW(zne_extrapolate({{1, 1.0, 0}, {1, 2.0, 0}}), std::invalid_argument);
}

TEST(Repeats, ConstantTaskHasZeroStandardError) {
  const auto s = repeat_average([](const RepeatContext&) { return 4.2; }, 10, 1);
  EXPECT_EQ(s.repeats(), 10);
  EXPECT_DOUBLE_EQ(s.mean[0], 4.2);
  EXPECT_DOUBLE_EQ(s.sem[0], 0.0);
}

TEST(Repeats, MeanAndStandardErrorMatchDirectFormula) {
  Eigen::MatrixXd samples(4, 2);
  samples << 1, 10, 2, 10, 3, 10, 6, 14;
  const auto s = summarize_repeats(samples);
  EXPECT_DOUBLE_EQ(s.mean[0], 3.0);
  EXPECT_NEAR(s.sem[0], std::sqrt((4 + 1 + 0 + 9) / 3.0 / 4.0), 1e-14);
  EXPECT_NEAR(s.sem[1], std::sqrt(12 / 3.0 / 4.0), 1e-14);
  EXPECT_THROW(summarize_repeats(Eigen::MatrixXd(1, 1)), std::invalid_argument);
}

TEST(Repeats, SeedsAndCyclesAreDerivedPerRepeat) {
  const auto s = repeat_average(
      [](const RepeatContext& c) {
        Eigen::VectorXd v(3);
        v << c.index, static_cast<double>(c.seed == derive_seed(5, {static_cast<std::uint64_t>(c.index)})), c.cycle;
        return v;
      },
      6, 5, 2, 3);
  for (int r = 0; r < 6; ++r) {
    EXPECT_EQ(s.samples(r, 0), r);
    EXPECT_EQ(s.samples(r, 1), 1.0);
    EXPECT_EQ(s.samples(r, 2), 2 * r);
  }
}

TEST(Repeats, FailureReportsCompletedRepeats) {
  try {
    repeat_average(
        [](const RepeatContext& c) {
          if (c.index == 2) throw std::runtime_error("boom");
          return 1.0 * c.index;
        },
        5, 0);
    FAIL() << "expected RepeatFailure";
  } catch (const RepeatFailure& e) {
    EXPECT_EQ(e.completed_repeats(), (std::vector<int>{0, 1, 3, 4}));
    EXPECT_EQ(e.partial_samples().rows(), 4);
    EXPECT_EQ(e.partial_samples()(2, 0), 3.0);
  }
}
