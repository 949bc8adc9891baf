#include "qsband/mitigation.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>

namespace qsband {

namespace {

constexpr double kMaxCondition = 1e12;

}  // namespace

int CalibrationMatrix::n_qubits() const {
  const auto rows = static_cast<std::uint64_t>(m.rows());
  if (rows < 2 || !std::has_single_bit(rows)) throw std::invalid_argument("CalibrationMatrix: size is not a power of two");
  return std::countr_zero(rows);
}

void CalibrationMatrix::validate() const {
  if (m.rows() != m.cols()) throw std::invalid_argument("CalibrationMatrix: not square");
  n_qubits();
  if ((m.array() < 0.0).any() || (m.array() > 1.0).any()) {
    throw std::invalid_argument("CalibrationMatrix: entries outside [0, 1]");
  }
  if (((m.colwise().sum().array() - 1.0).abs() > 1e-12).any()) {
    throw std::invalid_argument("CalibrationMatrix: columns do not sum to 1");
  }
}

CalibrationMatrix measure_calibration(const NoiseModel& noise, int n_qubits, std::int64_t shots,
                                      std::uint64_t seed, std::int64_t cycle) {
  if (shots <= 0) throw std::invalid_argument("measure_calibration: shots must be positive");
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  CalibrationMatrix cal{Eigen::MatrixXd::Zero(dim, dim), shots, cycle};
  for (Eigen::Index y = 0; y < dim; ++y) {
    StatePrep prep{Circuit(n_qubits), std::nullopt};
    for (int q = 0; q < n_qubits; ++q) {
      if ((y >> q) & 1) prep.circuit.add(Gate::x(q));
    }
    const auto r = sample_circuit(prep, shots, noise, derive_seed(seed, {static_cast<std::uint64_t>(y)}), cycle);
    cal.m.col(y) = r.probabilities();
  }
  return cal;
}

Eigen::VectorXd rem_quasi_probabilities(const Eigen::VectorXd& noisy, const CalibrationMatrix& cal) {
  if (noisy.size() != cal.m.rows() || cal.m.rows() != cal.m.cols()) {
    throw std::invalid_argument("apply_rem: dimension mismatch");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(cal.m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cond = sv[sv.size() - 1] > 0 ? sv[0] / sv[sv.size() - 1] : INFINITY;
  if (!(cond <= kMaxCondition)) throw SingularCalibrationError(cond);
  return svd.solve(noisy);
}

Eigen::VectorXd apply_rem(const Eigen::VectorXd& noisy, const CalibrationMatrix& cal) {
  Eigen::VectorXd p = rem_quasi_probabilities(noisy, cal).cwiseMax(0.0);
  const double total = p.sum();
  if (!(total > 0)) throw std::runtime_error("apply_rem: mitigated distribution has no positive mass");
  return p / total;
}

double total_variation(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  if (p.size() != q.size()) throw std::invalid_argument("total_variation: size mismatch");
  return 0.5 * (p - q).cwiseAbs().sum();
}

FoldFactor::FoldFactor(int lambda) : lambda_(lambda) {
  if (lambda < 1 || lambda % 2 == 0) {
    throw std::invalid_argument("FoldFactor: lambda must be an odd positive integer, got " + std::to_string(lambda));
  }
}

Circuit fold_circuit(const Circuit& c, FoldFactor f) {
  Circuit out(c.n_qubits);
  out.gates.reserve(c.gates.size() * static_cast<std::size_t>(f.lambda()));
  for (const auto& g : c.gates) {
    out.add(g);
    for (int k = 0; k < (f.lambda() - 1) / 2; ++k) out.add(g.inverse()).add(g);
  }
  return out;
}

ZneResult zne_extrapolate(const std::vector<ZnePoint>& points) {
  std::set<double> distinct;
  for (const auto& p : points) distinct.insert(p.lambda);
  if (distinct.size() < 2) throw std::invalid_argument("zne_extrapolate: need at least two distinct lambda values");

  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd design(n, 2);
  Eigen::VectorXd y(n), sigma(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    design(i, 0) = 1.0;
    design(i, 1) = points[i].lambda;
    y[i] = points[i].value;
    sigma[i] = points[i].stderr;
  }
  // Intercept is a fixed linear combination w . y of the observations.
  const Eigen::Matrix2d normal = design.transpose() * design;
  const Eigen::VectorXd w = (normal.inverse() * design.transpose()).row(0).transpose();
  return {w.dot(y), std::sqrt(w.cwiseAbs2().dot(sigma.cwiseAbs2()))};
}

RepeatSummary summarize_repeats(const Eigen::MatrixXd& samples) {
  const auto n = samples.rows();
  if (n < 2) throw std::invalid_argument("summarize_repeats: need at least 2 rows");
  RepeatSummary s{samples, samples.colwise().mean().transpose(), {}};
  const Eigen::MatrixXd centered = samples.rowwise() - s.mean.transpose();
  const Eigen::VectorXd var = centered.cwiseAbs2().colwise().sum().transpose() / double(n - 1);
  s.sem = (var / double(n)).cwiseSqrt();
  return s;
}

}  // namespace qsband
