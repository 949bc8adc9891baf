#pragma once

#include "qsband/parallel.hpp"
#include "qsband/random.hpp"
#include "qsband/simulator.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace qsband {

/// Column y is the outcome distribution observed after preparing basis state y.
struct CalibrationMatrix {
  Eigen::MatrixXd m;
  std::int64_t shots_per_basis_state = 0;
  std::int64_t cycle = 0;

  int n_qubits() const;
  void validate() const;
};

/// Prepares each computational basis state with X gates and samples it.
CalibrationMatrix measure_calibration(const NoiseModel& noise, int n_qubits, std::int64_t shots,
                                      std::uint64_t seed, std::int64_t cycle);

/// Thrown when the calibration matrix is too ill-conditioned to invert.
class SingularCalibrationError : public std::runtime_error {
 public:
  SingularCalibrationError(double condition_number)
      : std::runtime_error("calibration matrix is singular (condition number " +
                           std::to_string(condition_number) + ")"),
        condition_number_(condition_number) {}
  double condition_number() const { return condition_number_; }

 private:
  double condition_number_;
};

/// Least-squares solve of M p = p_noisy. Entries may be negative; the sum
/// is preserved because M is column-stochastic.
Eigen::VectorXd rem_quasi_probabilities(const Eigen::VectorXd& noisy, const CalibrationMatrix& cal);

/// rem_quasi_probabilities clipped to p >= 0 and renormalized.
Eigen::VectorXd apply_rem(const Eigen::VectorXd& noisy, const CalibrationMatrix& cal);

double total_variation(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

/// Odd noise-amplification factor.
class FoldFactor {
 public:
  explicit FoldFactor(int lambda);
  int lambda() const { return lambda_; }

 private:
  int lambda_;
};

/// Replaces each gate A by A (A^dagger A)^{(lambda-1)/2}.
Circuit fold_circuit(const Circuit& c, FoldFactor f);

struct ZnePoint {
  double lambda;
  double value;
  double stderr;
};

struct ZneResult {
  double value;
  double stderr;
};

/// Ordinary least-squares line in lambda, evaluated at lambda = 0.
ZneResult zne_extrapolate(const std::vector<ZnePoint>& points);

/// What a repeated task sees: its index, a fresh seed and its first cycle.
struct RepeatContext {
  int index;
  std::uint64_t seed;
  std::int64_t cycle;
};

struct RepeatSummary {
  Eigen::MatrixXd samples;  ///< one row per repeat
  Eigen::VectorXd mean;
  Eigen::VectorXd sem;

  int repeats() const { return static_cast<int>(samples.rows()); }
};

RepeatSummary summarize_repeats(const Eigen::MatrixXd& samples);

class RepeatFailure : public std::runtime_error {
 public:
  RepeatFailure(const std::string& what, Eigen::MatrixXd partial, std::vector<int> completed)
      : std::runtime_error(what), partial_(std::move(partial)), completed_(std::move(completed)) {}
  const Eigen::MatrixXd& partial_samples() const { return partial_; }
  const std::vector<int>& completed_repeats() const { return completed_; }

 private:
  Eigen::MatrixXd partial_;
  std::vector<int> completed_;
};

/// Runs `task` `repeats` times with seed derive_seed(root_seed, {r}) and
/// cycle r * cycles_per_repeat, then reports mean and standard error.
///
/// `task` returns a double or an Eigen::VectorXd of fixed length.
template <typename Task>
RepeatSummary repeat_average(Task&& task, int repeats, std::uint64_t root_seed,
                             std::int64_t cycles_per_repeat = 1, int jobs = 1) {
  if (repeats < 2) throw std::invalid_argument("repeat_average: need at least 2 repeats");
  std::vector<Eigen::VectorXd> rows(repeats);
  std::vector<char> done(repeats, 0);
  try {
    parallel_for(static_cast<std::size_t>(repeats), jobs, [&](std::size_t r) {
      const RepeatContext ctx{static_cast<int>(r), derive_seed(root_seed, {r}),
                              static_cast<std::int64_t>(r) * cycles_per_repeat};
      if constexpr (std::is_arithmetic_v<std::invoke_result_t<Task&, const RepeatContext&>>) {
        rows[r] = Eigen::VectorXd::Constant(1, static_cast<double>(task(ctx)));
      } else {
        rows[r] = task(ctx);
      }
      done[r] = 1;
    });
  } catch (const std::exception& e) {
    std::vector<int> completed;
    for (int r = 0; r < repeats; ++r) {
      if (done[r]) completed.push_back(r);
    }
    Eigen::MatrixXd partial(static_cast<Eigen::Index>(completed.size()),
                            completed.empty() ? 0 : rows[completed.front()].size());
    for (std::size_t i = 0; i < completed.size(); ++i) partial.row(static_cast<Eigen::Index>(i)) = rows[completed[i]].transpose();
    throw RepeatFailure(std::string("repeat task failed: ") + e.what(), std::move(partial), std::move(completed));
  }
  const Eigen::Index width = rows.front().size();
  Eigen::MatrixXd samples(repeats, width);
  for (int r = 0; r < repeats; ++r) {
    if (rows[r].size() != width) throw std::runtime_error("repeat_average: tasks returned different lengths");
    samples.row(r) = rows[r].transpose();
  }
  return summarize_repeats(samples);
}

}  // namespace qsband
