#pragma once

#include "qsband/mitigation.hpp"
#include "qsband/pauli.hpp"
#include "qsband/simulator.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace qsband {

/// exact: infinite shots. sampled: finite shots, no noise. noisy: finite
/// shots through the backend's NoiseModel.
enum class BackendMode { exact, sampled, noisy };

BackendMode parse_backend_mode(std::string_view s);
std::string_view to_string(BackendMode m);

struct Backend {
  BackendMode mode = BackendMode::exact;
  NoiseModel noise;

  static Backend exact() { return {BackendMode::exact, {}}; }
  static Backend sampled() { return {BackendMode::sampled, {}}; }
  static Backend noisy(NoiseModel n) { return {BackendMode::noisy, std::move(n)}; }

  /// The model actually applied to shots (ideal unless mode is noisy).
  const NoiseModel& active_noise() const;
};

struct MeasureOptions {
  std::int64_t shots_per_group = 5000;
  int fold = 1;
  /// Readout-error mitigation is applied to every group when set. Group
  /// expectations use the unclipped quasi-probabilities.
  const CalibrationMatrix* calibration = nullptr;
};

struct OperatorEstimate {
  cplx value;
  double stderr = 0.0;
  std::int64_t shots = 0;
};

/// Sum of group expectations on `prep`; group k samples with
/// derive_seed(seed, {k}). Standard errors add in quadrature.
OperatorEstimate estimate_groups(const StatePrep& prep, std::span<const MeasurementGroup> groups,
                                 const Backend& backend, const MeasureOptions& opts,
                                 std::uint64_t seed, std::int64_t cycle);

}  // namespace qsband
