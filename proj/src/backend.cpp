#include "qsband/backend.hpp"

#include <cmath>
#include <stdexcept>

namespace qsband {

BackendMode parse_backend_mode(std::string_view s) {
  if (s == "exact") return BackendMode::exact;
  if (s == "sampled") return BackendMode::sampled;
  if (s == "noisy") return BackendMode::noisy;
  throw std::invalid_argument("unknown backend mode '" + std::string(s) + "' (expected exact|sampled|noisy)");
}

std::string_view to_string(BackendMode m) {
  switch (m) {
    case BackendMode::exact: return "exact";
    case BackendMode::sampled: return "sampled";
    case BackendMode::noisy: return "noisy";
  }
  return "?";
}

const NoiseModel& Backend::active_noise() const {
  static const NoiseModel kIdeal = NoiseModel::ideal();
  return mode == BackendMode::noisy ? noise : kIdeal;
}

OperatorEstimate estimate_groups(const StatePrep& prep, std::span<const MeasurementGroup> groups,
                                 const Backend& backend, const MeasureOptions& opts,
                                 std::uint64_t seed, std::int64_t cycle) {
  OperatorEstimate out{};
  if (backend.mode == BackendMode::exact) {
    const Statevector psi = prep.prepare();
    for (const auto& g : groups) out.value += exact_group_expectation(psi, g).value;
    return out;
  }
  if (opts.shots_per_group <= 0) throw std::invalid_argument("estimate_groups: shots_per_group must be positive");

  StatePrep run = prep;
  if (opts.fold != 1) run.circuit = fold_circuit(prep.circuit, FoldFactor(opts.fold));
  double var = 0;
  for (std::size_t k = 0; k < groups.size(); ++k) {
    const auto& g = groups[k];
    // Identity-only groups need no shots.
    if (g.basis.is_identity()) {
      for (const auto& [p, c] : g.members) out.value += c;
      continue;
    }
    const auto counts = sample_group(run, g, opts.shots_per_group, backend.active_noise(),
                                     derive_seed(seed, {k}), cycle);
    Estimate e;
    if (opts.calibration) {
      e = expectation_from_distribution(g, rem_quasi_probabilities(counts.probabilities(), *opts.calibration),
                                        counts.shots);
    } else {
      e = expectation_from_counts(g, counts);
    }
    out.value += e.value;
    var += e.stderr * e.stderr;
    out.shots += counts.shots;
  }
  out.stderr = std::sqrt(var);
  return out;
}

}  // namespace qsband
