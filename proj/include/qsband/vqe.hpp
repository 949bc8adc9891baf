#pragma once

#include "qsband/backend.hpp"
#include "qsband/pauli.hpp"
#include "qsband/simulator.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace qsband {

inline constexpr int kAnsatzQubits = 2;
inline constexpr int kAnsatzParams = 4;

using AnsatzParams = std::array<double, kAnsatzParams>;

/// X on both qubits, Ry(t1) Ry(t2), CZ, Ry(t3) Ry(t4).
Circuit build_ansatz(std::span<const double> params);
inline Circuit build_ansatz(const AnsatzParams& p) { return build_ansatz(std::span<const double>(p)); }

struct EnergyEstimate {
  double energy = 0.0;  ///< Hartree
  double stderr = 0.0;
  std::int64_t shots = 0;
};

/// Ansatz energy from grouped measurements. The imaginary part of the
/// estimate is discarded.
EnergyEstimate estimate_energy(std::span<const MeasurementGroup> groups, const AnsatzParams& params,
                               const Backend& backend, const MeasureOptions& opts, std::uint64_t seed,
                               std::int64_t cycle);

/// Energy as a function of parameters. The seed differs between calls.
using EnergyFunction = std::function<EnergyEstimate(const AnsatzParams&, std::uint64_t seed)>;

struct TraceRow {
  int iteration;  ///< 1-based parameter update
  AnsatzParams params;
  EnergyEstimate estimate;  ///< at `params`, after the update
  std::int64_t shots;       ///< spent on this update
};

struct OptimizationTrace {
  EnergyEstimate initial;
  std::vector<TraceRow> rows;

  int iterations() const { return static_cast<int>(rows.size()); }
};

struct SmoResult {
  AnsatzParams params;
  OptimizationTrace trace;
  EnergyEstimate final_estimate() const { return trace.rows.empty() ? trace.initial : trace.rows.back().estimate; }
};

struct SinusoidFit {
  double a0, a1, a2;  ///< E(t) = a0 + a1 cos(t - a2), a1 >= 0
  double argmin() const;
};

/// Fit through E(t), E(t + pi/2), E(t - pi/2).
SinusoidFit fit_sinusoid(double theta, double e0, double e_plus, double e_minus);

/// Round-robin single-parameter updates to the fitted minimum. Update u's
/// shifted evaluations use derive_seed(seed, {u, 0|1}) and the new point
/// derive_seed(seed, {u, 2}); the value at the current point is reused.
SmoResult smo_optimize(const AnsatzParams& initial, const EnergyFunction& energy, int sweeps,
                       std::uint64_t seed, int jobs = 1);

void write_trace_csv(std::ostream& os, const OptimizationTrace& trace);

}  // namespace qsband
