#include "qsband/vqe.hpp"

#include "qsband/parallel.hpp"
#include "qsband/random.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace qsband {

Circuit build_ansatz(std::span<const double> params) {
  if (params.size() != kAnsatzParams) {
    throw std::invalid_argument("build_ansatz: expected 4 parameters, got " + std::to_string(params.size()));
  }
  for (double t : params) {
    if (!std::isfinite(t)) throw std::invalid_argument("build_ansatz: non-finite parameter");
  }
  Circuit c(kAnsatzQubits);
  c.add(Gate::x(0)).add(Gate::x(1));
  c.add(Gate::ry(0, params[0])).add(Gate::ry(1, params[1]));
  c.add(Gate::cz(0, 1));
  c.add(Gate::ry(0, params[2])).add(Gate::ry(1, params[3]));
  return c;
}

EnergyEstimate estimate_energy(std::span<const MeasurementGroup> groups, const AnsatzParams& params,
                               const Backend& backend, const MeasureOptions& opts, std::uint64_t seed,
                               std::int64_t cycle) {
  for (const auto& g : groups) {
    if (g.n_qubits() != kAnsatzQubits) throw std::invalid_argument("estimate_energy: groups must act on 2 qubits");
  }
  const auto e = estimate_groups(StatePrep{build_ansatz(params), std::nullopt}, groups, backend, opts, seed, cycle);
  return {e.value.real(), e.stderr, e.shots};
}

double SinusoidFit::argmin() const { return std::remainder(a2 + std::numbers::pi, 2 * std::numbers::pi); }

SinusoidFit fit_sinusoid(double theta, double e0, double e_plus, double e_minus) {
  const double a0 = 0.5 * (e_plus + e_minus);
  const double c = e0 - a0;
  const double s = 0.5 * (e_minus - e_plus);
  const double a1 = std::hypot(c, s);
  return {a0, a1, theta - std::atan2(s, c)};
}

SmoResult smo_optimize(const AnsatzParams& initial, const EnergyFunction& energy, int sweeps, std::uint64_t seed,
                       int jobs) {
  if (sweeps < 1) throw std::invalid_argument("smo_optimize: sweeps must be at least 1");
  SmoResult out{initial, {}};
  out.trace.initial = energy(initial, derive_seed(seed, {0}));
  EnergyEstimate current = out.trace.initial;
  int update = 0;
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    for (int k = 0; k < kAnsatzParams; ++k) {
      ++update;
      const double theta = out.params[k];
      std::array<EnergyEstimate, 2> shifted;
      parallel_for(2, jobs, [&](std::size_t i) {
        AnsatzParams p = out.params;
        p[k] = theta + (i == 0 ? 1 : -1) * std::numbers::pi / 2;
        shifted[i] = energy(p, derive_seed(seed, {std::uint64_t(update), i}));
      });
      const SinusoidFit fit = fit_sinusoid(theta, current.energy, shifted[0].energy, shifted[1].energy);
      if (fit.a1 > 1e-12) out.params[k] = fit.argmin();
      current = energy(out.params, derive_seed(seed, {std::uint64_t(update), 2}));
      out.trace.rows.push_back({update, out.params, current, shifted[0].shots + shifted[1].shots + current.shots});
    }
  }
  return out;
}

void write_trace_csv(std::ostream& os, const OptimizationTrace& trace) {
  const auto old = os.precision(17);
  os << "iteration,theta1,theta2,theta3,theta4,energy_hartree,stderr_hartree,shots\n";
  for (const auto& r : trace.rows) {
    os << r.iteration;
    for (double t : r.params) os << ',' << t;
    os << ',' << r.estimate.energy << ',' << r.estimate.stderr << ',' << r.shots << '\n';
  }
  os.precision(old);
}

}  // namespace qsband
