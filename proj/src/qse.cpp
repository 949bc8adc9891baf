#include "qsband/qse.hpp"

#include "qsband/parallel.hpp"
#include "qsband/random.hpp"

#include <algorithm>
#include <numeric>
#include <cmath>
#include <ostream>

namespace qsband {

std::string_view to_string(ExcitationKind k) { return k == ExcitationKind::valence ? "valence" : "conduction"; }

ExcitationSet build_excitations(const IntegralSet& ints, ExcitationKind kind) {
  return build_excitations(ints.hf_occupation(), ints.n_orbitals, kind);
}

ExcitationSet build_excitations(std::string_view occupation, int n_orbitals, ExcitationKind kind) {
  if (static_cast<int>(occupation.size()) != 2 * n_orbitals) {
    throw std::invalid_argument("build_excitations: occupation length must be 2 * n_orbitals");
  }
  ExcitationSet out;
  out.kind = kind;
  const char wanted = kind == ExcitationKind::valence ? '1' : '0';
  for (int mode = 0; mode < 2 * n_orbitals; ++mode) {
    if (occupation[mode] != '0' && occupation[mode] != '1') throw std::invalid_argument("build_excitations: bad occupation");
    if (occupation[mode] != wanted) continue;
    out.operators.push_back(kind == ExcitationKind::valence ? FermionOperator::annihilation(mode)
                                                            : FermionOperator::creation(mode));
    out.labels.push_back(std::to_string(mode % n_orbitals) + (mode < n_orbitals ? "a" : "b"));
  }
  return out;
}

std::size_t SubspaceOperators::group_count() const {
  std::size_t n = 0;
  for (const auto& g : h_groups) n += g.size();
  for (const auto& g : s_groups) n += g.size();
  return n;
}

namespace {

std::vector<MeasurementGroup> tapered_groups(const FermionOperator& f, int n_modes, const SymmetrySet& s, double eps) {
  const PauliSum q = jordan_wigner(f.normal_ordered(), n_modes);
  return group_qubitwise(truncate(taper(q, s, TaperMode::project), eps));
}

}  // namespace

SubspaceOperators prepare_subspace(const ExcitationSet& exc, const FermionOperator& h_in, int n_modes,
                                   const SymmetrySet& symmetries, double truncate_eps, double shift) {
  SubspaceOperators out;
  out.dim = static_cast<int>(exc.size());
  out.n_qubits = n_modes - static_cast<int>(symmetries.size());
  out.shift = shift;
  const FermionOperator h = h_in + FermionOperator::identity(-shift);

  std::vector<std::uint64_t> patterns;
  for (std::size_t i = 0; i < exc.size(); ++i) {
    const PauliSum q = jordan_wigner(exc.operators[i], n_modes);
    if (q.empty()) throw std::invalid_argument("prepare_subspace: excitation operator " + exc.labels[i] + " is zero");
    std::uint64_t flips = 0;
    for (std::size_t g = 0; g < symmetries.size(); ++g) {
      if (!q.terms().begin()->first.commutes_with(symmetries.generators[g])) flips |= std::uint64_t{1} << g;
    }
    const auto it = std::find(patterns.begin(), patterns.end(), flips);
    if (it == patterns.end()) {
      patterns.push_back(flips);
      out.blocks.push_back({static_cast<int>(i)});
    } else {
      out.blocks[static_cast<std::size_t>(it - patterns.begin())].push_back(static_cast<int>(i));
    }
  }

  out.h_groups.resize(exc.size() * exc.size());
  out.s_groups.resize(exc.size() * exc.size());
  for (std::size_t i = 0; i < exc.size(); ++i) {
    const FermionOperator oi_dag = exc.operators[i].adjoint();
    const FermionOperator left = oi_dag * h;
    for (std::size_t j = 0; j < exc.size(); ++j) {
      const std::size_t k = i * exc.size() + j;
      out.h_groups[k] = tapered_groups(left * exc.operators[j], n_modes, symmetries, truncate_eps);
      out.s_groups[k] = tapered_groups(oi_dag * exc.operators[j], n_modes, symmetries, truncate_eps);
    }
  }
  return out;
}

SubspaceProblem measure_subspace(const StatePrep& reference, const SubspaceOperators& ops, const Backend& backend,
                                 const MeasureOptions& opts, std::uint64_t seed, std::int64_t cycle, bool symmetrize,
                                 int jobs) {
  if (reference.n_qubits() != ops.n_qubits) throw std::invalid_argument("measure_subspace: reference register size mismatch");
  const Eigen::Index d = ops.dim;
  SubspaceProblem out{Eigen::MatrixXcd::Zero(d, d), Eigen::MatrixXcd::Zero(d, d), Eigen::MatrixXd::Zero(d, d),
                      Eigen::MatrixXd::Zero(d, d), ops.shift, ops.blocks, 0};
  std::vector<std::int64_t> shots(static_cast<std::size_t>(d * d), 0);
  parallel_for(static_cast<std::size_t>(d * d), jobs, [&](std::size_t k) {
    const std::uint64_t i = k / static_cast<std::size_t>(d), j = k % static_cast<std::size_t>(d);
    const auto eh = estimate_groups(reference, ops.h_groups[k], backend, opts, derive_seed(seed, {i, j, 0}), cycle);
    const auto es = estimate_groups(reference, ops.s_groups[k], backend, opts, derive_seed(seed, {i, j, 1}), cycle);
    out.h_sub(Eigen::Index(i), Eigen::Index(j)) = eh.value;
    out.s_sub(Eigen::Index(i), Eigen::Index(j)) = es.value;
    out.h_stderr(Eigen::Index(i), Eigen::Index(j)) = eh.stderr;
    out.s_stderr(Eigen::Index(i), Eigen::Index(j)) = es.stderr;
    shots[k] = eh.shots + es.shots;
  });
  for (auto s : shots) out.shots += s;
  if (symmetrize) {
    out.h_sub = ((out.h_sub + out.h_sub.adjoint()) / 2.0).eval();
    out.s_sub = ((out.s_sub + out.s_sub.adjoint()) / 2.0).eval();
  }
  return out;
}

Eigen::VectorXd gev_stderr(const GevSolution<double>& sol, const Eigen::MatrixXd& h_stderr,
                           const Eigen::MatrixXd& s_stderr) {
  Eigen::VectorXd out(sol.eigenvalues.size());
  for (Eigen::Index k = 0; k < sol.eigenvalues.size(); ++k) {
    const Eigen::VectorXd w = sol.vectors.col(k).cwiseAbs2();
    const double e = sol.eigenvalues[k];
    const Eigen::MatrixXd var = h_stderr.cwiseAbs2() + e * e * s_stderr.cwiseAbs2();
    out[k] = std::sqrt(std::max(0.0, w.dot(var * w)));
  }
  return out;
}

SubspaceSolution solve_subspace(const SubspaceProblem& p, double s_threshold) {
  SubspaceSolution out;
  const Eigen::Index d = p.h_sub.rows();
  std::vector<std::vector<int>> blocks = p.blocks;
  if (blocks.empty() && d > 0) {
    blocks.emplace_back(static_cast<std::size_t>(d));
    std::iota(blocks.front().begin(), blocks.front().end(), 0);
  }
  std::vector<double> energies, errors;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& idx = blocks[b];
    const auto k = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXcd h(k, k), s(k, k);
    Eigen::MatrixXd dh(k, k), ds(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index j = 0; j < k; ++j) {
        h(i, j) = p.h_sub(idx[i], idx[j]);
        s(i, j) = p.s_sub(idx[i], idx[j]);
        dh(i, j) = p.h_stderr(idx[i], idx[j]);
        ds(i, j) = p.s_stderr(idx[i], idx[j]);
      }
    }
    const auto sol = solve_gev<double>(h, s, s_threshold);
    const Eigen::VectorXd err = gev_stderr(sol, dh, ds);
    for (Eigen::Index e = 0; e < sol.eigenvalues.size(); ++e) {
      energies.push_back(sol.eigenvalues[e] + p.shift);
      errors.push_back(err[e]);
      out.block_of.push_back(static_cast<int>(b));
    }
    out.kept_dimension += sol.kept_dimension;
  }
  out.energies = Eigen::Map<Eigen::VectorXd>(energies.data(), static_cast<Eigen::Index>(energies.size()));
  out.stderr = Eigen::Map<Eigen::VectorXd>(errors.data(), static_cast<Eigen::Index>(errors.size()));
  return out;
}

std::vector<double> BandStructure::energies(const std::string& k_label, ExcitationKind kind) const {
  std::vector<double> out;
  for (const auto& r : rows) {
    if (r.k_label == k_label && r.band_type == kind) out.push_back(r.energy_ev);
  }
  return out;
}

BandStructure assemble_bands(const std::vector<KPointSolution>& per_k, ShiftPolicy policy, double explicit_shift_ev) {
  if (per_k.empty()) throw std::invalid_argument("assemble_bands: no k-points");
  BandStructure out;
  for (const auto& k : per_k) {
    const auto emit = [&](ExcitationKind kind, const Eigen::VectorXd& e, const Eigen::VectorXd& se) {
      const Eigen::Index n = e.size();
      for (Eigen::Index b = 0; b < n; ++b) {
        const double sign = kind == ExcitationKind::valence ? -1.0 : 1.0;
        const double sigma = b < se.size() ? se[b] : 0.0;
        out.rows.push_back({k.kpoint.label, k.kpoint.path_distance, kind, static_cast<int>(b),
                            sign * (e[b] - k.ground_energy) * kHartreeToEv,
                            std::hypot(sigma, k.ground_stderr) * kHartreeToEv});
      }
    };
    if (k.valence_energies) emit(ExcitationKind::valence, *k.valence_energies, k.valence_stderr);
    if (k.conduction_energies) emit(ExcitationKind::conduction, *k.conduction_energies, k.conduction_stderr);
  }
  switch (policy) {
    case ShiftPolicy::none: break;
    case ShiftPolicy::explicit_value: out.shift_ev = explicit_shift_ev; break;
    case ShiftPolicy::gamma_valence_top: {
      const auto gamma = std::find_if(per_k.begin(), per_k.end(), [](const KPointSolution& k) { return k.kpoint.is_gamma(); });
      if (gamma == per_k.end()) throw std::invalid_argument("assemble_bands: Gamma point required by the shift policy");
      if (!gamma->valence_energies || gamma->valence_energies->size() == 0) {
        throw std::invalid_argument("assemble_bands: no valence energies at Gamma");
      }
      out.shift_ev = -(gamma->ground_energy - gamma->valence_energies->minCoeff()) * kHartreeToEv;
      break;
    }
  }
  for (auto& r : out.rows) r.energy_ev += out.shift_ev;
  return out;
}

void write_band_csv(std::ostream& os, const BandStructure& bands) {
  const auto old = os.precision(17);
  os << "k_label,path_distance,band_type,band_index,energy_ev,stderr_ev\n";
  for (const auto& r : bands.rows) {
    os << r.k_label << ',' << r.path_distance << ',' << to_string(r.band_type) << ',' << r.band_index << ','
       << r.energy_ev << ',' << r.stderr_ev << '\n';
  }
  os.precision(old);
}

}  // namespace qsband
