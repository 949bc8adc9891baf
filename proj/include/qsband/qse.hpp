#pragma once

#include "qsband/backend.hpp"
#include "qsband/fermion.hpp"
#include "qsband/hamiltonian.hpp"
#include "qsband/pauli.hpp"
#include "qsband/simulator.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qsband {

enum class ExcitationKind { valence, conduction };

std::string_view to_string(ExcitationKind k);

/// Single-particle QSE operators: annihilators on occupied spin orbitals
/// (valence) or creators on unoccupied ones (conduction).
struct ExcitationSet {
  ExcitationKind kind = ExcitationKind::valence;
  std::vector<FermionOperator> operators;
  std::vector<std::string> labels;  ///< e.g. "1b" for orbital 1, beta spin

  std::size_t size() const { return operators.size(); }
  bool empty() const { return operators.empty(); }
};

/// Uses the occupation from IntegralSet::hf_occupation().
ExcitationSet build_excitations(const IntegralSet& ints, ExcitationKind kind);
ExcitationSet build_excitations(std::string_view occupation, int n_orbitals, ExcitationKind kind);

/// Grouped tapered operators O_i^+ (H - shift) O_j and O_i^+ O_j,
/// row-major in (i, j).
struct SubspaceOperators {
  int dim = 0;
  int n_qubits = 0;
  double shift = 0.0;  ///< Hartree, removed from H before measuring
  /// Operator indices that change the symmetry sector the same way.
  /// Elements between different blocks vanish identically.
  std::vector<std::vector<int>> blocks;
  std::vector<std::vector<MeasurementGroup>> h_groups;
  std::vector<std::vector<MeasurementGroup>> s_groups;

  std::size_t group_count() const;
};

/// Sector-changing terms are dropped while tapering, since they have zero
/// expectation on any state of the sector. A `shift` near the mean energy
/// keeps the identity coefficient out of the sampled operators.
SubspaceOperators prepare_subspace(const ExcitationSet& exc, const FermionOperator& h, int n_modes,
                                   const SymmetrySet& symmetries, double truncate_eps = 1e-8, double shift = 0.0);

struct SubspaceProblem {
  Eigen::MatrixXcd h_sub;  ///< of H - shift
  Eigen::MatrixXcd s_sub;
  Eigen::MatrixXd h_stderr;
  Eigen::MatrixXd s_stderr;
  double shift = 0.0;
  std::vector<std::vector<int>> blocks;
  std::int64_t shots = 0;

  /// Subspace matrix of H itself.
  Eigen::MatrixXcd full_h() const { return h_sub + shift * s_sub; }
};

/// Element (i, j) measures with seeds derive_seed(seed, {i, j, 0}) for H
/// and derive_seed(seed, {i, j, 1}) for S. With `symmetrize`, both
/// matrices are replaced by (A + A^+)/2.
SubspaceProblem measure_subspace(const StatePrep& reference, const SubspaceOperators& ops, const Backend& backend,
                                 const MeasureOptions& opts, std::uint64_t seed, std::int64_t cycle,
                                 bool symmetrize = true, int jobs = 1);

class DegenerateSubspaceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename Scalar = double>
struct GevSolution {
  using ComplexMatrix = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> eigenvalues;  ///< ascending, Hartree
  ComplexMatrix vectors;  ///< H c = E S c, columns normalized so c^+ S c = 1
  int kept_dimension = 0;
  std::vector<Scalar> discarded;
};

/// Canonical orthogonalization: S-eigenvectors with eigenvalue below
/// `s_threshold` are discarded before the Hermitian solve. Both inputs are
/// read as Hermitian.
template <typename Scalar = double>
GevSolution<Scalar> solve_gev(const typename GevSolution<Scalar>::ComplexMatrix& h,
                              const typename GevSolution<Scalar>::ComplexMatrix& s, Scalar s_threshold = Scalar(1e-6)) {
  using M = typename GevSolution<Scalar>::ComplexMatrix;
  if (h.rows() != h.cols() || s.rows() != s.cols() || h.rows() != s.rows()) {
    throw std::invalid_argument("solve_gev: H and S must be square and of equal size");
  }
  GevSolution<Scalar> out;
  if (h.rows() == 0) throw DegenerateSubspaceError("solve_gev: empty subspace");
  const M s_herm = (s + s.adjoint()) / Scalar(2);
  const M h_herm = (h + h.adjoint()) / Scalar(2);
  Eigen::SelfAdjointEigenSolver<M> se(s_herm);
  std::vector<Eigen::Index> kept;
  for (Eigen::Index k = 0; k < se.eigenvalues().size(); ++k) {
    if (se.eigenvalues()[k] >= s_threshold) {
      kept.push_back(k);
    } else {
      out.discarded.push_back(se.eigenvalues()[k]);
    }
  }
  if (kept.empty()) throw DegenerateSubspaceError("solve_gev: every overlap eigenvalue is below the threshold");
  M x(h.rows(), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t c = 0; c < kept.size(); ++c) {
    x.col(static_cast<Eigen::Index>(c)) = se.eigenvectors().col(kept[c]) / std::sqrt(se.eigenvalues()[kept[c]]);
  }
  const M reduced = x.adjoint() * h_herm * x;
  Eigen::SelfAdjointEigenSolver<M> he((reduced + reduced.adjoint()) / Scalar(2));
  out.eigenvalues = he.eigenvalues();
  out.vectors = x * he.eigenvectors();
  out.kept_dimension = static_cast<int>(kept.size());
  return out;
}

/// First-order propagation of independent element errors to each
/// eigenvalue: var E = sum |c_i|^2 |c_j|^2 (dH_ij^2 + E^2 dS_ij^2).
Eigen::VectorXd gev_stderr(const GevSolution<double>& sol, const Eigen::MatrixXd& h_stderr,
                           const Eigen::MatrixXd& s_stderr);

struct SubspaceSolution {
  Eigen::VectorXd energies;  ///< Hartree, block by block, ascending within a block
  Eigen::VectorXd stderr;
  std::vector<int> block_of;
  int kept_dimension = 0;
};

/// Solves each symmetry block separately and adds the shift back.
SubspaceSolution solve_subspace(const SubspaceProblem& p, double s_threshold = 1e-6);

struct KPointSolution {
  KPoint kpoint;
  double ground_energy = 0.0;  ///< Hartree
  double ground_stderr = 0.0;
  std::optional<Eigen::VectorXd> valence_energies;     ///< E_{N-1}, Hartree, SubspaceSolution order
  Eigen::VectorXd valence_stderr;
  std::optional<Eigen::VectorXd> conduction_energies;  ///< E_{N+1}, Hartree, SubspaceSolution order
  Eigen::VectorXd conduction_stderr;
};

enum class ShiftPolicy {
  none,
  /// Highest valence energy at the Gamma point becomes 0 eV.
  gamma_valence_top,
  /// Add a fixed value in eV.
  explicit_value,
};

struct BandRow {
  std::string k_label;
  double path_distance;
  ExcitationKind band_type;
  int band_index;
  double energy_ev;
  double stderr_ev;
};

struct BandStructure {
  std::vector<BandRow> rows;
  double shift_ev = 0.0;  ///< already added to every energy

  /// Energies of one band type at one k label, in band_index order.
  std::vector<double> energies(const std::string& k_label, ExcitationKind kind) const;
};

/// Valence e = E_gs - E_{N-1}, conduction e = E_{N+1} - E_gs, both in eV;
/// band_index follows the order of the input energies.
BandStructure assemble_bands(const std::vector<KPointSolution>& per_k, ShiftPolicy policy, double explicit_shift_ev = 0.0);

void write_band_csv(std::ostream& os, const BandStructure& bands);

}  // namespace qsband
