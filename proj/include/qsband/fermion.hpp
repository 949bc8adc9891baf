#pragma once

#include "qsband/pauli.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace qsband {

struct LadderOp {
  int mode;
  bool dagger;

  friend auto operator<=>(const LadderOp&, const LadderOp&) = default;
};

struct FermionTerm {
  cplx coeff;
  std::vector<LadderOp> ops;  ///< applied right to left, as written
};

/// Sum of products of creation/annihilation operators.
class FermionOperator {
 public:
  FermionOperator() = default;
  explicit FermionOperator(std::vector<FermionTerm> terms) : terms_(std::move(terms)) {}

  static FermionOperator identity(cplx coeff = 1.0);
  static FermionOperator creation(int mode);
  static FermionOperator annihilation(int mode);
  static FermionOperator number(int mode);
  static FermionOperator term(cplx coeff, std::vector<LadderOp> ops);

  const std::vector<FermionTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  /// Largest mode index used, -1 when only scalars.
  int max_mode() const;

  FermionOperator& operator+=(const FermionOperator& other);
  FermionOperator& operator*=(cplx s);
  friend FermionOperator operator+(FermionOperator a, const FermionOperator& b) { return a += b; }
  friend FermionOperator operator*(FermionOperator a, cplx s) { return a *= s; }
  friend FermionOperator operator*(cplx s, FermionOperator a) { return a *= s; }
  friend FermionOperator operator*(const FermionOperator& a, const FermionOperator& b);

  FermionOperator adjoint() const;

  /// Creators left of annihilators, each block by descending mode, like
  /// terms combined and zeros dropped. Idempotent.
  FermionOperator normal_ordered() const;

 private:
  std::vector<FermionTerm> terms_;
};

/// c_j -> Z_0 ... Z_{j-1} (X_j + iY_j)/2 on `n_modes` qubits.
PauliSum jordan_wigner(const FermionOperator& f, int n_modes);

/// Total number operator sum_j (I - Z_j)/2.
PauliSum jw_number_operator(int n_modes);

/// Commuting Z-type Pauli symmetries and the data needed to taper them.
///
/// Generators are kept in reduced echelon form: generator i has a Z on
/// single_qubit_x[i] (its highest qubit) and no other generator touches
/// that qubit.
struct SymmetrySet {
  std::vector<PauliString> generators;
  std::vector<int> single_qubit_x;
  std::vector<int> sector;  ///< +1/-1 per generator; empty until chosen

  std::size_t size() const { return generators.size(); }
  SymmetrySet with_sector(std::vector<int> s) const;
  std::string describe() const;
};

/// Echelon form and pivot qubits for independent Z-type generators.
SymmetrySet canonical_symmetries(std::vector<PauliString> z_strings);

/// Basis of all Z-type strings commuting with every term of `h`.
SymmetrySet find_z2_symmetries(const PauliSum& h);

/// Parity of the alpha block and of the beta block (blocked spin-orbital
/// order: all alpha modes, then all beta modes).
SymmetrySet spin_parity_symmetries(int n_spatial);

/// Eigenvalue of each generator on the Jordan-Wigner occupation state.
/// `occupation` holds one '0'/'1' per mode, mode 0 first.
std::vector<int> sector_from_occupation(const SymmetrySet& s, std::string_view occupation);

enum class TaperMode {
  /// Any term anticommuting with a generator is an error.
  strict,
  /// Terms anticommuting with a generator are dropped. They have zero
  /// expectation in every state of the sector, so expectation values are
  /// preserved. Used for non-Hermitian sector-changing products.
  project,
};

/// Rotates each generator onto X on its pivot qubit, substitutes the sector
/// eigenvalue and removes the pivot qubits.
PauliSum taper(const PauliSum& h, const SymmetrySet& s, TaperMode mode = TaperMode::strict);

/// Qubits that survive tapering, in increasing order.
std::vector<int> remaining_qubits(const SymmetrySet& s, int n_qubits);

/// Maps a state of the full register lying in the chosen sector to the
/// tapered register, consistently with taper(). Components outside the
/// sector are discarded, so the result is not renormalized.
Eigen::VectorXcd taper_state(const Eigen::VectorXcd& psi, const SymmetrySet& s);

}  // namespace qsband
