#pragma once

#include "qsband/fermion.hpp"
#include "qsband/pauli.hpp"

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace qsband {

inline constexpr double kHartreeToEv = 27.211386245988;
/// 1 kcal/mol expressed in eV, as used for the VQE accuracy bar.
inline constexpr double kChemicalAccuracyEv = 0.0434;

struct KPoint {
  std::string label;
  std::array<double, 3> frac{0, 0, 0};
  double path_distance = 0.0;

  bool is_gamma() const;
};

struct TwoBodyIntegral {
  std::array<int, 4> pqrs;
  cplx value;
};

/// Active-space integrals at one k-point.
///
/// `v` entries multiply c+_p c+_q c_r c_s exactly, with no implicit 1/2.
/// Spin expansion pairs p with s and q with r.
struct IntegralSet {
  int n_orbitals = 0;
  int n_electrons = 0;
  KPoint kpoint;
  double constant = 0.0;
  Eigen::MatrixXcd t;
  std::vector<TwoBodyIntegral> v;
  std::string metadata_json = "{}";

  int n_modes() const { return 2 * n_orbitals; }
  int n_alpha() const { return (n_electrons + 1) / 2; }
  int n_beta() const { return n_electrons / 2; }
  /// Lowest orbitals filled in each spin block; mode 0 first.
  std::string hf_occupation() const;

  /// Throws SchemaError or HermiticityError.
  void validate(double hermiticity_tol = 1e-10) const;
};

enum class Spin { alpha, beta };

/// Blocked ordering: alpha modes 0..n-1, beta modes n..2n-1.
inline int spin_orbital(int orbital, Spin s, int n_orbitals) {
  return s == Spin::alpha ? orbital : orbital + n_orbitals;
}

IntegralSet parse_integrals(const std::string& json_text);
IntegralSet load_integrals(const std::string& path);
std::string integrals_to_json(const IntegralSet& ints);
void save_integrals(const IntegralSet& ints, const std::string& path);

/// sum t_pq c+_p c_q + sum v_pqrs c+_p c+_q c_r c_s + constant over spin orbitals.
FermionOperator build_hamiltonian(const IntegralSet& ints);

struct SpectrumResult {
  Eigen::VectorXd eigenvalues;       ///< ascending, Hartree
  Eigen::VectorXd particle_numbers;  ///< per eigenvalue
  std::optional<Eigen::MatrixXcd> eigenvectors;
};

inline constexpr int kMaxDenseQubits = 14;

/// Dense diagonalization, block by block in particle number.
///
/// `number` must be diagonal (Z-type terms only); it defaults to the
/// Jordan-Wigner number operator on h's register. With
/// `filter_particles`, only that block is diagonalized.
SpectrumResult exact_spectrum(const PauliSum& h, std::optional<int> filter_particles = std::nullopt,
                              const PauliSum* number = nullptr, bool with_vectors = false);

}  // namespace qsband
