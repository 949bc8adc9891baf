#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qsband {

using cplx = std::complex<double>;

/// Tensor product of single-qubit Paulis in symplectic (x, z) form.
///
/// Qubit q is bit q of both masks; Y is stored as x = z = 1. The letter
/// string form puts qubit 0 leftmost, so "XZI" is X on qubit 0 and Z on
/// qubit 1.
class PauliString {
 public:
  static constexpr int kMaxQubits = 64;

  PauliString() = default;
  explicit PauliString(int n_qubits);
  PauliString(int n_qubits, std::uint64_t x, std::uint64_t z);

  /// Parses letters in {I, X, Y, Z}; throws std::invalid_argument otherwise.
  static PauliString from_letters(std::string_view letters);
  /// Single-letter string `letter` on qubit `q`, identity elsewhere.
  static PauliString single(int n_qubits, int q, char letter);

  int n_qubits() const { return n_qubits_; }
  std::uint64_t x() const { return x_; }
  std::uint64_t z() const { return z_; }

  char letter(int q) const;
  std::string letters() const;

  bool is_identity() const { return x_ == 0 && z_ == 0; }
  bool is_z_type() const { return x_ == 0; }
  /// Qubits on which the string acts non-trivially.
  std::uint64_t support() const { return x_ | z_; }
  int weight() const;

  bool commutes_with(const PauliString& other) const;
  /// Every qubit carries either I or a common letter.
  bool qubitwise_commutes_with(const PauliString& other) const;

  /// Drops qubits whose bit is set in `mask`; remaining qubits keep order.
  PauliString remove_qubits(std::uint64_t mask) const;

  /// Lexicographic on letters from qubit 0, with I < X < Y < Z.
  friend bool operator<(const PauliString& a, const PauliString& b);
  friend bool operator==(const PauliString& a, const PauliString& b) = default;

 private:
  int n_qubits_ = 0;
  std::uint64_t x_ = 0;
  std::uint64_t z_ = 0;
};

/// Returns (phase, product) such that a * b == phase * product.
std::pair<cplx, PauliString> multiply(const PauliString& a, const PauliString& b);

/// Action on a computational basis state: P|b> = phase * |b ^ x>.
inline cplx basis_phase(const PauliString& p, std::uint64_t b) {
  static constexpr cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const int n_y = __builtin_popcountll(p.x() & p.z());
  const int n_minus = __builtin_popcountll(b & p.z());
  return kIPow[(n_y + 2 * n_minus) & 3];
}

/// Linear combination of Pauli strings on a fixed register.
///
/// Terms are kept canonical: one entry per string, and exact zeros are
/// dropped as soon as they appear.
class PauliSum {
 public:
  using TermMap = std::map<PauliString, cplx>;

  PauliSum() = default;
  explicit PauliSum(int n_qubits) : n_qubits_(n_qubits) {}
  PauliSum(const PauliString& p, cplx coeff);

  static PauliSum identity(int n_qubits, cplx coeff = 1.0);

  int n_qubits() const { return n_qubits_; }
  const TermMap& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  /// Coefficient of `p`, zero when absent.
  cplx coefficient(const PauliString& p) const;
  /// Coefficient of the all-I string.
  cplx constant() const;

  void add_term(const PauliString& p, cplx coeff);

  PauliSum& operator+=(const PauliSum& other);
  PauliSum& operator-=(const PauliSum& other);
  PauliSum& operator*=(cplx s);

  friend PauliSum operator+(PauliSum a, const PauliSum& b) { return a += b; }
  friend PauliSum operator-(PauliSum a, const PauliSum& b) { return a -= b; }
  friend PauliSum operator*(PauliSum a, cplx s) { return a *= s; }
  friend PauliSum operator*(cplx s, PauliSum a) { return a *= s; }
  friend PauliSum operator*(const PauliSum& a, const PauliSum& b);

  PauliSum adjoint() const;
  /// Largest imaginary part of any coefficient is at most `tol`.
  bool is_hermitian(double tol = 1e-12) const;
  double max_abs_coefficient() const;

  /// One term per line: `<re> <im> <letters>`.
  std::string to_text() const;
  static PauliSum from_text(std::string_view text);

 private:
  int n_qubits_ = 0;
  TermMap terms_;
};

std::ostream& operator<<(std::ostream& os, const PauliString& p);
std::ostream& operator<<(std::ostream& os, const PauliSum& h);

/// Terms with |coefficient| >= eps; retained coefficients are untouched.
PauliSum truncate(const PauliSum& h, double eps);

/// Terms sharing one measurement basis.
struct MeasurementGroup {
  std::vector<std::pair<PauliString, cplx>> members;
  /// Letter per qubit; 'I' where no member acts.
  PauliString basis;

  int n_qubits() const { return basis.n_qubits(); }
};

/// Greedy first-fit grouping over the sum's term order.
std::vector<MeasurementGroup> group_qubitwise(const PauliSum& h);

/// Dense 2^n x 2^n matrix; qubit q is bit q of the row/column index.
template <typename Scalar = double>
Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic> to_dense(
    const PauliSum& h) {
  using C = std::complex<Scalar>;
  const Eigen::Index dim = Eigen::Index{1} << h.n_qubits();
  Eigen::Matrix<C, Eigen::Dynamic, Eigen::Dynamic> m =
      Eigen::Matrix<C, Eigen::Dynamic, Eigen::Dynamic>::Zero(dim, dim);
  for (const auto& [p, c] : h.terms()) {
    for (Eigen::Index b = 0; b < dim; ++b) {
      const auto col = static_cast<std::uint64_t>(b);
      const cplx v = c * basis_phase(p, col);
      m(static_cast<Eigen::Index>(col ^ p.x()), b) += C(v.real(), v.imag());
    }
  }
  return m;
}

}  // namespace qsband
