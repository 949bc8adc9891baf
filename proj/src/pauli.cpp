#include "qsband/pauli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace qsband {

namespace {

constexpr cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

std::uint64_t low_mask(int n) {
  return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
}

void check_size(int n) {
  if (n < 1 || n > PauliString::kMaxQubits) {
    throw std::invalid_argument("PauliString: qubit count must be in [1, 64], got " +
                                std::to_string(n));
  }
}

// Rank of a letter in the I < X < Y < Z order.
int letter_rank(bool x, bool z) {
  if (!x && !z) return 0;
  if (x && !z) return 1;
  if (x && z) return 2;
  return 3;
}

}  // namespace

PauliString::PauliString(int n_qubits) : n_qubits_(n_qubits) { check_size(n_qubits); }

PauliString::PauliString(int n_qubits, std::uint64_t x, std::uint64_t z)
    : n_qubits_(n_qubits), x_(x), z_(z) {
  check_size(n_qubits);
  if ((x | z) & ~low_mask(n_qubits)) {
    throw std::invalid_argument("PauliString: mask has bits beyond qubit count");
  }
}

PauliString PauliString::from_letters(std::string_view letters) {
  const int n = static_cast<int>(letters.size());
  check_size(n);
  std::uint64_t x = 0, z = 0;
  for (int q = 0; q < n; ++q) {
    const std::uint64_t bit = std::uint64_t{1} << q;
    switch (letters[q]) {
      case 'I': break;
      case 'X': x |= bit; break;
      case 'Y': x |= bit; z |= bit; break;
      case 'Z': z |= bit; break;
      default:
        throw std::invalid_argument("PauliString: invalid letter '" +
                                    std::string(1, letters[q]) + "'");
    }
  }
  return PauliString(n, x, z);
}

PauliString PauliString::single(int n_qubits, int q, char letter) {
  std::string s(n_qubits, 'I');
  if (q < 0 || q >= n_qubits) throw std::out_of_range("PauliString::single: qubit index");
  s[q] = letter;
  return from_letters(s);
}

char PauliString::letter(int q) const {
  const bool xb = (x_ >> q) & 1, zb = (z_ >> q) & 1;
  static constexpr char kLetters[4] = {'I', 'X', 'Y', 'Z'};
  return kLetters[letter_rank(xb, zb)];
}

std::string PauliString::letters() const {
  std::string s(n_qubits_, 'I');
  for (int q = 0; q < n_qubits_; ++q) s[q] = letter(q);
  return s;
}

int PauliString::weight() const { return __builtin_popcountll(support()); }

bool PauliString::commutes_with(const PauliString& other) const {
  const int overlap =
      __builtin_popcountll(x_ & other.z_) + __builtin_popcountll(z_ & other.x_);
  return (overlap & 1) == 0;
}

bool PauliString::qubitwise_commutes_with(const PauliString& other) const {
  const std::uint64_t both = support() & other.support();
  return ((x_ ^ other.x_) & both) == 0 && ((z_ ^ other.z_) & both) == 0;
}

PauliString PauliString::remove_qubits(std::uint64_t mask) const {
  std::uint64_t x = 0, z = 0;
  int out = 0;
  for (int q = 0; q < n_qubits_; ++q) {
    if ((mask >> q) & 1) continue;
    x |= ((x_ >> q) & 1) << out;
    z |= ((z_ >> q) & 1) << out;
    ++out;
  }
  return PauliString(out, x, z);
}

bool operator<(const PauliString& a, const PauliString& b) {
  if (a.n_qubits_ != b.n_qubits_) return a.n_qubits_ < b.n_qubits_;
  for (int q = 0; q < a.n_qubits_; ++q) {
    const int ra = letter_rank((a.x_ >> q) & 1, (a.z_ >> q) & 1);
    const int rb = letter_rank((b.x_ >> q) & 1, (b.z_ >> q) & 1);
    if (ra != rb) return ra < rb;
  }
  return false;
}

std::pair<cplx, PauliString> multiply(const PauliString& a, const PauliString& b) {
  if (a.n_qubits() != b.n_qubits()) {
    throw std::invalid_argument("multiply: qubit count mismatch");
  }
  // Each string is i^{|x&z|} X^x Z^z; moving Z^{z_a} past X^{x_b} costs (-1)^{|z_a&x_b|}.
  const std::uint64_t x = a.x() ^ b.x(), z = a.z() ^ b.z();
  const int e = __builtin_popcountll(a.x() & a.z()) + __builtin_popcountll(b.x() & b.z()) -
                __builtin_popcountll(x & z) + 2 * __builtin_popcountll(a.z() & b.x());
  return {kIPow[((e % 4) + 4) % 4], PauliString(a.n_qubits(), x, z)};
}

PauliSum::PauliSum(const PauliString& p, cplx coeff) : n_qubits_(p.n_qubits()) {
  add_term(p, coeff);
}

PauliSum PauliSum::identity(int n_qubits, cplx coeff) {
  return PauliSum(PauliString(n_qubits), coeff);
}

cplx PauliSum::coefficient(const PauliString& p) const {
  const auto it = terms_.find(p);
  return it == terms_.end() ? cplx{} : it->second;
}

cplx PauliSum::constant() const { return n_qubits_ ? coefficient(PauliString(n_qubits_)) : cplx{}; }

void PauliSum::add_term(const PauliString& p, cplx coeff) {
  if (n_qubits_ == 0) n_qubits_ = p.n_qubits();
  if (p.n_qubits() != n_qubits_) throw std::invalid_argument("PauliSum: qubit count mismatch");
  if (coeff == cplx{}) return;
  auto [it, inserted] = terms_.try_emplace(p, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == cplx{}) terms_.erase(it);
  }
}

PauliSum& PauliSum::operator+=(const PauliSum& other) {
  for (const auto& [p, c] : other.terms_) add_term(p, c);
  if (n_qubits_ == 0) n_qubits_ = other.n_qubits_;
  return *this;
}

PauliSum& PauliSum::operator-=(const PauliSum& other) {
  for (const auto& [p, c] : other.terms_) add_term(p, -c);
  if (n_qubits_ == 0) n_qubits_ = other.n_qubits_;
  return *this;
}

PauliSum& PauliSum::operator*=(cplx s) {
  if (s == cplx{}) {
    terms_.clear();
    return *this;
  }
  for (auto& [p, c] : terms_) c *= s;
  return *this;
}

PauliSum operator*(const PauliSum& a, const PauliSum& b) {
  if (a.n_qubits() != b.n_qubits()) throw std::invalid_argument("PauliSum product: qubit count mismatch");
  PauliSum out(a.n_qubits());
  for (const auto& [pa, ca] : a.terms()) {
    for (const auto& [pb, cb] : b.terms()) {
      const auto [phase, p] = multiply(pa, pb);
      out.add_term(p, phase * ca * cb);
    }
  }
  return out;
}

PauliSum PauliSum::adjoint() const {
  PauliSum out(n_qubits_);
  for (const auto& [p, c] : terms_) out.add_term(p, std::conj(c));
  return out;
}

bool PauliSum::is_hermitian(double tol) const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [tol](const auto& t) { return std::abs(t.second.imag()) <= tol; });
}

double PauliSum::max_abs_coefficient() const {
  double m = 0;
  for (const auto& [p, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

std::string PauliSum::to_text() const {
  std::string out;
  char buf[96];
  for (const auto& [p, c] : terms_) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g ", c.real(), c.imag());
    out += buf;
    out += p.letters();
    out += '\n';
  }
  return out;
}

PauliSum PauliSum::from_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  PauliSum out;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    std::istringstream ls(line);
    double re = 0, im = 0;
    std::string letters;
    if (!(ls >> re >> im >> letters)) {
      throw std::invalid_argument("PauliSum::from_text: malformed line " + std::to_string(lineno));
    }
    out.add_term(PauliString::from_letters(letters), {re, im});
  }
  return out;
}

std::ostream& operator<<(std::ostream& os, const PauliString& p) { return os << p.letters(); }

std::ostream& operator<<(std::ostream& os, const PauliSum& h) { return os << h.to_text(); }

PauliSum truncate(const PauliSum& h, double eps) {
  if (eps < 0) throw std::invalid_argument("truncate: eps must be non-negative");
  PauliSum out(h.n_qubits());
  for (const auto& [p, c] : h.terms()) {
    if (std::abs(c) >= eps) out.add_term(p, c);
  }
  return out;
}

std::vector<MeasurementGroup> group_qubitwise(const PauliSum& h) {
  std::vector<MeasurementGroup> groups;
  for (const auto& [p, c] : h.terms()) {
    auto fit = std::find_if(groups.begin(), groups.end(), [&p](const MeasurementGroup& g) {
      return g.basis.qubitwise_commutes_with(p);
    });
    if (fit == groups.end()) {
      groups.push_back({{}, PauliString(h.n_qubits())});
      fit = std::prev(groups.end());
    }
    fit->members.emplace_back(p, c);
    fit->basis = PauliString(h.n_qubits(), fit->basis.x() | p.x(), fit->basis.z() | p.z());
  }
  return groups;
}

}  // namespace qsband
