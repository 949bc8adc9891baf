#include "qsband/fermion.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <sstream>
#include <stdexcept>

namespace qsband {

namespace {

// Canonical position: creators first, then by descending mode.
bool canonical_before(const LadderOp& a, const LadderOp& b) {
  if (a.dagger != b.dagger) return a.dagger;
  return a.mode > b.mode;
}

// Reduces `rows` in place to echelon form, pivoting from the highest bit.
// Returns the pivot bit of each kept row; dependent rows are dropped.
std::vector<int> echelon_high(std::vector<std::uint64_t>& rows, int n_bits) {
  std::vector<int> pivots;
  std::size_t r = 0;
  for (int col = n_bits - 1; col >= 0 && r < rows.size(); --col) {
    const std::uint64_t bit = std::uint64_t{1} << col;
    auto it = std::find_if(rows.begin() + static_cast<std::ptrdiff_t>(r), rows.end(),
                           [bit](std::uint64_t v) { return v & bit; });
    if (it == rows.end()) continue;
    std::iter_swap(rows.begin() + static_cast<std::ptrdiff_t>(r), it);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (k != r && (rows[k] & bit)) rows[k] ^= rows[r];
    }
    pivots.push_back(col);
    ++r;
  }
  rows.resize(r);
  return pivots;
}

}  // namespace

FermionOperator FermionOperator::identity(cplx coeff) { return FermionOperator({{coeff, {}}}); }
FermionOperator FermionOperator::creation(int mode) { return term(1.0, {{mode, true}}); }
FermionOperator FermionOperator::annihilation(int mode) { return term(1.0, {{mode, false}}); }
FermionOperator FermionOperator::number(int mode) { return term(1.0, {{mode, true}, {mode, false}}); }

FermionOperator FermionOperator::term(cplx coeff, std::vector<LadderOp> ops) {
  for (const auto& op : ops) {
    if (op.mode < 0) throw std::invalid_argument("FermionOperator: negative mode index");
  }
  return FermionOperator({{coeff, std::move(ops)}});
}

int FermionOperator::max_mode() const {
  int m = -1;
  for (const auto& t : terms_) {
    for (const auto& op : t.ops) m = std::max(m, op.mode);
  }
  return m;
}

FermionOperator& FermionOperator::operator+=(const FermionOperator& other) {
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  return *this;
}

FermionOperator& FermionOperator::operator*=(cplx s) {
  for (auto& t : terms_) t.coeff *= s;
  return *this;
}

FermionOperator operator*(const FermionOperator& a, const FermionOperator& b) {
  std::vector<FermionTerm> out;
  out.reserve(a.terms().size() * b.terms().size());
  for (const auto& ta : a.terms()) {
    for (const auto& tb : b.terms()) {
      FermionTerm t{ta.coeff * tb.coeff, ta.ops};
      t.ops.insert(t.ops.end(), tb.ops.begin(), tb.ops.end());
      out.push_back(std::move(t));
    }
  }
  return FermionOperator(std::move(out));
}

FermionOperator FermionOperator::adjoint() const {
  std::vector<FermionTerm> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) {
    FermionTerm a{std::conj(t.coeff), {t.ops.rbegin(), t.ops.rend()}};
    for (auto& op : a.ops) op.dagger = !op.dagger;
    out.push_back(std::move(a));
  }
  return FermionOperator(std::move(out));
}

FermionOperator FermionOperator::normal_ordered() const {
  std::map<std::vector<LadderOp>, cplx> acc;
  std::vector<FermionTerm> work(terms_.begin(), terms_.end());
  while (!work.empty()) {
    FermionTerm t = std::move(work.back());
    work.pop_back();
    bool zero = false, done = false;
    // Bubble sort with anticommutation; contractions spawn new work items.
    while (!done && !zero) {
      done = true;
      for (std::size_t i = 0; i + 1 < t.ops.size(); ++i) {
        const LadderOp a = t.ops[i], b = t.ops[i + 1];
        if (a == b) {
          zero = true;
          break;
        }
        if (!canonical_before(b, a)) continue;
        if (a.mode == b.mode) {
          // c_p c_p^dag = 1 - c_p^dag c_p
          FermionTerm contracted{t.coeff, {}};
          contracted.ops.insert(contracted.ops.end(), t.ops.begin(), t.ops.begin() + static_cast<std::ptrdiff_t>(i));
          contracted.ops.insert(contracted.ops.end(), t.ops.begin() + static_cast<std::ptrdiff_t>(i) + 2, t.ops.end());
          work.push_back(std::move(contracted));
        }
        std::swap(t.ops[i], t.ops[i + 1]);
        t.coeff = -t.coeff;
        done = false;
      }
    }
    if (!zero) acc[t.ops] += t.coeff;
  }
  std::vector<FermionTerm> out;
  for (auto& [ops, c] : acc) {
    if (c != cplx{}) out.push_back({c, ops});
  }
  return FermionOperator(std::move(out));
}

PauliSum jordan_wigner(const FermionOperator& f, int n_modes) {
  if (f.max_mode() >= n_modes) {
    throw std::out_of_range("jordan_wigner: mode index " + std::to_string(f.max_mode()) +
                            " exceeds register of " + std::to_string(n_modes));
  }
  const auto ladder = [n_modes](const LadderOp& op) {
    const std::uint64_t tail = (std::uint64_t{1} << op.mode) - 1;
    const std::uint64_t bit = std::uint64_t{1} << op.mode;
    PauliSum s(n_modes);
    s.add_term(PauliString(n_modes, bit, tail), 0.5);
    s.add_term(PauliString(n_modes, bit, tail | bit), op.dagger ? cplx(0, -0.5) : cplx(0, 0.5));
    return s;
  };
  PauliSum out(n_modes);
  for (const auto& t : f.terms()) {
    PauliSum prod = PauliSum::identity(n_modes, t.coeff);
    for (const auto& op : t.ops) prod = prod * ladder(op);
    out += prod;
  }
  return out;
}

PauliSum jw_number_operator(int n_modes) {
  PauliSum n(n_modes);
  for (int j = 0; j < n_modes; ++j) {
    n.add_term(PauliString(n_modes), 0.5);
    n.add_term(PauliString::single(n_modes, j, 'Z'), -0.5);
  }
  return n;
}

SymmetrySet SymmetrySet::with_sector(std::vector<int> s) const {
  if (s.size() != generators.size()) throw std::invalid_argument("SymmetrySet: sector size mismatch");
  for (int v : s) {
    if (v != 1 && v != -1) throw std::invalid_argument("SymmetrySet: sector entries must be +1 or -1");
  }
  SymmetrySet out = *this;
  out.sector = std::move(s);
  return out;
}

std::string SymmetrySet::describe() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < generators.size(); ++i) {
    os << generators[i].letters() << " -> X" << single_qubit_x[i];
    if (i < sector.size()) os << " sector " << (sector[i] > 0 ? "+1" : "-1");
    os << '\n';
  }
  return os.str();
}

SymmetrySet canonical_symmetries(std::vector<PauliString> z_strings) {
  if (z_strings.empty()) return {};
  const int n = z_strings.front().n_qubits();
  std::vector<std::uint64_t> rows;
  for (const auto& g : z_strings) {
    if (!g.is_z_type() || g.n_qubits() != n) throw std::invalid_argument("canonical_symmetries: expected Z-type strings of equal size");
    rows.push_back(g.z());
  }
  const auto pivots = echelon_high(rows, n);
  if (pivots.size() != z_strings.size()) throw std::invalid_argument("canonical_symmetries: generators are not independent");
  SymmetrySet s;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    s.generators.emplace_back(n, 0, rows[i]);
    s.single_qubit_x.push_back(pivots[i]);
  }
  return s;
}

SymmetrySet find_z2_symmetries(const PauliSum& h) {
  const int n = h.n_qubits();
  // A Z-string z commutes with a term iff |z & x_term| is even, so the
  // symmetries are the GF(2) null space of the terms' X masks.
  std::vector<std::uint64_t> rows;
  for (const auto& [p, c] : h.terms()) {
    if (p.x()) rows.push_back(p.x());
  }
  const auto pivots = echelon_high(rows, n);
  std::uint64_t pivot_mask = 0;
  for (int p : pivots) pivot_mask |= std::uint64_t{1} << p;

  std::vector<PauliString> kernel;
  for (int f = 0; f < n; ++f) {
    if ((pivot_mask >> f) & 1) continue;
    std::uint64_t z = std::uint64_t{1} << f;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if ((rows[r] >> f) & 1) z |= std::uint64_t{1} << pivots[r];
    }
    kernel.emplace_back(n, 0, z);
  }
  return canonical_symmetries(std::move(kernel));
}

SymmetrySet spin_parity_symmetries(int n_spatial) {
  if (n_spatial < 1) throw std::invalid_argument("spin_parity_symmetries: need at least one orbital");
  const int n = 2 * n_spatial;
  const std::uint64_t alpha = (std::uint64_t{1} << n_spatial) - 1;
  return canonical_symmetries({PauliString(n, 0, alpha), PauliString(n, 0, alpha << n_spatial)});
}

std::vector<int> sector_from_occupation(const SymmetrySet& s, std::string_view occupation) {
  std::uint64_t occ = 0;
  for (std::size_t j = 0; j < occupation.size(); ++j) {
    if (occupation[j] == '1') {
      occ |= std::uint64_t{1} << j;
    } else if (occupation[j] != '0') {
      throw std::invalid_argument("sector_from_occupation: occupation must be a 0/1 string");
    }
  }
  std::vector<int> sector;
  for (const auto& g : s.generators) {
    if (static_cast<std::size_t>(g.n_qubits()) != occupation.size()) {
      throw std::invalid_argument("sector_from_occupation: occupation length does not match register");
    }
    sector.push_back(std::popcount(occ & g.z()) % 2 ? -1 : 1);
  }
  return sector;
}

std::vector<int> remaining_qubits(const SymmetrySet& s, int n_qubits) {
  std::vector<int> keep;
  for (int q = 0; q < n_qubits; ++q) {
    if (std::find(s.single_qubit_x.begin(), s.single_qubit_x.end(), q) == s.single_qubit_x.end()) keep.push_back(q);
  }
  return keep;
}

Eigen::VectorXcd taper_state(const Eigen::VectorXcd& psi, const SymmetrySet& s) {
  if (s.sector.size() != s.generators.size()) throw std::invalid_argument("taper_state: sector not chosen");
  const auto dim = static_cast<std::uint64_t>(psi.size());
  if (!std::has_single_bit(dim)) throw std::invalid_argument("taper_state: size is not a power of two");
  const int n = std::countr_zero(dim);
  Eigen::VectorXcd cur = psi;
  for (std::size_t i = 0; i < s.generators.size(); ++i) {
    if (s.generators[i].n_qubits() != n) throw std::invalid_argument("taper_state: generator size mismatch");
    const std::uint64_t flip = std::uint64_t{1} << s.single_qubit_x[i];
    const std::uint64_t z = s.generators[i].z();
    Eigen::VectorXcd next(cur.size());
    for (std::uint64_t b = 0; b < dim; ++b) {
      const double sign = std::popcount(b & z) % 2 ? -1.0 : 1.0;
      next[static_cast<Eigen::Index>(b)] = (cur[static_cast<Eigen::Index>(b ^ flip)] + sign * cur[static_cast<Eigen::Index>(b)]) / std::sqrt(2.0);
    }
    cur = std::move(next);
  }
  const auto keep = remaining_qubits(s, n);
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(Eigen::Index{1} << keep.size());
  for (std::uint64_t b = 0; b < dim; ++b) {
    cplx amp = cur[static_cast<Eigen::Index>(b)];
    std::uint64_t reduced = 0;
    for (std::size_t k = 0; k < keep.size(); ++k) reduced |= ((b >> keep[k]) & 1) << k;
    for (std::size_t i = 0; i < s.generators.size(); ++i) {
      if ((b >> s.single_qubit_x[i]) & 1) amp *= double(s.sector[i]);
    }
    out[static_cast<Eigen::Index>(reduced)] += amp / std::sqrt(double(std::uint64_t{1} << s.generators.size()));
  }
  return out;
}

PauliSum taper(const PauliSum& h, const SymmetrySet& s, TaperMode mode) {
  if (s.sector.size() != s.generators.size() || s.single_qubit_x.size() != s.generators.size()) {
    throw std::invalid_argument("taper: symmetry set needs one pivot and one sector value per generator");
  }
  const int n = h.n_qubits();
  if (s.generators.empty()) return h;
  if (static_cast<int>(s.generators.size()) >= n) throw std::invalid_argument("taper: would remove every qubit");

  std::uint64_t removed = 0;
  std::vector<PauliString> pivot_x;
  for (std::size_t i = 0; i < s.generators.size(); ++i) {
    if (s.generators[i].n_qubits() != n) throw std::invalid_argument("taper: generator size mismatch");
    removed |= std::uint64_t{1} << s.single_qubit_x[i];
    pivot_x.push_back(PauliString::single(n, s.single_qubit_x[i], 'X'));
  }

  PauliSum out(n - static_cast<int>(s.generators.size()));
  for (const auto& [p0, c0] : h.terms()) {
    bool keep = true;
    for (const auto& g : s.generators) {
      if (p0.commutes_with(g)) continue;
      if (mode == TaperMode::strict) {
        throw std::invalid_argument("taper: term " + p0.letters() + " does not commute with generator " + g.letters());
      }
      keep = false;
      break;
    }
    if (!keep) continue;

    PauliString p = p0;
    cplx c = c0;
    for (std::size_t i = 0; i < s.generators.size(); ++i) {
      // U = (X_q + g)/sqrt(2): terms anticommuting with X_q map to P g X_q.
      if (!p.commutes_with(pivot_x[i])) {
        const auto [ph1, pg] = multiply(p, s.generators[i]);
        const auto [ph2, pgx] = multiply(pg, pivot_x[i]);
        p = pgx;
        c *= ph1 * ph2;
      }
      if ((p.x() >> s.single_qubit_x[i]) & 1) c *= s.sector[i];
    }
    out.add_term(p.remove_qubits(removed), c);
  }
  return out;
}

}  // namespace qsband
