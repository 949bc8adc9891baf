#include "qsband/hamiltonian.hpp"

#include "qsband/errors.hpp"

#include <json.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace qsband {

using nlohmann::json;

namespace {

cplx parse_complex(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw SchemaError(where + ": complex numbers must be [re, im]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

json complex_json(cplx c) { return json::array({c.real(), c.imag()}); }

template <typename T>
T require(const json& j, const char* key) {
  if (!j.contains(key)) throw SchemaError(std::string("integrals: missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw SchemaError(std::string("integrals: field '") + key + "': " + e.what());
  }
}

}  // namespace

bool KPoint::is_gamma() const {
  static const char* kNames[] = {"Γ", "G", "Gamma", "GAMMA", "gamma"};
  if (std::any_of(std::begin(kNames), std::end(kNames), [this](const char* n) { return label == n; })) return true;
  return std::all_of(frac.begin(), frac.end(), [](double x) { return std::abs(x) < 1e-12; });
}

std::string IntegralSet::hf_occupation() const {
  std::string occ(static_cast<std::size_t>(n_modes()), '0');
  for (int i = 0; i < n_alpha(); ++i) occ[spin_orbital(i, Spin::alpha, n_orbitals)] = '1';
  for (int i = 0; i < n_beta(); ++i) occ[spin_orbital(i, Spin::beta, n_orbitals)] = '1';
  return occ;
}

void IntegralSet::validate(double tol) const {
  if (n_orbitals < 1) throw SchemaError("integrals: n_orbitals must be positive");
  if (n_electrons < 0 || n_electrons > 2 * n_orbitals) {
    throw SchemaError("integrals: electron count " + std::to_string(n_electrons) + " exceeds 2 * n_orbitals");
  }
  if (2 * n_orbitals > PauliString::kMaxQubits) throw SchemaError("integrals: too many orbitals");
  if (t.rows() != n_orbitals || t.cols() != n_orbitals) throw SchemaError("integrals: t must be n_orbitals x n_orbitals");
  for (const auto& k : kpoint.frac) {
    if (!(k >= -0.5 && k <= 0.5)) throw SchemaError("integrals: k-point coordinates must lie in [-0.5, 0.5]");
  }
  if (!std::isfinite(constant) || !t.allFinite()) throw SchemaError("integrals: non-finite value");

  const double dev_t = (t - t.adjoint()).cwiseAbs().maxCoeff();
  if (dev_t > tol) {
    std::ostringstream os;
    os << "integrals: one-body matrix is not Hermitian (max |t_pq - conj(t_qp)| = " << dev_t << ")";
    throw HermiticityError(os.str());
  }

  // v_pqrs and v_qpsr give the same operator; Hermiticity maps their sum
  // W(pqrs) onto conj W(srqp).
  std::map<std::array<int, 4>, cplx> w;
  for (const auto& e : v) {
    for (int idx : e.pqrs) {
      if (idx < 0 || idx >= n_orbitals) throw SchemaError("integrals: two-body index out of range");
    }
    if (!std::isfinite(e.value.real()) || !std::isfinite(e.value.imag())) throw SchemaError("integrals: non-finite value");
    const auto [p, q, r, s] = e.pqrs;
    w[{p, q, r, s}] += e.value;
    w[{q, p, s, r}] += e.value;
  }
  for (const auto& [idx, val] : w) {
    const auto [p, q, r, s] = idx;
    const auto it = w.find({s, r, q, p});
    const cplx partner = it == w.end() ? cplx{} : it->second;
    if (std::abs(val - std::conj(partner)) > tol) {
      std::ostringstream os;
      os << "integrals: two-body term (" << p << q << r << s << ") has no Hermitian partner";
      throw HermiticityError(os.str());
    }
  }
}

IntegralSet parse_integrals(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("integrals: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw SchemaError("integrals: document must be an object");
  if (require<int>(j, "version") != 1) throw SchemaError("integrals: unsupported version");

  IntegralSet ints;
  ints.n_orbitals = require<int>(j, "n_orbitals");
  ints.n_electrons = require<int>(j, "n_electrons");
  ints.constant = require<double>(j, "constant");

  const json kp = require<json>(j, "kpoint");
  ints.kpoint.label = require<std::string>(kp, "label");
  const auto frac = require<std::vector<double>>(kp, "frac");
  if (frac.size() != 3) throw SchemaError("integrals: kpoint.frac must have 3 entries");
  std::copy(frac.begin(), frac.end(), ints.kpoint.frac.begin());
  ints.kpoint.path_distance = require<double>(kp, "path_distance");

  const json t = require<json>(j, "t");
  if (!t.is_array() || static_cast<int>(t.size()) != ints.n_orbitals) throw SchemaError("integrals: t must have n_orbitals rows");
  if (ints.n_orbitals < 1) throw SchemaError("integrals: n_orbitals must be positive");
  ints.t.resize(ints.n_orbitals, ints.n_orbitals);
  for (int p = 0; p < ints.n_orbitals; ++p) {
    if (!t[p].is_array() || static_cast<int>(t[p].size()) != ints.n_orbitals) throw SchemaError("integrals: t rows must have n_orbitals entries");
    for (int q = 0; q < ints.n_orbitals; ++q) ints.t(p, q) = parse_complex(t[p][q], "t");
  }

  for (const auto& e : require<json>(j, "v")) {
    const auto idx = require<std::vector<int>>(e, "pqrs");
    if (idx.size() != 4) throw SchemaError("integrals: pqrs must have 4 indices");
    ints.v.push_back({{idx[0], idx[1], idx[2], idx[3]}, parse_complex(require<json>(e, "value"), "v")});
  }
  if (j.contains("metadata")) ints.metadata_json = j.at("metadata").dump();
  ints.validate();
  return ints;
}

IntegralSet load_integrals(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open integrals file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_integrals(ss.str());
}

std::string integrals_to_json(const IntegralSet& ints) {
  json j;
  j["version"] = 1;
  j["kpoint"] = {{"label", ints.kpoint.label},
                 {"frac", ints.kpoint.frac},
                 {"path_distance", ints.kpoint.path_distance}};
  j["n_orbitals"] = ints.n_orbitals;
  j["n_electrons"] = ints.n_electrons;
  j["constant"] = ints.constant;
  json t = json::array();
  for (int p = 0; p < ints.t.rows(); ++p) {
    json row = json::array();
    for (int q = 0; q < ints.t.cols(); ++q) row.push_back(complex_json(ints.t(p, q)));
    t.push_back(row);
  }
  j["t"] = t;
  j["v"] = json::array();
  for (const auto& e : ints.v) j["v"].push_back({{"pqrs", e.pqrs}, {"value", complex_json(e.value)}});
  j["metadata"] = json::parse(ints.metadata_json);
  return j.dump(2);
}

void save_integrals(const IntegralSet& ints, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write integrals file: " + path);
  out << integrals_to_json(ints) << '\n';
}

FermionOperator build_hamiltonian(const IntegralSet& ints) {
  const int n = ints.n_orbitals;
  FermionOperator h = FermionOperator::identity(ints.constant);
  for (const Spin s : {Spin::alpha, Spin::beta}) {
    for (int p = 0; p < n; ++p) {
      for (int q = 0; q < n; ++q) {
        if (ints.t(p, q) == cplx{}) continue;
        h += FermionOperator::term(ints.t(p, q), {{spin_orbital(p, s, n), true}, {spin_orbital(q, s, n), false}});
      }
    }
  }
  for (const auto& e : ints.v) {
    if (e.value == cplx{}) continue;
    const auto [p, q, r, s] = e.pqrs;
    for (const Spin a : {Spin::alpha, Spin::beta}) {
      for (const Spin b : {Spin::alpha, Spin::beta}) {
        const int P = spin_orbital(p, a, n), Q = spin_orbital(q, b, n);
        const int R = spin_orbital(r, b, n), S = spin_orbital(s, a, n);
        if (P == Q || R == S) continue;
        h += FermionOperator::term(e.value, {{P, true}, {Q, true}, {R, false}, {S, false}});
      }
    }
  }
  return h;
}

SpectrumResult exact_spectrum(const PauliSum& h, std::optional<int> filter_particles, const PauliSum* number,
                              bool with_vectors) {
  const int n = h.n_qubits();
  if (n < 1 || n > kMaxDenseQubits) {
    throw std::invalid_argument("exact_spectrum: " + std::to_string(n) + " qubits exceeds the dense limit of " +
                                std::to_string(kMaxDenseQubits));
  }
  const PauliSum default_number = jw_number_operator(n);
  const PauliSum& num = number ? *number : default_number;
  if (num.n_qubits() != n) throw std::invalid_argument("exact_spectrum: number operator size mismatch");

  const std::uint64_t dim = std::uint64_t{1} << n;
  std::vector<long> occupancy(dim);
  for (std::uint64_t b = 0; b < dim; ++b) {
    double v = 0;
    for (const auto& [p, c] : num.terms()) {
      if (!p.is_z_type()) throw std::invalid_argument("exact_spectrum: number operator must be diagonal");
      v += c.real() * (std::popcount(b & p.z()) % 2 ? -1.0 : 1.0);
    }
    occupancy[b] = std::lround(v);
    if (std::abs(v - double(occupancy[b])) > 1e-8) throw std::invalid_argument("exact_spectrum: non-integer number eigenvalue");
  }

  std::map<long, std::vector<std::uint64_t>> blocks;
  for (std::uint64_t b = 0; b < dim; ++b) {
    if (!filter_particles || occupancy[b] == *filter_particles) blocks[occupancy[b]].push_back(b);
  }
  if (blocks.empty()) throw std::invalid_argument("exact_spectrum: no basis states with the requested particle number");

  struct Eig {
    double value;
    long particles;
    Eigen::VectorXcd vec;
  };
  std::vector<Eig> all;
  double leak = 0;
  for (const auto& [count, basis] : blocks) {
    const auto m = static_cast<Eigen::Index>(basis.size());
    std::unordered_map<std::uint64_t, Eigen::Index> index;
    for (Eigen::Index i = 0; i < m; ++i) index.emplace(basis[i], i);
    Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(m, m);
    std::unordered_map<std::uint64_t, cplx> outside;
    for (Eigen::Index i = 0; i < m; ++i) {
      const std::uint64_t b = basis[i];
      for (const auto& [p, c] : h.terms()) {
        const std::uint64_t target = b ^ p.x();
        const cplx amp = c * basis_phase(p, b);
        if (const auto it = index.find(target); it != index.end()) {
          block(it->second, i) += amp;
        } else if (occupancy[target] != count) {
          outside[target * dim + b] += amp;
        }
      }
    }
    for (const auto& [key, amp] : outside) leak = std::max(leak, std::abs(amp));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(block, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw std::runtime_error("exact_spectrum: eigensolver failed");
    for (Eigen::Index k = 0; k < m; ++k) {
      Eig e{es.eigenvalues()[k], count, {}};
      if (with_vectors) {
        e.vec = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
        for (Eigen::Index i = 0; i < m; ++i) e.vec[static_cast<Eigen::Index>(basis[i])] = es.eigenvectors()(i, k);
      }
      all.push_back(std::move(e));
    }
  }
  if (leak > 1e-10) {
    throw std::invalid_argument("exact_spectrum: Hamiltonian does not conserve the number operator");
  }

  std::stable_sort(all.begin(), all.end(), [](const Eig& a, const Eig& b) { return a.value < b.value; });
  SpectrumResult out;
  const auto total = static_cast<Eigen::Index>(all.size());
  out.eigenvalues.resize(total);
  out.particle_numbers.resize(total);
  if (with_vectors) out.eigenvectors = Eigen::MatrixXcd(static_cast<Eigen::Index>(dim), total);
  for (Eigen::Index k = 0; k < total; ++k) {
    out.eigenvalues[k] = all[k].value;
    out.particle_numbers[k] = static_cast<double>(all[k].particles);
    if (with_vectors) out.eigenvectors->col(k) = all[k].vec;
  }
  return out;
}

}  // namespace qsband
