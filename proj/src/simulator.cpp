#include "qsband/simulator.hpp"

#include "qsband/errors.hpp"
#include "qsband/random.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace qsband {

namespace {

using Matrix2c = Eigen::Matrix2cd;

Matrix2c single_qubit_matrix(const Gate& g) {
  using namespace std::complex_literals;
  const double c = std::cos(g.theta / 2), s = std::sin(g.theta / 2);
  const double r = std::numbers::sqrt2 / 2;
  Matrix2c m;
  switch (g.kind) {
    case GateKind::X: m << 0, 1, 1, 0; break;
    case GateKind::H: m << r, r, r, -r; break;
    case GateKind::S: m << 1, 0, 0, 1i; break;
    case GateKind::Sdg: m << 1, 0, 0, -1i; break;
    case GateKind::Ry: m << c, -s, s, c; break;
    case GateKind::Rz: m << std::exp(-0.5i * g.theta), 0, 0, std::exp(0.5i * g.theta); break;
    default: throw std::logic_error("single_qubit_matrix: two-qubit gate");
  }
  return m;
}

void apply_1q(Statevector& psi, int q, const Matrix2c& u) {
  const Eigen::Index bit = Eigen::Index{1} << q;
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    if (i & bit) continue;
    const cplx a = psi[i], b = psi[i | bit];
    psi[i] = u(0, 0) * a + u(0, 1) * b;
    psi[i | bit] = u(1, 0) * a + u(1, 1) * b;
  }
}

// Draws a multinomial sample into `out` by sequential binomials.
void add_multinomial(Rng& rng, std::int64_t n, const Eigen::VectorXd& p,
                     std::vector<std::int64_t>& out) {
  double remaining = p.sum();
  for (Eigen::Index k = 0; k < p.size() && n > 0; ++k) {
    if (k + 1 == p.size() || remaining <= 0) {
      out[k] += n;
      return;
    }
    const double q = std::clamp(p[k] / remaining, 0.0, 1.0);
    std::binomial_distribution<std::int64_t> draw(n, q);
    const std::int64_t got = draw(rng);
    out[k] += got;
    n -= got;
    remaining -= p[k];
  }
}

struct Fault {
  int gate;
  int pauli;  // 1..3 for one-qubit gates, 1..15 for two-qubit gates (low letter on first target)

  friend auto operator<=>(const Fault&, const Fault&) = default;
};

PauliString fault_pauli(int n_qubits, const Gate& g, int code) {
  static constexpr char kLetters[4] = {'I', 'X', 'Y', 'Z'};
  std::string s(n_qubits, 'I');
  s[g.targets[0]] = kLetters[code & 3];
  if (g.arity() == 2) s[g.targets[1]] = kLetters[code >> 2];
  return PauliString::from_letters(s);
}

Eigen::VectorXd probabilities_of(const Statevector& psi) { return psi.cwiseAbs2(); }

// Ideal (pre-readout) outcome counts under stochastic Pauli faults.
std::vector<std::int64_t> sample_ideal_counts(const StatePrep& prep, std::int64_t shots,
                                              const NoiseModel& noise, Rng& rng) {
  const Circuit& c = prep.circuit;
  const std::size_t dim = std::size_t{1} << c.n_qubits;
  std::vector<std::int64_t> counts(dim, 0);
  const Statevector start = prep.initial ? *prep.initial : basis_state(c.n_qubits, 0);

  const auto n_gates = static_cast<std::int64_t>(c.gates.size());
  const double p_max = std::max(noise.depolarizing_1q, noise.depolarizing_2q);
  if (n_gates == 0 || p_max <= 0) {
    add_multinomial(rng, shots, probabilities_of(apply_circuit(start, c)), counts);
    return counts;
  }

  // Walk the (shot, gate) slots with geometric skips at rate p_max and
  // thin each candidate down to the gate's own rate.
  std::map<std::int64_t, std::vector<Fault>> by_shot;
  std::geometric_distribution<std::int64_t> skip(p_max);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::int64_t total = shots * n_gates;
  for (std::int64_t pos = skip(rng); pos < total; pos += 1 + skip(rng)) {
    const int gi = static_cast<int>(pos % n_gates);
    const Gate& g = c.gates[gi];
    const double p = g.arity() == 2 ? noise.depolarizing_2q : noise.depolarizing_1q;
    if (p < p_max && unit(rng) * p_max >= p) continue;
    const int n_choices = g.arity() == 2 ? 15 : 3;
    std::uniform_int_distribution<int> pick(1, n_choices);
    by_shot[pos / n_gates].push_back({gi, pick(rng)});
  }

  std::map<std::vector<Fault>, std::int64_t> patterns;
  for (auto& [shot, faults] : by_shot) ++patterns[faults];
  const std::int64_t clean = shots - static_cast<std::int64_t>(by_shot.size());

  add_multinomial(rng, clean, probabilities_of(apply_circuit(start, c)), counts);
  for (const auto& [faults, n] : patterns) {
    Statevector psi = start;
    auto next = faults.begin();
    for (int gi = 0; gi < n_gates; ++gi) {
      apply_gate(psi, c.gates[gi]);
      for (; next != faults.end() && next->gate == gi; ++next) {
        apply_pauli(psi, fault_pauli(c.n_qubits, c.gates[gi], next->pauli));
      }
    }
    add_multinomial(rng, n, probabilities_of(psi), counts);
  }
  return counts;
}

std::vector<std::int64_t> apply_readout(const std::vector<std::int64_t>& ideal, int n_qubits,
                                        const NoiseModel& noise, std::int64_t cycle, Rng& rng) {
  if (!noise.has_readout_noise()) return ideal;
  const std::size_t dim = ideal.size();
  std::vector<Eigen::Matrix2d> conf(n_qubits);
  for (int q = 0; q < n_qubits; ++q) conf[q] = noise.confusion(q, cycle);

  std::vector<std::int64_t> out(dim, 0);
  Eigen::VectorXd column(static_cast<Eigen::Index>(dim));
  for (std::size_t b = 0; b < dim; ++b) {
    if (ideal[b] == 0) continue;
    for (std::size_t r = 0; r < dim; ++r) {
      double p = 1.0;
      for (int q = 0; q < n_qubits; ++q) p *= conf[q]((r >> q) & 1, (b >> q) & 1);
      column[static_cast<Eigen::Index>(r)] = p;
    }
    add_multinomial(rng, ideal[b], column, out);
  }
  return out;
}

}  // namespace

Gate Gate::inverse() const {
  Gate g = *this;
  switch (kind) {
    case GateKind::S: g.kind = GateKind::Sdg; break;
    case GateKind::Sdg: g.kind = GateKind::S; break;
    case GateKind::Ry:
    case GateKind::Rz: g.theta = -theta; break;
    default: break;
  }
  return g;
}

Circuit& Circuit::add(const Gate& g) {
  const auto bad = [this](int q) { return q < 0 || q >= n_qubits; };
  if (bad(g.targets[0]) || (g.arity() == 2 && (bad(g.targets[1]) || g.targets[0] == g.targets[1]))) {
    throw std::invalid_argument("Circuit: gate target out of range or repeated");
  }
  if (!std::isfinite(g.theta)) throw std::invalid_argument("Circuit: non-finite rotation angle");
  gates.push_back(g);
  return *this;
}

Circuit& Circuit::append(const Circuit& other) {
  if (other.n_qubits != n_qubits) throw std::invalid_argument("Circuit::append: qubit count mismatch");
  for (const auto& g : other.gates) add(g);
  return *this;
}

void Circuit::validate() const {
  Circuit check(n_qubits);
  for (const auto& g : gates) check.add(g);
}

Statevector basis_state(int n_qubits, std::uint64_t index) {
  Statevector psi = Statevector::Zero(Eigen::Index{1} << n_qubits);
  psi[static_cast<Eigen::Index>(index)] = 1.0;
  return psi;
}

int qubit_count(const Statevector& psi) {
  const auto n = psi.size();
  if (n < 2 || (n & (n - 1)) != 0) throw std::invalid_argument("Statevector: size is not a power of two");
  return __builtin_ctzll(static_cast<unsigned long long>(n));
}

void apply_gate(Statevector& psi, const Gate& g) {
  switch (g.kind) {
    case GateKind::CZ: {
      const Eigen::Index mask = (Eigen::Index{1} << g.targets[0]) | (Eigen::Index{1} << g.targets[1]);
      for (Eigen::Index i = 0; i < psi.size(); ++i) {
        if ((i & mask) == mask) psi[i] = -psi[i];
      }
      break;
    }
    case GateKind::CNOT: {
      const Eigen::Index cbit = Eigen::Index{1} << g.targets[0];
      const Eigen::Index tbit = Eigen::Index{1} << g.targets[1];
      for (Eigen::Index i = 0; i < psi.size(); ++i) {
        if ((i & cbit) && !(i & tbit)) std::swap(psi[i], psi[i | tbit]);
      }
      break;
    }
    default: apply_1q(psi, g.targets[0], single_qubit_matrix(g));
  }
}

void apply_pauli(Statevector& psi, const PauliString& p) {
  Statevector out(psi.size());
  for (Eigen::Index b = 0; b < psi.size(); ++b) {
    const auto ub = static_cast<std::uint64_t>(b);
    out[static_cast<Eigen::Index>(ub ^ p.x())] = basis_phase(p, ub) * psi[b];
  }
  psi = std::move(out);
}

Statevector apply_circuit(Statevector psi, const Circuit& c) {
  if (psi.size() != (Eigen::Index{1} << c.n_qubits)) {
    throw std::invalid_argument("apply_circuit: state dimension does not match circuit");
  }
  for (const auto& g : c.gates) apply_gate(psi, g);
  return psi;
}

Statevector StatePrep::prepare() const {
  return apply_circuit(initial ? *initial : basis_state(circuit.n_qubits, 0), circuit);
}

cplx expectation(const Statevector& psi, const PauliString& p) {
  if (psi.size() != (Eigen::Index{1} << p.n_qubits())) {
    throw std::invalid_argument("expectation: dimension mismatch");
  }
  cplx acc = 0;
  for (Eigen::Index b = 0; b < psi.size(); ++b) {
    const auto ub = static_cast<std::uint64_t>(b);
    acc += std::conj(psi[static_cast<Eigen::Index>(ub ^ p.x())]) * basis_phase(p, ub) * psi[b];
  }
  return acc;
}

cplx expectation(const Statevector& psi, const PauliSum& h) {
  if (psi.size() != (Eigen::Index{1} << h.n_qubits())) {
    throw std::invalid_argument("expectation: dimension mismatch");
  }
  cplx acc = 0;
  for (const auto& [p, c] : h.terms()) acc += c * expectation(psi, p);
  return acc;
}

double ReadoutDrift::offset(std::int64_t cycle) const {
  return amplitude * std::sin(2 * std::numbers::pi * static_cast<double>(cycle) / period_cycles);
}

NoiseModel NoiseModel::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("noise model: invalid JSON: ") + e.what());
  }
  NoiseModel m;
  try {
    if (j.contains("readout")) {
      for (const auto& q : j.at("readout")) m.readout.push_back({q.at(0).get<double>(), q.at(1).get<double>()});
    }
    m.depolarizing_1q = j.value("depolarizing_1q", 0.0);
    m.depolarizing_2q = j.value("depolarizing_2q", 0.0);
    if (j.contains("drift") && !j.at("drift").is_null()) {
      const auto& d = j.at("drift");
      m.drift = ReadoutDrift{d.at("amplitude").get<double>(), d.at("period_cycles").get<double>()};
    }
    m.validate();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("noise model: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw SchemaError(e.what());
  }
  return m;
}

NoiseModel NoiseModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open noise model: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string NoiseModel::to_json_text() const {
  nlohmann::json j;
  j["readout"] = nlohmann::json::array();
  for (const auto& r : readout) j["readout"].push_back({r.f00, r.f11});
  j["depolarizing_1q"] = depolarizing_1q;
  j["depolarizing_2q"] = depolarizing_2q;
  if (drift) j["drift"] = {{"amplitude", drift->amplitude}, {"period_cycles", drift->period_cycles}};
  return j.dump();
}

Eigen::Matrix2d NoiseModel::confusion(int q, std::int64_t cycle) const {
  if (q < 0) throw std::out_of_range("NoiseModel::confusion: qubit index");
  if (static_cast<std::size_t>(q) >= readout.size()) return Eigen::Matrix2d::Identity();
  const double off = drift ? drift->offset(cycle) : 0.0;
  const double f00 = std::clamp(readout[q].f00 + off, 0.0, 1.0);
  const double f11 = std::clamp(readout[q].f11 + off, 0.0, 1.0);
  Eigen::Matrix2d m;
  m << f00, 1 - f11, 1 - f00, f11;
  return m;
}

bool NoiseModel::has_readout_noise() const {
  return drift.has_value() ||
         std::any_of(readout.begin(), readout.end(), [](const ReadoutFidelity& r) { return r.f00 != 1.0 || r.f11 != 1.0; });
}

void NoiseModel::validate() const {
  const auto prob = [](double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; };
  for (const auto& r : readout) {
    if (!prob(r.f00) || !prob(r.f11)) throw std::invalid_argument("NoiseModel: readout fidelity outside [0, 1]");
  }
  if (!prob(depolarizing_1q) || !prob(depolarizing_2q)) {
    throw std::invalid_argument("NoiseModel: depolarizing probability outside [0, 1]");
  }
  if (drift && (!(drift->period_cycles > 0) || !std::isfinite(drift->amplitude))) {
    throw std::invalid_argument("NoiseModel: drift needs a positive period and finite amplitude");
  }
}

std::string ShotResult::bitstring(int n_qubits, std::uint64_t outcome) {
  std::string s(n_qubits, '0');
  for (int q = 0; q < n_qubits; ++q) s[q] = ((outcome >> q) & 1) ? '1' : '0';
  return s;
}

std::int64_t ShotResult::count(const std::string& bits) const {
  if (static_cast<int>(bits.size()) != n_qubits) throw std::invalid_argument("ShotResult::count: length mismatch");
  std::uint64_t idx = 0;
  for (int q = 0; q < n_qubits; ++q) idx |= std::uint64_t{bits[q] == '1'} << q;
  return counts.at(idx);
}

std::map<std::string, std::int64_t> ShotResult::to_map() const {
  std::map<std::string, std::int64_t> m;
  for (std::size_t b = 0; b < counts.size(); ++b) {
    if (counts[b]) m[bitstring(n_qubits, b)] = counts[b];
  }
  return m;
}

ShotResult ShotResult::from_map(int n_qubits, const std::map<std::string, std::int64_t>& m) {
  ShotResult r{n_qubits, std::vector<std::int64_t>(std::size_t{1} << n_qubits, 0), 0};
  for (const auto& [bits, n] : m) {
    if (static_cast<int>(bits.size()) != n_qubits || n < 0) throw std::invalid_argument("ShotResult::from_map: bad entry");
    std::uint64_t idx = 0;
    for (int q = 0; q < n_qubits; ++q) idx |= std::uint64_t{bits[q] == '1'} << q;
    r.counts[idx] += n;
    r.shots += n;
  }
  return r;
}

Eigen::VectorXd ShotResult::probabilities() const {
  if (shots <= 0) throw std::invalid_argument("ShotResult: no shots");
  Eigen::VectorXd p(static_cast<Eigen::Index>(counts.size()));
  for (std::size_t b = 0; b < counts.size(); ++b) p[static_cast<Eigen::Index>(b)] = double(counts[b]) / double(shots);
  return p;
}

Circuit basis_change(const PauliString& basis) {
  Circuit c(basis.n_qubits());
  for (int q = 0; q < basis.n_qubits(); ++q) {
    switch (basis.letter(q)) {
      case 'X': c.add(Gate::h(q)); break;
      case 'Y': c.add(Gate::sdg(q)).add(Gate::h(q)); break;
      default: break;
    }
  }
  return c;
}

ShotResult sample_circuit(const StatePrep& prep, std::int64_t shots, const NoiseModel& noise,
                          std::uint64_t seed, std::int64_t cycle) {
  if (shots <= 0) throw std::invalid_argument("sample: shots must be positive");
  const int n = prep.n_qubits();
  if (!noise.readout.empty() && static_cast<int>(noise.readout.size()) < n) {
    throw std::invalid_argument("sample: noise model describes fewer qubits than the circuit");
  }
  if (prep.initial && prep.initial->size() != (Eigen::Index{1} << n)) {
    throw std::invalid_argument("sample: initial state dimension does not match circuit");
  }
  Rng rng(seed);
  auto ideal = sample_ideal_counts(prep, shots, noise, rng);
  return {n, apply_readout(ideal, n, noise, cycle, rng), shots};
}

ShotResult sample_group(const StatePrep& prep, const MeasurementGroup& g, std::int64_t shots,
                        const NoiseModel& noise, std::uint64_t seed, std::int64_t cycle) {
  if (g.n_qubits() != prep.n_qubits()) throw std::invalid_argument("sample_group: qubit count mismatch");
  StatePrep measured = prep;
  measured.circuit.append(basis_change(g.basis));
  return sample_circuit(measured, shots, noise, seed, cycle);
}

Estimate expectation_from_distribution(const MeasurementGroup& g, const Eigen::VectorXd& p,
                                       std::int64_t shots) {
  if (p.size() == 0 || shots <= 0) throw std::invalid_argument("expectation_from_counts: empty result");
  if (p.size() != (Eigen::Index{1} << g.n_qubits())) {
    throw std::invalid_argument("expectation_from_counts: distribution size mismatch");
  }
  const double total = p.sum();
  if (!(total > 0)) throw std::invalid_argument("expectation_from_counts: distribution not normalizable");
  cplx value = 0;
  double var = 0;
  for (const auto& [pauli, c] : g.members) {
    const std::uint64_t support = pauli.support();
    double m = 0;
    for (Eigen::Index b = 0; b < p.size(); ++b) {
      const int parity = __builtin_popcountll(static_cast<std::uint64_t>(b) & support) & 1;
      m += parity ? -p[b] : p[b];
    }
    m /= total;
    value += c * m;
    var += std::norm(c) * std::max(0.0, 1.0 - m * m) / double(shots);
  }
  return {value, std::sqrt(var)};
}

Estimate expectation_from_counts(const MeasurementGroup& g, const ShotResult& r) {
  if (r.shots <= 0) throw std::invalid_argument("expectation_from_counts: empty result");
  return expectation_from_distribution(g, r.probabilities(), r.shots);
}

Estimate exact_group_expectation(const Statevector& psi, const MeasurementGroup& g) {
  cplx value = 0;
  for (const auto& [p, c] : g.members) value += c * expectation(psi, p).real();
  return {value, 0.0};
}

}  // namespace qsband
