#pragma once

#include "qsband/pauli.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qsband {

enum class GateKind { X, H, S, Sdg, Ry, Rz, CZ, CNOT };

struct Gate {
  GateKind kind;
  std::array<int, 2> targets{-1, -1};
  double theta = 0.0;

  static Gate x(int q) { return {GateKind::X, {q, -1}}; }
  static Gate h(int q) { return {GateKind::H, {q, -1}}; }
  static Gate s(int q) { return {GateKind::S, {q, -1}}; }
  static Gate sdg(int q) { return {GateKind::Sdg, {q, -1}}; }
  static Gate ry(int q, double theta) { return {GateKind::Ry, {q, -1}, theta}; }
  static Gate rz(int q, double theta) { return {GateKind::Rz, {q, -1}, theta}; }
  static Gate cz(int a, int b) { return {GateKind::CZ, {a, b}}; }
  /// Control `c`, target `t`.
  static Gate cnot(int c, int t) { return {GateKind::CNOT, {c, t}}; }

  int arity() const { return kind == GateKind::CZ || kind == GateKind::CNOT ? 2 : 1; }
  Gate inverse() const;

  friend bool operator==(const Gate&, const Gate&) = default;
};

struct Circuit {
  int n_qubits = 0;
  std::vector<Gate> gates;

  Circuit() = default;
  explicit Circuit(int n) : n_qubits(n) {}

  /// Appends after checking targets and angle.
  Circuit& add(const Gate& g);
  Circuit& append(const Circuit& other);
  /// Throws std::invalid_argument on any gate that does not fit.
  void validate() const;
  std::size_t size() const { return gates.size(); }
};

/// 2^n amplitudes, qubit q is bit q of the index.
using Statevector = Eigen::VectorXcd;

Statevector basis_state(int n_qubits, std::uint64_t index);
int qubit_count(const Statevector& psi);

void apply_gate(Statevector& psi, const Gate& g);
/// Applies a Pauli string in place (used for error insertion).
void apply_pauli(Statevector& psi, const PauliString& p);
Statevector apply_circuit(Statevector psi, const Circuit& c);

/// Circuit applied to an initial state; |0...0> when `initial` is empty.
struct StatePrep {
  Circuit circuit;
  std::optional<Statevector> initial;

  int n_qubits() const { return circuit.n_qubits; }
  Statevector prepare() const;
};

cplx expectation(const Statevector& psi, const PauliString& p);
cplx expectation(const Statevector& psi, const PauliSum& h);

struct ReadoutFidelity {
  double f00 = 1.0;  ///< P(read 0 | prepared 0)
  double f11 = 1.0;  ///< P(read 1 | prepared 1)
};

/// Zero-mean sinusoidal offset added to every readout fidelity.
struct ReadoutDrift {
  double amplitude = 0.0;
  double period_cycles = 1.0;

  double offset(std::int64_t cycle) const;
};

struct NoiseModel {
  std::vector<ReadoutFidelity> readout;  ///< empty means ideal readout
  double depolarizing_1q = 0.0;
  double depolarizing_2q = 0.0;
  std::optional<ReadoutDrift> drift;

  static NoiseModel ideal() { return {}; }
  static NoiseModel from_json_text(const std::string& text);
  static NoiseModel load(const std::string& path);
  std::string to_json_text() const;

  /// Column-stochastic 2x2 confusion for qubit `q` at a measurement cycle.
  Eigen::Matrix2d confusion(int q, std::int64_t cycle) const;
  bool has_gate_noise() const { return depolarizing_1q > 0 || depolarizing_2q > 0; }
  bool has_readout_noise() const;
  void validate() const;
};

struct ShotResult {
  int n_qubits = 0;
  std::vector<std::int64_t> counts;  ///< indexed by outcome, qubit q is bit q
  std::int64_t shots = 0;

  /// Bitstring with qubit 0 leftmost.
  static std::string bitstring(int n_qubits, std::uint64_t outcome);
  std::int64_t count(const std::string& bits) const;
  std::map<std::string, std::int64_t> to_map() const;
  static ShotResult from_map(int n_qubits, const std::map<std::string, std::int64_t>& m);
  Eigen::VectorXd probabilities() const;
};

/// Estimated expectation with its standard error.
struct Estimate {
  cplx value;
  double stderr = 0.0;
};

/// Gates rotating `basis` onto the computational basis.
Circuit basis_change(const PauliString& basis);

/// Samples `prep` followed by the group's basis change.
///
/// Depolarizing faults are drawn per shot as uniformly random non-identity
/// Paulis after each gate; readout flips then act on the classical outcome
/// through the confusion matrices evaluated at `cycle`. Fixed inputs give
/// identical counts.
ShotResult sample_group(const StatePrep& prep, const MeasurementGroup& g, std::int64_t shots,
                        const NoiseModel& noise, std::uint64_t seed, std::int64_t cycle);

/// Samples `c` as written (no basis change).
ShotResult sample_circuit(const StatePrep& prep, std::int64_t shots, const NoiseModel& noise,
                          std::uint64_t seed, std::int64_t cycle);

/// Group value from outcome statistics; stderr treats terms as independent.
Estimate expectation_from_counts(const MeasurementGroup& g, const ShotResult& r);
Estimate expectation_from_distribution(const MeasurementGroup& g, const Eigen::VectorXd& p,
                                       std::int64_t shots);

/// Exact group value on a state (stderr 0).
Estimate exact_group_expectation(const Statevector& psi, const MeasurementGroup& g);

}  // namespace qsband
