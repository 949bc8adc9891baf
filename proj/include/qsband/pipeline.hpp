#pragma once

#include "qsband/backend.hpp"
#include "qsband/fermion.hpp"
#include "qsband/hamiltonian.hpp"
#include "qsband/mitigation.hpp"
#include "qsband/qse.hpp"
#include "qsband/vqe.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qsband {

enum class ReferenceEnergy { oracle, vqe };
enum class BandShift { casci, gamma_valence_top, none };

struct RunConfig {
  std::vector<std::string> integrals;  ///< one file per k-point
  BackendMode backend = BackendMode::exact;
  std::optional<std::string> noise;  ///< NoiseModel JSON path
  std::int64_t shots_vqe = 5000;
  std::int64_t shots_qse = 10000;
  std::int64_t shots_calibration = 10000;
  int repeats = 40;
  std::vector<int> zne_lambdas{1, 3};
  int zne_trials = 100;
  std::uint64_t seed = 0;
  double s_threshold = 1e-6;
  std::string output_dir = "out";
  int sweeps = 3;
  /// Optimize on the configured backend instead of the exact estimator.
  bool vqe_on_backend = false;
  ReferenceEnergy reference_energy = ReferenceEnergy::oracle;
  BandShift band_shift = BandShift::casci;
  bool rem = true;
  int jobs = 1;

  /// Relative paths are resolved against `base_dir`. Unknown keys are
  /// rejected. Throws ConfigError.
  static RunConfig from_json_text(const std::string& text, const std::string& base_dir = ".");
  static RunConfig load(const std::string& path);
  std::string to_json_text() const;
  void validate() const;

  /// Loads the noise model when the mode is noisy.
  Backend make_backend() const;
};

/// Pauli terms below this magnitude after mapping are rounding residue.
inline constexpr double kRoundoffCutoff = 1e-12;

/// Everything derived from one k-point's integrals before any sampling.
struct KPointModel {
  IntegralSet ints;
  FermionOperator hamiltonian;
  PauliSum qubit_hamiltonian;
  SymmetrySet symmetries;  ///< spin parities, sector of the HF state
  PauliSum tapered;
  std::vector<MeasurementGroup> groups;
  double casci_energy = 0.0;
  Eigen::VectorXcd casci_state;  ///< on the tapered register
  SubspaceOperators valence;
  SubspaceOperators conduction;
};

KPointModel build_kpoint_model(const IntegralSet& ints);

/// Exact-backend QSE on the CASCI state; the reference bands.
KPointSolution exact_kpoint_solution(const KPointModel& m, double s_threshold);

SmoResult run_vqe(const KPointModel& m, const RunConfig& cfg, const Backend& backend, std::uint64_t seed);

struct QseRun {
  KPointSolution solution;
  std::optional<CalibrationMatrix> calibration;
  std::int64_t shots = 0;
};

/// One measurement pass: calibration (seed {0}), valence (seed {1}),
/// conduction (seed {2}) and, for the VQE reference energy, the ground
/// energy (seed {3}), all at `cycle`.
QseRun run_qse_once(const KPointModel& m, const StatePrep& reference, const RunConfig& cfg, const Backend& backend,
                    std::uint64_t seed, std::int64_t cycle);

struct RepeatRecord {
  int index;
  std::uint64_t seed;
  std::int64_t cycle;
  std::int64_t shots;
  std::optional<CalibrationMatrix> calibration;
  Eigen::VectorXd values;  ///< ground energy, E_{N-1}..., E_{N+1}... in Hartree
};

struct KPointResult {
  std::string source;
  KPointModel model;
  std::uint64_t vqe_seed = 0;
  std::uint64_t qse_seed = 0;
  SmoResult vqe;
  KPointSolution exact;
  KPointSolution measured;
  std::vector<RepeatRecord> repeats;
  /// Per repeat, band energies in eV before shifting: valence then conduction.
  Eigen::MatrixXd band_samples_ev;
};

struct PipelineResult {
  RunConfig config;
  Backend backend;
  std::vector<KPointResult> kpoints;
  BandStructure bands;
  BandStructure exact_bands;

  /// Provenance record. Everything but "timestamp" is a function of the
  /// config alone.
  std::string record_json(const std::string& timestamp) const;
};

/// Seeds: VQE derive_seed(seed, {k, 0}); QSE derive_seed(seed, {k, 1}),
/// with repeat r using derive_seed of that with {r} at cycle r.
/// With `fixed_params` (one entry per k-point) optimization is skipped.
PipelineResult run_pipeline(const RunConfig& cfg, const std::vector<AnsatzParams>* fixed_params = nullptr);

/// bands.csv, exact_bands.csv, trace_k<i>.csv, hist_k<i>_<type>_<b>.csv and
/// run_record.json in cfg.output_dir.
void write_artifacts(const PipelineResult& result, const std::string& timestamp);

struct ZneTrial {
  int index;
  std::uint64_t seed;
  std::vector<ZnePoint> points;
  ZneResult extrapolated;
  double exact;

  bool improved() const;
};

/// Trial t estimates the ansatz energy at every lambda with seeds
/// derive_seed(derive_seed(seed, {t}), {l}) and extrapolates to zero noise.
std::vector<ZneTrial> run_zne_study(const KPointModel& m, const AnsatzParams& params, const NoiseModel& noise,
                                    const std::vector<int>& lambdas, std::int64_t shots_per_group, int trials,
                                    std::uint64_t seed, int jobs = 1);

std::string calibration_to_json(const CalibrationMatrix& c);

std::string utc_timestamp();

}  // namespace qsband
