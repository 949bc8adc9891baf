#include "qsband/pipeline.hpp"

#include "qsband/errors.hpp"
#include "qsband/parallel.hpp"
#include "qsband/random.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace qsband {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string resolve(const std::string& path, const std::string& base) {
  const fs::path p(path);
  return p.is_absolute() ? path : (fs::path(base) / p).lexically_normal().string();
}

template <typename T>
T get_field(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
  }
}

std::string_view to_string(ReferenceEnergy r) { return r == ReferenceEnergy::oracle ? "oracle" : "vqe"; }

std::string_view to_string(BandShift s) {
  switch (s) {
    case BandShift::casci: return "casci";
    case BandShift::gamma_valence_top: return "gamma_valence_top";
    case BandShift::none: return "none";
  }
  return "?";
}

json matrix_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json bands_json(const BandStructure& b) {
  json rows = json::array();
  for (const auto& r : b.rows) {
    rows.push_back({{"k_label", r.k_label},
                    {"path_distance", r.path_distance},
                    {"band_type", to_string(r.band_type)},
                    {"band_index", r.band_index},
                    {"energy_ev", r.energy_ev},
                    {"stderr_ev", r.stderr_ev}});
  }
  return {{"shift_ev", b.shift_ev}, {"rows", rows}};
}

Eigen::VectorXd band_values_ev(const KPointSolution& s) {
  const Eigen::Index nv = s.valence_energies ? s.valence_energies->size() : 0;
  const Eigen::Index nc = s.conduction_energies ? s.conduction_energies->size() : 0;
  Eigen::VectorXd out(nv + nc);
  for (Eigen::Index b = 0; b < nv; ++b) out[b] = (s.ground_energy - (*s.valence_energies)[b]) * kHartreeToEv;
  for (Eigen::Index b = 0; b < nc; ++b) out[nv + b] = ((*s.conduction_energies)[b] - s.ground_energy) * kHartreeToEv;
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

RunConfig RunConfig::from_json_text(const std::string& text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: document must be an object");
  check_keys(j, {"integrals", "backend", "noise", "shots", "repeats", "zne", "seed", "s_threshold", "output_dir", "vqe",
                 "reference_energy", "band_shift", "rem", "jobs"},
             "config");
  RunConfig c;
  for (const auto& p : get_field<std::vector<std::string>>(j, "integrals")) c.integrals.push_back(resolve(p, base_dir));
  if (j.contains("backend")) {
    try {
      c.backend = parse_backend_mode(get_field<std::string>(j, "backend"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (j.contains("noise") && !j.at("noise").is_null()) c.noise = resolve(get_field<std::string>(j, "noise"), base_dir);
  if (j.contains("shots")) {
    const json& s = j.at("shots");
    check_keys(s, {"vqe", "qse", "calibration"}, "config.shots");
    if (s.contains("vqe")) c.shots_vqe = get_field<std::int64_t>(s, "vqe");
    if (s.contains("qse")) c.shots_qse = get_field<std::int64_t>(s, "qse");
    if (s.contains("calibration")) c.shots_calibration = get_field<std::int64_t>(s, "calibration");
  }
  if (j.contains("repeats")) c.repeats = get_field<int>(j, "repeats");
  if (j.contains("zne")) {
    const json& z = j.at("zne");
    check_keys(z, {"lambdas", "trials"}, "config.zne");
    if (z.contains("lambdas")) c.zne_lambdas = get_field<std::vector<int>>(z, "lambdas");
    if (z.contains("trials")) c.zne_trials = get_field<int>(z, "trials");
  }
  if (j.contains("seed")) c.seed = get_field<std::uint64_t>(j, "seed");
  if (j.contains("s_threshold")) c.s_threshold = get_field<double>(j, "s_threshold");
  if (j.contains("output_dir")) c.output_dir = resolve(get_field<std::string>(j, "output_dir"), base_dir);
  if (j.contains("vqe")) {
    const json& v = j.at("vqe");
    check_keys(v, {"sweeps", "on_backend"}, "config.vqe");
    if (v.contains("sweeps")) c.sweeps = get_field<int>(v, "sweeps");
    if (v.contains("on_backend")) c.vqe_on_backend = get_field<bool>(v, "on_backend");
  }
  if (j.contains("reference_energy")) {
    const auto r = get_field<std::string>(j, "reference_energy");
    if (r == "oracle") c.reference_energy = ReferenceEnergy::oracle;
    else if (r == "vqe") c.reference_energy = ReferenceEnergy::vqe;
    else throw ConfigError("config: reference_energy must be oracle or vqe");
  }
  if (j.contains("band_shift")) {
    const auto s = get_field<std::string>(j, "band_shift");
    if (s == "casci") c.band_shift = BandShift::casci;
    else if (s == "gamma_valence_top") c.band_shift = BandShift::gamma_valence_top;
    else if (s == "none") c.band_shift = BandShift::none;
    else throw ConfigError("config: band_shift must be casci, gamma_valence_top or none");
  }
  if (j.contains("rem")) c.rem = get_field<bool>(j, "rem");
  if (j.contains("jobs")) c.jobs = get_field<int>(j, "jobs");
  c.validate();
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str(), fs::path(path).parent_path().string());
}

std::string RunConfig::to_json_text() const {
  json j;
  j["integrals"] = integrals;
  j["backend"] = to_string(backend);
  j["noise"] = noise ? json(*noise) : json(nullptr);
  j["shots"] = {{"vqe", shots_vqe}, {"qse", shots_qse}, {"calibration", shots_calibration}};
  j["repeats"] = repeats;
  j["zne"] = {{"lambdas", zne_lambdas}, {"trials", zne_trials}};
  j["seed"] = seed;
  j["s_threshold"] = s_threshold;
  j["output_dir"] = output_dir;
  j["vqe"] = {{"sweeps", sweeps}, {"on_backend", vqe_on_backend}};
  j["reference_energy"] = to_string(reference_energy);
  j["band_shift"] = to_string(band_shift);
  j["rem"] = rem;
  j["jobs"] = jobs;
  return j.dump(2);
}

void RunConfig::validate() const {
  if (integrals.empty()) throw ConfigError("config: at least one integrals file is required");
  for (const auto& p : integrals) {
    if (!fs::exists(p)) throw ConfigError("config: integrals file not found: " + p);
  }
  if (backend == BackendMode::noisy && !noise) throw ConfigError("config: noisy backend requires a noise model");
  if (noise && !fs::exists(*noise)) throw ConfigError("config: noise model not found: " + *noise);
  if (shots_vqe <= 0 || shots_qse <= 0 || shots_calibration <= 0) throw ConfigError("config: shot counts must be positive");
  if (repeats < 1) throw ConfigError("config: repeats must be positive");
  if (sweeps < 1) throw ConfigError("config: vqe.sweeps must be positive");
  if (!(s_threshold > 0)) throw ConfigError("config: s_threshold must be positive");
  if (jobs < 1) throw ConfigError("config: jobs must be positive");
  if (zne_trials < 1) throw ConfigError("config: zne.trials must be positive");
  std::set<int> distinct;
  for (int l : zne_lambdas) {
    if (l < 1 || l % 2 == 0) throw ConfigError("config: zne lambdas must be odd positive integers");
    distinct.insert(l);
  }
  if (distinct.size() < 2) throw ConfigError("config: zne needs at least two distinct lambdas");
}

Backend RunConfig::make_backend() const {
  switch (backend) {
    case BackendMode::exact: return Backend::exact();
    case BackendMode::sampled: return Backend::sampled();
    case BackendMode::noisy: return Backend::noisy(NoiseModel::load(*noise));
  }
  return Backend::exact();
}

KPointModel build_kpoint_model(const IntegralSet& ints) {
  ints.validate();
  KPointModel m;
  m.ints = ints;
  m.hamiltonian = build_hamiltonian(ints);
  const int n = ints.n_modes();
  m.qubit_hamiltonian = truncate(jordan_wigner(m.hamiltonian, n), kRoundoffCutoff);
  if (!m.qubit_hamiltonian.is_hermitian(1e-10)) throw HermiticityError("qubit Hamiltonian is not Hermitian");
  const SymmetrySet parity = spin_parity_symmetries(ints.n_orbitals);
  m.symmetries = parity.with_sector(sector_from_occupation(parity, ints.hf_occupation()));
  m.tapered = taper(m.qubit_hamiltonian, m.symmetries);
  m.groups = group_qubitwise(m.tapered);

  const auto spec = exact_spectrum(m.qubit_hamiltonian, ints.n_electrons, nullptr, true);
  m.casci_energy = spec.eigenvalues[0];
  m.casci_state = taper_state(spec.eigenvectors->col(0), m.symmetries);
  if (std::abs(m.casci_state.squaredNorm() - 1.0) > 1e-8) {
    throw std::runtime_error("CASCI ground state lies outside the HF symmetry sector");
  }
  const double shift = m.qubit_hamiltonian.constant().real();
  m.valence = prepare_subspace(build_excitations(ints, ExcitationKind::valence), m.hamiltonian, n, m.symmetries,
                               1e-8, shift);
  m.conduction = prepare_subspace(build_excitations(ints, ExcitationKind::conduction), m.hamiltonian, n,
                                  m.symmetries, 1e-8, shift);
  return m;
}

KPointSolution exact_kpoint_solution(const KPointModel& m, double s_threshold) {
  const StatePrep ref{Circuit(m.tapered.n_qubits()), m.casci_state};
  KPointSolution out;
  out.kpoint = m.ints.kpoint;
  out.ground_energy = m.casci_energy;
  const auto solve = [&](const SubspaceOperators& ops) -> std::optional<Eigen::VectorXd> {
    if (ops.dim == 0) return std::nullopt;
    return solve_subspace(measure_subspace(ref, ops, Backend::exact(), {}, 0, 0), s_threshold).energies;
  };
  out.valence_energies = solve(m.valence);
  out.conduction_energies = solve(m.conduction);
  if (out.valence_energies) out.valence_stderr = Eigen::VectorXd::Zero(out.valence_energies->size());
  if (out.conduction_energies) out.conduction_stderr = Eigen::VectorXd::Zero(out.conduction_energies->size());
  return out;
}

SmoResult run_vqe(const KPointModel& m, const RunConfig& cfg, const Backend& backend, std::uint64_t seed) {
  if (m.tapered.n_qubits() != kAnsatzQubits) {
    throw ConfigError("the ansatz needs a 2-qubit tapered Hamiltonian, got " + std::to_string(m.tapered.n_qubits()) +
                      " qubits");
  }
  const Backend used = cfg.vqe_on_backend ? backend : Backend::exact();
  MeasureOptions opts;
  opts.shots_per_group = cfg.shots_vqe;
  const EnergyFunction energy = [&](const AnsatzParams& p, std::uint64_t s) {
    return estimate_energy(m.groups, p, used, opts, s, 0);
  };
  return smo_optimize(AnsatzParams{}, energy, cfg.sweeps, seed, 1);
}

QseRun run_qse_once(const KPointModel& m, const StatePrep& reference, const RunConfig& cfg, const Backend& backend,
                    std::uint64_t seed, std::int64_t cycle) {
  QseRun out;
  MeasureOptions opts;
  opts.shots_per_group = cfg.shots_qse;
  if (backend.mode == BackendMode::noisy && cfg.rem && backend.noise.has_readout_noise()) {
    out.calibration = measure_calibration(backend.noise, reference.n_qubits(), cfg.shots_calibration,
                                          derive_seed(seed, {0}), cycle);
    opts.calibration = &*out.calibration;
  }
  KPointSolution& s = out.solution;
  s.kpoint = m.ints.kpoint;
  const auto solve = [&](const SubspaceOperators& ops, std::uint64_t sub_seed, Eigen::VectorXd& stderr_out)
      -> std::optional<Eigen::VectorXd> {
    if (ops.dim == 0) return std::nullopt;
    const auto p = measure_subspace(reference, ops, backend, opts, sub_seed, cycle);
    out.shots += p.shots;
    const auto sol = solve_subspace(p, cfg.s_threshold);
    stderr_out = sol.stderr;
    return sol.energies;
  };
  s.valence_energies = solve(m.valence, derive_seed(seed, {1}), s.valence_stderr);
  s.conduction_energies = solve(m.conduction, derive_seed(seed, {2}), s.conduction_stderr);
  if (cfg.reference_energy == ReferenceEnergy::oracle) {
    s.ground_energy = m.casci_energy;
  } else {
    MeasureOptions eopts = opts;
    eopts.shots_per_group = cfg.shots_vqe;
    const auto e = estimate_groups(reference, m.groups, backend, eopts, derive_seed(seed, {3}), cycle);
    s.ground_energy = e.value.real();
    s.ground_stderr = e.stderr;
    out.shots += e.shots;
  }
  return out;
}

PipelineResult run_pipeline(const RunConfig& cfg, const std::vector<AnsatzParams>* fixed_params) {
  cfg.validate();
  if (fixed_params && fixed_params->size() != cfg.integrals.size()) {
    throw ConfigError("one parameter set per k-point is required");
  }
  PipelineResult res;
  res.config = cfg;
  res.backend = cfg.make_backend();
  const Backend& backend = res.backend;
  std::vector<KPointSolution> measured, exact;

  for (std::size_t k = 0; k < cfg.integrals.size(); ++k) {
    KPointResult kr;
    kr.source = cfg.integrals[k];
    kr.model = build_kpoint_model(load_integrals(kr.source));
    kr.vqe_seed = derive_seed(cfg.seed, {k, 0});
    kr.qse_seed = derive_seed(cfg.seed, {k, 1});
    if (fixed_params) {
      kr.vqe.params = (*fixed_params)[k];
      kr.vqe.trace.initial = estimate_energy(kr.model.groups, kr.vqe.params, Backend::exact(), {}, 0, 0);
    } else {
      kr.vqe = run_vqe(kr.model, cfg, backend, kr.vqe_seed);
    }
    kr.exact = exact_kpoint_solution(kr.model, cfg.s_threshold);
    const StatePrep reference{build_ansatz(kr.vqe.params), std::nullopt};

    const int repeats = backend.mode == BackendMode::exact ? 1 : cfg.repeats;
    kr.repeats.resize(static_cast<std::size_t>(repeats));
    std::vector<KPointSolution> runs(static_cast<std::size_t>(repeats));
    parallel_for(static_cast<std::size_t>(repeats), cfg.jobs, [&](std::size_t r) {
      const std::uint64_t seed = repeats == 1 ? kr.qse_seed : derive_seed(kr.qse_seed, {r});
      const auto cycle = static_cast<std::int64_t>(r);
      auto run = run_qse_once(kr.model, reference, cfg, backend, seed, cycle);
      const auto& s = run.solution;
      const Eigen::Index nv = s.valence_energies ? s.valence_energies->size() : 0;
      const Eigen::Index nc = s.conduction_energies ? s.conduction_energies->size() : 0;
      Eigen::VectorXd values(1 + nv + nc);
      values[0] = s.ground_energy;
      if (nv) values.segment(1, nv) = *s.valence_energies;
      if (nc) values.segment(1 + nv, nc) = *s.conduction_energies;
      kr.repeats[r] = {static_cast<int>(r), seed, cycle, run.shots, run.calibration, values};
      runs[r] = std::move(run.solution);
    });

    const KPointSolution& first = runs.front();
    const Eigen::Index nv = first.valence_energies ? first.valence_energies->size() : 0;
    const Eigen::Index nc = first.conduction_energies ? first.conduction_energies->size() : 0;
    kr.band_samples_ev.resize(repeats, nv + nc);
    for (int r = 0; r < repeats; ++r) {
      const Eigen::VectorXd row = band_values_ev(runs[static_cast<std::size_t>(r)]);
      if (row.size() != nv + nc) throw std::runtime_error("subspace dimension changed between repeats");
      kr.band_samples_ev.row(r) = row.transpose();
    }

    if (repeats == 1) {
      kr.measured = first;
    } else {
      const RepeatSummary bands = summarize_repeats(kr.band_samples_ev);
      Eigen::MatrixXd ground(repeats, 1);
      for (int r = 0; r < repeats; ++r) ground(r, 0) = kr.repeats[static_cast<std::size_t>(r)].values[0];
      const double e_gs = ground.mean();
      KPointSolution& s = kr.measured;
      s.kpoint = first.kpoint;
      s.ground_energy = e_gs;
      if (nv) {
        s.valence_energies = (e_gs - bands.mean.head(nv).array() / kHartreeToEv).matrix();
        s.valence_stderr = bands.sem.head(nv) / kHartreeToEv;
      }
      if (nc) {
        s.conduction_energies = (e_gs + bands.mean.tail(nc).array() / kHartreeToEv).matrix();
        s.conduction_stderr = bands.sem.tail(nc) / kHartreeToEv;
      }
    }
    measured.push_back(kr.measured);
    exact.push_back(kr.exact);
    res.kpoints.push_back(std::move(kr));
  }

  res.exact_bands = assemble_bands(exact, cfg.band_shift == BandShift::none ? ShiftPolicy::none : ShiftPolicy::gamma_valence_top);
  switch (cfg.band_shift) {
    case BandShift::casci:
      res.bands = assemble_bands(measured, ShiftPolicy::explicit_value, res.exact_bands.shift_ev);
      break;
    case BandShift::gamma_valence_top:
      res.bands = assemble_bands(measured, ShiftPolicy::gamma_valence_top);
      break;
    case BandShift::none:
      res.bands = assemble_bands(measured, ShiftPolicy::none);
      break;
  }
  return res;
}

std::string calibration_to_json(const CalibrationMatrix& c) {
  return json{{"shots_per_basis_state", c.shots_per_basis_state}, {"cycle", c.cycle}, {"m", matrix_json(c.m)}}.dump(2);
}

std::string PipelineResult::record_json(const std::string& timestamp) const {
  json j;
  j["timestamp"] = timestamp;
  j["config"] = json::parse(config.to_json_text());
  j["root_seed"] = config.seed;
  j["backend"] = to_string(backend.mode);
  j["noise_model"] = backend.mode == BackendMode::noisy ? json::parse(backend.noise.to_json_text()) : json(nullptr);
  j["kpoints"] = json::array();
  for (const auto& kr : kpoints) {
    const auto& m = kr.model;
    json k;
    k["label"] = m.ints.kpoint.label;
    k["path_distance"] = m.ints.kpoint.path_distance;
    k["integrals"] = kr.source;
    k["n_qubits"] = m.qubit_hamiltonian.n_qubits();
    k["n_qubits_tapered"] = m.tapered.n_qubits();
    json gens = json::array();
    for (std::size_t i = 0; i < m.symmetries.size(); ++i) {
      gens.push_back({{"generator", m.symmetries.generators[i].letters()},
                      {"qubit", m.symmetries.single_qubit_x[i]},
                      {"sector", m.symmetries.sector[i]}});
    }
    k["symmetries"] = gens;
    k["measurement_groups"] = m.groups.size();
    k["casci_energy_hartree"] = m.casci_energy;
    json trace = json::array();
    for (const auto& r : kr.vqe.trace.rows) {
      trace.push_back({{"iteration", r.iteration},
                       {"params", r.params},
                       {"energy_hartree", r.estimate.energy},
                       {"stderr_hartree", r.estimate.stderr},
                       {"shots", r.shots}});
    }
    k["vqe"] = {{"seed", kr.vqe_seed},
                {"params", kr.vqe.params},
                {"initial_energy_hartree", kr.vqe.trace.initial.energy},
                {"final_energy_hartree", kr.vqe.final_estimate().energy},
                {"trace", trace}};
    json reps = json::array();
    for (const auto& r : kr.repeats) {
      json rj{{"index", r.index}, {"seed", r.seed}, {"cycle", r.cycle}, {"shots", r.shots}, {"values_hartree", vector_json(r.values)}};
      rj["calibration"] = r.calibration ? json::parse(calibration_to_json(*r.calibration)) : json(nullptr);
      reps.push_back(rj);
    }
    k["qse"] = {{"seed", kr.qse_seed},
                {"shots_per_group", config.shots_qse},
                {"valence_groups", m.valence.group_count()},
                {"conduction_groups", m.conduction.group_count()},
                {"repeats", reps},
                {"band_samples_ev", matrix_json(kr.band_samples_ev)}};
    j["kpoints"].push_back(k);
  }
  j["bands"] = bands_json(bands);
  j["exact_bands"] = bands_json(exact_bands);
  return j.dump(2);
}

void write_artifacts(const PipelineResult& result, const std::string& timestamp) {
  const fs::path dir(result.config.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

  std::ostringstream bands, exact;
  write_band_csv(bands, result.bands);
  write_band_csv(exact, result.exact_bands);
  write_text(dir / "bands.csv", bands.str());
  write_text(dir / "exact_bands.csv", exact.str());
  for (std::size_t k = 0; k < result.kpoints.size(); ++k) {
    const auto& kr = result.kpoints[k];
    std::ostringstream trace;
    write_trace_csv(trace, kr.vqe.trace);
    write_text(dir / ("trace_k" + std::to_string(k) + ".csv"), trace.str());

    const Eigen::Index nv = kr.measured.valence_energies ? kr.measured.valence_energies->size() : 0;
    for (Eigen::Index b = 0; b < kr.band_samples_ev.cols(); ++b) {
      const bool valence = b < nv;
      const Eigen::Index index = valence ? b : b - nv;
      std::ostringstream hist;
      hist.precision(17);
      hist << "repeat_index,value_ev\n";
      for (Eigen::Index r = 0; r < kr.band_samples_ev.rows(); ++r) {
        hist << r << ',' << kr.band_samples_ev(r, b) + result.bands.shift_ev << '\n';
      }
      write_text(dir / ("hist_k" + std::to_string(k) + "_" + (valence ? "valence_" : "conduction_") +
                        std::to_string(index) + ".csv"),
                 hist.str());
    }
  }
  write_text(dir / "run_record.json", result.record_json(timestamp) + "\n");
}

bool ZneTrial::improved() const { return std::abs(extrapolated.value - exact) < std::abs(points.front().value - exact); }

std::vector<ZneTrial> run_zne_study(const KPointModel& m, const AnsatzParams& params, const NoiseModel& noise,
                                    const std::vector<int>& lambdas, std::int64_t shots_per_group, int trials,
                                    std::uint64_t seed, int jobs) {
  if (lambdas.empty() || lambdas.front() != 1) throw std::invalid_argument("run_zne_study: first lambda must be 1");
  const double exact = estimate_energy(m.groups, params, Backend::exact(), {}, 0, 0).energy;
  const Backend backend = Backend::noisy(noise);
  std::vector<ZneTrial> out(static_cast<std::size_t>(trials));
  parallel_for(out.size(), jobs, [&](std::size_t t) {
    ZneTrial& trial = out[t];
    trial.index = static_cast<int>(t);
    trial.seed = derive_seed(seed, {t});
    trial.exact = exact;
    for (std::size_t l = 0; l < lambdas.size(); ++l) {
      MeasureOptions opts;
      opts.shots_per_group = shots_per_group;
      opts.fold = lambdas[l];
      const auto e = estimate_energy(m.groups, params, backend, opts, derive_seed(trial.seed, {l}), 0);
      trial.points.push_back({double(lambdas[l]), e.energy, e.stderr});
    }
    trial.extrapolated = zne_extrapolate(trial.points);
  });
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace qsband
