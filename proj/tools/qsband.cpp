#include "qsband/errors.hpp"
#include "qsband/pipeline.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace qsband;

namespace {

enum ExitCode { kOk = 0, kUnexpected = 1, kConfig = 2, kIo = 3, kModule = 4 };

struct Overrides {
  std::string config;
  std::string backend;
  int repeats = 0;
  std::optional<std::uint64_t> seed;
  int jobs = 0;
  std::string out;
};

void add_common(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  app->add_option("--backend", o.backend, "exact|sampled|noisy")->check(CLI::IsMember({"exact", "sampled", "noisy"}));
  app->add_option("--repeats", o.repeats, "Repeat count")->check(CLI::PositiveNumber);
  app->add_option("--seed", o.seed, "Root seed");
  app->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app->add_option("--out", o.out, "Output directory");
}

RunConfig load_config(const Overrides& o) {
  RunConfig c = RunConfig::load(o.config);
  if (!o.backend.empty()) c.backend = parse_backend_mode(o.backend);
  if (o.repeats) c.repeats = o.repeats;
  if (o.seed) c.seed = *o.seed;
  if (o.jobs) c.jobs = o.jobs;
  if (!o.out.empty()) c.output_dir = o.out;
  c.validate();
  return c;
}

fs::path output_dir(const RunConfig& c) {
  const fs::path dir(c.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out || !(out << text)) throw IoError("cannot write " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cmd_taper(const RunConfig& c) {
  const auto dir = output_dir(c);
  for (std::size_t k = 0; k < c.integrals.size(); ++k) {
    const auto m = build_kpoint_model(load_integrals(c.integrals[k]));
    const auto kernel = find_z2_symmetries(m.qubit_hamiltonian);
    std::cout << "k-point " << m.ints.kpoint.label << ": " << m.qubit_hamiltonian.n_qubits() << " qubits, "
              << m.qubit_hamiltonian.size() << " terms\n";
    std::cout << "Z2 symmetries of H (" << kernel.size() << "):\n" << kernel.describe();
    std::cout << "tapered with:\n" << m.symmetries.describe();
    std::cout << "tapered: " << m.tapered.n_qubits() << " qubits, " << m.tapered.size() << " terms, "
              << m.groups.size() << " measurement groups\n";
    const std::string stem = "k" + std::to_string(k);
    write_file(dir / ("hamiltonian_" + stem + ".txt"), m.qubit_hamiltonian.to_text());
    write_file(dir / ("tapered_" + stem + ".txt"), m.tapered.to_text());
  }
  return kOk;
}

int cmd_vqe(const RunConfig& c) {
  const auto dir = output_dir(c);
  const Backend backend = c.make_backend();
  for (std::size_t k = 0; k < c.integrals.size(); ++k) {
    const auto m = build_kpoint_model(load_integrals(c.integrals[k]));
    const auto seed = derive_seed(c.seed, {k, 0});
    const auto r = run_vqe(m, c, backend, seed);
    std::ostringstream trace;
    write_trace_csv(trace, r.trace);
    const std::string stem = "k" + std::to_string(k);
    write_file(dir / ("trace_" + stem + ".csv"), trace.str());
    const double final_energy = r.final_estimate().energy;
    const nlohmann::json j{{"k_label", m.ints.kpoint.label},
                           {"seed", seed},
                           {"params", r.params},
                           {"energy_hartree", final_energy},
                           {"casci_energy_hartree", m.casci_energy}};
    write_file(dir / ("vqe_" + stem + ".json"), j.dump(2) + "\n");
    std::cout.precision(10);
    std::cout << m.ints.kpoint.label << ": E_vqe = " << final_energy << " Ha, E_casci = " << m.casci_energy
              << " Ha, error = " << (final_energy - m.casci_energy) * kHartreeToEv << " eV\n";
  }
  return kOk;
}

int run_bands(const RunConfig& c, const std::vector<AnsatzParams>* params) {
  const auto res = run_pipeline(c, params);
  const std::string ts = utc_timestamp();
  write_artifacts(res, ts);
  write_band_csv(std::cout, res.bands);
  return kOk;
}

int cmd_qse(const RunConfig& c, const std::string& params_dir) {
  const fs::path dir = params_dir.empty() ? fs::path(c.output_dir) : fs::path(params_dir);
  std::vector<AnsatzParams> params;
  for (std::size_t k = 0; k < c.integrals.size(); ++k) {
    const auto path = dir / ("vqe_k" + std::to_string(k) + ".json");
    try {
      params.push_back(nlohmann::json::parse(read_file(path)).at("params").get<AnsatzParams>());
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(path.string() + ": " + e.what());
    }
  }
  return run_bands(c, &params);
}

int cmd_calibrate(const RunConfig& c, std::int64_t cycle) {
  if (!c.noise) throw ConfigError("calibrate: the config has no noise model");
  const auto noise = NoiseModel::load(*c.noise);
  const auto cal = measure_calibration(noise, kAnsatzQubits, c.shots_calibration, c.seed, cycle);
  write_file(output_dir(c) / "calibration.json", calibration_to_json(cal) + "\n");
  std::cout << cal.m << '\n';
  return kOk;
}

int cmd_zne(const RunConfig& c, int trials) {
  if (!c.noise) throw ConfigError("zne-study: the config has no noise model");
  const auto noise = NoiseModel::load(*c.noise);
  const auto dir = output_dir(c);
  std::ostringstream csv;
  csv.precision(17);
  csv << "k_label,trial,seed";
  for (int l : c.zne_lambdas) csv << ",energy_lambda" << l;
  csv << ",extrapolated,extrapolated_stderr,exact,improved\n";
  for (std::size_t k = 0; k < c.integrals.size(); ++k) {
    const auto m = build_kpoint_model(load_integrals(c.integrals[k]));
    const auto vqe = run_vqe(m, c, Backend::exact(), derive_seed(c.seed, {k, 0}));
    const auto study = run_zne_study(m, vqe.params, noise, c.zne_lambdas, c.shots_vqe, trials ? trials : c.zne_trials,
                                     derive_seed(c.seed, {k, 2}), c.jobs);
    int improved = 0;
    for (const auto& t : study) {
      csv << m.ints.kpoint.label << ',' << t.index << ',' << t.seed;
      for (const auto& p : t.points) csv << ',' << p.value;
      csv << ',' << t.extrapolated.value << ',' << t.extrapolated.stderr << ',' << t.exact << ',' << t.improved() << '\n';
      improved += t.improved();
    }
    std::cout << m.ints.kpoint.label << ": extrapolation improved " << improved << " of " << study.size() << " trials\n";
  }
  write_file(dir / "zne_study.csv", csv.str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasiparticle band structures from a tapered two-qubit VQE and QSE"};
  app.require_subcommand(1);
  Overrides o;
  std::string params_dir;
  std::int64_t cycle = 0;
  int trials = 0;

  auto* taper_cmd = app.add_subcommand("taper", "Map to qubits, find Z2 symmetries and taper");
  auto* vqe_cmd = app.add_subcommand("vqe", "Optimize the ansatz per k-point");
  auto* qse_cmd = app.add_subcommand("qse", "QSE bands from saved VQE parameters");
  auto* bands_cmd = app.add_subcommand("bands", "Full pipeline: VQE, QSE, mitigation, band assembly");
  auto* cal_cmd = app.add_subcommand("calibrate", "Measure a readout calibration matrix");
  auto* zne_cmd = app.add_subcommand("zne-study", "Seeded zero-noise extrapolation trials");
  for (auto* s : {taper_cmd, vqe_cmd, qse_cmd, bands_cmd, cal_cmd, zne_cmd}) add_common(s, o);
  qse_cmd->add_option("--params-dir", params_dir, "Directory holding vqe_k<i>.json (default: output directory)");
  cal_cmd->add_option("--cycle", cycle, "Measurement cycle");
  zne_cmd->add_option("--trials", trials, "Trial count (default from config)")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    const RunConfig c = load_config(o);
    if (*taper_cmd) return cmd_taper(c);
    if (*vqe_cmd) return cmd_vqe(c);
    if (*qse_cmd) return cmd_qse(c, params_dir);
    if (*bands_cmd) return run_bands(c, nullptr);
    if (*cal_cmd) return cmd_calibrate(c, cycle);
    if (*zne_cmd) return cmd_zne(c, trials);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kModule;
  }
  return kUnexpected;
}
