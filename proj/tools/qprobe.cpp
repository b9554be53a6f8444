// qprobe: command-line front end.
//
//   qprobe run <config>                 time series CSV
//   qprobe sweep <config>               sweep table CSV
//   qprobe preset <name> [--desk|--full] [--out-dir DIR]
//   qprobe oracle [--n N] [--seeds K] [--seed S]
//   qprobe spectrum <config> [--phase initial|final]
//
// Exit codes: 0 success, 1 invalid input, 2 numerical inconsistency.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include "qprobe/config.hpp"
#include "qprobe/experiments/presets.hpp"
#include "qprobe/experiments/sweep.hpp"
#include "qprobe/experiments/time_series.hpp"
#include "qprobe/hamiltonian.hpp"
#include "qprobe/io/config_io.hpp"
#include "qprobe/io/csv.hpp"
#include "qprobe/oracle_suite.hpp"

namespace {

using namespace qprobe;

constexpr double kOracleTolerance = 1e-8;

void emit_series(const TimeSeriesRecord& rec, Units units, const std::string& output) {
  if (output.empty()) {
    write_series_csv(std::cout, rec, units);
  } else {
    write_series_csv(output, rec, units);
    std::cout << output << '\n';
  }
}

void emit_sweep(const SweepTable& table, const SetupConfig& base, Units units, const std::string& output) {
  if (output.empty()) {
    write_sweep_csv(std::cout, table, base, units);
  } else {
    write_sweep_csv(output, table, base, units);
    std::cout << output << '\n';
  }
}

int cmd_run(const std::string& path, const std::string& output_override) {
  const RunManifest m = load_config(path);
  const TimeSeriesRecord rec = run_time_series(m.config, m.measures);
  emit_series(rec, m.units, output_override.empty() ? m.output : output_override);
  return 0;
}

int cmd_sweep(const std::string& path, const std::string& output_override, int threads) {
  const RunManifest m = load_config(path);
  if (m.sweep.empty()) throw ValidationError("config '" + path + "' defines no sweep.<param>.values axis");
  const SweepTable table = run_sweep(m.sweep_grid(), threads > 0 ? threads : m.threads);
  emit_sweep(table, m.config, m.units, output_override.empty() ? m.output : output_override);
  return 0;
}

int cmd_preset(const std::string& name, bool full, const std::string& out_dir, int threads, Units units) {
  const Preset p = preset(name, full ? RunMode::full : RunMode::desk);
  std::filesystem::create_directories(out_dir);
  for (const PresetRun& r : p.runs) {
    const std::string path = (std::filesystem::path(out_dir) / (p.name + "_" + r.label + ".csv")).string();
    write_series_csv(path, run_time_series(r.config, r.measures), units);
    std::cout << path << '\n';
  }
  for (const PresetSweep& s : p.sweeps) {
    const std::string path = (std::filesystem::path(out_dir) / (p.name + "_" + s.label + ".csv")).string();
    write_sweep_csv(path, run_sweep(s.grid, threads), s.grid.base, units);
    std::cout << path << '\n';
  }
  return 0;
}

int cmd_oracle(int n, int seeds, std::uint64_t seed) {
  const OracleReport r = run_oracle_suite(n, seeds, seed);
  std::cout << "# rng=" << kOracleRngName << " seed=" << seed << " n=" << n << " configs=" << seeds
            << " times=" << r.times << '\n';
  std::cout << "max |S_gaussian - S_dense| ground  = " << format_number(r.ground_deviation) << '\n';
  std::cout << "max |S_gaussian - S_dense| evolved = " << format_number(r.evolved_deviation) << '\n';
  std::cout << "max |I_gaussian - I_dense| (Q, P)  = " << format_number(r.mi_deviation) << '\n';
  std::cout << "max deviation = " << format_number(r.max_deviation()) << '\n';
  if (!(r.max_deviation() < kOracleTolerance)) {
    std::cerr << "error: oracle deviation exceeds " << kOracleTolerance << '\n';
    return 2;
  }
  return 0;
}

int cmd_spectrum(const std::string& path, const std::string& phase) {
  const RunManifest m = load_config(path);
  if (phase != "initial" && phase != "final") throw ValidationError("phase must be initial or final");
  const Phase ph = phase == "initial" ? Phase::initial : Phase::final;
  const SpectrumResult s = single_particle_spectrum(build_hamiltonian(m.config, ph));
  std::cout << "# phase=" << phase << '\n';
  std::cout << "# mzm_splitting=" << format_number(mzm_splitting(m.config)) << '\n';
  std::cout << "k,energy\n";
  for (Eigen::Index k = 0; k < s.energies.size(); ++k) std::cout << k << ',' << format_number(s.energies(k)) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quench-probe entanglement dynamics of free-fermion chains"};
  app.require_subcommand(1);

  std::string config_path, output, phase = "final", out_dir = ".", units_str = "log2", preset_name;
  int threads = 0, n = 6, seeds = 10;
  std::uint64_t seed = 20240601;
  bool desk = false, full = false;

  auto* run = app.add_subcommand("run", "time series of one configuration");
  run->add_option("config", config_path, "config file")->required();
  run->add_option("-o,--output", output, "output CSV (overrides the config's output key)");

  auto* sweep = app.add_subcommand("sweep", "parameter sweep");
  sweep->add_option("config", config_path, "config file")->required();
  sweep->add_option("-o,--output", output, "output CSV (overrides the config's output key)");
  sweep->add_option("-j,--threads", threads, "pool width (default $QPROBE_THREADS or all cores)");

  auto* pre = app.add_subcommand("preset", "run a named figure preset");
  pre->add_option("name", preset_name, "preset name")->required();
  auto* desk_flag = pre->add_flag("--desk", desk, "reduced CI variant (default)");
  pre->add_flag("--full", full, "figure-note sizes")->excludes(desk_flag);
  pre->add_option("--out-dir", out_dir, "directory for the CSV files");
  pre->add_option("-j,--threads", threads, "pool width for sweeps");
  pre->add_option("--units", units_str, "log2 or nats");

  auto* oracle = app.add_subcommand("oracle", "Gaussian vs dense equivalence on random configurations");
  oracle->add_option("--n", n, "sites per configuration (3..10)");
  oracle->add_option("--seeds", seeds, "number of random configurations");
  oracle->add_option("--seed", seed, "seed of the mt19937_64 generator");

  auto* spec = app.add_subcommand("spectrum", "quasiparticle energies and MZM splitting");
  spec->add_option("config", config_path, "config file")->required();
  spec->add_option("--phase", phase, "initial or final");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run) return cmd_run(config_path, output);
    if (*sweep) return cmd_sweep(config_path, output, threads);
    if (*pre) return cmd_preset(preset_name, full, out_dir, threads, parse_units(units_str));
    if (*oracle) return cmd_oracle(n, seeds, seed);
    if (*spec) return cmd_spectrum(config_path, phase);
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
