#pragma once

// Randomized equivalence checks between the Gaussian pipeline and the dense
// oracle. Random numbers come from std::mt19937_64; a draw x maps to a
// uniform double in [0, 1) as (x >> 11) * 2^-53, so the configurations are
// reproducible across standard libraries.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "qprobe/config.hpp"
#include "qprobe/ed_oracle.hpp"
#include "qprobe/entanglement.hpp"
#include "qprobe/gaussian_state.hpp"
#include "qprobe/hamiltonian.hpp"
#include "qprobe/region.hpp"

namespace qprobe {

inline constexpr const char* kOracleRngName = "mt19937_64";

class OracleRng {
 public:
  explicit OracleRng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// integer in [lo, hi]
  int integer(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<int>(engine_() % span);
  }

 private:
  std::mt19937_64 engine_;
};

inline constexpr double kOracleMinGap = 0.05;

// A random three-region setup on n sites whose initial Hamiltonian has a
// single-particle gap of at least kOracleMinGap. Every coupling is drawn, so
// all Hamiltonian terms (including H_gg on about half the draws) are exercised.
inline SetupConfig random_gapped_config(int n_sites, OracleRng& rng) {
  if (n_sites < 3) throw ValidationError("random oracle configs need at least 3 sites");
  for (int attempt = 0; attempt < 1000; ++attempt) {
    SetupConfig c;
    c.n_total = n_sites;
    c.l = rng.integer(1, n_sites - 2);
    c.d = rng.integer(0, n_sites - c.l - 1);
    c.mu_i = rng.uniform(-3.0, 3.0);
    c.tau_i = rng.uniform(-2.0, 2.0);
    c.delta_i = rng.uniform(-2.0, 2.0);
    c.mu_f = rng.uniform(-3.0, 3.0);
    c.tau_f = rng.uniform(-2.0, 2.0);
    c.delta_f = rng.uniform(-2.0, 2.0);
    c.mu_p = rng.uniform(-2.0, 2.0);
    c.tau_p = rng.uniform(0.5, 1.5);
    c.tau_t = rng.uniform(-1.0, 1.0);
    c.tau_gg = rng.uniform() < 0.5 ? 0.0 : rng.uniform(0.0, 0.5);
    c.t0 = 0.0;
    if (single_particle_spectrum(build_hamiltonian(c, Phase::initial)).energies(0) >= kOracleMinGap) return c;
  }
  throw NumericalError("could not draw a gapped random configuration");
}

/// Every contiguous block [a, b] of the chain.
inline std::vector<Region> contiguous_regions(int n_sites) {
  std::vector<Region> out;
  for (int a = 0; a < n_sites; ++a) {
    for (int len = 1; a + len <= n_sites; ++len) out.push_back(Region::range(a, len));
  }
  return out;
}

struct OracleReport {
  int n_sites = 0;
  int configs = 0;
  std::uint64_t seed = 0;
  int times = 0;
  double ground_deviation = 0.0;   // max |S_gauss - S_dense| at t = 0
  double evolved_deviation = 0.0;  // same over the sampled times
  double mi_deviation = 0.0;       // MI(Q, P) over all times

  double max_deviation() const { return std::max({ground_deviation, evolved_deviation, mi_deviation}); }
};

// Sample times of the evolved comparison: 20 points on (0, 10].
inline std::vector<double> oracle_times(int count = 20) {
  std::vector<double> t;
  for (int k = 1; k <= count; ++k) t.push_back(10.0 * k / count);
  return t;
}

// Quench comparison for one configuration, folded into `rep`.
inline void compare_quench(const SetupConfig& cfg, const std::vector<double>& times, OracleReport& rep) {
  const int n = cfg.n_total;
  const CovarianceMatrix c0 = ground_state(build_hamiltonian(cfg, Phase::initial));
  const Propagator prop = make_propagator(build_hamiltonian(cfg, Phase::final));

  const ed::DenseState psi0 = ed::DenseSpectrum(ed::build_dense(cfg, Phase::initial)).ground_state();
  const ed::DenseSpectrum final_spec(ed::build_dense(cfg, Phase::final));

  const std::vector<Region> regions = contiguous_regions(n);
  const Region q = region_q(cfg);
  const Region p = region_p(cfg);

  std::vector<double> all_times{0.0};
  all_times.insert(all_times.end(), times.begin(), times.end());
  for (double t : all_times) {
    const CovarianceMatrix c = prop.evolve(c0, t);
    const ed::DenseState psi = final_spec.evolve(psi0, t);
    double& slot = t == 0.0 ? rep.ground_deviation : rep.evolved_deviation;
    for (const Region& r : regions) {
      slot = std::max(slot, std::abs(entropy(c, r) - ed::dense_entropy(psi, r)));
    }
    rep.mi_deviation =
        std::max(rep.mi_deviation, std::abs(mutual_information(c, q, p) - ed::dense_mutual_information(psi, q, p)));
  }
}

/// n_configs random gapped quenches on n_sites sites, seeded deterministically.
inline OracleReport run_oracle_suite(int n_sites, int n_configs, std::uint64_t seed) {
  ed::check_size(n_sites);
  if (n_configs <= 0) throw ValidationError("oracle suite needs at least one configuration");
  OracleRng rng(seed);
  OracleReport rep;
  rep.n_sites = n_sites;
  rep.configs = n_configs;
  rep.seed = seed;
  const std::vector<double> times = oracle_times();
  rep.times = static_cast<int>(times.size());
  for (int k = 0; k < n_configs; ++k) compare_quench(random_gapped_config(n_sites, rng), times, rep);
  return rep;
}

// Thermal check: entropies of all contiguous regions of the Gibbs state of
// H^i against thermal_state. Returns the max deviation.
inline double thermal_oracle_deviation(const SetupConfig& cfg, double temperature) {
  const CovarianceMatrix c = thermal_state(build_hamiltonian(cfg, Phase::initial), temperature);
  const Eigen::MatrixXcd rho = ed::DenseSpectrum(ed::build_dense(cfg, Phase::initial)).gibbs(temperature);
  double dev = 0.0;
  for (const Region& r : contiguous_regions(cfg.n_total)) {
    dev = std::max(dev, std::abs(entropy(c, r) - ed::dense_entropy(rho, cfg.n_total, r)));
  }
  return dev;
}

}  // namespace qprobe
