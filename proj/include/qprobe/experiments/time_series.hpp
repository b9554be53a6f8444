#pragma once

// The quench pipeline: ground (or thermal) state of H^i, exact evolution
// under H^f, region entropies of Q, X, P and Q u P at each requested time.

#include <algorithm>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qprobe/config.hpp"
#include "qprobe/entanglement.hpp"
#include "qprobe/experiments/analysis.hpp"
#include "qprobe/gaussian_state.hpp"
#include "qprobe/hamiltonian.hpp"
#include "qprobe/measures.hpp"
#include "qprobe/region.hpp"

namespace qprobe {

inline constexpr int kMaxSitesPerPoint = 2000;
inline constexpr std::size_t kMaxTimesPerPoint = 100000;

/// Raw region entropies (nats) at one instant.
struct RegionEntropies {
  double s_q = 0, s_x = 0, s_p = 0, s_qp = 0;
  double s2_q = 0, s2_x = 0, s2_p = 0, s2_qp = 0;

  double mutual_information() const { return s_q + s_p - s_qp; }
  double renyi_mutual_information() const { return s2_q + s2_p - s2_qp; }

  double value(Measure m) const {
    switch (m) {
      case Measure::S_Q: return s_q;
      case Measure::S_X: return s_x;
      case Measure::S_P: return s_p;
      case Measure::S_QP: return s_qp;
      case Measure::I: return mutual_information();
      case Measure::S2_Q: return s2_q;
      case Measure::S2_X: return s2_x;
      case Measure::S2_P: return s2_p;
      case Measure::S2_QP: return s2_qp;
      case Measure::I2: return renyi_mutual_information();
    }
    return 0.0;
  }
};

// One quench of one configuration. Construction builds both Hamiltonians,
// the initial state and the propagator; entropies() may then be called at
// any time and from several threads.
//
// For a pure global state S(R) = S(complement of R), so each region is
// evaluated on whichever of R and its complement is smaller. All chosen
// regions are served by one covariance block per time.
class QuenchSimulation {
 public:
  QuenchSimulation(const SetupConfig& cfg, const MeasureSet& measures) : cfg_(cfg) {
    cfg_.validate();
    if (cfg_.n_total > kMaxSitesPerPoint) {
      throw ResourceError("n_total = " + std::to_string(cfg_.n_total) + " exceeds the per-point cap of " +
                          std::to_string(kMaxSitesPerPoint) + " sites");
    }
    if (cfg_.times.size() > kMaxTimesPerPoint) throw ResourceError("time grid exceeds the per-point budget");

    for (Measure m : measures) {
      renyi_ |= is_renyi(m);
      von_neumann_ |= !is_renyi(m);
      switch (m) {
        case Measure::S_Q: case Measure::S2_Q: want_q_ = true; break;
        case Measure::S_X: case Measure::S2_X: want_x_ = true; break;
        case Measure::S_P: case Measure::S2_P: want_p_ = true; break;
        case Measure::S_QP: case Measure::S2_QP: want_qp_ = true; break;
        case Measure::I: case Measure::I2: want_q_ = want_p_ = want_qp_ = true; break;
      }
    }

    const SpectrumResult init = single_particle_spectrum(build_hamiltonian(cfg_, Phase::initial));
    const CovarianceMatrix c0 = thermal_state(init, cfg_.temperature);
    pure_ = c0.known_pure;
    prop_.emplace(single_particle_spectrum(build_hamiltonian(cfg_, Phase::final)));

    const int n = cfg_.n_total;
    auto pick = [&](const Region& r) {
      if (!pure_) return r;
      Region c = r.complement(n);
      return c.size() < r.size() ? c : r;
    };
    eval_q_ = pick(region_q(cfg_));
    eval_x_ = pick(region_x(cfg_));
    eval_p_ = pick(region_p(cfg_));
    eval_qp_ = pick(region_qp(cfg_));
    Region rows;
    if (want_q_) rows = rows.united(eval_q_);
    if (want_x_) rows = rows.united(eval_x_);
    if (want_p_) rows = rows.united(eval_p_);
    if (want_qp_) rows = rows.united(eval_qp_);
    evolver_.emplace(*prop_, c0, rows);
  }

  const SetupConfig& config() const { return cfg_; }
  bool pure_initial_state() const { return pure_; }
  const Propagator& propagator() const { return *prop_; }

  RegionEntropies entropies(double t) const {
    const CovarianceMatrix block = evolver_->block(t);
    RegionEntropies e;
    auto eval = [&](bool wanted, const Region& r, double& vn, double& r2) {
      if (!wanted || r.empty()) return;
      const ModeSpectrum s = mode_spectrum(sub_block(block, evolver_->rows(), r));
      if (von_neumann_) vn = von_neumann(s);
      if (renyi_) r2 = renyi(s, 2.0);
    };
    eval(want_q_, eval_q_, e.s_q, e.s2_q);
    eval(want_x_, eval_x_, e.s_x, e.s2_x);
    eval(want_p_, eval_p_, e.s_p, e.s2_p);
    eval(want_qp_, eval_qp_, e.s_qp, e.s2_qp);
    return e;
  }

 private:
  SetupConfig cfg_;
  bool want_q_ = false, want_x_ = false, want_p_ = false, want_qp_ = false;
  bool von_neumann_ = false, renyi_ = false;
  bool pure_ = false;
  Region eval_q_, eval_x_, eval_p_, eval_qp_;
  std::optional<Propagator> prop_;
  std::optional<BlockEvolver> evolver_;
};

// Baseline-subtracted columns added next to the raw measures.
inline std::string delta_name(Measure m) { return "d" + measure_name(m); }

struct TimeSeriesRecord {
  SetupConfig config;
  MeasureSet measures;
  EntanglementSeries series;

  // Derived scalars, in nats, with the window they were extracted from.
  std::optional<PlateauEstimate> ds_p_plateau;
  std::optional<PlateauEstimate> di_plateau;
  std::optional<double> onset;
  double window_begin = 0.0;
  double window_end = 0.0;
};

// Runs the pipeline over config.times. Adds dS_P(t) = S_P(t) - S_P(0),
// dI(t) = I(t) - I(t0) (and the Renyi twins) whenever the base measure is
// requested; the baselines are evaluated directly at 0 and t0.
inline TimeSeriesRecord run_time_series(const SetupConfig& cfg, const MeasureSet& measures) {
  cfg.validate();
  if (cfg.times.empty()) throw ValidationError("invalid config: time grid is empty");
  TimeSeriesRecord rec;
  rec.config = cfg;
  rec.measures = measures;
  rec.series.times = cfg.times;
  if (measures.empty()) return rec;

  QuenchSimulation sim(cfg, measures);
  std::vector<RegionEntropies> values;
  values.reserve(cfg.times.size());
  for (double t : cfg.times) values.push_back(sim.entropies(t));
  const RegionEntropies at_zero = cfg.times.front() == 0.0 ? values.front() : sim.entropies(0.0);
  const RegionEntropies at_t0 = sim.entropies(cfg.t0);

  for (Measure m : measures) {
    std::vector<double> col;
    col.reserve(values.size());
    for (const auto& v : values) col.push_back(v.value(m));
    rec.series.add_column(measure_name(m), col);
  }
  for (Measure m : measures) {
    double base = 0.0;
    if (m == Measure::S_P || m == Measure::S2_P) {
      base = at_zero.value(m);
    } else if (m == Measure::I || m == Measure::I2) {
      base = at_t0.value(m);
    } else {
      continue;
    }
    std::vector<double> col = rec.series.at(measure_name(m));
    for (double& x : col) x -= base;
    rec.series.add_column(delta_name(m), std::move(col));
  }

  const auto [wa, wb] = default_plateau_window(rec.series.times);
  rec.window_begin = wa;
  rec.window_end = wb;
  if (rec.series.has("dS_P")) rec.ds_p_plateau = extract_plateau(rec.series.times, rec.series.at("dS_P"), wa, wb);
  if (rec.series.has("dI")) rec.di_plateau = extract_plateau(rec.series.times, rec.series.at("dI"), wa, wb);
  // S_P is frozen (to roundoff) until the first quasiparticles enter P, so
  // its raw slope needs no smoothing. The MI oscillates on a small initial
  // plateau reached right after the quench; it is smoothed and that first
  // rise is skipped.
  if (rec.series.has("dS_P")) {
    rec.onset = detect_onset(rec.series.times, rec.series.at("dS_P"));
  } else if (rec.series.has("dI")) {
    rec.onset = smoothed_onset(rec.series.times, rec.series.at("dI"), kDefaultOnsetThreshold, 11, 3, true);
  }
  return rec;
}

// Height of the initial MI plateau: I at the first time, after the leading
// rise, where the smoothed slope of I exceeds the onset threshold. NaN when
// the threshold is never crossed within config.times.
inline double initial_mi_plateau(const SetupConfig& cfg, int window = 11, int poly_order = 3,
                                 double slope_threshold = kDefaultOnsetThreshold) {
  const TimeSeriesRecord r = run_time_series(cfg, {Measure::I});
  const std::vector<double>& mi = r.series.at("I");
  const auto onset = smoothed_onset(r.series.times, mi, slope_threshold, window, poly_order, true);
  if (!onset) return std::numeric_limits<double>::quiet_NaN();
  const auto it = std::find(r.series.times.begin(), r.series.times.end(), *onset);
  return mi[static_cast<std::size_t>(it - r.series.times.begin())];
}

// S_P(0) alone: only the initial Hamiltonian is diagonalized, and for a pure
// initial state the smaller of P and its complement is evaluated.
inline double initial_probe_entropy(const SetupConfig& cfg, EntropyKind kind = {}) {
  cfg.validate();
  if (cfg.n_total > kMaxSitesPerPoint) throw ResourceError("n_total exceeds the per-point cap");
  const SpectrumResult init = single_particle_spectrum(build_hamiltonian(cfg, Phase::initial));
  Region r = region_p(cfg);
  if (cfg.temperature == 0.0) {
    Region c = r.complement(cfg.n_total);
    if (c.size() < r.size()) r = c;
  }
  const ModeSpectrum s = mode_spectrum(thermal_block(init, cfg.temperature, r));
  return kind(s);
}

}  // namespace qprobe
