#pragma once

// Parameter sweeps: a Cartesian grid over SetupConfig fields, one derived
// scalar per point, executed on a small work pool and merged in grid order.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "qprobe/config.hpp"
#include "qprobe/experiments/analysis.hpp"
#include "qprobe/experiments/time_series.hpp"
#include "qprobe/hamiltonian.hpp"

namespace qprobe {

inline constexpr std::size_t kDefaultSweepBudget = 10000;

// Name of the pseudo-axis that spans the evaluation times of one simulation.
inline constexpr std::string_view kTimeAxis = "t";

enum class SweepMeasure {
  dI_final,      // I(t_max) - I(t0)
  dS_P_final,    // S_P(t_max) - S_P(0)
  dI_plateau,    // mean of dI over the last 20% of the time grid
  dS_P_plateau,  // mean of dS_P over the last 20% of the time grid
  S_P_initial,   // S_P(0)
  I_initial,     // I at the MI onset (height of the initial MI plateau)
  onset,         // onset time from dS_P
  mzm_splitting, // 2 e_0 of the isolated final Q block
  I_t,           // raw I at every value of the t axis
  S_P_t,         // raw S_P at every value of the t axis
};

inline constexpr std::array<SweepMeasure, 10> kAllSweepMeasures = {
    SweepMeasure::dI_final,    SweepMeasure::dS_P_final, SweepMeasure::dI_plateau,    SweepMeasure::dS_P_plateau,
    SweepMeasure::S_P_initial, SweepMeasure::I_initial,  SweepMeasure::onset,         SweepMeasure::mzm_splitting,
    SweepMeasure::I_t,         SweepMeasure::S_P_t};

inline std::string sweep_measure_name(SweepMeasure m) {
  switch (m) {
    case SweepMeasure::dI_final: return "dI_final";
    case SweepMeasure::dS_P_final: return "dS_P_final";
    case SweepMeasure::dI_plateau: return "dI_plateau";
    case SweepMeasure::dS_P_plateau: return "dS_P_plateau";
    case SweepMeasure::S_P_initial: return "S_P_initial";
    case SweepMeasure::I_initial: return "I_initial";
    case SweepMeasure::onset: return "onset";
    case SweepMeasure::mzm_splitting: return "mzm_splitting";
    case SweepMeasure::I_t: return "I_t";
    case SweepMeasure::S_P_t: return "S_P_t";
  }
  return "?";
}

inline SweepMeasure parse_sweep_measure(std::string_view name) {
  for (SweepMeasure m : kAllSweepMeasures) {
    if (sweep_measure_name(m) == name) return m;
  }
  throw ValidationError("unknown sweep measure '" + std::string(name) + "'");
}

inline bool is_per_time(SweepMeasure m) { return m == SweepMeasure::I_t || m == SweepMeasure::S_P_t; }

/// Entropy-valued measures; the others are times or energies and are never rescaled.
inline bool is_entropy(SweepMeasure m) {
  return m != SweepMeasure::onset && m != SweepMeasure::mzm_splitting;
}

struct SweepAxis {
  std::string param;
  std::vector<double> values;

  bool operator==(const SweepAxis&) const = default;
};

struct SweepGrid {
  SetupConfig base;  // base.times is the time grid of every point
  std::vector<SweepAxis> axes;
  SweepMeasure measure = SweepMeasure::dI_final;
  std::size_t budget = kDefaultSweepBudget;

  std::size_t size() const {
    std::size_t n = 1;
    for (const auto& a : axes) n *= a.values.size();
    return n;
  }

  void validate() const {
    if (axes.empty()) throw ValidationError("sweep needs at least one axis");
    for (std::size_t i = 0; i < axes.size(); ++i) {
      const SweepAxis& a = axes[i];
      if (a.values.empty()) throw ValidationError("sweep axis '" + a.param + "' has no values");
      if (a.param == kTimeAxis) {
        if (!is_per_time(measure)) {
          throw ValidationError("the t axis needs a per-time measure (I_t or S_P_t)");
        }
        if (i + 1 != axes.size()) throw ValidationError("the t axis must be the last sweep axis");
        for (std::size_t k = 0; k < a.values.size(); ++k) {
          if (!(a.values[k] >= 0.0) || (k > 0 && !(a.values[k] > a.values[k - 1]))) {
            throw ValidationError("t axis values must be non-negative and strictly increasing");
          }
        }
      } else if (!is_setup_field(a.param)) {
        throw ValidationError("unknown sweep parameter '" + a.param + "'");
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (axes[j].param == a.param) throw ValidationError("duplicate sweep axis '" + a.param + "'");
      }
    }
    if (is_per_time(measure) && axes.back().param != kTimeAxis) {
      throw ValidationError("measure " + sweep_measure_name(measure) + " needs a t axis");
    }
    if (size() > budget) {
      throw ResourceError("sweep has " + std::to_string(size()) + " points, budget is " + std::to_string(budget));
    }
  }
};

struct SweepRow {
  std::vector<double> coords;  // one value per axis, in axis order
  double value = std::numeric_limits<double>::quiet_NaN();
  std::string error;  // empty on success

  bool ok() const { return error.empty(); }
};

struct SweepTable {
  std::vector<std::string> axes;
  SweepMeasure measure = SweepMeasure::dI_final;
  std::vector<SweepRow> rows;  // lexicographic in grid indices, last axis fastest
};

/// Default pool width: $QPROBE_THREADS when set, else the hardware concurrency.
inline int default_thread_count() {
  if (const char* env = std::getenv("QPROBE_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

// Runs body(i) for i in [0, count) on `width` threads. Work is handed out
// through an atomic counter; the caller owns per-index output slots.
template <class Body>
void parallel_for(std::size_t count, int width, Body&& body) {
  width = std::max(1, std::min<int>(width, static_cast<int>(count)));
  if (width == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(width));
  for (int w = 0; w < width; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

namespace detail {

inline double final_time(const SetupConfig& c) {
  if (c.times.empty()) throw ValidationError("invalid config: time grid is empty");
  return c.times.back();
}

// Scalar measures of one configuration, in nats (entropies) or natural units.
inline double evaluate_scalar(const SetupConfig& cfg, SweepMeasure m) {
  cfg.validate();
  switch (m) {
    case SweepMeasure::mzm_splitting: return mzm_splitting(cfg);
    case SweepMeasure::dI_final: {
      QuenchSimulation sim(cfg, {Measure::I});
      return sim.entropies(final_time(cfg)).mutual_information() - sim.entropies(cfg.t0).mutual_information();
    }
    case SweepMeasure::dS_P_final: {
      QuenchSimulation sim(cfg, {Measure::S_P});
      return sim.entropies(final_time(cfg)).s_p - sim.entropies(0.0).s_p;
    }
    case SweepMeasure::S_P_initial: return initial_probe_entropy(cfg);
    case SweepMeasure::dI_plateau: {
      const TimeSeriesRecord r = run_time_series(cfg, {Measure::I});
      return r.di_plateau->mean;
    }
    case SweepMeasure::dS_P_plateau: {
      const TimeSeriesRecord r = run_time_series(cfg, {Measure::S_P});
      return r.ds_p_plateau->mean;
    }
    case SweepMeasure::onset: {
      const TimeSeriesRecord r = run_time_series(cfg, {Measure::S_P});
      return r.onset ? *r.onset : std::numeric_limits<double>::quiet_NaN();
    }
    case SweepMeasure::I_initial: return initial_mi_plateau(cfg);
    case SweepMeasure::I_t:
    case SweepMeasure::S_P_t: break;
  }
  throw ValidationError("measure " + sweep_measure_name(m) + " is not a scalar");
}

}  // namespace detail

// Evaluates every grid point. Failures of a point (invalid or degenerate
// configuration, numerical inconsistency) become error rows. Rows come back
// in lexicographic grid order whatever the pool width.
inline SweepTable run_sweep(const SweepGrid& grid, int width = 0) {
  grid.validate();
  if (width <= 0) width = default_thread_count();

  const bool has_t = grid.axes.back().param == kTimeAxis;
  const std::size_t n_axes = grid.axes.size();
  const std::size_t n_param_axes = has_t ? n_axes - 1 : n_axes;
  const std::size_t n_t = has_t ? grid.axes.back().values.size() : 1;
  std::size_t n_points = 1;
  for (std::size_t a = 0; a < n_param_axes; ++a) n_points *= grid.axes[a].values.size();

  SweepTable table;
  table.measure = grid.measure;
  for (const auto& a : grid.axes) table.axes.push_back(a.param);
  table.rows.resize(n_points * n_t);

  parallel_for(n_points, width, [&](std::size_t p) {
    // Decode the point index, last parameter axis fastest.
    std::vector<double> coords(n_param_axes);
    std::size_t rest = p;
    for (std::size_t a = n_param_axes; a-- > 0;) {
      const auto& vals = grid.axes[a].values;
      coords[a] = vals[rest % vals.size()];
      rest /= vals.size();
    }
    for (std::size_t k = 0; k < n_t; ++k) {
      SweepRow& row = table.rows[p * n_t + k];
      row.coords = coords;
      if (has_t) row.coords.push_back(grid.axes.back().values[k]);
    }
    try {
      SetupConfig cfg = grid.base;
      for (std::size_t a = 0; a < n_param_axes; ++a) set_field(cfg, grid.axes[a].param, coords[a]);
      if (has_t) {
        // The t axis replaces the time grid; the MI baseline is not used.
        cfg.times.clear();
        const Measure m = grid.measure == SweepMeasure::I_t ? Measure::I : Measure::S_P;
        QuenchSimulation sim(cfg, {m});
        for (std::size_t k = 0; k < n_t; ++k) {
          table.rows[p * n_t + k].value = sim.entropies(grid.axes.back().values[k]).value(m);
        }
      } else {
        table.rows[p].value = detail::evaluate_scalar(cfg, grid.measure);
      }
    } catch (const std::exception& e) {
      for (std::size_t k = 0; k < n_t; ++k) {
        SweepRow& row = table.rows[p * n_t + k];
        row.value = std::numeric_limits<double>::quiet_NaN();
        row.error = e.what();
      }
    }
  });
  return table;
}

}  // namespace qprobe
