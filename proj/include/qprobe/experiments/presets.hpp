#pragma once

// Named parameter sets reproducing each figure. Every preset comes in a desk
// variant (small enough for CI) and a full variant carrying the figure note
// values verbatim. Desk reductions are listed per preset.

#include <string>
#include <string_view>
#include <vector>

#include "qprobe/config.hpp"
#include "qprobe/experiments/sweep.hpp"
#include "qprobe/measures.hpp"

namespace qprobe {

enum class RunMode { desk, full };

inline std::string run_mode_name(RunMode m) { return m == RunMode::full ? "full" : "desk"; }

inline RunMode parse_run_mode(std::string_view s) {
  if (s == "desk") return RunMode::desk;
  if (s == "full") return RunMode::full;
  throw ValidationError("unknown mode '" + std::string(s) + "' (expected desk or full)");
}

// One time series of a preset. t_max and n_times define config.times.
struct PresetRun {
  std::string label;
  SetupConfig config;
  double t_max = 0.0;
  int n_times = 0;
  MeasureSet measures;
};

struct PresetSweep {
  std::string label;
  SweepGrid grid;
  double t_max = 0.0;  // time grid of every point (unused by the t axis)
  int n_times = 0;
};

struct Preset {
  std::string name;
  RunMode mode = RunMode::desk;
  std::vector<PresetRun> runs;
  std::vector<PresetSweep> sweeps;
};

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"fig1",           "fig2",        "fig2-inset",      "fig3",
                                                 "fig4",           "smB-offset",  "smB-scaling",     "smC-dispersion",
                                                 "smD-sensitivity", "smD-tss",    "smD-interplay",   "smE-renyi"};
  return names;
}

namespace detail {

inline const MeasureSet kVonNeumannSet = {Measure::S_Q, Measure::S_X, Measure::S_P, Measure::S_QP, Measure::I};

// (mu_i, tau_i = delta_i = tau_p) -> (mu_f, tau_f = delta_f); l = 4, d = 100, tau_t = 1.
inline SetupConfig quench_to_tss(double tau_f, int n_total) {
  SetupConfig c;
  c.n_total = n_total;
  c.l = 4;
  c.d = 100;
  c.mu_i = 20.0;
  c.tau_i = c.delta_i = 1.0;
  c.mu_f = 0.0;
  c.tau_f = c.delta_f = tau_f;
  c.mu_p = 0.0;
  c.tau_p = 1.0;
  c.tau_t = 1.0;
  c.t0 = 10.0;
  return c;
}

inline PresetRun make_run(std::string label, SetupConfig c, double t_max, int n_times, MeasureSet m) {
  c.times = linspace_times(t_max, n_times);
  return {std::move(label), std::move(c), t_max, n_times, std::move(m)};
}

inline PresetSweep make_sweep(std::string label, SetupConfig base, double t_max, int n_times,
                              std::vector<SweepAxis> axes, SweepMeasure measure) {
  base.times = linspace_times(t_max, n_times);
  SweepGrid g;
  g.base = std::move(base);
  g.axes = std::move(axes);
  g.measure = measure;
  return {std::move(label), std::move(g), t_max, n_times};
}

inline std::vector<double> arange(double first, double step, int count) {
  std::vector<double> v;
  for (int i = 0; i < count; ++i) v.push_back(first + step * i);
  return v;
}

inline std::string format_label(const char* prefix, double v) {
  std::string s = std::to_string(v);
  s.erase(s.find_last_not_of('0') + 1);
  if (!s.empty() && s.back() == '.') s.pop_back();
  return prefix + s;
}

}  // namespace detail

// Desk reductions (full values in parentheses):
//   fig1, fig2-inset, smE-renyi: 201 time points (801); same N, horizon 800.
//   fig2: 4 x 4 grid of (mu_f, delta_f) (11 x 11).
//   fig3: N = 800, t_sf = 1200 (N = 2000, t_sf = 3000); 5 x 5 grid (11 x 11).
//   fig4: 20 x 20 grid of (d, t) (50 x 50).
//   smB-offset: d in {25, ..., 400}, 5 values (9 values); N = 2000 in both.
//   smB-scaling: N = 800, d up to 200 (N = 2000, d up to 800).
//   smC-dispersion: N = 800 (1000).
//   smD-sensitivity: tau_gg runs at N = 800, horizon 600 (N = 2000, 3000).
//   smD-tss, smD-interplay: 201 time points (801).
inline Preset preset(std::string_view name, RunMode mode = RunMode::desk) {
  using detail::make_run;
  using detail::make_sweep;
  const bool full = mode == RunMode::full;
  Preset p;
  p.name = std::string(name);
  p.mode = mode;
  const MeasureSet vn = detail::kVonNeumannSet;

  if (name == "fig1") {
    SetupConfig c = detail::quench_to_tss(11.76, 500);
    const int nt = full ? 801 : 201;
    p.runs.push_back(make_run("mzm", c, 800.0, nt, vn));
    c.mu_p = c.tau_f;
    p.runs.push_back(make_run("bulk", c, 800.0, nt, vn));
  } else if (name == "fig2-inset") {
    SetupConfig c = detail::quench_to_tss(20.0, 500);
    const int nt = full ? 801 : 201;
    p.runs.push_back(make_run("mzm", c, 800.0, nt, vn));
    c.mu_p = c.tau_f;
    p.runs.push_back(make_run("bulk", c, 800.0, nt, vn));
  } else if (name == "fig2") {
    SetupConfig c = detail::quench_to_tss(20.0, 700);
    c.l = 35;
    std::vector<double> mu = full ? detail::arange(0.0, 2.0, 11) : std::vector<double>{0.0, 5.0, 10.0, 15.0};
    std::vector<double> delta = full ? detail::arange(0.0, 2.0, 11) : std::vector<double>{5.0, 10.0, 15.0, 20.0};
    p.sweeps.push_back(make_sweep("dI", c, 1100.0, 2, {{"mu_f", mu}, {"delta_f", delta}}, SweepMeasure::dI_final));
    p.sweeps.push_back(make_sweep("splitting", c, 1100.0, 2, {{"mu_f", mu}, {"delta_f", delta}},
                                  SweepMeasure::mzm_splitting));
  } else if (name == "fig3") {
    SetupConfig c = detail::quench_to_tss(20.0, full ? 2000 : 800);
    c.t0 = 80.0;
    const std::vector<double> mu_i = full ? std::vector<double>{0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 5.0, 10.0, 15.0, 20.0}
                                          : std::vector<double>{0.5, 1.5, 3.0, 10.0, 20.0};
    const std::vector<double> mu_p = full ? detail::arange(0.0, 0.3, 11) : std::vector<double>{0.0, 0.5, 0.9, 1.5, 3.0};
    p.sweeps.push_back(make_sweep("dI", c, full ? 3000.0 : 1200.0, 2, {{"mu_i", mu_i}, {"mu_p", mu_p}},
                                  SweepMeasure::dI_final));
  } else if (name == "fig4") {
    SetupConfig c = detail::quench_to_tss(11.76, 350);
    c.l = 100;
    const int n = full ? 50 : 20;
    const double step = full ? 4.0 : 10.0;
    p.sweeps.push_back(make_sweep("I", c, step * (n - 1), n,
                                  {{"d", detail::arange(0.0, step, n)}, {"t", detail::arange(0.0, step, n)}},
                                  SweepMeasure::I_t));
  } else if (name == "smB-offset") {
    SetupConfig c = detail::quench_to_tss(20.0, 2000);
    c.t0 = 0.0;
    std::vector<double> d = full ? std::vector<double>{25, 35, 50, 70, 100, 140, 200, 280, 400}
                                 : std::vector<double>{25, 50, 100, 200, 400};
    p.sweeps.push_back(make_sweep("S_P0", c, 1.0, 1, {{"d", d}}, SweepMeasure::S_P_initial));
  } else if (name == "smB-scaling") {
    SetupConfig c = detail::quench_to_tss(20.0, full ? 2000 : 800);
    c.t0 = 0.0;
    std::vector<double> d = full ? std::vector<double>{25, 50, 100, 200, 400, 800} : std::vector<double>{25, 50, 100, 200};
    const double t_max = 1.25 * d.back() + 10.0;
    p.sweeps.push_back(make_sweep("I_t0", c, t_max, static_cast<int>(t_max) + 1, {{"d", d}}, SweepMeasure::I_initial));
  } else if (name == "smC-dispersion") {
    const int n = full ? 1000 : 800;
    for (int d : {50, 100, 200}) {
      SetupConfig c = detail::quench_to_tss(20.0, n);
      c.d = d;
      c.t0 = 0.8 * d;
      p.runs.push_back(make_run(detail::format_label("d", d), c, 600.0, full ? 1201 : 301, {Measure::I}));
    }
    for (double mu_p : {0.25, 0.5}) {
      SetupConfig c = detail::quench_to_tss(20.0, 800);
      c.mu_p = mu_p;
      p.runs.push_back(make_run(detail::format_label("mu_p", mu_p), c, 600.0, full ? 1201 : 301, {Measure::I}));
    }
  } else if (name == "smD-sensitivity") {
    for (double g : {1e-4, 1e-3, 1e-2}) {
      SetupConfig c = detail::quench_to_tss(20.0, full ? 2000 : 800);
      c.tau_gg = g;
      p.runs.push_back(make_run(detail::format_label("tau_gg", g), c, full ? 3000.0 : 600.0, full ? 1501 : 301,
                                {Measure::S_P, Measure::I}));
    }
    for (double t : {0.1, 1.0}) {
      SetupConfig c = detail::quench_to_tss(20.0, 500);
      c.temperature = t;
      p.runs.push_back(make_run(detail::format_label("T", t), c, 500.0, full ? 501 : 126, {Measure::S_P, Measure::I}));
    }
  } else if (name == "smD-tss") {
    for (double mu : {15.0, 15.5, 16.5}) {
      SetupConfig c = detail::quench_to_tss(20.0, full ? 1000 : 800);
      c.l = 34;
      c.mu_f = mu;
      p.runs.push_back(make_run(detail::format_label("mu_f", mu), c, 800.0, full ? 801 : 201, {Measure::S_P}));
    }
  } else if (name == "smD-interplay") {
    SetupConfig c = detail::quench_to_tss(20.0, 1000);
    c.l = 301;
    c.delta_i = 0.0;
    // Bulk gap 0.25 tau_p lies inside the probe band, so bulk modes propagate into P.
    c.mu_f = 19.75;
    p.runs.push_back(make_run("mu_f19.75", c, 800.0, full ? 801 : 201, {Measure::S_P}));
  } else if (name == "smE-renyi") {
    SetupConfig c = detail::quench_to_tss(20.0, 500);
    const MeasureSet m = {Measure::S_P, Measure::I, Measure::S2_P, Measure::I2};
    const int nt = full ? 801 : 201;
    p.runs.push_back(make_run("mzm", c, 800.0, nt, m));
    c.mu_p = 20.0;
    p.runs.push_back(make_run("bulk", c, 800.0, nt, m));
  } else {
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw ValidationError("unknown preset '" + std::string(name) + "' (known: " + known + ")");
  }
  return p;
}

}  // namespace qprobe
