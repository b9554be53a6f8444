#pragma once

// Flat key=value run configuration.
//
//   # comment
//   preset=fig1          applied first, whatever its position in the file
//   mode=desk            preset variant: desk | full
//   n_total=500 l=4 d=100 mu_i=20 ... t0=10   (one key per line)
//   t_max=800            time grid: n_times points evenly spaced on [0, t_max]
//   n_times=201
//   measures=S_P,I       comma list, may be empty
//   units=log2           log2 | nats
//   output=out.csv       output path (run/sweep); empty writes to stdout
//   threads=0            sweep pool width, 0 = $QPROBE_THREADS or all cores
//   sweep.mu_i.values=0.5,1,2     one axis per key, in file order
//   sweep.measure=dI_final
//   sweep.budget=10000
//
// Numbers are parsed with std::from_chars, so the current locale never
// matters. Without a preset and without an explicit t0, t0 defaults to
// 0.8 d. Every error names the key and the line.

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "qprobe/config.hpp"
#include "qprobe/entanglement.hpp"
#include "qprobe/experiments/presets.hpp"
#include "qprobe/experiments/sweep.hpp"
#include "qprobe/measures.hpp"

namespace qprobe {

inline Units parse_units(std::string_view s) {
  if (s == "log2") return Units::log2;
  if (s == "nats") return Units::nats;
  throw ValidationError("unknown units '" + std::string(s) + "' (expected log2 or nats)");
}

struct RunManifest {
  SetupConfig config;  // config.times is materialized from t_max and n_times
  double t_max = 800.0;
  int n_times = 201;
  MeasureSet measures = {Measure::S_Q, Measure::S_X, Measure::S_P, Measure::S_QP, Measure::I};
  Units units = Units::log2;
  std::string preset;
  RunMode mode = RunMode::desk;
  std::vector<SweepAxis> sweep;
  SweepMeasure sweep_measure = SweepMeasure::dI_final;
  std::size_t sweep_budget = kDefaultSweepBudget;
  std::string output;
  int threads = 0;

  bool operator==(const RunManifest&) const = default;

  SweepGrid sweep_grid() const {
    SweepGrid g;
    g.base = config;
    g.axes = sweep;
    g.measure = sweep_measure;
    g.budget = sweep_budget;
    return g;
  }
};

/// Error tied to a config line.
class ConfigError : public ValidationError {
 public:
  ConfigError(int line, const std::string& key, const std::string& what)
      : ValidationError("line " + std::to_string(line) + ": " + (key.empty() ? "" : "key '" + key + "': ") + what),
        line_(line),
        key_(key) {}
  int line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  int line_;
  std::string key_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  if (trim(s).empty()) return out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = s.find(',', pos);
    out.push_back(trim(s.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

inline std::optional<double> to_double(std::string_view s) {
  double v = 0.0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty() || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline std::optional<long long> to_integer(std::string_view s) {
  long long v = 0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

/// Shortest decimal that reads back to the same double.
inline std::string format_exact(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

struct Entry {
  std::string key;
  std::string value;
  int line = 0;
};

}  // namespace detail

inline RunManifest parse_config(std::string_view text) {
  using detail::Entry;
  std::vector<Entry> entries;
  std::map<std::string, int> seen;
  {
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const auto nl = text.find('\n', pos);
      std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
      pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string_view::npos) line = line.substr(0, hash);
      line = detail::trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) throw ConfigError(line_no, "", "expected key=value");
      Entry e{std::string(detail::trim(line.substr(0, eq))), std::string(detail::trim(line.substr(eq + 1))), line_no};
      if (e.key.empty()) throw ConfigError(line_no, "", "empty key");
      if (seen.count(e.key)) {
        throw ConfigError(line_no, e.key, "duplicate key (first set on line " + std::to_string(seen[e.key]) + ")");
      }
      seen[e.key] = line_no;
      entries.push_back(std::move(e));
    }
  }

  RunManifest m;
  auto find = [&](const std::string& key) -> const Entry* {
    for (const auto& e : entries) {
      if (e.key == key) return &e;
    }
    return nullptr;
  };

  // Preset and mode first: they provide the defaults the other keys override.
  if (const Entry* e = find("mode")) {
    try {
      m.mode = parse_run_mode(e->value);
    } catch (const ValidationError& err) {
      throw ConfigError(e->line, e->key, err.what());
    }
  }
  bool t0_from_preset = false;
  if (const Entry* e = find("preset")) {
    Preset p;
    try {
      p = preset(e->value, m.mode);
    } catch (const ValidationError& err) {
      throw ConfigError(e->line, e->key, err.what());
    }
    m.preset = e->value;
    t0_from_preset = true;
    if (!p.runs.empty()) {
      const PresetRun& r = p.runs.front();
      m.config = r.config;
      m.t_max = r.t_max;
      m.n_times = r.n_times;
      m.measures = r.measures;
    } else if (!p.sweeps.empty()) {
      const PresetSweep& s = p.sweeps.front();
      m.config = s.grid.base;
      m.t_max = s.t_max;
      m.n_times = s.n_times;
      m.sweep = s.grid.axes;
      m.sweep_measure = s.grid.measure;
    }
  }

  bool t0_explicit = false;
  bool sweep_explicit = false;
  for (const Entry& e : entries) {
    const std::string& k = e.key;
    const std::string& v = e.value;
    auto fail = [&](const std::string& what) { throw ConfigError(e.line, k, what); };
    auto number = [&]() {
      auto x = detail::to_double(v);
      if (!x) fail("expected a number, got '" + v + "'");
      return *x;
    };
    auto integer = [&]() {
      auto x = detail::to_integer(v);
      if (!x || *x < std::numeric_limits<int>::min() || *x > std::numeric_limits<int>::max()) {
        fail("expected an integer, got '" + v + "'");
      }
      return static_cast<int>(*x);
    };

    if (k == "preset" || k == "mode") continue;
    if (is_setup_field(k)) {
      const double x = is_integer_field(k) ? static_cast<double>(integer()) : number();
      set_field(m.config, k, x);
      if (k == "t0") t0_explicit = true;
      // Single-field invariants are reported here, with the line.
      if (k == "n_total" && x <= 0) fail("n_total must be positive");
      if (k == "l" && x <= 0) fail("l must be positive");
      if (k == "d" && x < 0) fail("d must be non-negative");
      if (k == "tau_p" && !(x > 0)) fail("tau_p must be positive");
      if ((k == "tau_gg" || k == "temperature" || k == "t0") && x < 0) fail(k + " must be non-negative");
    } else if (k == "t_max") {
      m.t_max = number();
      if (!(m.t_max > 0.0)) fail("t_max must be positive");
    } else if (k == "n_times") {
      m.n_times = integer();
      if (m.n_times < 1) fail("n_times must be at least 1");
    } else if (k == "measures") {
      m.measures.clear();
      for (auto name : detail::split_list(v)) {
        try {
          m.measures.insert(parse_measure(name));
        } catch (const ValidationError& err) {
          fail(err.what());
        }
      }
    } else if (k == "units") {
      try {
        m.units = parse_units(v);
      } catch (const ValidationError& err) {
        fail(err.what());
      }
    } else if (k == "output") {
      m.output = v;
    } else if (k == "threads") {
      m.threads = integer();
      if (m.threads < 0) fail("threads must be non-negative");
    } else if (k == "sweep.measure") {
      try {
        m.sweep_measure = parse_sweep_measure(v);
      } catch (const ValidationError& err) {
        fail(err.what());
      }
    } else if (k == "sweep.budget") {
      const int b = integer();
      if (b <= 0) fail("sweep.budget must be positive");
      m.sweep_budget = static_cast<std::size_t>(b);
    } else if (k.rfind("sweep.", 0) == 0 && k.size() > 13 && k.substr(k.size() - 7) == ".values") {
      const std::string param = k.substr(6, k.size() - 13);
      if (param != kTimeAxis && !is_setup_field(param)) fail("unknown sweep parameter '" + param + "'");
      if (!sweep_explicit) {
        m.sweep.clear();
        sweep_explicit = true;
      }
      SweepAxis axis{param, {}};
      for (auto item : detail::split_list(v)) {
        auto x = detail::to_double(item);
        if (!x) fail("expected a number list, got '" + std::string(item) + "'");
        if (param != kTimeAxis && is_integer_field(param) && *x != std::floor(*x)) {
          fail("values of integer parameter '" + param + "' must be integers");
        }
        axis.values.push_back(*x);
      }
      if (axis.values.empty()) fail("sweep axis needs at least one value");
      m.sweep.push_back(std::move(axis));
    } else {
      fail("unknown key");
    }
  }

  if (!t0_explicit && !t0_from_preset) m.config.t0 = 0.8 * m.config.d;
  m.config.times = linspace_times(m.t_max, m.n_times);

  // Cross-field invariants: report against the last line involved.
  auto line_of = [&](std::initializer_list<const char*> keys) {
    int line = 0;
    std::string key;
    for (const char* k : keys) {
      if (seen.count(k) && seen[k] > line) {
        line = seen[k];
        key = k;
      }
    }
    return std::pair{line, key};
  };
  const SetupConfig& c = m.config;
  if (c.l + c.d >= c.n_total) {
    auto [line, key] = line_of({"n_total", "l", "d", "preset"});
    throw ConfigError(line, key, "l + d must be smaller than n_total (probe region P is empty)");
  }
  if (!(c.t0 < m.t_max)) {
    auto [line, key] = line_of({"t0", "t_max", "d", "preset"});
    throw ConfigError(line, key, "t0 must be smaller than t_max");
  }
  try {
    c.validate();
    if (!m.sweep.empty()) m.sweep_grid().validate();
  } catch (const ValidationError& err) {
    throw ConfigError(0, "", err.what());
  }
  return m;
}

/// Canonical text form; parse_config(render(m)) == m.
inline std::string render(const RunManifest& m) {
  using detail::format_exact;
  std::ostringstream os;
  if (!m.preset.empty()) os << "preset=" << m.preset << '\n';
  os << "mode=" << run_mode_name(m.mode) << '\n';
  for (const auto& name : setup_field_names()) os << name << '=' << format_exact(get_field(m.config, name)) << '\n';
  os << "t_max=" << format_exact(m.t_max) << '\n';
  os << "n_times=" << m.n_times << '\n';
  os << "measures=";
  bool first = true;
  for (Measure x : m.measures) {
    os << (first ? "" : ",") << measure_name(x);
    first = false;
  }
  os << '\n';
  os << "units=" << units_name(m.units) << '\n';
  os << "output=" << m.output << '\n';
  os << "threads=" << m.threads << '\n';
  os << "sweep.measure=" << sweep_measure_name(m.sweep_measure) << '\n';
  os << "sweep.budget=" << m.sweep_budget << '\n';
  for (const auto& a : m.sweep) {
    os << "sweep." << a.param << ".values=";
    for (std::size_t i = 0; i < a.values.size(); ++i) os << (i ? "," : "") << format_exact(a.values[i]);
    os << '\n';
  }
  return os.str();
}

/// Reads and parses a config file; a missing file is a ValidationError.
inline RunManifest load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open config file '" + path + "': file not found or unreadable");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace qprobe
