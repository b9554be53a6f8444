#pragma once

// CSV output of time series and sweep tables. Numbers carry 12 significant
// digits, lines end in LF, and '#' lines at the top echo the configuration
// and the units so a file is self-describing.

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "qprobe/config.hpp"
#include "qprobe/entanglement.hpp"
#include "qprobe/experiments/sweep.hpp"
#include "qprobe/experiments/time_series.hpp"
#include "qprobe/io/config_io.hpp"

namespace qprobe {

inline constexpr int kCsvDigits = 12;

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";  // also folds -0
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, kCsvDigits);
  return std::string(buf, ptr);
}

namespace detail {

inline void echo_config(std::ostream& os, const SetupConfig& c) {
  for (const auto& name : setup_field_names()) os << "# " << name << '=' << format_exact(get_field(c, name)) << '\n';
  if (!c.times.empty()) {
    os << "# t_max=" << format_exact(c.times.back()) << '\n';
    os << "# n_times=" << c.times.size() << '\n';
  }
}

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch == '\n' ? ' ' : ch;
  }
  return out + "\"";
}

inline void write_plateau(std::ostream& os, const char* name, const std::optional<PlateauEstimate>& p, Units u) {
  if (!p) return;
  os << "# " << name << "_plateau=" << format_number(to_units(p->mean, u))
     << " spread=" << format_number(to_units(p->spread, u)) << " samples=" << p->samples << '\n';
}

}  // namespace detail

// Columns: t, the requested measures in canonical order, then the baseline-
// subtracted dS_P, dI (and Renyi twins). Entropies are converted to `units`.
inline void write_series_csv(std::ostream& os, const TimeSeriesRecord& rec, Units units) {
  os << "# qprobe time series\n";
  os << "# units=" << units_name(units) << '\n';
  detail::echo_config(os, rec.config);
  os << "# measures=";
  bool first = true;
  for (Measure m : rec.measures) {
    os << (first ? "" : ",") << measure_name(m);
    first = false;
  }
  os << '\n';
  detail::write_plateau(os, "dS_P", rec.ds_p_plateau, units);
  detail::write_plateau(os, "dI", rec.di_plateau, units);
  if (rec.ds_p_plateau || rec.di_plateau) {
    os << "# plateau_window=" << format_number(rec.window_begin) << ',' << format_number(rec.window_end) << '\n';
  }
  if (rec.onset) os << "# onset=" << format_number(*rec.onset) << '\n';
  if (rec.measures.empty()) return;

  os << 't';
  for (const auto& n : rec.series.names) os << ',' << n;
  os << '\n';
  std::vector<std::vector<double>> cols;
  for (const auto& n : rec.series.names) cols.push_back(rec.series.in_units(n, units));
  for (std::size_t i = 0; i < rec.series.times.size(); ++i) {
    os << format_number(rec.series.times[i]);
    for (const auto& c : cols) os << ',' << format_number(c[i]);
    os << '\n';
  }
}

// Columns: one per axis, the measure, and an error column that is empty on
// success. Failed points carry nan.
inline void write_sweep_csv(std::ostream& os, const SweepTable& table, const SetupConfig& base, Units units) {
  os << "# qprobe sweep\n";
  os << "# units=" << (is_entropy(table.measure) ? units_name(units) : "tau_p") << '\n';
  os << "# measure=" << sweep_measure_name(table.measure) << '\n';
  detail::echo_config(os, base);
  for (const auto& a : table.axes) os << a << ',';
  os << sweep_measure_name(table.measure) << ",error\n";
  for (const SweepRow& r : table.rows) {
    for (double x : r.coords) os << format_number(x) << ',';
    const double v = is_entropy(table.measure) ? to_units(r.value, units) : r.value;
    os << format_number(v) << ',' << detail::csv_quote(r.error) << '\n';
  }
}

namespace detail {

template <class Writer>
void write_file(const std::string& path, Writer&& w) {
  std::ostringstream buf;
  w(buf);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot open '" + path + "' for writing");
  out << buf.str();
  out.flush();
  if (!out) throw ValidationError("write to '" + path + "' failed");
}

}  // namespace detail

inline void write_series_csv(const std::string& path, const TimeSeriesRecord& rec, Units units) {
  detail::write_file(path, [&](std::ostream& os) { write_series_csv(os, rec, units); });
}

inline void write_sweep_csv(const std::string& path, const SweepTable& t, const SetupConfig& base, Units units) {
  detail::write_file(path, [&](std::ostream& os) { write_sweep_csv(os, t, base, units); });
}

}  // namespace qprobe
