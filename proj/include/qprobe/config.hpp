#pragma once

// Physical and numerical parameters of the three-region chain Q | X | P and
// the sudden-quench protocol. Energies are in units of the probe hopping
// tau_p, times in units of 1/tau_p.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <array>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qprobe {

/// Invalid input: configuration, region or argument. CLI exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ground state requested for a Hamiltonian with a zero mode.
class DegenerateGroundState : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Work that would exceed the configured size or point budget.
class ResourceError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Loss of numerical consistency (e.g. covariance singular value > 1). CLI exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Phase { initial, final };

struct SetupConfig {
  int n_total = 500;
  int l = 4;
  int d = 100;

  double mu_i = 20.0;
  double tau_i = 1.0;
  double delta_i = 1.0;

  double mu_f = 0.0;
  double tau_f = 20.0;
  double delta_f = 20.0;

  double mu_p = 0.0;
  double tau_p = 1.0;
  double tau_t = 1.0;
  double tau_gg = 0.0;

  double temperature = 0.0;
  double t0 = 10.0;
  std::vector<double> times;

  int n_p() const { return n_total - l - d; }

  // Throws ValidationError naming the first violated invariant. The time grid
  // is only checked when present (spectral queries do not need one).
  void validate() const {
    auto fail = [](const std::string& what) { throw ValidationError("invalid config: " + what); };
    if (n_total <= 0) fail("n_total must be positive");
    if (l <= 0) fail("l must be positive");
    if (d < 0) fail("d must be non-negative");
    if (l + d >= n_total) fail("l + d must be smaller than n_total (probe region P is empty)");
    for (double v : {mu_i, tau_i, delta_i, mu_f, tau_f, delta_f, mu_p, tau_p, tau_t, tau_gg, temperature, t0}) {
      if (!std::isfinite(v)) fail("all energies and times must be finite");
    }
    if (!(tau_p > 0.0)) fail("tau_p must be positive");
    if (tau_gg < 0.0) fail("tau_gg must be non-negative");
    if (temperature < 0.0) fail("temperature must be non-negative");
    if (t0 < 0.0) fail("t0 must be non-negative");
    if (!times.empty()) {
      for (std::size_t i = 0; i < times.size(); ++i) {
        if (!std::isfinite(times[i]) || times[i] < 0.0) fail("times must be finite and non-negative");
        if (i > 0 && !(times[i] > times[i - 1])) fail("times must be strictly increasing");
      }
      if (!(t0 < times.back())) fail("t0 must be smaller than max(times)");
    }
  }

  bool operator==(const SetupConfig&) const = default;
};

// Named access to the scalar fields, used by the config parser and by sweeps.
namespace detail {
inline constexpr std::array<std::pair<const char*, int SetupConfig::*>, 3> kIntFields = {{
    {"n_total", &SetupConfig::n_total}, {"l", &SetupConfig::l}, {"d", &SetupConfig::d}}};
inline constexpr std::array<std::pair<const char*, double SetupConfig::*>, 12> kRealFields = {{
    {"mu_i", &SetupConfig::mu_i},   {"tau_i", &SetupConfig::tau_i},   {"delta_i", &SetupConfig::delta_i},
    {"mu_f", &SetupConfig::mu_f},   {"tau_f", &SetupConfig::tau_f},   {"delta_f", &SetupConfig::delta_f},
    {"mu_p", &SetupConfig::mu_p},   {"tau_p", &SetupConfig::tau_p},   {"tau_t", &SetupConfig::tau_t},
    {"tau_gg", &SetupConfig::tau_gg}, {"temperature", &SetupConfig::temperature}, {"t0", &SetupConfig::t0}}};
}  // namespace detail

/// Scalar field names in schema order.
inline std::vector<std::string> setup_field_names() {
  std::vector<std::string> out;
  for (const auto& f : detail::kIntFields) out.emplace_back(f.first);
  for (const auto& f : detail::kRealFields) out.emplace_back(f.first);
  return out;
}

inline bool is_setup_field(std::string_view name) {
  for (const auto& f : detail::kIntFields) if (name == f.first) return true;
  for (const auto& f : detail::kRealFields) if (name == f.first) return true;
  return false;
}

inline bool is_integer_field(std::string_view name) {
  for (const auto& f : detail::kIntFields) if (name == f.first) return true;
  return false;
}

inline double get_field(const SetupConfig& c, std::string_view name) {
  for (const auto& f : detail::kIntFields) if (name == f.first) return c.*(f.second);
  for (const auto& f : detail::kRealFields) if (name == f.first) return c.*(f.second);
  throw ValidationError("unknown parameter '" + std::string(name) + "'");
}

// Integer fields only accept integral values in int range.
inline void set_field(SetupConfig& c, std::string_view name, double value) {
  for (const auto& f : detail::kIntFields) {
    if (name != f.first) continue;
    if (!std::isfinite(value) || value != std::floor(value) || std::abs(value) > 2e9) {
      throw ValidationError("parameter '" + std::string(name) + "' must be an integer");
    }
    c.*(f.second) = static_cast<int>(value);
    return;
  }
  for (const auto& f : detail::kRealFields) {
    if (name != f.first) continue;
    c.*(f.second) = value;
    return;
  }
  throw ValidationError("unknown parameter '" + std::string(name) + "'");
}

/// n points evenly spaced on [0, t_max]; a single point is t_max itself.
inline std::vector<double> linspace_times(double t_max, int n) {
  std::vector<double> out;
  if (n <= 0) return out;
  if (n == 1) return {t_max};
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back(t_max * static_cast<double>(i) / static_cast<double>(n - 1));
  out.back() = t_max;
  return out;
}

}  // namespace qprobe
