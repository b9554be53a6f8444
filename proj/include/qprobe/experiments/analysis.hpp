#pragma once

// Post-processing of entanglement time series: plateau extraction, onset
// detection, Savitzky-Golay smoothing and least-squares fits.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qprobe/config.hpp"

namespace qprobe {

struct PlateauEstimate {
  double mean = 0.0;
  double spread = 0.0;  // max |value - mean| over the window
  int samples = 0;
};

/// Last 20% of the horizon.
inline std::pair<double, double> default_plateau_window(const std::vector<double>& times) {
  if (times.empty()) return {0.0, 0.0};
  const double a = times.front();
  const double b = times.back();
  return {b - 0.2 * (b - a), b};
}

inline PlateauEstimate extract_plateau(const std::vector<double>& times, const std::vector<double>& values, double t_a,
                                       double t_b) {
  if (times.size() != values.size()) throw ValidationError("plateau: times and values differ in length");
  double sum = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] >= t_a && times[i] <= t_b) {
      sum += values[i];
      ++count;
    }
  }
  if (count == 0) throw ValidationError("plateau window [" + std::to_string(t_a) + ", " + std::to_string(t_b) + "] is empty");
  PlateauEstimate p;
  p.mean = sum / count;
  p.samples = count;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] >= t_a && times[i] <= t_b) p.spread = std::max(p.spread, std::abs(values[i] - p.mean));
  }
  return p;
}

inline PlateauEstimate extract_plateau(const std::vector<double>& times, const std::vector<double>& values) {
  const auto [a, b] = default_plateau_window(times);
  return extract_plateau(times, values, a, b);
}

// Moving least-squares polynomial smoothing. Each point is replaced by the
// value at that point of the degree-`poly_order` fit over the centred
// window; near the ends the window is truncated to the available samples.
// Samples are treated as equally spaced.
inline std::vector<double> smooth(const std::vector<double>& values, int window_length, int poly_order) {
  if (poly_order < 0 || window_length % 2 == 0 || window_length < poly_order + 2) {
    throw ValidationError("smoothing window must be odd and at least poly_order + 2");
  }
  const int n = static_cast<int>(values.size());
  const int half = window_length / 2;
  std::vector<double> out(values.size());
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - half);
    const int hi = std::min(n - 1, i + half);
    const int count = hi - lo + 1;
    const int degree = std::min(poly_order, count - 1);
    Eigen::MatrixXd vander(count, degree + 1);
    Eigen::VectorXd rhs(count);
    for (int r = 0; r < count; ++r) {
      const double x = static_cast<double>(lo + r - i) / std::max(half, 1);
      double pw = 1.0;
      for (int c = 0; c <= degree; ++c) {
        vander(r, c) = pw;
        pw *= x;
      }
      rhs(r) = values[static_cast<std::size_t>(lo + r)];
    }
    const Eigen::VectorXd coef = vander.colPivHouseholderQr().solve(rhs);
    out[static_cast<std::size_t>(i)] = coef(0);  // polynomial evaluated at x = 0
  }
  return out;
}

inline constexpr double kDefaultOnsetThreshold = 5e-4;

// Centred finite-difference slope (one-sided at the ends).
inline std::vector<double> numerical_slope(const std::vector<double>& times, const std::vector<double>& values) {
  if (times.size() != values.size()) throw ValidationError("slope: times and values differ in length");
  const std::size_t n = times.size();
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = i == 0 ? 0 : i - 1;
    const std::size_t b = i + 1 == n ? n - 1 : i + 1;
    out[i] = (values[b] - values[a]) / (times[b] - times[a]);
  }
  return out;
}

// First time at which the slope exceeds the threshold; nullopt when it never
// does. With skip_leading_rise the search starts only after the slope has
// first dropped to or below the threshold, which ignores a transient that is
// already rising at the start of the series (the MI of a freshly quenched
// chain jumps to its initial plateau within a few time units).
inline std::optional<double> detect_onset(const std::vector<double>& times, const std::vector<double>& values,
                                          double slope_threshold = kDefaultOnsetThreshold,
                                          bool skip_leading_rise = false) {
  const std::vector<double> slope = numerical_slope(times, values);
  std::size_t i = 0;
  if (skip_leading_rise) {
    while (i < slope.size() && slope[i] > slope_threshold) ++i;
  }
  for (; i < slope.size(); ++i) {
    if (slope[i] > slope_threshold) return times[i];
  }
  return std::nullopt;
}

/// Savitzky-Golay smoothing followed by detect_onset; short series are used raw.
inline std::optional<double> smoothed_onset(const std::vector<double>& times, const std::vector<double>& values,
                                            double slope_threshold = kDefaultOnsetThreshold, int window = 11,
                                            int poly_order = 3, bool skip_leading_rise = false) {
  if (static_cast<int>(values.size()) < 2 * window) {
    return detect_onset(times, values, slope_threshold, skip_leading_rise);
  }
  return detect_onset(times, smooth(values, window, poly_order), slope_threshold, skip_leading_rise);
}

enum class FitModel { power, log, piecewise_mi };

inline std::string fit_model_name(FitModel m) {
  switch (m) {
    case FitModel::power: return "power";
    case FitModel::log: return "log";
    case FitModel::piecewise_mi: return "piecewise-MI";
  }
  return "?";
}

// power:        y = amplitude * x^exponent
// log:          y = slope * ln(x) + offset
// piecewise-MI: I(t) = ln2 [1 - (t / onset)^-alpha] for t > onset, fitted
//               through f(t) = 1 - I(t) / ln2; exponent = -alpha,
//               amplitude = onset^alpha.
struct FitResult {
  FitModel model = FitModel::power;
  double amplitude = 0.0;
  double exponent = 0.0;  // exponent (power, piecewise) or slope (log)
  double offset = 0.0;
  double window_begin = 0.0;
  double window_end = 0.0;
  int points = 0;
  double residual_norm = 0.0;

  double alpha() const { return -exponent; }
  /// onset time of the piecewise model
  double onset() const { return std::pow(amplitude, 1.0 / alpha()); }
};

namespace detail {

// Ordinary least squares u -> slope * u + intercept.
inline std::pair<double, double> linear_fit(const std::vector<double>& u, const std::vector<double>& v, double& residual) {
  const std::size_t n = u.size();
  if (n < 2) throw ValidationError("fit needs at least two points in the window");
  double mu = 0.0, mv = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mu += u[i];
    mv += v[i];
  }
  mu /= static_cast<double>(n);
  mv /= static_cast<double>(n);
  double suu = 0.0, suv = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    suu += (u[i] - mu) * (u[i] - mu);
    suv += (u[i] - mu) * (v[i] - mv);
  }
  if (suu == 0.0) throw ValidationError("fit abscissae are all equal");
  const double slope = suv / suu;
  const double intercept = mv - slope * mu;
  double rr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = v[i] - (slope * u[i] + intercept);
    rr += r * r;
  }
  residual = std::sqrt(rr);
  return {slope, intercept};
}

}  // namespace detail

/// Least squares in log-log coordinates over x in [x_a, x_b].
inline FitResult fit_power_law(const std::vector<double>& x, const std::vector<double>& y, double x_a, double x_b) {
  if (x.size() != y.size()) throw ValidationError("fit: x and y differ in length");
  std::vector<double> u, v;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < x_a || x[i] > x_b) continue;
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ValidationError("power-law fit needs positive x and y in the window");
    u.push_back(std::log(x[i]));
    v.push_back(std::log(y[i]));
  }
  FitResult f;
  f.model = FitModel::power;
  f.window_begin = x_a;
  f.window_end = x_b;
  f.points = static_cast<int>(u.size());
  const auto [slope, intercept] = detail::linear_fit(u, v, f.residual_norm);
  f.exponent = slope;
  f.amplitude = std::exp(intercept);
  return f;
}

/// Least squares of y against ln x over x in [x_a, x_b].
inline FitResult fit_log_law(const std::vector<double>& x, const std::vector<double>& y, double x_a, double x_b) {
  if (x.size() != y.size()) throw ValidationError("fit: x and y differ in length");
  std::vector<double> u, v;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < x_a || x[i] > x_b) continue;
    if (!(x[i] > 0.0)) throw ValidationError("log-law fit needs positive x in the window");
    u.push_back(std::log(x[i]));
    v.push_back(y[i]);
  }
  FitResult f;
  f.model = FitModel::log;
  f.window_begin = x_a;
  f.window_end = x_b;
  f.points = static_cast<int>(u.size());
  const auto [slope, intercept] = detail::linear_fit(u, v, f.residual_norm);
  f.exponent = slope;
  f.offset = intercept;
  f.amplitude = slope;
  return f;
}

/// Fits the saturating MI model through the power-law decay of f(t) = 1 - dI/ln2.
inline FitResult fit_piecewise_mi(const std::vector<double>& t, const std::vector<double>& delta_i_nats, double t_a,
                                  double t_b) {
  std::vector<double> f(delta_i_nats.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = 1.0 - delta_i_nats[i] / std::numbers::ln2;
  FitResult r = fit_power_law(t, f, t_a, t_b);
  r.model = FitModel::piecewise_mi;
  return r;
}

/// v_p = v_max (1 - p)^(1/alpha): speed of the modes that bring I to p ln2.
inline double mi_level_velocity(double v_max, double p, double alpha) { return v_max * std::pow(1.0 - p, 1.0 / alpha); }

}  // namespace qprobe
