#pragma once

// Entropies of Gaussian states from reduced covariance matrices. A region
// of n sites has n covariance eigenvalues nu in [0, 1]; each contributes the
// entropy of a two-level system with probabilities (1 +- nu) / 2.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "qprobe/config.hpp"
#include "qprobe/gaussian_state.hpp"
#include "qprobe/region.hpp"

namespace qprobe {

inline constexpr double kLn2 = std::numbers::ln2;
inline constexpr double kNuOverflowTolerance = 1e-9;
inline constexpr double kPureModeCutoff = 1e-12;

struct ModeSpectrum {
  std::vector<double> nus;
};

// Eigenvalues of M M^T = -M^2 are nu^2, each twice. The pairs are averaged
// after sorting.
inline ModeSpectrum mode_spectrum(const CovarianceMatrix& reduced) {
  ModeSpectrum out;
  const Eigen::Index dim = reduced.m.rows();
  if (dim == 0) return out;
  if (dim % 2 != 0 || reduced.m.cols() != dim) throw ValidationError("covariance must be square with even dimension");
  const Eigen::MatrixXd sq = reduced.m * reduced.m.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sq, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("eigenvalue computation failed for reduced covariance");
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + dim);
  std::sort(ev.begin(), ev.end(), std::greater<>());
  out.nus.reserve(static_cast<std::size_t>(dim / 2));
  for (Eigen::Index k = 0; k < dim / 2; ++k) {
    const double sq_nu = 0.5 * (ev[static_cast<std::size_t>(2 * k)] + ev[static_cast<std::size_t>(2 * k + 1)]);
    double nu = std::sqrt(std::max(sq_nu, 0.0));
    if (nu > 1.0 + kNuOverflowTolerance) {
      throw NumericalError("covariance singular value " + std::to_string(nu) + " exceeds 1");
    }
    out.nus.push_back(std::min(nu, 1.0));
  }
  return out;
}

/// Binary entropy of one mode, in nats.
inline double mode_entropy(double nu) {
  if (nu >= 1.0 - kPureModeCutoff) return 0.0;
  const double p = 0.5 * (1.0 + nu);
  const double q = 0.5 * (1.0 - nu);
  return -p * std::log(p) - q * std::log(q);
}

inline double mode_renyi(double nu, double q) {
  const double a = 0.5 * (1.0 + nu);
  const double b = 0.5 * (1.0 - nu);
  return std::log(std::pow(a, q) + std::pow(b, q)) / (1.0 - q);
}

inline void check_renyi_order(double q) {
  if (!(q > 0.0) || q == 1.0 || !std::isfinite(q)) throw ValidationError("Renyi order must be positive, finite and != 1");
}

inline double von_neumann(const ModeSpectrum& s) {
  double total = 0.0;
  for (double nu : s.nus) total += mode_entropy(nu);
  return total;
}

inline double renyi(const ModeSpectrum& s, double q) {
  check_renyi_order(q);
  double total = 0.0;
  for (double nu : s.nus) total += mode_renyi(nu, q);
  return total;
}

inline double von_neumann(const CovarianceMatrix& reduced) { return von_neumann(mode_spectrum(reduced)); }
inline double renyi(const CovarianceMatrix& reduced, double q) { return renyi(mode_spectrum(reduced), q); }

/// Entropy selector: q == 1 is von Neumann, anything else Renyi-q.
struct EntropyKind {
  double q = 1.0;

  static EntropyKind von_neumann() { return {1.0}; }
  static EntropyKind renyi(double order) {
    check_renyi_order(order);
    return {order};
  }
  bool is_von_neumann() const { return q == 1.0; }

  double operator()(const ModeSpectrum& s) const { return is_von_neumann() ? qprobe::von_neumann(s) : qprobe::renyi(s, q); }
  double operator()(const CovarianceMatrix& reduced) const { return (*this)(mode_spectrum(reduced)); }
};

inline double entropy(const CovarianceMatrix& full, const Region& region, EntropyKind kind = {}) {
  return kind(reduce(full, region));
}

/// S(a) + S(b) - S(a u b)
inline double mutual_information(const CovarianceMatrix& full, const Region& a, const Region& b, EntropyKind kind = {}) {
  if (a.overlaps(b)) throw ValidationError("mutual information needs disjoint regions");
  return entropy(full, a, kind) + entropy(full, b, kind) - entropy(full, a.united(b), kind);
}

enum class Units { nats, log2 };

inline double to_units(double nats, Units u) { return u == Units::log2 ? nats / kLn2 : nats; }

inline std::string units_name(Units u) { return u == Units::log2 ? "log2" : "nats"; }

// Time-stamped named columns (S_Q, S_P, I, ...). Values are stored in nats;
// `in_units` converts on the way out.
struct EntanglementSeries {
  std::vector<double> times;
  std::vector<std::string> names;
  std::map<std::string, std::vector<double>> columns;

  void add_column(const std::string& name, std::vector<double> values) {
    if (values.size() != times.size()) throw ValidationError("column " + name + " does not match the time grid");
    if (!columns.contains(name)) names.push_back(name);
    columns[name] = std::move(values);
  }
  bool has(const std::string& name) const { return columns.contains(name); }
  const std::vector<double>& at(const std::string& name) const {
    auto it = columns.find(name);
    if (it == columns.end()) throw ValidationError("series has no column " + name);
    return it->second;
  }
  std::vector<double> in_units(const std::string& name, Units u) const {
    std::vector<double> v = at(name);
    for (double& x : v) x = to_units(x, u);
    return v;
  }
};

}  // namespace qprobe
