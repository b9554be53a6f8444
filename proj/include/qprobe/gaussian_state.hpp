#pragma once

// Gaussian states through their Majorana covariance matrix
//
//     M_ab = i (<gamma_a gamma_b> - delta_ab),
//
// and exact quench dynamics. With H = (i/4) sum A_ab gamma_a gamma_b the
// Heisenberg equation reads d gamma/dt = A gamma, so gamma(t) = O(t) gamma
// with O(t) = exp(A t) and M(t) = O(t) M(0) O(t)^T.

#include <Eigen/Dense>
#include <cmath>
#include <utility>

#include "qprobe/config.hpp"
#include "qprobe/hamiltonian.hpp"
#include "qprobe/region.hpp"

namespace qprobe {

struct CovarianceMatrix {
  Eigen::MatrixXd m;
  // Set by constructors that know the state is pure; kept by unitary
  // evolution. Reductions drop it.
  bool known_pure = false;

  int n_sites() const { return static_cast<int>(m.rows() / 2); }
};

/// max |M M^T - 1|
inline double purity_defect(const CovarianceMatrix& c) {
  const Eigen::Index dim = c.m.rows();
  return (c.m * c.m.transpose() - Eigen::MatrixXd::Identity(dim, dim)).cwiseAbs().maxCoeff();
}

inline double antisymmetry_defect(const CovarianceMatrix& c) { return (c.m + c.m.transpose()).cwiseAbs().maxCoeff(); }

namespace detail {

// M = W M' W^T with M' = (+) [[0, -nu_k], [nu_k, 0]] in the mode basis.
// `w` may be any row selection of the mode matrix; the result is then the
// covariance block over those rows.
inline Eigen::MatrixXd covariance_from_modes(const Eigen::MatrixXd& w, const Eigen::VectorXd& nu) {
  const Eigen::Index n = nu.size();
  Eigen::MatrixXd first(w.rows(), n);
  Eigen::MatrixXd second(w.rows(), n);
  for (Eigen::Index k = 0; k < n; ++k) {
    first.col(k) = w.col(2 * k);
    second.col(k) = w.col(2 * k + 1);
  }
  Eigen::MatrixXd m = second * nu.asDiagonal() * first.transpose();
  Eigen::MatrixXd mt = m.transpose();
  m -= mt;
  return m;
}

inline Eigen::MatrixXd covariance_from_modes(const SpectrumResult& s, const Eigen::VectorXd& nu) {
  return covariance_from_modes(s.modes, nu);
}

inline Eigen::MatrixXd select_site_rows(const Eigen::MatrixXd& w, const Region& region) {
  Eigen::MatrixXd out(2 * region.size(), w.cols());
  for (int i = 0; i < region.size(); ++i) {
    const Eigen::Index site = region.sites()[static_cast<std::size_t>(i)];
    out.row(2 * i) = w.row(2 * site);
    out.row(2 * i + 1) = w.row(2 * site + 1);
  }
  return out;
}

}  // namespace detail

inline constexpr double kDegeneracyTolerance = 1e-10;

inline CovarianceMatrix ground_state(const SpectrumResult& s, double degeneracy_tol = kDegeneracyTolerance) {
  if (s.n_modes() > 0 && s.energies(0) <= degeneracy_tol) {
    throw DegenerateGroundState("degenerate ground state: lowest quasiparticle energy " +
                                std::to_string(s.energies(0)) + " is below the degeneracy tolerance");
  }
  return {detail::covariance_from_modes(s, Eigen::VectorXd::Ones(s.n_modes())), true};
}

inline CovarianceMatrix ground_state(const QuadraticHamiltonian& h, double degeneracy_tol = kDegeneracyTolerance) {
  return ground_state(single_particle_spectrum(h), degeneracy_tol);
}

/// Each mode carries nu = tanh(e / 2T); T = 0 is the ground state.
inline CovarianceMatrix thermal_state(const SpectrumResult& s, double temperature,
                                      double degeneracy_tol = kDegeneracyTolerance) {
  if (!(temperature >= 0.0) || !std::isfinite(temperature)) {
    throw ValidationError("temperature must be finite and non-negative");
  }
  if (temperature == 0.0) return ground_state(s, degeneracy_tol);
  Eigen::VectorXd nu(s.n_modes());
  for (Eigen::Index k = 0; k < nu.size(); ++k) nu(k) = std::tanh(s.energies(k) / (2.0 * temperature));
  return {detail::covariance_from_modes(s, nu), false};
}

inline CovarianceMatrix thermal_state(const QuadraticHamiltonian& h, double temperature,
                                      double degeneracy_tol = kDegeneracyTolerance) {
  return thermal_state(single_particle_spectrum(h), temperature, degeneracy_tol);
}

// Covariance block over `region` of the thermal (T = 0: ground) state,
// built from the region's rows of the mode matrix without forming the full
// matrix. Same degeneracy rule as ground_state.
inline CovarianceMatrix thermal_block(const SpectrumResult& s, double temperature, const Region& region,
                                      double degeneracy_tol = kDegeneracyTolerance) {
  region.check_bounds(s.n_modes());
  if (!(temperature >= 0.0) || !std::isfinite(temperature)) {
    throw ValidationError("temperature must be finite and non-negative");
  }
  Eigen::VectorXd nu = Eigen::VectorXd::Ones(s.n_modes());
  if (temperature == 0.0) {
    if (s.n_modes() > 0 && s.energies(0) <= degeneracy_tol) {
      throw DegenerateGroundState("degenerate ground state: lowest quasiparticle energy " +
                                  std::to_string(s.energies(0)) + " is below the degeneracy tolerance");
    }
  } else {
    for (Eigen::Index k = 0; k < nu.size(); ++k) nu(k) = std::tanh(s.energies(k) / (2.0 * temperature));
  }
  const bool whole = region.size() == s.n_modes();
  return {detail::covariance_from_modes(detail::select_site_rows(s.modes, region), nu), whole && temperature == 0.0};
}

/// Principal submatrix over the Majoranas of the region's sites.
inline CovarianceMatrix reduce(const CovarianceMatrix& c, const Region& region) {
  region.check_bounds(c.n_sites());
  const auto& sites = region.sites();
  const Eigen::Index k = static_cast<Eigen::Index>(sites.size());
  Eigen::MatrixXd out(2 * k, 2 * k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      out.block<2, 2>(2 * i, 2 * j) = c.m.block<2, 2>(2 * sites[static_cast<std::size_t>(i)], 2 * sites[static_cast<std::size_t>(j)]);
    }
  }
  const bool whole = k == c.n_sites();
  return {std::move(out), whole && c.known_pure};
}

// Exact evolution under a fixed Hamiltonian from its cached canonical form.
// Immutable after construction; all member functions are const and may be
// called concurrently.
class Propagator {
 public:
  explicit Propagator(SpectrumResult spectrum) : s_(std::move(spectrum)) {}

  const SpectrumResult& spectrum() const { return s_; }
  int n_sites() const { return s_.n_modes(); }

  /// W_rows R(t): rows of the mode matrix rotated by the block phases.
  Eigen::MatrixXd rotated_modes(const Eigen::MatrixXd& w_rows, double t) const {
    Eigen::MatrixXd u(w_rows.rows(), w_rows.cols());
    for (Eigen::Index k = 0; k < s_.energies.size(); ++k) {
      const double c = std::cos(s_.energies(k) * t);
      const double sn = std::sin(s_.energies(k) * t);
      u.col(2 * k) = c * w_rows.col(2 * k) - sn * w_rows.col(2 * k + 1);
      u.col(2 * k + 1) = sn * w_rows.col(2 * k) + c * w_rows.col(2 * k + 1);
    }
    return u;
  }

  /// O(t) = exp(A t), orthogonal.
  Eigen::MatrixXd rotation(double t) const { return rotated_modes(s_.modes, t) * s_.modes.transpose(); }

  CovarianceMatrix evolve(const CovarianceMatrix& c0, double t) const {
    const Eigen::MatrixXd o = rotation(t);
    Eigen::MatrixXd m = o * c0.m * o.transpose();
    symmetrize(m);
    return {std::move(m), c0.known_pure};
  }

  static void symmetrize(Eigen::MatrixXd& m) {
    Eigen::MatrixXd mt = m.transpose();
    m = 0.5 * (m - mt);
  }

 private:
  SpectrumResult s_;
};

inline Propagator make_propagator(const QuadraticHamiltonian& h) { return Propagator(single_particle_spectrum(h)); }

inline CovarianceMatrix evolve(const CovarianceMatrix& c0, const Propagator& p, double t) { return p.evolve(c0, t); }

// Time-resolved covariance blocks of one initial state over a fixed set of
// sites. The initial state is rotated into the propagator's mode basis once
// (K = W^T M0 W); each time then costs one product with the selected rows:
//
//     M_rows(t) = (W_rows R(t)) K (W_rows R(t))^T.
class BlockEvolver {
 public:
  BlockEvolver(const Propagator& prop, const CovarianceMatrix& c0, const Region& rows)
      : prop_(&prop), rows_(rows), known_pure_(c0.known_pure) {
    rows_.check_bounds(prop.n_sites());
    const Eigen::MatrixXd& w = prop.spectrum().modes;
    k_ = w.transpose() * c0.m * w;
    w_rows_ = detail::select_site_rows(w, rows_);
  }

  const Region& rows() const { return rows_; }

  /// Covariance of the row sites at time t (sites in the order of rows()).
  CovarianceMatrix block(double t) const {
    const Eigen::MatrixXd u = prop_->rotated_modes(w_rows_, t);
    Eigen::MatrixXd m = (u * k_) * u.transpose();
    Propagator::symmetrize(m);
    return {std::move(m), known_pure_ && rows_.size() == prop_->n_sites()};
  }

 private:
  const Propagator* prop_;
  Region rows_;
  bool known_pure_;
  Eigen::MatrixXd k_;
  Eigen::MatrixXd w_rows_;
};

/// Sub-block of a covariance given over `rows` restricted to `region` (a subset of rows).
inline CovarianceMatrix sub_block(const CovarianceMatrix& block, const Region& rows, const Region& region) {
  std::vector<int> local;
  local.reserve(region.sites().size());
  const auto& rs = rows.sites();
  for (int s : region.sites()) {
    auto it = std::lower_bound(rs.begin(), rs.end(), s);
    if (it == rs.end() || *it != s) throw ValidationError("region is not contained in the evaluated block");
    local.push_back(static_cast<int>(it - rs.begin()));
  }
  return reduce(block, Region(std::move(local)));
}

}  // namespace qprobe
