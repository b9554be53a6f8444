#pragma once

// Quadratic fermion Hamiltonians in the Majorana basis.
//
// Site j carries the Majoranas x_j = i(c_j^dag - c_j) and p_j = c_j + c_j^dag,
// stored interleaved at indices 2j and 2j + 1, so that
// c_j = (i x_j + p_j) / 2. In 1-based physics labels x_j is gamma_{2j-1} and
// p_j is gamma_{2j}. A Hamiltonian is stored as the real antisymmetric matrix
// A with
//
//     H = (i/4) sum_{ab} A_ab gamma_a gamma_b,
//
// which makes the positive eigenvalues of iA the single-particle
// (quasiparticle) energies.

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <string>

#include "qprobe/config.hpp"
#include "qprobe/region.hpp"

namespace qprobe {

inline Eigen::Index x_index(Eigen::Index site) { return 2 * site; }
inline Eigen::Index p_index(Eigen::Index site) { return 2 * site + 1; }

class QuadraticHamiltonian {
 public:
  explicit QuadraticHamiltonian(int n_sites) : a_(Eigen::MatrixXd::Zero(2 * n_sites, 2 * n_sites)) {
    if (n_sites <= 0) throw ValidationError("Hamiltonian needs at least one site");
  }

  // Takes an arbitrary real matrix and keeps its antisymmetric part exactly:
  // the strict upper triangle is copied and mirrored.
  static QuadraticHamiltonian from_matrix(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols() || a.rows() % 2 != 0 || a.rows() == 0) {
      throw ValidationError("Majorana matrix must be square with even, non-zero dimension");
    }
    QuadraticHamiltonian h(static_cast<int>(a.rows() / 2));
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      for (Eigen::Index j = i + 1; j < a.cols(); ++j) {
        h.a_(i, j) = a(i, j);
        h.a_(j, i) = -a(i, j);
      }
    }
    return h;
  }

  int n_sites() const { return static_cast<int>(a_.rows() / 2); }
  const Eigen::MatrixXd& matrix() const { return a_; }

  // mu c_j^dag c_j (up to a constant)
  void add_onsite(int j, double mu) { add_pair(x_index(j), p_index(j), -mu); }

  // t (c_i^dag c_j + c_j^dag c_i)
  void add_hopping(int i, int j, double t) {
    add_pair(p_index(i), x_index(j), t);
    add_pair(x_index(i), p_index(j), -t);
  }

  // D (c_i c_j + c_j^dag c_i^dag)
  void add_pairing(int i, int j, double d) {
    add_pair(x_index(i), p_index(j), d);
    add_pair(p_index(i), x_index(j), d);
  }

  // i g gamma_a gamma_b + h.c. = 2 i g gamma_a gamma_b
  void add_majorana_coupling(Eigen::Index a, Eigen::Index b, double g) { add_pair(a, b, 4.0 * g); }

  // True when A only couples x-type to p-type Majoranas. Every real hopping,
  // pairing and on-site term has this form.
  bool is_bipartite(double tol = 0.0) const {
    for (Eigen::Index i = 0; i < a_.rows(); i += 2) {
      for (Eigen::Index j = 0; j < a_.cols(); j += 2) {
        if (std::abs(a_(i, j)) > tol || std::abs(a_(i + 1, j + 1)) > tol) return false;
      }
    }
    return true;
  }

  /// <H> = -(1/4) tr(A M) for a state with covariance M (constant offset dropped).
  double energy(const Eigen::MatrixXd& covariance) const { return -0.25 * (a_.cwiseProduct(covariance.transpose())).sum(); }

 private:
  void add_pair(Eigen::Index a, Eigen::Index b, double v) {
    if (a == b) throw ValidationError("Majorana coupling needs two distinct operators");
    a_(a, b) += v;
    a_(b, a) -= v;
  }

  Eigen::MatrixXd a_;
};

/// Adds the l-site Kitaev chain on sites [0, l).
inline void add_kitaev_chain(QuadraticHamiltonian& h, int l, double mu, double tau, double delta) {
  for (int j = 0; j < l; ++j) h.add_onsite(j, mu);
  for (int j = 0; j + 1 < l; ++j) {
    h.add_hopping(j, j + 1, 0.5 * tau);
    h.add_pairing(j, j + 1, 0.5 * delta);
  }
}

/// H = H^Q(phase) + H^XP + H^T + H_gg on the full chain.
inline QuadraticHamiltonian build_hamiltonian(const SetupConfig& cfg, Phase phase) {
  cfg.validate();
  const int n = cfg.n_total;
  const int l = cfg.l;
  QuadraticHamiltonian h(n);
  if (phase == Phase::initial) {
    add_kitaev_chain(h, l, cfg.mu_i, cfg.tau_i, cfg.delta_i);
  } else {
    add_kitaev_chain(h, l, cfg.mu_f, cfg.tau_f, cfg.delta_f);
  }
  for (int j = l; j < n; ++j) h.add_onsite(j, cfg.mu_p);
  for (int j = l; j + 1 < n; ++j) h.add_hopping(j, j + 1, 0.5 * cfg.tau_p);
  if (cfg.tau_t != 0.0) h.add_hopping(l - 1, l, 0.5 * cfg.tau_t);
  if (cfg.tau_gg > 0.0) h.add_majorana_coupling(x_index(0), p_index(l - 1), cfg.tau_gg);
  return h;
}

// Canonical form A = W S W^T with W orthogonal and S = (+) [[0, e_k], [-e_k, 0]].
// Columns 2k and 2k+1 of W span mode k with energy e_k >= 0; energies ascend.
struct SpectrumResult {
  Eigen::VectorXd energies;
  Eigen::MatrixXd modes;

  int n_modes() const { return static_cast<int>(energies.size()); }
};

namespace detail {

// A = [[0, G], [-G^T, 0]] in (x, p) ordering; SVD of G gives the pairs directly.
inline SpectrumResult spectrum_bipartite(const Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows() / 2;
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) g(i, j) = a(x_index(i), p_index(j));
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.info() != Eigen::Success) throw NumericalError("singular value decomposition failed");
  const Eigen::MatrixXd& u = svd.matrixU();
  const Eigen::MatrixXd& v = svd.matrixV();
  const Eigen::VectorXd& s = svd.singularValues();

  SpectrumResult out;
  out.energies.resize(n);
  out.modes = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = n - 1 - k;  // singular values come descending
    out.energies(k) = s(src);
    for (Eigen::Index i = 0; i < n; ++i) {
      out.modes(x_index(i), 2 * k) = u(i, src);
      out.modes(p_index(i), 2 * k + 1) = v(i, src);
    }
  }
  return out;
}

// Generic route through the Hermitian eigenproblem of iA. For iA v = e v with
// v = a + ib and e > 0, the real pair (sqrt2 a, -sqrt2 b) spans the block.
// The null space of A is handled separately: a real orthonormal basis is
// extracted from the real and imaginary parts of its complex eigenvectors.
inline SpectrumResult spectrum_general(const Eigen::MatrixXd& a) {
  const Eigen::Index dim = a.rows();
  const Eigen::Index n = dim / 2;
  const Eigen::MatrixXcd ia = std::complex<double>(0.0, 1.0) * a.cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(ia);
  if (es.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver failed");
  const Eigen::VectorXd& ev = es.eigenvalues();
  const Eigen::MatrixXcd& vec = es.eigenvectors();

  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  const double zero_tol = 1e-12 * scale * static_cast<double>(dim);

  SpectrumResult out;
  out.energies.resize(n);
  out.modes = Eigen::MatrixXd::Zero(dim, dim);

  // ev ascending; the upper half holds the non-negative partners.
  std::vector<Eigen::Index> zero_cols;
  Eigen::Index k = 0;
  for (Eigen::Index c = 0; c < dim; ++c) {
    if (std::abs(ev(c)) <= zero_tol) zero_cols.push_back(c);
  }
  const Eigen::Index n_zero_pairs = static_cast<Eigen::Index>(zero_cols.size()) / 2;
  if (static_cast<Eigen::Index>(zero_cols.size()) % 2 != 0) {
    throw NumericalError("odd-dimensional null space of an antisymmetric matrix");
  }
  if (n_zero_pairs > 0) {
    Eigen::MatrixXd parts(dim, 2 * zero_cols.size());
    for (std::size_t i = 0; i < zero_cols.size(); ++i) {
      parts.col(static_cast<Eigen::Index>(2 * i)) = vec.col(zero_cols[i]).real();
      parts.col(static_cast<Eigen::Index>(2 * i + 1)) = vec.col(zero_cols[i]).imag();
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(parts, Eigen::ComputeThinU);
    for (Eigen::Index j = 0; j < 2 * n_zero_pairs; ++j) out.modes.col(j) = svd.matrixU().col(j);
    for (; k < n_zero_pairs; ++k) out.energies(k) = 0.0;
  }
  for (Eigen::Index c = 0; c < dim; ++c) {
    if (ev(c) <= zero_tol) continue;
    if (k >= n) throw NumericalError("spectrum of iA is not symmetric about zero");
    out.energies(k) = ev(c);
    out.modes.col(2 * k) = std::sqrt(2.0) * vec.col(c).real();
    out.modes.col(2 * k + 1) = -std::sqrt(2.0) * vec.col(c).imag();
    ++k;
  }
  if (k != n) throw NumericalError("spectrum of iA is not symmetric about zero");
  return out;
}

}  // namespace detail

inline SpectrumResult single_particle_spectrum(const QuadraticHamiltonian& h) {
  if (h.is_bipartite()) return detail::spectrum_bipartite(h.matrix());
  return detail::spectrum_general(h.matrix());
}

/// W S W^T rebuilt from a spectrum (tests and diagnostics).
inline Eigen::MatrixXd reconstruct(const SpectrumResult& s) {
  const Eigen::Index n = s.energies.size();
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (Eigen::Index k = 0; k < n; ++k) {
    sigma(2 * k, 2 * k + 1) = s.energies(k);
    sigma(2 * k + 1, 2 * k) = -s.energies(k);
  }
  return s.modes * sigma * s.modes.transpose();
}

/// Lowest quasiparticle energy e_0 of the isolated final Q block (tau_t = 0, H_gg included).
inline double lowest_q_block_energy(const SetupConfig& cfg) {
  cfg.validate();
  QuadraticHamiltonian h(cfg.l);
  add_kitaev_chain(h, cfg.l, cfg.mu_f, cfg.tau_f, cfg.delta_f);
  if (cfg.tau_gg > 0.0) h.add_majorana_coupling(x_index(0), p_index(cfg.l - 1), cfg.tau_gg);
  return single_particle_spectrum(h).energies(0);
}

// Energy splitting of the end-Majorana pair: the distance 2 e_0 between the
// hybridized levels +e_0 and -e_0 of iA. Zero at the sweet spot.
inline double mzm_splitting(const SetupConfig& cfg) { return 2.0 * lowest_q_block_energy(cfg); }

}  // namespace qprobe
