#pragma once

// Brute-force many-body oracle on the full Fock space (N <= 10 sites).
//
// Basis states |n_1 ... n_N> are indexed site-major: site 0 is the most
// significant bit, so the state vector reshapes as (site 0, site 1, ...).
// Kets are built as |n> = (c_N^dag)^{n_N} ... (c_1^dag)^{n_1} |0>, hence
// c_j and c_j^dag pick up the sign (-1)^{n_{j+1} + ... + n_N} from the
// occupied sites to their right. With this ordering the toy states of the
// Majorana/fermion sharing example satisfy <psi_M| i gamma_2 gamma_3 |psi_M> = 1.

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qprobe/config.hpp"
#include "qprobe/hamiltonian.hpp"
#include "qprobe/region.hpp"

namespace qprobe::ed {

using cplx = std::complex<double>;
using Basis = std::uint32_t;

inline constexpr int kMaxSites = 10;

struct DenseState {
  int n_sites = 0;
  Eigen::VectorXcd amplitudes;
};

struct DenseHamiltonian {
  int n_sites = 0;
  Eigen::MatrixXcd h;
};

inline void check_size(int n_sites) {
  if (n_sites <= 0 || n_sites > kMaxSites) {
    throw ResourceError("dense oracle supports 1 to " + std::to_string(kMaxSites) + " sites, got " +
                        std::to_string(n_sites));
  }
}

inline Eigen::Index dimension(int n_sites) { return Eigen::Index{1} << n_sites; }

inline Basis site_bit(int n_sites, int site) { return Basis{1} << (n_sites - 1 - site); }

inline bool occupied(int n_sites, Basis s, int site) { return (s & site_bit(n_sites, site)) != 0; }

/// (-1)^(occupation of sites to the right of `site`)
inline double string_sign(int n_sites, Basis s, int site) {
  const Basis right_mask = site_bit(n_sites, site) - 1;
  return (std::popcount(s & right_mask) % 2 == 0) ? 1.0 : -1.0;
}

// A single ladder operator acting on a basis state: nullopt when it
// annihilates the state, else the image and its sign.
struct Ladder {
  int site;
  bool dagger;
};

inline std::optional<std::pair<Basis, double>> apply(int n_sites, Ladder op, Basis s) {
  const bool occ = occupied(n_sites, s, op.site);
  if (occ == op.dagger) return std::nullopt;
  return std::make_pair(s ^ site_bit(n_sites, op.site), string_sign(n_sites, s, op.site));
}

// Majorana gamma_a, a = 2j (x_j = i(c^dag - c)) or 2j+1 (p_j = c + c^dag).
inline std::pair<Basis, cplx> apply_majorana(int n_sites, Eigen::Index a, Basis s) {
  const int site = static_cast<int>(a / 2);
  const double sg = string_sign(n_sites, s, site);
  const Basis flipped = s ^ site_bit(n_sites, site);
  if (a % 2 == 1) return {flipped, cplx(sg, 0.0)};
  return {flipped, occupied(n_sites, s, site) ? cplx(0.0, -sg) : cplx(0.0, sg)};
}

/// H += coef * op1 op2 (op2 acts first).
inline void add_product(DenseHamiltonian& h, cplx coef, Ladder op1, Ladder op2) {
  const Eigen::Index dim = h.h.rows();
  for (Eigen::Index col = 0; col < dim; ++col) {
    auto r2 = apply(h.n_sites, op2, static_cast<Basis>(col));
    if (!r2) continue;
    auto r1 = apply(h.n_sites, op1, r2->first);
    if (!r1) continue;
    h.h(static_cast<Eigen::Index>(r1->first), col) += coef * r2->second * r1->second;
  }
}

inline void add_number(DenseHamiltonian& h, int j, double mu) { add_product(h, mu, {j, true}, {j, false}); }

// t (c_i^dag c_j + h.c.)
inline void add_hopping(DenseHamiltonian& h, int i, int j, double t) {
  add_product(h, t, {i, true}, {j, false});
  add_product(h, t, {j, true}, {i, false});
}

// D (c_i c_j + h.c.) with h.c. = c_j^dag c_i^dag
inline void add_pairing(DenseHamiltonian& h, int i, int j, double d) {
  add_product(h, d, {i, false}, {j, false});
  add_product(h, d, {j, true}, {i, true});
}

/// H += coef * gamma_a gamma_b
inline void add_majorana_product(DenseHamiltonian& h, cplx coef, Eigen::Index a, Eigen::Index b) {
  const Eigen::Index dim = h.h.rows();
  for (Eigen::Index col = 0; col < dim; ++col) {
    const auto [s1, p1] = apply_majorana(h.n_sites, b, static_cast<Basis>(col));
    const auto [s2, p2] = apply_majorana(h.n_sites, a, s1);
    h.h(static_cast<Eigen::Index>(s2), col) += coef * p1 * p2;
  }
}

/// Term-by-term twin of build_hamiltonian, written with ladder operators.
inline DenseHamiltonian build_dense(const SetupConfig& cfg, Phase phase) {
  cfg.validate();
  check_size(cfg.n_total);
  const int n = cfg.n_total;
  const int l = cfg.l;
  DenseHamiltonian h{n, Eigen::MatrixXcd::Zero(dimension(n), dimension(n))};
  const double mu = phase == Phase::initial ? cfg.mu_i : cfg.mu_f;
  const double tau = phase == Phase::initial ? cfg.tau_i : cfg.tau_f;
  const double delta = phase == Phase::initial ? cfg.delta_i : cfg.delta_f;
  for (int j = 0; j < l; ++j) add_number(h, j, mu);
  for (int j = 0; j + 1 < l; ++j) {
    add_hopping(h, j, j + 1, 0.5 * tau);
    add_pairing(h, j, j + 1, 0.5 * delta);
  }
  for (int j = l; j < n; ++j) add_number(h, j, cfg.mu_p);
  for (int j = l; j + 1 < n; ++j) add_hopping(h, j, j + 1, 0.5 * cfg.tau_p);
  add_hopping(h, l - 1, l, 0.5 * cfg.tau_t);
  // i g gamma_1 gamma_2l + h.c.
  if (cfg.tau_gg > 0.0) add_majorana_product(h, cplx(0.0, 2.0 * cfg.tau_gg), x_index(0), p_index(l - 1));
  return h;
}

/// Dense twin of an arbitrary Majorana-basis Hamiltonian (i/2) sum_{a<b} A_ab gamma_a gamma_b.
inline DenseHamiltonian from_majorana(const QuadraticHamiltonian& qh) {
  const int n = qh.n_sites();
  check_size(n);
  DenseHamiltonian h{n, Eigen::MatrixXcd::Zero(dimension(n), dimension(n))};
  const Eigen::MatrixXd& a = qh.matrix();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < a.cols(); ++j) {
      if (a(i, j) != 0.0) add_majorana_product(h, cplx(0.0, 0.5 * a(i, j)), i, j);
    }
  }
  return h;
}

/// Eigendecomposition of a dense Hamiltonian; evolves states exactly.
class DenseSpectrum {
 public:
  explicit DenseSpectrum(const DenseHamiltonian& h) : n_sites_(h.n_sites), es_(h.h) {
    if (es_.info() != Eigen::Success) throw NumericalError("dense eigensolver failed");
  }

  int n_sites() const { return n_sites_; }
  const Eigen::VectorXd& energies() const { return es_.eigenvalues(); }
  const Eigen::MatrixXcd& vectors() const { return es_.eigenvectors(); }

  DenseState ground_state(double degeneracy_tol = 1e-10) const {
    if (energies().size() > 1 && energies()(1) - energies()(0) <= degeneracy_tol) {
      throw DegenerateGroundState("degenerate ground state in the dense oracle");
    }
    return {n_sites_, vectors().col(0)};
  }

  /// exp(-i H t) |psi>
  DenseState evolve(const DenseState& psi, double t) const {
    Eigen::VectorXcd c = vectors().adjoint() * psi.amplitudes;
    for (Eigen::Index k = 0; k < c.size(); ++k) c(k) *= std::exp(cplx(0.0, -energies()(k) * t));
    return {n_sites_, vectors() * c};
  }

  /// Gibbs state exp(-H/T)/Z (T > 0), k_B = 1.
  Eigen::MatrixXcd gibbs(double temperature) const {
    if (!(temperature > 0.0)) throw ValidationError("Gibbs state needs a positive temperature");
    const double e0 = energies()(0);
    Eigen::VectorXd w(energies().size());
    for (Eigen::Index k = 0; k < w.size(); ++k) w(k) = std::exp(-(energies()(k) - e0) / temperature);
    w /= w.sum();
    return vectors() * w.cast<cplx>().asDiagonal() * vectors().adjoint();
  }

 private:
  int n_sites_;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es_;
};

inline DenseState dense_evolve(const DenseState& psi, const DenseHamiltonian& h, double t) {
  return DenseSpectrum(h).evolve(psi, t);
}

/// Projector onto a pure state.
inline Eigen::MatrixXcd density_matrix(const DenseState& psi) { return psi.amplitudes * psi.amplitudes.adjoint(); }

// (|100> + |010>)/sqrt2 and (|100> + |010> + |001> + |111>)/2 on three sites.
inline std::pair<DenseState, DenseState> toy_states() {
  const int n = 3;
  auto ket = [](const char* bits) {
    Basis b = 0;
    for (int i = 0; i < 3; ++i) b = (b << 1) | static_cast<Basis>(bits[i] == '1');
    return static_cast<Eigen::Index>(b);
  };
  DenseState f{n, Eigen::VectorXcd::Zero(8)};
  f.amplitudes(ket("100")) = 1.0 / std::sqrt(2.0);
  f.amplitudes(ket("010")) = 1.0 / std::sqrt(2.0);
  DenseState m{n, Eigen::VectorXcd::Zero(8)};
  for (const char* b : {"100", "010", "001", "111"}) m.amplitudes(ket(b)) = 0.5;
  return {f, m};
}

/// <psi| i gamma_a gamma_b |psi>
inline cplx majorana_parity_expectation(const DenseState& psi, Eigen::Index a, Eigen::Index b) {
  cplx acc = 0.0;
  for (Eigen::Index col = 0; col < psi.amplitudes.size(); ++col) {
    const auto [s1, p1] = apply_majorana(psi.n_sites, b, static_cast<Basis>(col));
    const auto [s2, p2] = apply_majorana(psi.n_sites, a, s1);
    acc += std::conj(psi.amplitudes(static_cast<Eigen::Index>(s2))) * cplx(0.0, 1.0) * p1 * p2 * psi.amplitudes(col);
  }
  return acc;
}

/// Covariance M_ab = <i gamma_a gamma_b> (a != b) of a pure dense state.
inline Eigen::MatrixXd covariance(const DenseState& psi) {
  const Eigen::Index dim = 2 * psi.n_sites;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index a = 0; a < dim; ++a) {
    for (Eigen::Index b = 0; b < dim; ++b) {
      if (a != b) m(a, b) = majorana_parity_expectation(psi, a, b).real();
    }
  }
  return m;
}

namespace detail {

// Moves the region's sites to the front (keeping relative order on both
// sides) and returns, per old basis index, the new index and the fermionic
// reordering sign.
inline std::vector<std::pair<Basis, double>> front_reordering(int n_sites, const Region& region) {
  std::vector<int> order = region.sites();
  const Region rest = region.complement(n_sites);
  order.insert(order.end(), rest.sites().begin(), rest.sites().end());

  const Eigen::Index dim = dimension(n_sites);
  std::vector<std::pair<Basis, double>> map(static_cast<std::size_t>(dim));
  for (Eigen::Index s = 0; s < dim; ++s) {
    const Basis b = static_cast<Basis>(s);
    Basis nb = 0;
    int inversions = 0;
    std::vector<int> placed;
    for (int pos = 0; pos < n_sites; ++pos) {
      const int old_site = order[static_cast<std::size_t>(pos)];
      if (occupied(n_sites, b, old_site)) {
        nb |= site_bit(n_sites, pos);
        for (int p : placed) inversions += p > old_site ? 1 : 0;
        placed.push_back(old_site);
      }
    }
    map[static_cast<std::size_t>(s)] = {nb, inversions % 2 == 0 ? 1.0 : -1.0};
  }
  return map;
}

inline void check_region(int n_sites, const Region& region) {
  region.check_bounds(n_sites);
  if (region.contiguous_runs() > 2) {
    throw ValidationError("unsupported region: the oracle handles contiguous ranges and unions of two ranges");
  }
}

}  // namespace detail

/// Reduced density matrix of a region (at most two contiguous runs) from a full density matrix.
inline Eigen::MatrixXcd reduced_density(const Eigen::MatrixXcd& rho, int n_sites, const Region& region) {
  detail::check_region(n_sites, region);
  const int k = region.size();
  const Eigen::Index dim_r = dimension(k);
  const Eigen::Index dim_rest = dimension(n_sites - k);
  if (k == 0) return Eigen::MatrixXcd::Constant(1, 1, rho.trace());
  const auto map = detail::front_reordering(n_sites, region);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim_r, dim_r);
  const Eigen::Index dim = rho.rows();
  for (Eigen::Index a = 0; a < dim; ++a) {
    const auto [na, sa] = map[static_cast<std::size_t>(a)];
    const Eigen::Index ra = static_cast<Eigen::Index>(na) / dim_rest;
    const Eigen::Index xa = static_cast<Eigen::Index>(na) % dim_rest;
    for (Eigen::Index b = 0; b < dim; ++b) {
      const auto [nb, sb] = map[static_cast<std::size_t>(b)];
      if (static_cast<Eigen::Index>(nb) % dim_rest != xa) continue;
      out(ra, static_cast<Eigen::Index>(nb) / dim_rest) += sa * sb * rho(a, b);
    }
  }
  return out;
}

/// Reduced density matrix of a pure state: Psi Psi^dag with Psi = (region x rest) amplitudes.
inline Eigen::MatrixXcd reduced_density(const DenseState& psi, const Region& region) {
  detail::check_region(psi.n_sites, region);
  const int k = region.size();
  const Eigen::Index dim_rest = dimension(psi.n_sites - k);
  const auto map = detail::front_reordering(psi.n_sites, region);
  Eigen::MatrixXcd amp = Eigen::MatrixXcd::Zero(dimension(k), dim_rest);
  for (Eigen::Index s = 0; s < psi.amplitudes.size(); ++s) {
    const auto [ns, sign] = map[static_cast<std::size_t>(s)];
    amp(static_cast<Eigen::Index>(ns) / dim_rest, static_cast<Eigen::Index>(ns) % dim_rest) = sign * psi.amplitudes(s);
  }
  return amp * amp.adjoint();
}

/// von Neumann (q == 1) or Renyi-q entropy, in nats, of a density matrix.
inline double matrix_entropy(const Eigen::MatrixXcd& rho, double q = 1.0) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double p = es.eigenvalues()(i);
    if (p <= 1e-15) continue;
    acc += q == 1.0 ? -p * std::log(p) : std::pow(p, q);
  }
  return q == 1.0 ? acc : std::log(acc) / (1.0 - q);
}

inline double dense_entropy(const DenseState& psi, const Region& region, double q = 1.0) {
  return matrix_entropy(reduced_density(psi, region), q);
}

inline double dense_entropy(const Eigen::MatrixXcd& rho, int n_sites, const Region& region, double q = 1.0) {
  return matrix_entropy(reduced_density(rho, n_sites, region), q);
}

inline double dense_mutual_information(const DenseState& psi, const Region& a, const Region& b, double q = 1.0) {
  if (a.overlaps(b)) throw ValidationError("mutual information needs disjoint regions");
  return dense_entropy(psi, a, q) + dense_entropy(psi, b, q) - dense_entropy(psi, a.united(b), q);
}

inline double dense_mutual_information(const Eigen::MatrixXcd& rho, int n_sites, const Region& a, const Region& b,
                                       double q = 1.0) {
  if (a.overlaps(b)) throw ValidationError("mutual information needs disjoint regions");
  return dense_entropy(rho, n_sites, a, q) + dense_entropy(rho, n_sites, b, q) -
         dense_entropy(rho, n_sites, a.united(b), q);
}

/// Matrix elements between basis states of different fermion parity (should be zero).
inline double parity_violation(const DenseHamiltonian& h) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < h.h.rows(); ++i) {
    for (Eigen::Index j = 0; j < h.h.cols(); ++j) {
      if ((std::popcount(static_cast<Basis>(i)) + std::popcount(static_cast<Basis>(j))) % 2 != 0) {
        worst = std::max(worst, std::abs(h.h(i, j)));
      }
    }
  }
  return worst;
}

}  // namespace qprobe::ed
