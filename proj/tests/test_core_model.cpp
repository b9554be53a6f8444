#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "qprobe/config.hpp"
#include "qprobe/hamiltonian.hpp"
#include "qprobe/region.hpp"

using namespace qprobe;

namespace {

SetupConfig decoupled(int n, int l) {
  SetupConfig c;
  c.n_total = n;
  c.l = l;
  c.d = 0;
  c.tau_t = 0.0;
  return c;
}

// Spectrum of iA from a general complex eigensolver: independent of both
// production routes (SVD and Hermitian eigensolver).
std::vector<double> positive_half(const Eigen::MatrixXd& a) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(std::complex<double>(0, 1) * a.cast<std::complex<double>>());
  std::vector<double> ev;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) ev.push_back(es.eigenvalues()(i).real());
  std::sort(ev.begin(), ev.end());
  return {ev.begin() + static_cast<long>(ev.size() / 2), ev.end()};
}

Eigen::MatrixXd random_antisymmetric(int n_sites, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd a(2 * n_sites, 2 * n_sites);
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) a(i, j) = u(rng);
  }
  return a;
}

}  // namespace

TEST(SetupConfig, DefaultsAreValid) {
  SetupConfig c;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.n_p(), 396);
}

TEST(SetupConfig, RejectsEmptyProbe) {
  SetupConfig c;
  c.n_total = 104;
  try {
    c.validate();
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("l + d"), std::string::npos);
  }
}

TEST(SetupConfig, NamesTheViolatedInvariant) {
  auto message = [](auto mutate) {
    SetupConfig c;
    mutate(c);
    try {
      c.validate();
    } catch (const ValidationError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(message([](SetupConfig& c) { c.l = 0; }).find("l must"), std::string::npos);
  EXPECT_NE(message([](SetupConfig& c) { c.d = -1; }).find("d must"), std::string::npos);
  EXPECT_NE(message([](SetupConfig& c) { c.tau_p = 0; }).find("tau_p"), std::string::npos);
  EXPECT_NE(message([](SetupConfig& c) { c.tau_gg = -1; }).find("tau_gg"), std::string::npos);
  EXPECT_NE(message([](SetupConfig& c) { c.temperature = -1; }).find("temperature"), std::string::npos);
  EXPECT_NE(message([](SetupConfig& c) { c.times = {0, 2, 1}; }).find("increasing"), std::string::npos);
  EXPECT_NE(message([](SetupConfig& c) { c.times = {-1, 20}; }).find("non-negative"), std::string::npos);
  EXPECT_NE(message([](SetupConfig& c) { c.times = {0, 5}; }).find("t0"), std::string::npos);
}

TEST(SetupConfig, DZeroIsAllowed) {
  SetupConfig c;
  c.d = 0;
  EXPECT_NO_THROW(c.validate());
}

TEST(SetupConfig, FieldAccessByName) {
  SetupConfig c;
  set_field(c, "mu_p", 0.25);
  set_field(c, "d", 40);
  EXPECT_EQ(c.mu_p, 0.25);
  EXPECT_EQ(c.d, 40);
  EXPECT_EQ(get_field(c, "tau_f"), 20.0);
  EXPECT_THROW(set_field(c, "d", 40.5), ValidationError);
  EXPECT_THROW(set_field(c, "bogus", 1.0), ValidationError);
  EXPECT_EQ(setup_field_names().size(), 15u);
}

TEST(LinspaceTimes, Endpoints) {
  auto t = linspace_times(10.0, 5);
  ASSERT_EQ(t.size(), 5u);
  EXPECT_EQ(t.front(), 0.0);
  EXPECT_EQ(t[2], 5.0);
  EXPECT_EQ(t.back(), 10.0);
  EXPECT_EQ(linspace_times(3.0, 1), std::vector<double>{3.0});
}

TEST(Region, CanonicalRegionsPartitionTheChain) {
  SetupConfig c;
  c.n_total = 20;
  c.l = 3;
  c.d = 5;
  const Region q = region_q(c), x = region_x(c), p = region_p(c);
  EXPECT_EQ(q.size() + x.size() + p.size(), 20);
  EXPECT_FALSE(q.overlaps(x));
  EXPECT_FALSE(x.overlaps(p));
  EXPECT_EQ(q.united(x).united(p), Region::range(0, 20));
  EXPECT_EQ(region_qp(c).contiguous_runs(), 2);
  EXPECT_EQ(region_qp(c).complement(20), x);
}

TEST(Region, EmptySeparationLayer) {
  SetupConfig c;
  c.n_total = 10;
  c.l = 4;
  c.d = 0;
  EXPECT_TRUE(region_x(c).empty());
  EXPECT_EQ(region_qp(c).contiguous_runs(), 1);
}

TEST(Region, RejectsDuplicatesAndOutOfBounds) {
  EXPECT_THROW(Region({1, 1}), ValidationError);
  EXPECT_THROW(Region::range(3, 4).check_bounds(5), ValidationError);
  EXPECT_THROW(Region({-1}), ValidationError);
}

TEST(QuadraticHamiltonian, AntisymmetricByConstruction) {
  SetupConfig c;
  c.n_total = 30;
  c.l = 6;
  c.d = 5;
  c.tau_gg = 0.3;
  c.mu_f = 3.0;
  for (Phase ph : {Phase::initial, Phase::final}) {
    const Eigen::MatrixXd& a = build_hamiltonian(c, ph).matrix();
    EXPECT_EQ((a + a.transpose()).cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(QuadraticHamiltonian, FromMatrixMirrorsUpperTriangle) {
  std::mt19937_64 rng(3);
  const Eigen::MatrixXd raw = random_antisymmetric(3, rng);
  const auto h = QuadraticHamiltonian::from_matrix(raw);
  EXPECT_EQ((h.matrix() + h.matrix().transpose()).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(h.matrix()(0, 5), raw(0, 5));
  EXPECT_THROW(QuadraticHamiltonian::from_matrix(Eigen::MatrixXd::Zero(3, 3)), ValidationError);
}

TEST(QuadraticHamiltonian, InvalidConfigIsRejected) {
  SetupConfig c;
  c.l = 0;
  EXPECT_THROW(build_hamiltonian(c, Phase::final), ValidationError);
}

TEST(Spectrum, ZeroMatrix) {
  QuadraticHamiltonian h(5);
  const SpectrumResult s = single_particle_spectrum(h);
  ASSERT_EQ(s.n_modes(), 5);
  EXPECT_LT(s.energies.cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Spectrum, SingleSiteEnergyEqualsChemicalPotential) {
  QuadraticHamiltonian h(1);
  h.add_onsite(0, 2.0);
  EXPECT_NEAR(single_particle_spectrum(h).energies(0), 2.0, 1e-14);
}

TEST(Spectrum, DecoupledProbeMatchesOpenChainDispersion) {
  // 40-site probe chain: energies |mu_p + tau_p cos(pi m / 41)|.
  for (double mu_p : {0.0, 0.3, -0.7, 2.5}) {
    SetupConfig c = decoupled(44, 4);
    c.mu_p = mu_p;
    QuadraticHamiltonian h(40);
    for (int j = 0; j < 40; ++j) h.add_onsite(j, mu_p);
    for (int j = 0; j + 1 < 40; ++j) h.add_hopping(j, j + 1, 0.5);
    std::vector<double> expected;
    for (int m = 1; m <= 40; ++m) expected.push_back(std::abs(mu_p + std::cos(std::numbers::pi * m / 41.0)));
    std::sort(expected.begin(), expected.end());
    const SpectrumResult s = single_particle_spectrum(h);
    for (int k = 0; k < 40; ++k) EXPECT_NEAR(s.energies(k), expected[static_cast<std::size_t>(k)], 1e-10);
  }
}

TEST(Spectrum, ProbeBlockInsideTheFullChain) {
  // With tau_t = 0 the full spectrum is the union of the Q and probe blocks.
  SetupConfig c = decoupled(44, 4);
  c.mu_f = 0.0;
  c.tau_f = c.delta_f = 1.0;
  c.mu_p = 0.2;
  const SpectrumResult s = single_particle_spectrum(build_hamiltonian(c, Phase::final));
  std::vector<double> expected = {0.0, 1.0, 1.0, 1.0};
  for (int m = 1; m <= 40; ++m) expected.push_back(std::abs(0.2 + std::cos(std::numbers::pi * m / 41.0)));
  std::sort(expected.begin(), expected.end());
  for (int k = 0; k < 44; ++k) EXPECT_NEAR(s.energies(k), expected[static_cast<std::size_t>(k)], 1e-10);
}

TEST(Spectrum, SweetSpotQBlockHasOneZeroModeAndFlatBand) {
  for (double tau : {1.0, 11.76, 20.0}) {
    QuadraticHamiltonian h(4);
    add_kitaev_chain(h, 4, 0.0, tau, tau);
    const SpectrumResult s = single_particle_spectrum(h);
    EXPECT_LT(s.energies(0), 1e-10);
    for (int k = 1; k < 4; ++k) EXPECT_NEAR(s.energies(k), tau, 1e-10 * tau);
  }
}

TEST(Spectrum, SweetSpotZeroModeLivesOnTheEndMajoranas) {
  QuadraticHamiltonian h(6);
  add_kitaev_chain(h, 6, 0.0, 1.0, 1.0);
  const SpectrumResult s = single_particle_spectrum(h);
  // Mode 0 is spanned by x_0 and p_5 only.
  Eigen::MatrixXd zero = s.modes.leftCols(2);
  Eigen::MatrixXd proj = zero * zero.transpose();
  EXPECT_NEAR(proj(x_index(0), x_index(0)), 1.0, 1e-12);
  EXPECT_NEAR(proj(p_index(5), p_index(5)), 1.0, 1e-12);
}

TEST(Spectrum, TrivialPhaseIsGapped) {
  SetupConfig c = decoupled(10, 6);
  c.mu_f = 30.0;
  c.tau_f = c.delta_f = 20.0;
  EXPECT_GT(lowest_q_block_energy(c), 5.0);
}

TEST(Spectrum, ReconstructionAndPairingOnRandomMatrices) {
  std::mt19937_64 rng(11);
  for (int n : {1, 2, 5, 9}) {
    const auto h = QuadraticHamiltonian::from_matrix(random_antisymmetric(n, rng));
    const SpectrumResult s = single_particle_spectrum(h);
    ASSERT_EQ(s.n_modes(), n);
    for (int k = 1; k < n; ++k) EXPECT_LE(s.energies(k - 1), s.energies(k));
    EXPECT_GE(s.energies.minCoeff(), -1e-12);
    const double norm = h.matrix().norm();
    EXPECT_LT((reconstruct(s) - h.matrix()).norm(), 1e-10 * norm);
    EXPECT_LT((s.modes * s.modes.transpose() - Eigen::MatrixXd::Identity(2 * n, 2 * n)).cwiseAbs().maxCoeff(), 1e-10);
    const std::vector<double> ref = positive_half(h.matrix());
    for (int k = 0; k < n; ++k) EXPECT_NEAR(s.energies(k), ref[static_cast<std::size_t>(k)], 1e-10);
  }
}

TEST(Spectrum, SpectralPairingOfIA) {
  SetupConfig c;
  c.n_total = 60;
  c.l = 10;
  c.d = 10;
  c.mu_f = 4.0;
  c.tau_gg = 0.1;
  const Eigen::MatrixXd a = build_hamiltonian(c, Phase::final).matrix();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(std::complex<double>(0, 1) * a.cast<std::complex<double>>());
  const Eigen::VectorXd ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) EXPECT_LT(std::abs(ev(i) + ev(ev.size() - 1 - i)), 1e-10);
}

TEST(Spectrum, BipartiteAndGeneralRoutesAgree) {
  SetupConfig c;
  c.n_total = 30;
  c.l = 8;
  c.d = 4;
  c.mu_f = 2.0;
  c.tau_gg = 0.05;
  const QuadraticHamiltonian h = build_hamiltonian(c, Phase::final);
  ASSERT_TRUE(h.is_bipartite());
  const SpectrumResult a = detail::spectrum_bipartite(h.matrix());
  const SpectrumResult b = detail::spectrum_general(h.matrix());
  EXPECT_LT((a.energies - b.energies).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((reconstruct(b) - h.matrix()).norm(), 1e-10 * h.matrix().norm());
}

TEST(Spectrum, GeneralRouteHandlesNullSpace) {
  // Two decoupled Majoranas per zero mode plus one ordinary mode.
  QuadraticHamiltonian h(3);
  h.add_majorana_coupling(0, 3, 0.25);  // non-bipartite pair (x_0, p_1)
  h.add_majorana_coupling(2, 4, 0.5);   // x_1 with x_2: breaks the x/p structure
  ASSERT_FALSE(h.is_bipartite());
  const SpectrumResult s = single_particle_spectrum(h);
  EXPECT_LT((reconstruct(s) - h.matrix()).norm(), 1e-12);
  EXPECT_LT((s.modes * s.modes.transpose() - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(s.energies(0), 0.0, 1e-12);
  EXPECT_NEAR(s.energies(1), 1.0, 1e-12);
  EXPECT_NEAR(s.energies(2), 2.0, 1e-12);
}

TEST(MzmSplitting, ZeroAtTheSweetSpot) {
  SetupConfig c;
  EXPECT_LT(mzm_splitting(c), 1e-12);
  c.l = 34;
  EXPECT_LT(mzm_splitting(c), 1e-12);
}

TEST(MzmSplitting, HybridizationTermSplitsTheSweetSpot) {
  SetupConfig c;
  c.tau_gg = 1e-3;
  // i g gamma_1 gamma_2l + h.c. = 2 i g gamma_1 gamma_2l: mode energy 4g.
  EXPECT_NEAR(lowest_q_block_energy(c), 4e-3, 1e-12);
  EXPECT_NEAR(mzm_splitting(c), 8e-3, 1e-12);
}

TEST(MzmSplitting, AwayFromTheSweetSpotInLongChain) {
  SetupConfig c;
  c.n_total = 800;
  c.l = 34;
  c.tau_f = c.delta_f = 20.0;
  c.mu_f = 15.0;
  EXPECT_NEAR(mzm_splitting(c), 1e-3, 0.1e-3);
  c.mu_f = 15.5;
  EXPECT_NEAR(mzm_splitting(c), 3e-3, 0.3e-3);
  c.mu_f = 16.5;
  EXPECT_NEAR(mzm_splitting(c), 0.018, 0.0018);
}

TEST(MzmSplitting, GrowsTowardsThePhaseBoundary) {
  SetupConfig c;
  c.l = 34;
  double prev = 0.0;
  for (double mu : {10.0, 14.0, 16.0, 18.0}) {
    c.mu_f = mu;
    const double s = mzm_splitting(c);
    EXPECT_GT(s, prev);
    prev = s;
  }
}

TEST(Energy, TraceFormulaMatchesModeSum) {
  // Ground-state energy -1/2 sum e_k from -(1/4) tr(A M).
  SetupConfig c;
  c.n_total = 40;
  c.l = 6;
  c.d = 6;
  const QuadraticHamiltonian h = build_hamiltonian(c, Phase::initial);
  const SpectrumResult s = single_particle_spectrum(h);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(80, 80);
  for (int k = 0; k < 40; ++k) {
    m += -(s.modes.col(2 * k) * s.modes.col(2 * k + 1).transpose()) + s.modes.col(2 * k + 1) * s.modes.col(2 * k).transpose();
  }
  EXPECT_NEAR(h.energy(m), -0.5 * s.energies.sum(), 1e-10);
}
