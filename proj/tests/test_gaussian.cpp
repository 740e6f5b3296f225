// Copyright 2026 The cesim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "cesim/fock.hpp"
#include "cesim/gaussian.hpp"
#include "cesim/gaussian_ket.hpp"

using namespace cesim;

namespace {

SymplecticGate random_gate(int n, std::mt19937_64& rng, double max_r = 0.8) {
  std::uniform_int_distribution<int> kind(0, 2);
  std::uniform_int_distribution<int> mode(0, n - 1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  switch (kind(rng)) {
    case 0: {
      int i = mode(rng);
      int j = mode(rng);
      while (j == i) j = mode(rng);
      return gate::BeamSplitter{i, j, std::numbers::pi * (u(rng) + 1.0) / 2.0};
    }
    case 1:
      return gate::Displace{mode(rng), cplx(0.6 * u(rng), 0.6 * u(rng))};
    default:
      return gate::Squeeze{mode(rng), max_r * u(rng)};
  }
}

// <psi|a_k^dag a_i|psi> and <psi|a_i a_j|psi> from a Fock state.
void fock_moments(const FockState& s, CMatrix& normal, CMatrix& anomalous, CVector& mean) {
  const int n = s.num_modes();
  normal.resize(n, n);
  anomalous.resize(n, n);
  mean.resize(n);
  std::vector<FockState> a;
  for (int i = 0; i < n; ++i) a.push_back(apply_ladder(s, i, LadderKind::Annihilate));
  for (int i = 0; i < n; ++i) {
    mean[i] = inner(s, a[i]);
    for (int k = 0; k < n; ++k) {
      normal(k, i) = inner(a[k], a[i]);
      anomalous(i, k) = inner(s, apply_ladder(a[k], i, LadderKind::Annihilate));
    }
  }
}

}  // namespace

TEST(GaussianState, Vacuum) {
  GaussianState v1 = vacuum_gaussian(1);
  EXPECT_EQ(v1.mean().norm(), 0.0);
  EXPECT_EQ(v1.cov(), 0.5 * RMatrix::Identity(2, 2));
  GaussianState v3 = vacuum_gaussian(3);
  EXPECT_EQ(v3.mean().size(), 6);
  EXPECT_EQ(v3.cov(), 0.5 * RMatrix::Identity(6, 6));
  EXPECT_LE(v3.purity_defect(), 1e-15);
}

TEST(GaussianState, RejectsUnphysicalCovariance) {
  EXPECT_THROW(GaussianState(RVector::Zero(2), 0.1 * RMatrix::Identity(2, 2)), DomainError);
  RMatrix asym = 0.5 * RMatrix::Identity(2, 2);
  asym(0, 1) = 0.1;
  EXPECT_THROW(GaussianState(RVector::Zero(2), asym), std::invalid_argument);
}

TEST(Gates, DisplaceShiftsMean) {
  GaussianState s = apply_gate(vacuum_gaussian(1), gate::Displace{0, 1.0});
  EXPECT_NEAR(s.mean()[0], std::numbers::sqrt2, 1e-15);
  EXPECT_EQ(s.mean()[1], 0.0);
  EXPECT_EQ(s.cov(), 0.5 * RMatrix::Identity(2, 2));
}

TEST(Gates, SqueezeVariances) {
  GaussianState s = apply_gate(vacuum_gaussian(1), gate::Squeeze{0, 1.0});
  EXPECT_NEAR(s.cov()(0, 0), std::exp(-2.0) / 2.0, 1e-15);
  EXPECT_NEAR(s.cov()(1, 1), std::exp(2.0) / 2.0, 1e-14);
}

TEST(Gates, BalancedBeamSplitterOnSqueezedVacuum) {
  const double r = 0.7;
  GaussianState s = apply_gate(apply_gate(vacuum_gaussian(2), gate::Squeeze{0, r}),
                               gate::BeamSplitter{0, 1, std::numbers::pi / 4.0});
  EXPECT_NEAR(s.cov()(0, 0), (std::exp(-2 * r) + 1) / 4, 1e-14);
  EXPECT_NEAR(s.cov()(1, 1), (std::exp(-2 * r) + 1) / 4, 1e-14);
  EXPECT_NEAR(s.cov()(0, 1), (std::exp(-2 * r) - 1) / 4, 1e-14);

  // Same covariance sign from the Fock engine with the same generators.
  FockState f = apply_generator_exponential(vacuum_fock(2, 70), gen::Squeeze{0, r});
  f = apply_generator_exponential(f, gen::BeamSplitter{0, 1, std::numbers::pi / 4.0});
  auto x = [](const FockState& st, int k) {
    return (apply_ladder(st, k, LadderKind::Annihilate) + apply_ladder(st, k, LadderKind::Create)) *
           cplx(1.0 / std::numbers::sqrt2);
  };
  const double cov01 = inner(x(f, 0), x(f, 1)).real();
  EXPECT_NEAR(cov01, (std::exp(-2 * r) - 1) / 4, 1e-9);
}

TEST(Gates, SymplecticAndPurityPreserved) {
  std::mt19937_64 rng(41);
  const int n = 3;
  const RMatrix omega = symplectic_form(n);
  GaussianState s = vacuum_gaussian(n);
  for (int t = 0; t < 30; ++t) {
    SymplecticGate g = random_gate(n, rng, 1.5);
    const RMatrix sm = symplectic_matrix(g, n);
    EXPECT_LE((sm * omega * sm.transpose() - omega).cwiseAbs().maxCoeff(), 1e-12);
    s = apply_gate(s, g);
    EXPECT_LE(s.purity_defect(), 1e-9);
  }
}

TEST(Gates, IndexOutOfRange) {
  EXPECT_THROW(apply_gate(vacuum_gaussian(2), gate::Squeeze{2, 0.1}), std::out_of_range);
  EXPECT_THROW(apply_gate(vacuum_gaussian(2), gate::BeamSplitter{0, 3, 0.1}), std::out_of_range);
}

TEST(CollectiveStats, VacuumVariances) {
  QuadratureStats a = collective_quadrature_stats(vacuum_gaussian(3), {1, 1, 1});
  EXPECT_NEAR(a.var_x, 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(a.mean_x, 0.0, 1e-15);
  QuadratureStats b = collective_quadrature_stats(vacuum_gaussian(3), {1, 2, 3});
  EXPECT_NEAR(b.var_x, (1.0 + 4.0 + 9.0) / (2.0 * 9.0), 1e-15);
  EXPECT_THROW(collective_quadrature_stats(vacuum_gaussian(3), {1, 2}), std::invalid_argument);
}

TEST(Overlap, KnownValues) {
  GaussianState v = vacuum_gaussian(1);
  EXPECT_NEAR(overlap_gaussian(v, v), 1.0, 1e-15);
  EXPECT_NEAR(overlap_gaussian(v, apply_gate(v, gate::Displace{0, 2.0})), std::exp(-4.0), 1e-15);
  // |<0|S(1)|0>|^2 = sech(1).
  GaussianState sq = apply_gate(v, gate::Squeeze{0, 1.0});
  EXPECT_NEAR(overlap_gaussian(v, sq), 1.0 / std::cosh(1.0), 1e-14);
  FockState f = apply_generator_exponential(vacuum_fock(1, 80), gen::Squeeze{0, 1.0});
  EXPECT_NEAR(std::norm(inner(vacuum_fock(1, 80), f)), 1.0 / std::cosh(1.0), 1e-10);
}

TEST(Overlap, SymmetricAndRejectsImpure) {
  std::mt19937_64 rng(43);
  GaussianState a = vacuum_gaussian(2);
  GaussianState b = vacuum_gaussian(2);
  for (int t = 0; t < 5; ++t) {
    a = apply_gate(a, random_gate(2, rng));
    b = apply_gate(b, random_gate(2, rng));
  }
  EXPECT_NEAR(overlap_gaussian(a, b), overlap_gaussian(b, a), 1e-14);
  GaussianState thermal(RVector::Zero(2), RMatrix::Identity(2, 2));
  EXPECT_THROW(overlap_gaussian(thermal, vacuum_gaussian(1)), DomainError);
}

TEST(KetConversion, RoundTripAndFockAgreement) {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 5; ++trial) {
    GaussianState g = vacuum_gaussian(2);
    FockState f = vacuum_fock(2, 40);
    for (int t = 0; t < 4; ++t) {
      SymplecticGate gt = random_gate(2, rng, 0.4);
      g = apply_gate(g, gt);
      f = apply_generator_exponential(f, to_generator(gt));
    }
    GaussianKet k = to_ket(g);
    GaussianState back = to_gaussian(k);
    EXPECT_LE((back.mean() - g.mean()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((back.cov() - g.cov()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(ket_norm_sq(k), 1.0, 1e-12);
    ASSERT_LT(f.leak(), 1e-10);
    FockState from_ket = to_fock(g, 40);
    EXPECT_NEAR(std::abs(inner(from_ket, f)), 1.0, 1e-9);
  }
}

TEST(Moments, MatchFockEngine) {
  std::mt19937_64 rng(53);
  GaussianState g = vacuum_gaussian(2);
  FockState f = vacuum_fock(2, 40);
  for (int t = 0; t < 5; ++t) {
    SymplecticGate gt = random_gate(2, rng, 0.4);
    g = apply_gate(g, gt);
    f = apply_generator_exponential(f, to_generator(gt));
  }
  CMatrix nm;
  CMatrix am;
  CVector mean;
  fock_moments(f, nm, am, mean);
  EXPECT_LE((g.mean_amplitudes() - mean).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LE((g.normal_moments() - nm).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LE((g.anomalous_moments() - am).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Residuals, LadderResidualMatchesFock) {
  GaussianKet k{0.0, CVector(2), CMatrix(2, 2)};
  k.linear << cplx(0.3, 0.2), cplx(-0.1, 0.4);
  k.quad << 0.1, cplx(0.05, 0.02), cplx(0.05, 0.02), -0.12;
  const std::vector<cplx> c = {cplx(1.0, 0.5), cplx(-0.7, 0.0)};
  const cplx e(0.2, -0.1);
  FockState f = build_quadratic_exponential(k, 50);
  FockState res = apply_ladder_combination(f, c, LadderKind::Annihilate) - f * e;
  EXPECT_NEAR(ladder_residual(k, c, e), res.norm() / f.norm(), 1e-10);
}

TEST(Residuals, QuadratureResidualIsVarianceVacuum) {
  EXPECT_NEAR(quadrature_residual(vacuum_gaussian(1), {1.0}, 0.0), std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(quadrature_residual(vacuum_gaussian(1), {1.0}, 1.0), std::sqrt(1.5), 1e-15);
}
