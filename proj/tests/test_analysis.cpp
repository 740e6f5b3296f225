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

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "cesim/analysis.hpp"
#include "cesim/circuits.hpp"
#include "cesim/states.hpp"

namespace cesim {
namespace {

double tl2(const ModeWeights& w) { return w.tau() * w.tau() * w.lambda() * w.lambda(); }

GaussianState ces_circuit_state(const ModeWeights& w, const CesParams& p) {
  return execute_gaussian(generate_ces_circuit(w, {p.beta, p.gamma}, p.x, p.reg_r));
}

TEST(EigenResiduals, CollectiveSqueezedVacuum) {
  const ModeWeights w(1.0, 2.0, 3.0);
  const CesParams p{0.0, 0.0, 0.0, 1.0};
  const FockState s = tripartite_ces_formula(w, p, 20);
  const ResidualReport rep = eigen_residuals(s, w, tripartite_targets(w, p), p.reg_r);
  ASSERT_EQ(rep.entries.size(), 3u);
  EXPECT_LE(rep.max_ladder_relative(), 1e-10);
  for (const auto& e : rep.entries) {
    EXPECT_EQ(e.cutoff, 20);
    EXPECT_EQ(e.leak, s.leak());
    EXPECT_NEAR(e.relative, e.absolute / s.norm(), 1e-15);
  }
}

TEST(EigenResiduals, AsymmetricFormulaBothEngines) {
  const ModeWeights w(1.0, 2.0, 3.0);
  const CesParams p{0.3, cplx(0.0, -0.2), 0.5, 2.0};
  const EigenTargets t = tripartite_targets(w, p);
  const ResidualReport fock = eigen_residuals(tripartite_ces_formula(w, p, 30), w, t, p.reg_r);
  const ResidualReport gauss = eigen_residuals(to_gaussian(tripartite_ces_ket(w, p)), w, t, p.reg_r);
  EXPECT_LE(fock.max_ladder_relative(), 1e-7);
  EXPECT_LE(gauss.max_ladder_relative(), 1e-7);
  EXPECT_EQ(gauss.entries[1].cutoff, 0);
}

TEST(EigenResiduals, OffsetEigenvalueGivesOffsetResidual) {
  // For an exact eigenstate, ||(A - e - d) psi|| = |d| on a normalized state.
  const ModeWeights w(1.0, 2.0, 3.0);
  const CesParams p{0.3, cplx(0.1, 0.2), 0.5, 1.5};
  EigenTargets t = tripartite_targets(w, p);
  t.ladder[0] += cplx(0.0, 0.1);
  const ResidualReport rep = eigen_residuals(to_gaussian(tripartite_ces_ket(w, p)), w, t, p.reg_r);
  EXPECT_NEAR(rep.entries[1].relative, 0.1, 1e-9);
  EXPECT_LE(rep.entries[2].relative, 1e-9);
}

TEST(EigenResiduals, QuadratureResidualDecreases) {
  const ModeWeights w(0.7, 1.9, 2.4);
  const CesParams base{0.4, cplx(-0.3, 0.5), -0.6, 0.5};
  double prev = 1e300;
  for (double r : {0.5, 1.0, 1.5, 2.0}) {
    CesParams p = base;
    p.reg_r = r;
    const double q = eigen_residuals(to_gaussian(tripartite_ces_ket(w, p)), w, tripartite_targets(w, p), r)
                         .collective_relative();
    EXPECT_LT(q, prev);
    prev = q;
  }
}

TEST(EigenResiduals, FockAndGaussianAgreeAtLowSqueeze) {
  const ModeWeights w(1.0, 1.0, 1.0);
  const CesParams p{0.2, cplx(0.0, 0.1), 0.3, 0.5};
  const FockState f = tripartite_ces_formula(w, p, 30);
  ASSERT_LT(f.leak(), 1e-8);
  const EigenTargets t = tripartite_targets(w, p);
  const double qf = eigen_residuals(f, w, t, p.reg_r).collective_relative();
  const double qg = eigen_residuals(to_gaussian(tripartite_ces_ket(w, p)), w, t, p.reg_r).collective_relative();
  EXPECT_NEAR(qf, qg, 1e-6);
}

TEST(EigenResiduals, ConjugateMomentumTargets) {
  const ModeWeights w(1.0, 2.0, 3.0);
  const ConjugateParams p{0.3, cplx(0.2, -0.1), 0.4, 2.0};
  const EigenTargets t = conjugate_targets(w, p);
  EXPECT_EQ(t.kind, QuadratureKind::Momentum);
  const ResidualReport g = eigen_residuals(to_gaussian(conjugate_ces_ket(w, p)), w, t, p.reg_r);
  EXPECT_LE(g.max_ladder_relative(), 1e-9);
  // Collective P mean is exact; the residual is the squeezed spread only.
  const double spread = std::sqrt(w.lambda() * w.lambda() / 3.0 * 0.5 * std::exp(-4.0));
  EXPECT_NEAR(g.collective_relative(), spread, 1e-10);
  const ResidualReport f = eigen_residuals(conjugate_ces_formula(w, p, 25), w, t, p.reg_r);
  EXPECT_LE(f.max_ladder_relative(), 1e-8);
}

TEST(EigenResiduals, MultipartiteReportsBothReadings) {
  const MultiWeights w(std::vector<double>{1.0, 1.0, 2.0, 3.0});
  const std::vector<cplx> betas = {0.1, 0.0, -0.2};
  const EigenTargets t = multipartite_targets(w, betas, 0.3);
  const ResidualReport rep = eigen_residuals(multipartite_ces_gaussian(w, betas, 0.3, 1.5), w, t, 1.5);
  ASSERT_EQ(rep.entries.size(), 7u);
  EXPECT_LE(rep.max_ladder_relative(), 1e-9);
  EXPECT_LE(rep.collective_relative(), std::sqrt(w.lambda() * w.lambda() / 4.0 * 0.5 * std::exp(-3.0)) + 1e-12);
  int informational = 0;
  for (const auto& e : rep.entries) {
    if (!e.informational) continue;
    ++informational;
  }
  EXPECT_EQ(informational, 3);
  EXPECT_NEAR(rep.entries[2].relative, std::abs(w[1] * 0.1 * (w.lambda() - 1.0)), 1e-9);
}

TEST(EigenResiduals, ShapeMismatchThrows) {
  const ModeWeights w(1.0, 1.0, 1.0);
  const EigenTargets t = tripartite_targets(w, CesParams{});
  EXPECT_THROW(eigen_residuals(vacuum_fock(2, 5), w, t, 1.0), std::invalid_argument);
  EXPECT_THROW(eigen_residuals(vacuum_gaussian(4), w, t, 1.0), std::invalid_argument);
}

TEST(CollectiveStats, FockMatchesGaussian) {
  const ModeWeights w(1.0, 1.5, 0.8);
  const Circuit c = generate_ces_circuit(w, {cplx(0.2, 0.1), -0.15}, 0.3, 0.3);
  const FockState f = execute_fock(c, 24);
  ASSERT_LT(f.leak(), 1e-8);
  const QuadratureStats a = collective_quadrature_stats(f, w.as_vector());
  const QuadratureStats b = collective_quadrature_stats(execute_gaussian(c), w.as_vector());
  EXPECT_NEAR(a.mean_x, b.mean_x, 1e-6);
  EXPECT_NEAR(a.mean_p, b.mean_p, 1e-6);
  EXPECT_NEAR(a.var_x, b.var_x, 1e-6);
  EXPECT_NEAR(a.var_p, b.var_p, 1e-6);
}

TEST(Orthogonality, SelfOverlapIsOne) {
  const ModeWeights w(1.0, 2.0, 3.0);
  const CesParams p{0.3, cplx(0.0, 0.2), 0.1, 1.0};
  OrthogonalityOptions o;
  o.dx_sweep = {0.0, 0.2};
  const OrthogonalityReport rep = orthogonality_check(w, p, p, 20, o);
  EXPECT_NEAR(std::abs(rep.numeric_overlap), 1.0, 1e-12);
  ASSERT_TRUE(rep.fock_overlap.has_value());
  EXPECT_NEAR(std::abs(*rep.fock_overlap), 1.0, 1e-12);
}

TEST(Orthogonality, SweepMatchesClosedFormDecay) {
  // Only the collective coordinate moves: |<psi(x)|psi(x+dx)>| =
  // exp(-(3/8) dx^2 e^{2r}) for a squeezed collective mode.
  const ModeWeights w(1.0, 2.0, 3.0);
  const CesParams p{0.3, cplx(0.0, 0.2), 0.1, 2.0};
  OrthogonalityOptions o;
  o.fock_overlaps = false;
  const OrthogonalityReport rep = orthogonality_check(w, p, p, 0, o);
  for (std::size_t i = 0; i < rep.dx.size(); ++i) {
    EXPECT_NEAR(rep.sweep_exact[i], std::exp(-0.375 * rep.dx[i] * rep.dx[i] * std::exp(4.0)), 1e-10);
  }
  EXPECT_TRUE(rep.fit_ok);
  EXPECT_TRUE(rep.width_within_tolerance);
  EXPECT_NEAR(rep.fitted_delta_width / ((8.0 / 3.0) * std::exp(-4.0)), 1.0, 0.05);
}

TEST(Orthogonality, WidthShrinksWithSqueeze) {
  const ModeWeights w(1.0, 1.0, 1.0);
  OrthogonalityOptions o;
  o.fock_overlaps = false;
  CesParams p{0.2, 0.1, 0.0, 1.0};
  const double w1 = orthogonality_check(w, p, p, 0, o).fitted_delta_width;
  p.reg_r = 2.0;
  const double w2 = orthogonality_check(w, p, p, 0, o).fitted_delta_width;
  EXPECT_NEAR(w2 / w1, std::exp(-2.0), 0.1 * std::exp(-2.0));
}

TEST(Orthogonality, FockOverlapsAgreeAtModerateSqueeze) {
  const ModeWeights w(1.0, 1.0, 1.0);
  const CesParams p1{0.2, 0.1, 0.0, 1.0};
  CesParams p2 = p1;
  p2.x = 0.3;
  OrthogonalityOptions o;
  o.dx_sweep = {0.0, 0.1, 0.2, 0.3};
  const OrthogonalityReport rep = orthogonality_check(w, p1, p2, 30, o);
  ASSERT_LT(rep.fock_leak, 1e-8);
  EXPECT_NEAR(std::abs(*rep.fock_overlap - rep.numeric_overlap), 0.0, 1e-6);
  for (std::size_t i = 0; i < rep.dx.size(); ++i) EXPECT_NEAR(rep.sweep_fock[i], rep.sweep_exact[i], 1e-6);
}

TEST(Orthogonality, FormulaCoefficientLiteral) {
  // Coincident labels: exponent (tau^2 - mu^2)|b|^2/3 + (mu^2 - tau^2)|g|^2/3.
  const ModeWeights sym(1.0, 1.0, 1.0);
  EXPECT_NEAR(std::abs(overlap_formula_coefficient(sym, 0.3, 0.2, 0.3, 0.2) - 1.0), 0.0, 1e-15);
  const ModeWeights w(1.0, 2.0, 3.0);
  const cplx b = 0.3, g(0.0, 0.2);
  const double expo = (9.0 - 1.0) / 3.0 * std::norm(b) + (1.0 - 9.0) / 3.0 * std::norm(g);
  EXPECT_NEAR(std::abs(overlap_formula_coefficient(w, b, g, b, g) - std::exp(expo)), 0.0, 1e-14);
  EXPECT_NEAR(std::exp(expo), 1.142631, 1e-6);
}

TEST(Orthogonality, DeltaNormalizationClosedForm) {
  // Zero labels at x = 0: int dx' exp(-(c + a) x'^2) / sqrt(1 - t^2),
  // c = 3(1 - t)/8, a = 3(1 + t)/(8(1 - t)).
  const ModeWeights w(1.0, 2.0, 3.0);
  for (double r : {1.0, 3.0, 6.0}) {
    const double t = std::tanh(r);
    const double c = 3.0 * (1.0 - t) / 8.0, a = 3.0 * (1.0 + t) / (8.0 * (1.0 - t));
    const double expected = std::sqrt(M_PI / (a + c)) / std::sqrt(1.0 - t * t);
    const cplx got = delta_limit_integral(w, CesParams{0.0, 0.0, 0.0, r}, 0.0, 0.0);
    EXPECT_NEAR(got.real(), expected, 1e-10 * expected);
    EXPECT_NEAR(got.imag(), 0.0, 1e-12);
  }
  EXPECT_NEAR(delta_limit_integral(w, CesParams{0.0, 0.0, 0.0, 6.0}, 0.0, 0.0).real(), std::sqrt(2.0 * M_PI / 3.0),
              1e-4);
}

TEST(Orthogonality, NumericCoefficientAdjudication) {
  OrthogonalityOptions o;
  o.fock_overlaps = false;
  o.dx_sweep = {0.0, 0.1};
  // Coincident labels: numeric coefficient is 1 for every weight choice.
  for (const ModeWeights& w : {ModeWeights(1, 1, 1), ModeWeights(1, 2, 3)}) {
    const CesParams p{0.3, cplx(0.0, 0.2), 0.1, 2.0};
    const OrthogonalityReport rep = orthogonality_check(w, p, p, 0, o);
    EXPECT_NEAR(std::abs(rep.numeric_coefficient - 1.0), 0.0, 1e-6);
  }
  // Printed coefficient disagrees at mu != tau.
  const OrthogonalityReport asym =
      orthogonality_check(ModeWeights(1, 2, 3), CesParams{0.3, cplx(0.0, 0.2), 0.1, 2.0},
                          CesParams{0.3, cplx(0.0, 0.2), 0.1, 2.0}, 0, o);
  EXPECT_GT(std::abs(asym.formula_coefficient - asym.numeric_coefficient), 0.1);
  // Symmetric weights, distinct labels: printed and numeric agree.
  const OrthogonalityReport sym = orthogonality_check(ModeWeights(1, 1, 1), CesParams{0.3, cplx(0.1, 0.2), 0.1, 2.0},
                                                      CesParams{-0.2, cplx(0.4, 0.0), 0.1, 2.0}, 0, o);
  EXPECT_NEAR(std::abs(sym.numeric_coefficient - sym.formula_coefficient), 0.0, 1e-4);
}

TEST(Orthogonality, FitRejectsNonDecay) {
  EXPECT_THROW(fit_gaussian_decay({0.0, 0.1, 0.2}, {1.0, 1.1, 1.3}), DomainError);
  EXPECT_THROW(fit_gaussian_decay({0.0}, {1.0}), std::invalid_argument);
  const GaussianFit f = fit_gaussian_decay({0.0, 0.5, 1.0}, {2.0, 2.0 * std::exp(-0.125), 2.0 * std::exp(-0.5)});
  EXPECT_NEAR(f.width, 2.0, 1e-12);
  EXPECT_NEAR(f.prefactor, 2.0, 1e-12);
}

std::vector<FockState> low_states() {
  return {basis_fock({0, 0, 0}, 2), basis_fock({1, 0, 0}, 2), basis_fock({0, 1, 0}, 2)};
}

TEST(Completeness, DeterministicGivenSeed) {
  CompletenessOptions o;
  o.samples = 20000;
  o.shards = 4;
  const auto a = completeness_mc(ModeWeights(1, 2, 3), low_states(), 2.0, o);
  const auto b = completeness_mc(ModeWeights(1, 2, 3), low_states(), 2.0, o);
  EXPECT_EQ(a.estimate, b.estimate);
  EXPECT_EQ(a.standard_error, b.standard_error);
  o.seed = 7;
  const auto c = completeness_mc(ModeWeights(1, 2, 3), low_states(), 2.0, o);
  EXPECT_NE(a.estimate, c.estimate);
}

TEST(Completeness, VacuumDiagonalIsOne) {
  // With weight tau^2 lambda^2 the vacuum entry is exactly 1: the envelope
  // integral is (2 pi)^{5/2} / sqrt(det P) with det P = 3 (4/9)^2 (ab - c^2)^2.
  CompletenessOptions o;
  o.samples = 200000;
  const auto rep = completeness_mc(ModeWeights(1, 2, 3), {basis_fock({0, 0, 0}, 2)}, 3.0, o);
  EXPECT_NEAR(rep.estimate(0, 0).real(), 1.0, 3.0 * rep.standard_error(0, 0));
  const double det = rep.envelope_precision.determinant();
  EXPECT_NEAR(rep.weight * std::pow(2.0 * M_PI, 2.5) / std::sqrt(det), 1.0, 1e-12);
  EXPECT_LT((rep.proposal_covariance - 2.25 * rep.envelope_precision.inverse()).norm(), 1e-12);
}

TEST(Completeness, OffDiagonalVanishes) {
  CompletenessOptions o;
  o.samples = 200000;
  const auto rep = completeness_mc(ModeWeights(1, 1, 1), {basis_fock({0, 0, 0}, 2), basis_fock({1, 0, 0}, 2)}, 3.0, o);
  EXPECT_LE(std::abs(rep.estimate(0, 1)), 3.0 * rep.standard_error(0, 1));
  EXPECT_TRUE(rep.conclusive);
}

TEST(Completeness, ExcitedDiagonalApproachesOne) {
  // G_{100,100} = 1 - 2 k mu^2 / (3 lambda^2), k = (1 - tanh r)/2.
  CompletenessOptions o;
  o.samples = 200000;
  const ModeWeights w(1, 1, 1);
  double prev = 0.0;
  for (double r : {1.0, 2.0, 3.0}) {
    const auto rep = completeness_mc(w, {basis_fock({1, 0, 0}, 2)}, r, o);
    const double k = 0.5 * (1.0 - std::tanh(r));
    const double predicted = 1.0 - 2.0 * k / 3.0;
    EXPECT_NEAR(rep.estimate(0, 0).real(), predicted, 3.0 * rep.standard_error(0, 0)) << r;
    EXPECT_GT(predicted, prev);
    prev = predicted;
  }
}

TEST(Completeness, RegularizationBiasOffDiagonal) {
  // The regularized projector acts as a function of P_R on the collective
  // mode, giving the one-photon block I - 2 k u u^T.
  CompletenessOptions o;
  o.samples = 200000;
  const double r = 2.0, k = 0.5 * (1.0 - std::tanh(r));
  const auto rep = completeness_mc(ModeWeights(1, 1, 1), {basis_fock({1, 0, 0}, 2), basis_fock({0, 1, 0}, 2)}, r, o);
  EXPECT_NEAR(rep.estimate(0, 1).real(), -2.0 * k / 3.0, 3.0 * rep.standard_error(0, 1));
}

TEST(Completeness, RejectsHighExcitation) {
  EXPECT_THROW(completeness_mc(ModeWeights(1, 1, 1), {basis_fock({2, 2, 1}, 3)}, 2.0), DomainError);
  EXPECT_THROW(completeness_mc(ModeWeights(1, 1, 1), {}, 2.0), std::invalid_argument);
}

TEST(Wigner, VacuumLiteralValues) {
  const ModeWeights w(1.0, 2.0, 3.0);
  const GaussianState g = vacuum_gaussian(3);
  const FockState f = vacuum_fock(3, 6);
  EXPECT_NEAR(wigner_collective(g, w, 0.0, 0.0).literal, 1.0 / (M_PI * tl2(w)), 1e-15);
  EXPECT_NEAR(wigner_collective(f, w, 0.0, 0.0).literal, 1.0 / (M_PI * tl2(w)), 1e-15);
  EXPECT_NEAR(wigner_collective(g, w, 1.0, 0.0).literal, std::exp(-1.5) / (M_PI * tl2(w)), 1e-15);
  EXPECT_NEAR(wigner_collective(f, w, 1.0, 0.0).literal, std::exp(-1.5) / (M_PI * tl2(w)), 1e-14);
}

TEST(Wigner, LiteralIntegratesToTwoThirdsOverScale) {
  const ModeWeights w(1.0, 2.0, 3.0);
  const CollectiveWigner cw(vacuum_gaussian(3), w);
  const int n = 201;
  const double h = 12.0 / (n - 1);
  double lit = 0.0, nor = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const WignerValue v = cw(-6.0 + i * h, -6.0 + j * h);
      lit += v.literal;
      nor += v.normalized;
    }
  }
  EXPECT_NEAR(lit * h * h, 2.0 / (3.0 * tl2(w)), 1e-10);
  EXPECT_NEAR(nor * h * h, 1.0, 1e-10);
}

TEST(Wigner, FockLaguerreMatchesCoherentClosedForm) {
  // Product coherent state: the collective mode is coherent with amplitude
  // u . alpha, W_R = exp(-|(X, P) - (X0, P0)|^2) / pi.
  const ModeWeights w(1.0, 2.0, 3.0);
  const std::vector<cplx> alpha = {cplx(0.3, -0.2), cplx(0.5, 0.1), cplx(-0.2, 0.4)};
  FockState s = vacuum_fock(3, 20);
  for (int m = 0; m < 3; ++m) s = apply_generator_exponential(s, gen::Displacement{m, alpha[m]});
  ASSERT_LT(s.leak(), 1e-8);
  const std::vector<double> u = MultiWeights(w).direction();
  cplx a = 0.0;
  for (int m = 0; m < 3; ++m) a += u[m] * alpha[m];
  const double x0 = std::sqrt(2.0) * a.real(), p0 = std::sqrt(2.0) * a.imag();
  const CollectiveWigner cw(s, w);
  for (double x : {-0.5, 0.0, 0.7}) {
    for (double p : {-0.4, 0.3}) {
      const double xr = std::sqrt(1.5) * x, pr = std::sqrt(1.5) * p;
      const double wr = std::exp(-((xr - x0) * (xr - x0) + (pr - p0) * (pr - p0))) / M_PI;
      EXPECT_NEAR(cw(x, p).normalized, 1.5 * wr, 1e-8);
    }
  }
}

TEST(Wigner, EnginesAgree) {
  const ModeWeights w(1.0, 2.0, 3.0);
  const GaussianState g = ces_circuit_state(w, CesParams{0.2, cplx(0.0, 0.1), 0.4, 0.4});
  const FockState f = to_fock(g, 26);
  ASSERT_LT(f.leak(), 1e-8);
  const CollectiveWigner wg(g, w), wf(f, w);
  EXPECT_LT((wg.cov() - wf.cov()).norm(), 1e-8);
  for (double x : {-0.3, 0.4, 0.9}) {
    for (double p : {-0.2, 0.0, 0.5}) EXPECT_NEAR(wg(x, p).normalized, wf(x, p).normalized, 1e-6);
  }
}

TEST(Wigner, CesPeaksAtOwnX) {
  const ModeWeights w(1.0, 2.0, 3.0);
  const double x0 = 0.6;
  const CollectiveWigner cw(ces_circuit_state(w, CesParams{0.5, cplx(0.2, -0.3), x0, 2.0}), w);
  double best = -1.0, arg = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double x = -1.0 + i * 0.005;
    const double v = cw(x, 0.0).normalized;
    if (v > best) {
      best = v;
      arg = x;
    }
  }
  EXPECT_NEAR(arg, x0, 0.005);
}

TEST(Marginals, MatchGaussianDensity) {
  const ModeWeights w(1.0, 2.0, 3.0);
  for (const GaussianState& g : {vacuum_gaussian(3), ces_circuit_state(w, CesParams{0.3, cplx(0, 0.2), 0.5, 2.0})}) {
    const CollectiveWigner cw(g, w);
    const double sx = std::sqrt(cw.cov()(0, 0) / 1.5), cx = cw.mean()[0] / std::sqrt(1.5);
    for (int i = -8; i <= 8; ++i) {
      const double x = cx + 0.5 * i * sx;
      EXPECT_NEAR(cw.marginal_x(x), collective_density_x(g, w, x), 1e-4);
    }
    const double sp = std::sqrt(cw.cov()(1, 1) / 1.5);
    for (int i = -8; i <= 8; ++i) {
      const double p = 0.5 * i * sp;
      EXPECT_NEAR(cw.marginal_p(p), collective_density_p(g, w, p), 1e-4);
    }
    // Normalization of the x marginal.
    const int n = 401;
    const double h = 16.0 * sx / (n - 1);
    double acc = 0.0;
    for (int k = 0; k < n; ++k) {
      const double v = cw.marginal_x(cx - 8.0 * sx + k * h);
      acc += (k == 0 || k == n - 1) ? 0.5 * v : v;
    }
    EXPECT_NEAR(acc * h, 1.0, 1e-4);
  }
}

TEST(Marginals, CesPeaksAtOwnX) {
  const ModeWeights w(1.0, 1.0, 1.0);
  const GaussianState g = ces_circuit_state(w, CesParams{0.1, 0.2, -0.35, 2.0});
  const CollectiveWigner cw(g, w);
  double best = -1.0, arg = 0.0;
  for (int i = 0; i <= 200; ++i) {
    const double x = -0.6 + i * 0.0025;
    const double v = cw.marginal_x(x);
    if (v > best) {
      best = v;
      arg = x;
    }
  }
  EXPECT_NEAR(arg, -0.35, 0.0025);
}

TEST(Marginals, FockPathMatchesGaussianDensity) {
  const ModeWeights w(1.0, 1.0, 1.0);
  const GaussianState g = ces_circuit_state(w, CesParams{0.1, 0.2, 0.3, 0.5});
  const FockState f = to_fock(g, 26);
  ASSERT_LT(f.leak(), 1e-8);
  const CollectiveWigner cw(f, w);
  for (double x : {-0.2, 0.3, 0.8}) EXPECT_NEAR(cw.marginal_x(x), collective_density_x(g, w, x), 1e-4);
}

TEST(Su11, StandardNormalizationCloses) {
  const Su11Report rep = su11_check(MultiWeights(ModeWeights(1, 2, 3)), 20);
  EXPECT_EQ(rep.interior_max_total, 16);
  for (const auto& r : rep.relations) {
    if (r.relation.rfind("printed", 0) == 0) {
      EXPECT_FALSE(r.closes) << r.relation;
    } else {
      EXPECT_TRUE(r.closes) << r.relation << " " << r.defect;
    }
  }
  EXPECT_LE(rep.relations[0].defect, 1e-12);
}

TEST(Su11, PrintedDefectsMatchSpectralValues) {
  // On states with total photon number <= 16, R^dag R has spectrum 0..16, so
  // the printed defects are 2(16 + 1/2), ||R^2|| = sqrt(16*15) and
  // ||R^dag^2|| = sqrt(17*18).
  const Su11Report rep = su11_check(MultiWeights(ModeWeights(1, 2, 3)), 20);
  EXPECT_NEAR(rep.relations[4].defect, 33.0, 1e-9);
  EXPECT_NEAR(rep.relations[5].defect, std::sqrt(240.0), 1e-9);
  EXPECT_NEAR(rep.relations[6].defect, std::sqrt(306.0), 1e-9);
  EXPECT_THROW(su11_check(MultiWeights(ModeWeights(1, 1, 1)), 6), std::invalid_argument);
}

TEST(Squeeze, IdentityAtUnitL) {
  const SqueezeReport rep = squeeze_operator_check(ModeWeights(1, 2, 3), 1.0, 12);
  EXPECT_LE(rep.defect, 1e-12);
  EXPECT_NEAR(rep.vacuum_norm, 1.0, 1e-12);
}

TEST(Squeeze, DisentanglingAtCutoff25) {
  const ModeWeights w(1, 1, 1);
  const SqueezeReport rep = squeeze_operator_check(w, M_E, 25);
  EXPECT_LE(rep.defect, 1e-8);
  EXPECT_NEAR(rep.vacuum_norm, 1.0, 1e-8);
  EXPECT_NEAR(rep.vacuum_norm_exact, 1.0, 1e-12);
  EXPECT_GE(rep.vacuum_overlap, 1.0 - 1e-8);
  EXPECT_GE(rep.vacuum_overlap_printed_quadratic, 1.0 - 1e-8);  // lambda = 1
  EXPECT_NEAR(rep.measured_ratio, 1.0, 1e-8);
  EXPECT_NEAR(rep.printed_prefactor, 1.0, 1e-15);
  // The factored vacuum on the box loses exactly its leak.
  EXPECT_NEAR(rep.vacuum_norm_factored * rep.vacuum_norm_factored, 1.0 - rep.vacuum_leak_factored, 1e-15);
}

TEST(Squeeze, PrintedQuadraticFailsForNonUnitLambda) {
  const ModeWeights w(1, 2, 3);
  const SqueezeReport rep = squeeze_operator_check(w, 1.2, 15);
  EXPECT_GE(rep.vacuum_overlap, 1.0 - 1e-10);
  EXPECT_LT(rep.vacuum_overlap_printed_quadratic, 0.99);
  EXPECT_NEAR(rep.printed_prefactor, 1.0 / 42.0, 1e-15);
  // tanh(ln 1.5) * 14 / 6 > 1/2: the printed exponential is not normalizable.
  EXPECT_TRUE(std::isnan(squeeze_operator_check(w, 1.5, 15).vacuum_overlap_printed_quadratic));
}

TEST(Squeeze, DefectShrinksWithCutoff) {
  const ModeWeights w(1, 1, 1);
  const double d12 = squeeze_operator_check(w, M_E, 12).defect;
  const double d20 = squeeze_operator_check(w, M_E, 20).defect;
  const double d30 = squeeze_operator_check(w, M_E, 30).defect;
  EXPECT_LT(d20, d12);
  EXPECT_LT(d30, d20);
}

TEST(Squeeze, RejectsBadInputs) {
  EXPECT_THROW(squeeze_operator_check(ModeWeights(1, 1, 1), 5.0, 12), std::invalid_argument);
  EXPECT_THROW(squeeze_operator_check(ModeWeights(1, 1, 1), 0.0, 12), std::invalid_argument);
  EXPECT_THROW(squeeze_operator_check(ModeWeights(1, 1, 1), 2.0, 8), DomainError);
}

TEST(GaussIntegral, BasicExamples) {
  EXPECT_NEAR(std::abs(gaussian_integral_2d({-1.0, 0.0, 0.0, 0.0, 0.0}) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(gaussian_integral_2d({-1.0, 0.3, 0.2, 0.0, 0.0}) - std::exp(0.06)), 0.0, 1e-15);
  EXPECT_NEAR(std::exp(0.06), 1.061837, 1e-6);
}

TEST(GaussIntegral, MatchesQuadrature) {
  for (const GaussIntegralParams& p : {GaussIntegralParams{-2.0, 0.5, -0.1, 0.2, 0.1},
                                       GaussIntegralParams{-1.0, 0.3, 0.2, 0.0, 0.0},
                                       GaussIntegralParams{cplx(-1.5, 0.3), cplx(0.2, 0.1), cplx(-0.3, 0.2),
                                                           cplx(0.1, -0.2), cplx(0.3, 0.1)}}) {
    const cplx exact = gaussian_integral_2d(p);
    const cplx quad = gaussian_integral_2d_quadrature(p);
    EXPECT_LE(std::abs(exact - quad), 1e-6 * std::abs(exact));
  }
}

TEST(GaussIntegral, ConvergenceConditions) {
  EXPECT_TRUE((GaussIntegralParams{-1.0, 0.0, 0.0, 0.0, 0.0}.converges()));
  EXPECT_FALSE((GaussIntegralParams{1.0, 0.0, 0.0, 0.0, 0.0}.converges()));
  EXPECT_FALSE((GaussIntegralParams{-1.0, 0.0, 0.0, 0.6, 0.6}.converges()));
  EXPECT_THROW(gaussian_integral_2d({1.0, 0.0, 0.0, 0.0, 0.0}), DomainError);
}

TEST(NascentDelta, Properties) {
  EXPECT_NEAR(nascent_delta(0.0, 0.01), 1.0 / std::sqrt(M_PI * 0.01), 1e-12);
  const int n = 4001;
  const double h = 2.0 / (n - 1);
  double acc = 0.0;
  for (int k = 0; k < n; ++k) acc += nascent_delta(-1.0 + k * h, 0.01) * ((k == 0 || k == n - 1) ? 0.5 : 1.0);
  EXPECT_NEAR(acc * h, 1.0, 1e-6);
  EXPECT_LT(nascent_delta(0.5, 0.01), nascent_delta(0.5, 0.1));
  EXPECT_LT(nascent_delta(0.5, 0.001), nascent_delta(0.5, 0.01));
  EXPECT_THROW(nascent_delta(0.0, 0.0), DomainError);
}

}  // namespace
}  // namespace cesim
