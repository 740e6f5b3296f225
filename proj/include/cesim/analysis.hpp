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

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cesim/common.hpp"
#include "cesim/fock.hpp"
#include "cesim/gaussian.hpp"
#include "cesim/states.hpp"
#include "cesim/weights.hpp"

namespace cesim {

// Eigen-residuals.

enum class QuadratureKind { Position, Momentum };

/// Expected eigenvalues of the collective quadrature (1/N) sum mu_i X_i (or
/// P_i) and of the N-1 ladder combinations (mu_{i+1} a_i - mu_i a_{i+1}).
struct EigenTargets {
  QuadratureKind kind = QuadratureKind::Position;
  double collective = 0.0;
  std::vector<cplx> ladder;
  /// Optional alternative ladder eigenvalues, reported but never gating.
  std::vector<cplx> ladder_alternative;
  std::string alternative_note;
};

EigenTargets tripartite_targets(const ModeWeights& weights, const CesParams& params);
EigenTargets conjugate_targets(const ModeWeights& weights, const ConjugateParams& params);
/// Eigenvalues mu_{i+1} beta_i lambda, with the reading without lambda as the
/// alternative.
EigenTargets multipartite_targets(const MultiWeights& weights, const std::vector<cplx>& betas, double x);

struct ResidualEntry {
  std::string relation;
  cplx eigenvalue;
  double absolute;
  double relative;
  double reg_r;
  int cutoff;  // 0 for the Gaussian engine
  double leak;
  bool informational = false;
  bool is_ladder = false;
};

struct ResidualReport {
  std::vector<ResidualEntry> entries;

  double max_ladder_relative() const;
  double collective_relative() const;
};

/// Residuals on a truncated Fock state, evaluated on the interior (every
/// level <= cutoff-2) where the ladder action is exact.
ResidualReport eigen_residuals(const FockState& state, const MultiWeights& weights, const EigenTargets& targets,
                               double reg_r);
/// Exact residuals of a pure Gaussian state.
ResidualReport eigen_residuals(const GaussianState& state, const MultiWeights& weights, const EigenTargets& targets,
                               double reg_r);

/// Mean and variance of (1/N) sum w_i X_i and (1/N) sum w_i P_i on a Fock
/// state (normalized expectation values).
QuadratureStats collective_quadrature_stats(const FockState& state, const std::vector<double>& weights);

// Orthogonality.

struct OrthogonalityOptions {
  std::vector<double> dx_sweep{0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  /// Evaluate the truncated Fock overlaps alongside the exact ones.
  bool fock_overlaps = true;
  Regularization regularization = Regularization::CollectiveMatched;
  /// Squeeze strength used for the delta-limit coefficient integral.
  double coefficient_reg_r = kMaxRegR;
  double fit_tolerance = 0.05;
};

struct OrthogonalityReport {
  /// Exact normalized <psi1|psi2>.
  cplx numeric_overlap;
  std::optional<cplx> fock_overlap;
  double fock_leak = 0.0;
  int cutoff = 0;

  std::vector<double> dx;
  std::vector<double> sweep_exact;
  std::vector<double> sweep_fock;

  /// Fit |<psi(x)|psi(x+dx)>| = C exp(-dx^2 / eps).
  double fitted_delta_width = 0.0;
  double fit_prefactor = 0.0;
  double fit_rms = 0.0;
  std::optional<double> fock_fitted_width;
  double expected_delta_width = 0.0;
  bool fit_ok = false;
  /// Fitted width within fit_tolerance of expected_delta_width.
  bool width_within_tolerance = false;
  std::string fit_message;

  /// Literal exponential prefactor of the printed overlap at (p2, p1).
  cplx formula_coefficient;
  /// int dx' <psi(beta2, gamma2, x')|psi(beta1, gamma1, x1)> divided by the
  /// same integral with zero labels (the delta normalization).
  cplx numeric_coefficient;
  /// The zero-label integral itself.
  double delta_normalization = 0.0;
};

OrthogonalityReport orthogonality_check(const ModeWeights& weights, const CesParams& p1, const CesParams& p2,
                                        int cutoff, const OrthogonalityOptions& options = {});

/// exp of the printed overlap exponent for <beta', gamma', x'| beta, gamma, x>.
cplx overlap_formula_coefficient(const ModeWeights& weights, cplx beta, cplx gamma, cplx beta_p, cplx gamma_p);

/// int dx' <psi(beta', gamma', x')|psi(beta, gamma, x)> for unnormalized kets.
cplx delta_limit_integral(const ModeWeights& weights, const CesParams& p, cplx beta_p, cplx gamma_p,
                          Regularization reg = Regularization::CollectiveMatched);

struct GaussianFit {
  double width;
  double prefactor;
  double rms;
};

/// Least-squares fit of ln y = ln C - dx^2 / width.
GaussianFit fit_gaussian_decay(const std::vector<double>& dx, const std::vector<double>& y);

// Completeness.

struct CompletenessOptions {
  std::int64_t samples = 1000000;
  std::uint64_t seed = 42;
  int shards = 16;
  /// Largest acceptable standard error on any Gram entry.
  double stderr_bound = 0.02;
  /// Proposal standard deviations are the envelope ones times this factor.
  double inflation = 1.5;
  Regularization regularization = Regularization::CollectiveMatched;
};

struct CompletenessReport {
  CMatrix estimate;
  RMatrix standard_error;
  bool conclusive = false;
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
  int shards = 0;
  double reg_r = 0.0;
  /// tau^2 lambda^2 / (pi^2 sqrt(6 pi)).
  double weight;
  /// Envelope precision and proposal covariance in (Re b, Im b, Re g, Im g, x).
  RMatrix envelope_precision;
  RMatrix proposal_covariance;
};

/// Estimates tau^2 lambda^2 int d2b/pi d2g/pi dx/sqrt(6 pi) <a|b,g,x><b,g,x|b>.
CompletenessReport completeness_mc(const ModeWeights& weights, const std::vector<FockState>& test_states,
                                   double reg_r, const CompletenessOptions& options = {});

// Wigner function of the collective mode.

struct WignerValue {
  /// <Delta(p, x)> with the printed 1/(pi tau^2 lambda^2) prefactor.
  double literal;
  /// Probability density in (x, p): int int dx dp = 1.
  double normalized;
};

/// Reduced state of the collective mode R = sum mu_i a_i / (sqrt3 lambda),
/// evaluated either from Gaussian moments or from a Fock state (rotated onto
/// mode 0 by the inverse beam-splitter cascade and traced over modes 1, 2).
class CollectiveWigner {
 public:
  CollectiveWigner(const GaussianState& state, const ModeWeights& weights);
  CollectiveWigner(const FockState& state, const ModeWeights& weights, const ExpOptions& options = {});

  WignerValue operator()(double x, double p) const;

  /// Integrals of the normalized value over p (resp. x) on a grid of
  /// half-width 8 standard deviations around the mean and step <= sigma/20.
  double marginal_x(double x) const;
  double marginal_p(double p) const;

  /// Mean and covariance of (X_R, P_R).
  const RVector& mean() const { return mean_; }
  const RMatrix& cov() const { return cov_; }
  bool from_fock() const { return rho_.size() > 0; }
  double leak() const { return leak_; }

 private:
  double density_R(double xr, double pr) const;
  double marginal(double v, bool integrate_p) const;

  double scale_;   // tau^2 lambda^2
  RVector mean_;
  RMatrix cov_;
  CMatrix rho_;
  double leak_ = 0.0;
};

WignerValue wigner_collective(const GaussianState& state, const ModeWeights& weights, double x, double p);
WignerValue wigner_collective(const FockState& state, const ModeWeights& weights, double x, double p);

double marginal_x(const GaussianState& state, const ModeWeights& weights, double x);
double marginal_p(const GaussianState& state, const ModeWeights& weights, double p);
double marginal_x(const FockState& state, const ModeWeights& weights, double x);
double marginal_p(const FockState& state, const ModeWeights& weights, double p);

/// Density of x where (1/3) sum mu_i X_i = lambda x / sqrt2, directly from the
/// Gaussian moments.
double collective_density_x(const GaussianState& state, const ModeWeights& weights, double x);
double collective_density_p(const GaussianState& state, const ModeWeights& weights, double p);

// SU(1,1) algebra and the squeezing operator.

struct RelationDefect {
  std::string relation;
  double defect;
  bool closes;
};

struct Su11Report {
  int cutoff;
  int interior_max_total;
  double tolerance;
  std::vector<RelationDefect> relations;
};

/// Commutator defects of R^2, R^dag^2, R^dag R + 1/2 on states with total
/// photon number <= cutoff-4, in the standard and in the printed
/// normalization.
Su11Report su11_check(const MultiWeights& weights, int cutoff, double tolerance = 1e-10);

struct SqueezeReport {
  double squeeze_param;  // ln l
  int cutoff;
  int interior_max_total;
  /// Operator-norm difference between the factored form and the generator
  /// exponential on the interior.
  double defect;
  /// Least-squares scalar c minimizing ||c F - G|| on the interior.
  double measured_ratio;
  /// The printed 1/(tau^2 lambda^2) prefactor, for comparison.
  double printed_prefactor;
  /// ||S|000>|| with S the generator exponential on the box.
  double vacuum_norm;
  /// ||F|000>|| for the factored form on the box, and 1 - its square.
  double vacuum_norm_factored;
  double vacuum_leak_factored;
  /// Closed-form norm of sech^{1/2} exp(-R^dag^2 tanh / 2)|000>.
  double vacuum_norm_exact;
  /// |<F 000| sech^{1/2} exp(-R^dag^2 tanh / 2)|000>| for normalized states.
  double vacuum_overlap;
  /// Same with the printed (1/6)(sum mu a^dag)^2 quadratic; NaN when that
  /// exponential is not normalizable.
  double vacuum_overlap_printed_quadratic;
};

/// l in (0, e^1.5]; cutoff large enough for at least 4 interior levels.
SqueezeReport squeeze_operator_check(const ModeWeights& weights, double l, int cutoff);

// Integral utilities.

struct GaussIntegralParams {
  cplx zeta;
  cplx xi;
  cplx eta;
  cplx f;
  cplx g;

  bool converges() const;
};

/// int d2z/pi exp(zeta |z|^2 + xi z + eta z* + f z^2 + g z*^2) in closed form.
cplx gaussian_integral_2d(const GaussIntegralParams& params);
/// Trapezoid quadrature of the same integral over [-radius, radius]^2.
cplx gaussian_integral_2d_quadrature(const GaussIntegralParams& params, double radius = 10.0, int points = 801);

/// (1 / sqrt(pi eps)) exp(-x^2 / eps).
double nascent_delta(double x, double epsilon);

}  // namespace cesim
