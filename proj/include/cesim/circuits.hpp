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

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cesim/common.hpp"
#include "cesim/fock.hpp"
#include "cesim/gaussian.hpp"
#include "cesim/weights.hpp"

namespace cesim {

/// Which formula produced a gate parameter. The first five name the
/// displacement formulas; beam-splitter angles and the initial squeeze carry
/// their own tags.
enum class Provenance { PaperEq18, PaperEq22, PaperEq23, PaperSec6, ConstraintSolve, AngleSolve, Regularization };

std::string to_string(Provenance p);
Provenance provenance_from_string(const std::string& s);

struct CircuitGate {
  SymplecticGate gate;
  Provenance provenance;
};

/// Squeeze on mode 0, then a beam-splitter cascade, then displacements.
struct Circuit {
  int num_modes = 0;
  std::vector<CircuitGate> gates;

  /// Checks indices and the squeeze / beam splitter / displacement ordering.
  void validate() const;
};

/// The delta reparametrization: beta_i = delta_i - (mu_i / mu_{i+1}) delta_{i+1}.
struct DeltaParams {
  std::vector<cplx> delta;

  /// delta_N = 0 and back-substitution.
  static DeltaParams canonical_lift(const MultiWeights& weights, const std::vector<cplx>& betas);
  std::vector<cplx> induced_betas(const MultiWeights& weights) const;
};

/// (theta, phi) of the two-splitter tripartite cascade.
std::pair<double, double> tripartite_angles(const ModeWeights& weights);

/// Angles with mu_i / (sqrt(N) lambda) = sin(theta_1)...sin(theta_{i-1}) cos(theta_i),
/// the last component carrying no cosine.
std::vector<double> multipartite_angles(const MultiWeights& weights);

/// Direction cosines reconstructed from cascade angles.
std::vector<double> direction_cosines(const std::vector<double>& angles);

/// Solves mu_{i+1} eps_i - mu_i eps_{i+1} = mu_{i+1} beta_i lambda and
/// sum mu_i eps_i = N lambda x / 2 (real) for eps.
std::vector<cplx> solve_displacements(const MultiWeights& weights, const std::vector<cplx>& betas, double x);

/// Literal evaluation of a printed displacement formula. PaperEq18 and
/// PaperEq23 need three modes, PaperEq22 two; PaperSec6 accepts any N.
/// Delta-based variants use `deltas` if given, otherwise the canonical lift.
std::vector<cplx> paper_displacements(const MultiWeights& weights, const std::vector<cplx>& betas, double x,
                                      Provenance variant, const std::optional<DeltaParams>& deltas = std::nullopt);

/// Variants that apply to a given mode count.
std::vector<Provenance> displacement_variants(int num_modes);

Circuit generate_ces_circuit(const MultiWeights& weights, const std::vector<cplx>& betas, double x, double reg_r,
                             Provenance displacement_source = Provenance::ConstraintSolve);

GaussianState execute_gaussian(const Circuit& circuit);
FockState execute_fock(const Circuit& circuit, int cutoff, const ExpOptions& options = {});

/// Eigenvalue residuals of a circuit state (normalized, Gaussian engine).
struct LadderCheck {
  std::string label;
  cplx eigenvalue;
  double residual;
  /// Residual against the eigenvalue without the lambda factor.
  double residual_without_lambda;
};

struct VariantVerdict {
  Provenance variant;
  std::vector<cplx> eps;
  std::vector<LadderCheck> ladder;
  double collective_mean_error;
  double max_eps_deviation;
  bool agrees_with_constraint;
  bool passes;
};

struct AdjudicationReport {
  std::vector<VariantVerdict> verdicts;
  double tolerance;
};

/// Builds each applicable variant's circuit and reports its eigen-residuals.
AdjudicationReport adjudicate_displacements(const MultiWeights& weights, const std::vector<cplx>& betas, double x,
                                            double reg_r, double tolerance = 1e-8);

/// Ladder eigen-residuals of (mu_{i+1} a_i - mu_i a_{i+1}) against
/// mu_{i+1} beta_i lambda on an exact Gaussian state.
std::vector<LadderCheck> ladder_checks(const GaussianState& state, const MultiWeights& weights,
                                       const std::vector<cplx>& betas);

nlohmann::json circuit_to_json(const Circuit& circuit);
Circuit circuit_from_json(const nlohmann::json& j);

}  // namespace cesim
