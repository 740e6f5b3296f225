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

#include <vector>

#include "cesim/common.hpp"
#include "cesim/fock.hpp"
#include "cesim/gaussian.hpp"
#include "cesim/gaussian_ket.hpp"
#include "cesim/weights.hpp"

namespace cesim {

/// How the non-normalizable ideal state is regularized at finite reg_r,
/// with t = tanh(reg_r).
///
/// QuadraticOnly multiplies the quadratic coefficient by t and leaves the
/// linear and scalar parts as printed. CollectiveMatched additionally scales
/// the component of the linear coefficient along the collective direction u
/// by (1 + t)/2, L -> L - ((1 - t)/2) u (u.L), which makes the state equal to
/// the squeeze / beam-splitter / displacement circuit output at the same
/// reg_r. Both keep the ladder eigenrelations exact.
enum class Regularization { CollectiveMatched, QuadraticOnly };

/// Bipartite state with quadratic coefficient -t/(4 lambda^2)(mu a1^dag + nu a2^dag)^2.
GaussianKet bipartite_ces_ket(double mu, double nu, cplx alpha, double x, double reg_r,
                              Regularization reg = Regularization::CollectiveMatched);
FockState bipartite_ces_formula(double mu, double nu, cplx alpha, double x, double reg_r, int cutoff,
                                Regularization reg = Regularization::CollectiveMatched);

/// Tripartite state |beta, gamma, x> with quadratic coefficient
/// -t/(6 lambda^2)(mu a1^dag + nu a2^dag + tau a3^dag)^2.
GaussianKet tripartite_ces_ket(const ModeWeights& weights, const CesParams& params,
                               Regularization reg = Regularization::CollectiveMatched);
FockState tripartite_ces_formula(const ModeWeights& weights, const CesParams& params, int cutoff,
                                 Regularization reg = Regularization::CollectiveMatched);

/// Momentum-type state |sigma, kappa, p> with quadratic coefficient
/// +t/(6 lambda^2)(...)^2 and i p linear terms.
GaussianKet conjugate_ces_ket(const ModeWeights& weights, const ConjugateParams& params,
                              Regularization reg = Regularization::CollectiveMatched);
FockState conjugate_ces_formula(const ModeWeights& weights, const ConjugateParams& params, int cutoff,
                                Regularization reg = Regularization::CollectiveMatched);

/// N-partite state from the circuit route with constraint-solved
/// displacements: exact moments on the Gaussian engine, then Fock amplitudes.
GaussianState multipartite_ces_gaussian(const MultiWeights& weights, const std::vector<cplx>& betas, double x,
                                        double reg_r);
FockState multipartite_ces(const MultiWeights& weights, const std::vector<cplx>& betas, double x, double reg_r,
                           int cutoff);

/// Linear coefficients of the tripartite state exactly as printed (before regularization).
CVector tripartite_linear_coefficients(const ModeWeights& weights, const CesParams& params);

}  // namespace cesim
