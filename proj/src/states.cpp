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

#include "cesim/states.hpp"

#include <cmath>

#include "cesim/circuits.hpp"

namespace cesim {

namespace {

// L - ((1 - t)/2) u (u.L) with u = w / |w|.
CVector match_collective(const CVector& linear, const RVector& w, double t) {
  const RVector u = w.normalized();
  const cplx along = u.cast<cplx>().cwiseProduct(linear).sum();
  return linear - (0.5 * (1.0 - t)) * along * u.cast<cplx>();
}

GaussianKet make_ket(cplx c0, CVector linear, const RVector& w, double quad_scale, double reg_r,
                     Regularization reg) {
  const double t = std::tanh(reg_r);
  if (reg == Regularization::CollectiveMatched) linear = match_collective(linear, w, t);
  CMatrix quad = (quad_scale * t) * (w * w.transpose()).cast<cplx>();
  return GaussianKet{c0, std::move(linear), std::move(quad)};
}

RVector to_rvector(const ModeWeights& w) {
  RVector v(3);
  v << w.mu(), w.nu(), w.tau();
  return v;
}

// Scalar part shared by the position- and momentum-type tripartite states.
cplx tripartite_c0(const ModeWeights& w, cplx b, cplx g, double x) {
  const double mu = w.mu(), nu = w.nu(), tau = w.tau();
  const double cross = (std::conj(b) * g + b * std::conj(g)).real();
  return -0.75 * x * x - cross * mu * tau * tau / (6.0 * nu) -
         std::norm(g) * tau * tau * (1.0 + mu * mu / (nu * nu)) / 6.0 - std::norm(b) * (nu * nu + tau * tau) / 6.0;
}

// Linear part with the collective term `coll` (x for position, i p for momentum).
CVector tripartite_linear(const ModeWeights& w, cplx b, cplx g, cplx coll) {
  const double mu = w.mu(), nu = w.nu(), tau = w.tau();
  CVector l(3);
  l << b * (nu * nu + tau * tau) + g * mu * tau * tau / nu + 3.0 * coll * mu,
      -b * mu * nu + g * tau * tau + 3.0 * coll * nu, -g * (mu * mu + nu * nu) * tau / nu - b * mu * tau + 3.0 * coll * tau;
  return l / (3.0 * w.lambda());
}

}  // namespace

GaussianKet bipartite_ces_ket(double mu, double nu, cplx alpha, double x, double reg_r, Regularization reg) {
  validate_reg_r(reg_r);
  const MultiWeights mw({mu, nu});
  const double lam = mw.lambda();
  CVector l(2);
  l << lam * alpha + mu * (2.0 * x - alpha * mu) / (2.0 * lam), nu * (2.0 * x - alpha * mu) / (2.0 * lam);
  const cplx c0 = -0.5 * x * x - 0.25 * std::norm(nu * alpha);
  RVector w(2);
  w << mu, nu;
  return make_ket(c0, l, w, -1.0 / (4.0 * lam * lam), reg_r, reg);
}

FockState bipartite_ces_formula(double mu, double nu, cplx alpha, double x, double reg_r, int cutoff,
                                Regularization reg) {
  return build_quadratic_exponential(bipartite_ces_ket(mu, nu, alpha, x, reg_r, reg), cutoff);
}

CVector tripartite_linear_coefficients(const ModeWeights& weights, const CesParams& params) {
  return tripartite_linear(weights, params.beta, params.gamma, params.x);
}

GaussianKet tripartite_ces_ket(const ModeWeights& weights, const CesParams& params, Regularization reg) {
  params.validate();
  const double lam = weights.lambda();
  return make_ket(tripartite_c0(weights, params.beta, params.gamma, params.x),
                  tripartite_linear(weights, params.beta, params.gamma, params.x), to_rvector(weights),
                  -1.0 / (6.0 * lam * lam), params.reg_r, reg);
}

FockState tripartite_ces_formula(const ModeWeights& weights, const CesParams& params, int cutoff, Regularization reg) {
  return build_quadratic_exponential(tripartite_ces_ket(weights, params, reg), cutoff);
}

GaussianKet conjugate_ces_ket(const ModeWeights& weights, const ConjugateParams& params, Regularization reg) {
  params.validate();
  const double lam = weights.lambda();
  return make_ket(tripartite_c0(weights, params.sigma, params.kappa, params.p),
                  tripartite_linear(weights, params.sigma, params.kappa, kI * params.p), to_rvector(weights),
                  1.0 / (6.0 * lam * lam), params.reg_r, reg);
}

FockState conjugate_ces_formula(const ModeWeights& weights, const ConjugateParams& params, int cutoff,
                                Regularization reg) {
  return build_quadratic_exponential(conjugate_ces_ket(weights, params, reg), cutoff);
}

GaussianState multipartite_ces_gaussian(const MultiWeights& weights, const std::vector<cplx>& betas, double x,
                                        double reg_r) {
  return execute_gaussian(generate_ces_circuit(weights, betas, x, reg_r, Provenance::ConstraintSolve));
}

FockState multipartite_ces(const MultiWeights& weights, const std::vector<cplx>& betas, double x, double reg_r,
                           int cutoff) {
  return to_fock(multipartite_ces_gaussian(weights, betas, x, reg_r), cutoff);
}

}  // namespace cesim
