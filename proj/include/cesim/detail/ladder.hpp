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

#include <cmath>
#include <string>
#include <vector>

#include "cesim/common.hpp"
#include "cesim/fock.hpp"

namespace cesim::detail {

/// Shape of a uniform-cutoff Fock box.
struct BoxShape {
  int num_modes;
  int cutoff;
  std::vector<Eigen::Index> strides;
  Eigen::Index dim;

  BoxShape(int modes, int cut);
};

/// out += coeff * op(in), with op = a_mode or a_mode^dagger truncated to the box.
void add_ladder(const BoxShape& shape, const CVector& in, CVector& out, cplx coeff, int mode, LadderKind kind);

/// A monomial coeff * op1 * op2 (op2 acts first). `mode2 < 0` means a
/// single ladder operator.
struct OpTerm {
  cplx coeff;
  int mode1;
  LadderKind kind1;
  int mode2 = -1;
  LadderKind kind2 = LadderKind::Annihilate;
};

/// out = sum of terms applied to in.
void apply_terms(const BoxShape& shape, const std::vector<OpTerm>& terms, const CVector& in, CVector& out);

/// Upper bound on the spectral norm of the truncated polynomial.
double terms_norm_bound(const BoxShape& shape, const std::vector<OpTerm>& terms);

/// exp(G) v by `steps` Taylor steps; `apply(x, y)` must set y = G x.
/// Each step sums terms until the term norm drops below tol * |acc|.
template <typename Vec, typename Apply>
Vec taylor_expmv(const Vec& v, Apply&& apply, double norm_bound, double tol, int max_terms) {
  const int steps = std::max(1, static_cast<int>(std::ceil(norm_bound / 2.0)));
  const double h = 1.0 / steps;
  Vec acc = v;
  Vec term = v;
  Vec next = v;
  for (int s = 0; s < steps; ++s) {
    term = acc;
    bool converged = false;
    for (int k = 1; k <= max_terms; ++k) {
      apply(term, next);
      term = next * (h / k);
      acc += term;
      const double tn = term.norm();
      if (tn <= tol * acc.norm() || tn == 0.0) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      throw ConvergenceError("Taylor series did not converge within " + std::to_string(max_terms) + " terms");
    }
  }
  return acc;
}

}  // namespace cesim::detail
