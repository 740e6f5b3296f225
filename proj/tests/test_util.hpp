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
#include <random>
#include <vector>

#include "cesim/fock.hpp"

namespace cesim::testing {

/// Random normalized state supported on levels <= max_level in every mode.
inline FockState random_interior_state(int num_modes, int cutoff, int max_level, std::mt19937_64& rng) {
  FockState vac = vacuum_fock(num_modes, cutoff);
  std::normal_distribution<double> nd;
  CVector amps = CVector::Zero(vac.dim());
  for (Eigen::Index i = 0; i < vac.dim(); ++i) {
    bool inside = true;
    for (int n : vac.levels(i)) inside = inside && n <= max_level;
    if (inside) amps[i] = cplx(nd(rng), nd(rng));
  }
  amps.normalize();
  return FockState(num_modes, cutoff, amps);
}

/// Amplitudes restricted to basis states with every level <= max_level.
inline CVector restrict_levels(const FockState& s, int max_level) {
  CVector out = s.amplitudes();
  for (Eigen::Index i = 0; i < s.dim(); ++i) {
    for (int n : s.levels(i)) {
      if (n > max_level) {
        out[i] = 0.0;
        break;
      }
    }
  }
  return out;
}

// Relative residual ||(sum c_i a_i - e) psi|| / ||psi|| restricted to basis
// states with every level <= cutoff-2, where annihilation acting on the
// truncated state is exact.
inline double interior_ladder_residual(const FockState& s, const std::vector<cplx>& coeffs, cplx eigenvalue) {
  const FockState r = apply_ladder_combination(s, coeffs, LadderKind::Annihilate) - s * eigenvalue;
  return restrict_levels(r, s.cutoff() - 2).norm() / s.norm();
}

inline double factorial(int n) { return std::tgamma(n + 1.0); }

}  // namespace cesim::testing
