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

#include <cstddef>

#include "cesim/common.hpp"
#include "cesim/fock.hpp"

namespace cesim {

/// Unnormalized Gaussian ket exp(c0 + L.a^dag + a^dag^T Q a^dag)|0...0>.
struct GaussianKet {
  cplx c0{0.0, 0.0};
  CVector linear;
  CMatrix quad;

  int num_modes() const { return static_cast<int>(linear.size()); }
  void validate() const;
};

/// Largest singular value of Q; the ket is normalizable iff it is < 1/2.
double quad_radius(const CMatrix& quad);

/// Exact squared norm of the untruncated ket.
double ket_norm_sq(const GaussianKet& ket);

/// Exact inner product <k1|k2> of two untruncated kets. The square root of
/// the determinant uses the principal branch, so the phase is reliable only
/// when det(I - conj(B1) B2) stays off the negative real axis.
cplx ket_inner(const GaussianKet& k1, const GaussianKet& k2);

/// Truncated power-series evaluation of the ket on a Fock box. The leak is
/// the exact probability weight outside the box, 1 - |psi_box|^2 / |psi|^2.
FockState build_quadratic_exponential(int num_modes, int cutoff, cplx c0, const CVector& linear,
                                      const CMatrix& quad, std::size_t max_dim = kDefaultMaxDim);
FockState build_quadratic_exponential(const GaussianKet& ket, int cutoff, std::size_t max_dim = kDefaultMaxDim);

}  // namespace cesim
