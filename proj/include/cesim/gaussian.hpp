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

#include <variant>
#include <vector>

#include "cesim/common.hpp"
#include "cesim/fock.hpp"
#include "cesim/gaussian_ket.hpp"

namespace cesim {

/// Mean vector and covariance matrix of a multimode Gaussian state in the
/// ordering (x_1..x_N, p_1..p_N), with X = (a + a^dag)/sqrt 2 and vacuum
/// covariance I/2.
class GaussianState {
 public:
  GaussianState(RVector mean, RMatrix cov);

  int num_modes() const { return static_cast<int>(mean_.size() / 2); }
  const RVector& mean() const { return mean_; }
  const RMatrix& cov() const { return cov_; }

  /// |det(2 cov) - 1|.
  double purity_defect() const;
  bool is_pure(double tol = 1e-9) const { return purity_defect() <= tol; }

  /// <a_i>.
  CVector mean_amplitudes() const;
  /// <a_k^dag a_i> (entry k, i).
  CMatrix normal_moments() const;
  /// <a_i a_j>.
  CMatrix anomalous_moments() const;

 private:
  RVector mean_;
  RMatrix cov_;
};

GaussianState vacuum_gaussian(int num_modes);

namespace gate {

/// exp[-theta (a_i^dag a_j - a_i a_j^dag)]: a_i -> a_i cos + a_j sin,
/// a_j -> -a_i sin + a_j cos.
struct BeamSplitter {
  int i;
  int j;
  double theta;
};

/// exp(eps a^dag - eps^* a): shifts x by sqrt2 Re eps and p by sqrt2 Im eps.
struct Displace {
  int mode;
  cplx eps;
};

/// exp[(r/2)(a^2 - a^dag^2)]: x -> e^{-r} x, p -> e^{r} p.
struct Squeeze {
  int mode;
  double r;
};

}  // namespace gate

using SymplecticGate = std::variant<gate::BeamSplitter, gate::Displace, gate::Squeeze>;

/// Standard symplectic form [[0, I], [-I, 0]].
RMatrix symplectic_form(int num_modes);
RMatrix symplectic_matrix(const SymplecticGate& gate, int num_modes);
RVector displacement_vector(const SymplecticGate& gate, int num_modes);
/// The equivalent Fock-space generator.
Generator to_generator(const SymplecticGate& gate);

GaussianState apply_gate(const GaussianState& state, const SymplecticGate& gate);

struct QuadratureStats {
  double mean_x;
  double var_x;
  double mean_p;
  double var_p;
};

/// Moments of (1/N) sum_i w_i X_i and (1/N) sum_i w_i P_i.
QuadratureStats collective_quadrature_stats(const GaussianState& state, const std::vector<double>& weights);

/// |<psi1|psi2>|^2 for pure states.
double overlap_gaussian(const GaussianState& s1, const GaussianState& s2);

/// Moments of the (normalized) ket.
GaussianState to_gaussian(const GaussianKet& ket);
/// Normalized ket with real c0 describing a pure Gaussian state.
GaussianKet to_ket(const GaussianState& state);
/// Fock amplitudes of a pure Gaussian state (exact inside the box).
FockState to_fock(const GaussianState& state, int cutoff, std::size_t max_dim = kDefaultMaxDim);

/// |(sum_i c_i a_i - e) psi| / |psi| evaluated in closed form from the ket
/// coefficients, without cancellation between large moments.
double ladder_residual(const GaussianKet& ket, const std::vector<cplx>& coeffs, cplx eigenvalue);

/// |(sum_i w_i X_i - e) psi| / |psi| (or the P version).
double quadrature_residual(const GaussianState& state, const std::vector<double>& weights, double eigenvalue,
                           bool momentum = false);

}  // namespace cesim
