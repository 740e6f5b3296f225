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

#include "cesim/gaussian_ket.hpp"

#include <cmath>
#include <string>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "cesim/detail/ladder.hpp"

namespace cesim {

void GaussianKet::validate() const {
  const Eigen::Index n = linear.size();
  if (n < 1) throw std::invalid_argument("GaussianKet: empty linear vector");
  if (quad.rows() != n || quad.cols() != n) throw std::invalid_argument("GaussianKet: quad must be n x n");
  if ((quad - quad.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + quad.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("GaussianKet: quad must be symmetric");
  }
  if (!linear.allFinite() || !quad.allFinite() || !std::isfinite(c0.real()) || !std::isfinite(c0.imag())) {
    throw DomainError("GaussianKet: non-finite coefficient");
  }
}

double quad_radius(const CMatrix& quad) {
  if (quad.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(quad);
  return svd.singularValues()(0);
}

namespace {

// log of exp(c1* + c2 + b^T M^{-1} b / 2) / sqrt(det(I - conj(B1) B2)).
cplx log_pairing(const GaussianKet& k1, const GaussianKet& k2) {
  k1.validate();
  k2.validate();
  const Eigen::Index n = k1.linear.size();
  if (k2.linear.size() != n) throw std::invalid_argument("ket_inner: mode count mismatch");
  if (quad_radius(k1.quad) >= 0.5 || quad_radius(k2.quad) >= 0.5) {
    throw DomainError("Gaussian ket is not normalizable: largest singular value of Q must be < 1/2");
  }
  const CMatrix b1 = 2.0 * k1.quad;
  const CMatrix b2 = 2.0 * k2.quad;
  const CMatrix id = CMatrix::Identity(n, n);
  CMatrix m(2 * n, 2 * n);
  m << -b2, id, id, -b1.conjugate();
  CVector b(2 * n);
  b << k2.linear, k1.linear.conjugate();
  const CVector y = m.partialPivLu().solve(b);
  const cplx det = (id - b1.conjugate() * b2).determinant();
  return std::conj(k1.c0) + k2.c0 + 0.5 * (b.transpose() * y)(0) -
         0.5 * std::log(det);
}

}  // namespace

double ket_norm_sq(const GaussianKet& ket) { return std::exp(log_pairing(ket, ket).real()); }

cplx ket_inner(const GaussianKet& k1, const GaussianKet& k2) { return std::exp(log_pairing(k1, k2)); }

FockState build_quadratic_exponential(int num_modes, int cutoff, cplx c0, const CVector& linear, const CMatrix& quad,
                                      std::size_t max_dim) {
  GaussianKet ket{c0, linear, quad};
  if (linear.size() != num_modes) throw std::invalid_argument("build_quadratic_exponential: linear size != num_modes");
  ket.validate();
  const double radius = quad_radius(quad);
  if (radius >= 0.5) {
    throw DomainError("build_quadratic_exponential: divergent series, largest singular value of Q is " +
                      std::to_string(radius) + " (must be < 1/2)");
  }
  checked_dimension(num_modes, cutoff, max_dim);
  const detail::BoxShape shape(num_modes, cutoff);

  std::vector<detail::OpTerm> terms;
  for (int i = 0; i < num_modes; ++i) {
    if (linear[i] != 0.0) terms.push_back({linear[i], i, LadderKind::Create});
    for (int j = 0; j < num_modes; ++j) {
      if (quad(i, j) != 0.0) terms.push_back({quad(i, j), i, LadderKind::Create, j, LadderKind::Create});
    }
  }

  CVector acc = CVector::Zero(shape.dim);
  acc[0] = 1.0;
  CVector term = acc;
  CVector next(shape.dim);
  // The raising operator can add at most num_modes*(cutoff-1) quanta.
  const int max_order = num_modes * (cutoff - 1);
  for (int k = 1; k <= max_order; ++k) {
    detail::apply_terms(shape, terms, term, next);
    term = next / static_cast<double>(k);
    acc += term;
    const double tn = term.norm();
    if (tn == 0.0 || tn < 1e-14 * acc.norm()) break;
  }
  acc *= std::exp(c0);

  const double exact = ket_norm_sq(ket);
  const double leak = exact > 0.0 ? std::max(0.0, 1.0 - acc.squaredNorm() / exact) : 0.0;
  return FockState(num_modes, cutoff, std::move(acc), leak);
}

FockState build_quadratic_exponential(const GaussianKet& ket, int cutoff, std::size_t max_dim) {
  return build_quadratic_exponential(ket.num_modes(), cutoff, ket.c0, ket.linear, ket.quad, max_dim);
}

}  // namespace cesim
