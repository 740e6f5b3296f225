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

#include "cesim/gaussian.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace cesim {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

void check_index(int mode, int n) {
  if (mode < 0 || mode >= n) throw std::out_of_range("gate mode index " + std::to_string(mode) + " out of range");
}

}  // namespace

GaussianState::GaussianState(RVector mean, RMatrix cov) : mean_(std::move(mean)), cov_(std::move(cov)) {
  const Eigen::Index m = mean_.size();
  if (m < 2 || m % 2 != 0) throw std::invalid_argument("GaussianState: mean must have even length >= 2");
  if (cov_.rows() != m || cov_.cols() != m) throw std::invalid_argument("GaussianState: cov must be 2N x 2N");
  if (!mean_.allFinite() || !cov_.allFinite()) throw DomainError("GaussianState: non-finite moment");
  const double scale = std::max(1.0, cov_.cwiseAbs().maxCoeff());
  if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("GaussianState: covariance not symmetric");
  }
  cov_ = 0.5 * (cov_ + cov_.transpose()).eval();
  const int n = static_cast<int>(m / 2);
  const CMatrix h = cov_.cast<cplx>() + 0.5 * kI * symplectic_form(n).cast<cplx>();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10 * scale) {
    throw DomainError("GaussianState: covariance violates the uncertainty principle");
  }
}

double GaussianState::purity_defect() const { return std::abs((2.0 * cov_).determinant() - 1.0); }

CVector GaussianState::mean_amplitudes() const {
  const int n = num_modes();
  CVector a(n);
  for (int i = 0; i < n; ++i) a[i] = cplx(mean_[i], mean_[n + i]) / kSqrt2;
  return a;
}

CMatrix GaussianState::normal_moments() const {
  const int n = num_modes();
  const RMatrix vxx = cov_.topLeftCorner(n, n);
  const RMatrix vpp = cov_.bottomRightCorner(n, n);
  const RMatrix vxp = cov_.topRightCorner(n, n);
  const CVector a = mean_amplitudes();
  CMatrix out = 0.5 * (vxx + vpp).cast<cplx>() + 0.5 * kI * (vxp - vxp.transpose()).cast<cplx>();
  out -= 0.5 * CMatrix::Identity(n, n);
  out += a.conjugate() * a.transpose();
  return out;
}

CMatrix GaussianState::anomalous_moments() const {
  const int n = num_modes();
  const RMatrix vxx = cov_.topLeftCorner(n, n);
  const RMatrix vpp = cov_.bottomRightCorner(n, n);
  const RMatrix vxp = cov_.topRightCorner(n, n);
  const CVector a = mean_amplitudes();
  CMatrix out = 0.5 * (vxx - vpp).cast<cplx>() + 0.5 * kI * (vxp + vxp.transpose()).cast<cplx>();
  out += a * a.transpose();
  return out;
}

GaussianState vacuum_gaussian(int num_modes) {
  if (num_modes < 1) throw std::invalid_argument("vacuum_gaussian: num_modes must be >= 1");
  return GaussianState(RVector::Zero(2 * num_modes), 0.5 * RMatrix::Identity(2 * num_modes, 2 * num_modes));
}

RMatrix symplectic_form(int num_modes) {
  const int n = num_modes;
  RMatrix omega = RMatrix::Zero(2 * n, 2 * n);
  omega.topRightCorner(n, n).setIdentity();
  omega.bottomLeftCorner(n, n) = -RMatrix::Identity(n, n);
  return omega;
}

RMatrix symplectic_matrix(const SymplecticGate& g, int n) {
  RMatrix s = RMatrix::Identity(2 * n, 2 * n);
  if (const auto* bs = std::get_if<gate::BeamSplitter>(&g)) {
    check_index(bs->i, n);
    check_index(bs->j, n);
    if (bs->i == bs->j) throw std::invalid_argument("beam splitter needs two distinct modes");
    const double c = std::cos(bs->theta);
    const double si = std::sin(bs->theta);
    for (int off : {0, n}) {
      s(off + bs->i, off + bs->i) = c;
      s(off + bs->i, off + bs->j) = -si;
      s(off + bs->j, off + bs->i) = si;
      s(off + bs->j, off + bs->j) = c;
    }
  } else if (const auto* sq = std::get_if<gate::Squeeze>(&g)) {
    check_index(sq->mode, n);
    s(sq->mode, sq->mode) = std::exp(-sq->r);
    s(n + sq->mode, n + sq->mode) = std::exp(sq->r);
  } else {
    check_index(std::get<gate::Displace>(g).mode, n);
  }
  return s;
}

RVector displacement_vector(const SymplecticGate& g, int n) {
  RVector d = RVector::Zero(2 * n);
  if (const auto* dp = std::get_if<gate::Displace>(&g)) {
    check_index(dp->mode, n);
    d[dp->mode] = kSqrt2 * dp->eps.real();
    d[n + dp->mode] = kSqrt2 * dp->eps.imag();
  }
  return d;
}

Generator to_generator(const SymplecticGate& g) {
  if (const auto* bs = std::get_if<gate::BeamSplitter>(&g)) return gen::BeamSplitter{bs->i, bs->j, bs->theta};
  if (const auto* sq = std::get_if<gate::Squeeze>(&g)) return gen::Squeeze{sq->mode, sq->r};
  const auto& dp = std::get<gate::Displace>(g);
  return gen::Displacement{dp.mode, dp.eps};
}

GaussianState apply_gate(const GaussianState& state, const SymplecticGate& g) {
  const int n = state.num_modes();
  const RMatrix s = symplectic_matrix(g, n);
  const RVector d = displacement_vector(g, n);
  RMatrix cov = s * state.cov() * s.transpose();
  cov = 0.5 * (cov + cov.transpose()).eval();
  return GaussianState(s * state.mean() + d, cov);
}

QuadratureStats collective_quadrature_stats(const GaussianState& state, const std::vector<double>& weights) {
  const int n = state.num_modes();
  if (static_cast<int>(weights.size()) != n) {
    throw std::invalid_argument("collective_quadrature_stats: weight count " + std::to_string(weights.size()) +
                                " != num_modes " + std::to_string(n));
  }
  RVector w(n);
  for (int i = 0; i < n; ++i) w[i] = weights[i] / n;
  const RMatrix& v = state.cov();
  return QuadratureStats{
      w.dot(state.mean().head(n)),
      w.dot(v.topLeftCorner(n, n) * w),
      w.dot(state.mean().tail(n)),
      w.dot(v.bottomRightCorner(n, n) * w),
  };
}

double overlap_gaussian(const GaussianState& s1, const GaussianState& s2) {
  if (s1.num_modes() != s2.num_modes()) throw std::invalid_argument("overlap_gaussian: mode count mismatch");
  if (!s1.is_pure() || !s2.is_pure()) {
    throw DomainError("overlap_gaussian: impure input (|det(2V) - 1| > 1e-9)");
  }
  const RMatrix sum = s1.cov() + s2.cov();
  const RVector d = s1.mean() - s2.mean();
  const Eigen::PartialPivLU<RMatrix> lu(sum);
  return std::exp(-0.5 * d.dot(lu.solve(d))) / std::sqrt(lu.determinant());
}

GaussianState to_gaussian(const GaussianKet& ket) {
  ket.validate();
  if (quad_radius(ket.quad) >= 0.5) throw DomainError("to_gaussian: ket is not normalizable");
  const int n = ket.num_modes();
  const CMatrix id = CMatrix::Identity(n, n);
  const CMatrix b = 2.0 * ket.quad;
  const CMatrix gamma = (id + b).partialPivLu().solve(id - b);
  const RMatrix u = gamma.real();
  const RMatrix w = gamma.imag();
  const RMatrix uinv = u.inverse();
  RMatrix cov(2 * n, 2 * n);
  cov.topLeftCorner(n, n) = 0.5 * uinv;
  cov.topRightCorner(n, n) = -0.5 * uinv * w;
  cov.bottomLeftCorner(n, n) = (-0.5 * uinv * w).transpose();
  cov.bottomRightCorner(n, n) = 0.5 * (u + w * uinv * w);
  cov = 0.5 * (cov + cov.transpose()).eval();

  // alpha - B conj(alpha) = L, split into real and imaginary parts.
  const RMatrix br = b.real();
  const RMatrix bi = b.imag();
  RMatrix sys(2 * n, 2 * n);
  sys << RMatrix::Identity(n, n) - br, -bi, -bi, RMatrix::Identity(n, n) + br;
  RVector rhs(2 * n);
  rhs << ket.linear.real(), ket.linear.imag();
  const RVector ab = sys.partialPivLu().solve(rhs);
  return GaussianState(kSqrt2 * ab, cov);
}

GaussianKet to_ket(const GaussianState& state) {
  if (!state.is_pure()) throw DomainError("to_ket: impure input (|det(2V) - 1| > 1e-9)");
  const int n = state.num_modes();
  const RMatrix vxx = state.cov().topLeftCorner(n, n);
  const RMatrix vxp = state.cov().topRightCorner(n, n);
  const RMatrix vxx_inv = vxx.inverse();
  const RMatrix u = 0.5 * vxx_inv;
  const RMatrix w = -vxx_inv * vxp;
  CMatrix gamma = u.cast<cplx>() + kI * w.cast<cplx>();
  const CMatrix id = CMatrix::Identity(n, n);
  // B = (I - Gamma)(I + Gamma)^{-1}; all factors commute so solve from the left.
  CMatrix b = (id + gamma).transpose().partialPivLu().solve((id - gamma).transpose()).transpose();
  b = 0.5 * (b + b.transpose()).eval();
  const CVector alpha = state.mean_amplitudes();
  GaussianKet ket{0.0, alpha - b * alpha.conjugate(), 0.5 * b};
  ket.c0 = -0.5 * std::log(ket_norm_sq(ket));
  return ket;
}

FockState to_fock(const GaussianState& state, int cutoff, std::size_t max_dim) {
  return build_quadratic_exponential(to_ket(state), cutoff, max_dim);
}

double ladder_residual(const GaussianKet& ket, const std::vector<cplx>& coeffs, cplx eigenvalue) {
  const int n = ket.num_modes();
  if (static_cast<int>(coeffs.size()) != n) throw std::invalid_argument("ladder_residual: coefficient count mismatch");
  CVector c(n);
  for (int i = 0; i < n; ++i) c[i] = coeffs[i];
  // (sum c_i a_i) psi = (c.L + (2 Q c).a^dag) psi.
  const cplx s = c.cwiseProduct(ket.linear).sum() - eigenvalue;
  const CVector v = 2.0 * ket.quad * c;
  const GaussianState g = to_gaussian(ket);
  const CVector alpha = g.mean_amplitudes();
  const CMatrix nm = g.normal_moments();
  const CMatrix aad = CMatrix::Identity(n, n) + nm.transpose();
  const double r2 = std::norm(s) + 2.0 * (std::conj(s) * (v.transpose() * alpha.conjugate())(0)).real() +
                    (v.adjoint() * aad * v)(0).real();
  return std::sqrt(std::max(0.0, r2));
}

double quadrature_residual(const GaussianState& state, const std::vector<double>& weights, double eigenvalue,
                           bool momentum) {
  const int n = state.num_modes();
  if (static_cast<int>(weights.size()) != n) throw std::invalid_argument("quadrature_residual: weight count mismatch");
  const RVector w = Eigen::Map<const RVector>(weights.data(), n);
  const int off = momentum ? n : 0;
  const double mean = w.dot(state.mean().segment(off, n));
  const double var = w.dot(state.cov().block(off, off, n, n) * w);
  return std::sqrt(std::max(0.0, var + (mean - eigenvalue) * (mean - eigenvalue)));
}

}  // namespace cesim
