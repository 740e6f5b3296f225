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

#include "cesim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <Eigen/SVD>
#include <Eigen/Sparse>

#include "cesim/circuits.hpp"
#include "cesim/detail/ladder.hpp"
#include "cesim/gaussian_ket.hpp"

namespace cesim {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kSqrt1p5 = 1.22474487139158904910;

using SpMat = Eigen::SparseMatrix<double>;

std::string ladder_label(int i) {
  return "(mu" + std::to_string(i + 2) + " a" + std::to_string(i + 1) + " - mu" + std::to_string(i + 1) + " a" +
         std::to_string(i + 2) + ")";
}

std::string collective_label(int n, QuadratureKind kind) {
  return "(1/" + std::to_string(n) + ") sum_i mu_i " + (kind == QuadratureKind::Position ? "X_i" : "P_i");
}

std::vector<cplx> ladder_coeffs(const MultiWeights& w, int i) {
  std::vector<cplx> c(w.size(), 0.0);
  c[i] = w[i + 1];
  c[i + 1] = -w[i];
  return c;
}

void check_targets(const MultiWeights& w, const EigenTargets& t, int modes) {
  if (modes != w.size()) throw std::invalid_argument("eigen_residuals: state has " + std::to_string(modes) +
                                                      " modes but weights have " + std::to_string(w.size()));
  if (static_cast<int>(t.ladder.size()) != w.size() - 1) {
    throw std::invalid_argument("eigen_residuals: expected " + std::to_string(w.size() - 1) + " ladder eigenvalues");
  }
  if (!t.ladder_alternative.empty() && t.ladder_alternative.size() != t.ladder.size()) {
    throw std::invalid_argument("eigen_residuals: alternative eigenvalue count mismatch");
  }
}

// Norm of the components with every level <= cutoff-2.
double interior_norm(const FockState& s) {
  const int top = s.cutoff() - 2;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < s.dim(); ++i) {
    bool inside = true;
    for (int n : s.levels(i)) inside = inside && n <= top;
    if (inside) acc += std::norm(s.amplitudes()[i]);
  }
  return std::sqrt(acc);
}

std::vector<int> totals(int num_modes, int cutoff) {
  const FockState probe = vacuum_fock(num_modes, cutoff);
  std::vector<int> out(probe.dim());
  for (Eigen::Index i = 0; i < probe.dim(); ++i) {
    int t = 0;
    for (int n : probe.levels(i)) t += n;
    out[i] = t;
  }
  return out;
}

// Lowering operator of the unit collective mode sum_i u_i a_i as a real
// sparse matrix on the truncated box.
SpMat collective_lowering(const std::vector<double>& u, int cutoff) {
  const int n = static_cast<int>(u.size());
  const FockState probe = vacuum_fock(n, cutoff);
  std::vector<Eigen::Triplet<double>> trip;
  for (Eigen::Index col = 0; col < probe.dim(); ++col) {
    const std::vector<int> lv = probe.levels(col);
    for (int m = 0; m < n; ++m) {
      if (lv[m] == 0) continue;
      trip.emplace_back(col - probe.stride(m), col, u[m] * std::sqrt(static_cast<double>(lv[m])));
    }
  }
  SpMat r(probe.dim(), probe.dim());
  r.setFromTriplets(trip.begin(), trip.end());
  return r;
}

double max_abs_column_sum(const SpMat& m) {
  double best = 0.0;
  for (int k = 0; k < m.outerSize(); ++k) {
    double s = 0.0;
    for (SpMat::InnerIterator it(m, k); it; ++it) s += std::abs(it.value());
    best = std::max(best, s);
  }
  return best;
}

double spectral_norm(const RMatrix& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::JacobiSVD<RMatrix>(m).singularValues()(0);
}

}  // namespace

EigenTargets tripartite_targets(const ModeWeights& w, const CesParams& p) {
  const double lam = w.lambda();
  return {QuadratureKind::Position, lam * p.x / kSqrt2, {w.nu() * p.beta * lam, w.tau() * p.gamma * lam}, {}, {}};
}

EigenTargets conjugate_targets(const ModeWeights& w, const ConjugateParams& p) {
  const double lam = w.lambda();
  return {QuadratureKind::Momentum, lam * p.p / kSqrt2, {w.nu() * p.sigma * lam, w.tau() * p.kappa * lam}, {}, {}};
}

EigenTargets multipartite_targets(const MultiWeights& w, const std::vector<cplx>& betas, double x) {
  if (static_cast<int>(betas.size()) != w.size() - 1) {
    throw std::invalid_argument("multipartite_targets: expected " + std::to_string(w.size() - 1) + " beta labels");
  }
  EigenTargets t{QuadratureKind::Position, w.lambda() * x / kSqrt2, {}, {}, "eigenvalue mu_{i+1} beta_i without lambda"};
  for (int i = 0; i + 1 < w.size(); ++i) {
    t.ladder.push_back(w[i + 1] * betas[i] * w.lambda());
    t.ladder_alternative.push_back(w[i + 1] * betas[i]);
  }
  return t;
}

double ResidualReport::max_ladder_relative() const {
  double m = 0.0;
  for (const auto& e : entries) {
    if (e.is_ladder && !e.informational) m = std::max(m, e.relative);
  }
  return m;
}

double ResidualReport::collective_relative() const {
  for (const auto& e : entries) {
    if (!e.is_ladder) return e.relative;
  }
  throw std::logic_error("ResidualReport: no collective entry");
}

ResidualReport eigen_residuals(const FockState& state, const MultiWeights& weights, const EigenTargets& targets,
                               double reg_r) {
  check_targets(weights, targets, state.num_modes());
  const int n = weights.size();
  const double norm = state.norm();
  if (norm == 0.0) throw DomainError("eigen_residuals: zero state");
  ResidualReport rep;
  auto push = [&](const std::string& label, cplx e, const FockState& image, bool ladder, bool info) {
    const double abs_res = interior_norm(image - state * e);
    rep.entries.push_back({label, e, abs_res, abs_res / norm, reg_r, state.cutoff(), state.leak(), info, ladder});
  };

  const std::vector<cplx> mu(weights.mu().begin(), weights.mu().end());
  const FockState down = apply_ladder_combination(state, mu, LadderKind::Annihilate);
  const FockState up = apply_ladder_combination(state, mu, LadderKind::Create);
  const FockState coll = targets.kind == QuadratureKind::Position
                             ? (down + up) * cplx(1.0 / (kSqrt2 * n))
                             : (down - up) * cplx(0.0, -1.0 / (kSqrt2 * n));
  push(collective_label(n, targets.kind), targets.collective, coll, false, false);

  for (int i = 0; i + 1 < n; ++i) {
    const FockState img = apply_ladder_combination(state, ladder_coeffs(weights, i), LadderKind::Annihilate);
    push(ladder_label(i), targets.ladder[i], img, true, false);
    if (!targets.ladder_alternative.empty()) {
      push(ladder_label(i) + " [" + targets.alternative_note + "]", targets.ladder_alternative[i], img, true, true);
    }
  }
  return rep;
}

ResidualReport eigen_residuals(const GaussianState& state, const MultiWeights& weights, const EigenTargets& targets,
                               double reg_r) {
  check_targets(weights, targets, state.num_modes());
  const int n = weights.size();
  ResidualReport rep;
  std::vector<double> coll(weights.mu());
  for (double& c : coll) c /= n;
  const double q = quadrature_residual(state, coll, targets.collective, targets.kind == QuadratureKind::Momentum);
  rep.entries.push_back({collective_label(n, targets.kind), targets.collective, q, q, reg_r, 0, 0.0, false, false});
  const GaussianKet ket = to_ket(state);
  for (int i = 0; i + 1 < n; ++i) {
    const auto c = ladder_coeffs(weights, i);
    const double r = ladder_residual(ket, c, targets.ladder[i]);
    rep.entries.push_back({ladder_label(i), targets.ladder[i], r, r, reg_r, 0, 0.0, false, true});
    if (!targets.ladder_alternative.empty()) {
      const double ra = ladder_residual(ket, c, targets.ladder_alternative[i]);
      rep.entries.push_back({ladder_label(i) + " [" + targets.alternative_note + "]", targets.ladder_alternative[i], ra,
                             ra, reg_r, 0, 0.0, true, true});
    }
  }
  return rep;
}

QuadratureStats collective_quadrature_stats(const FockState& state, const std::vector<double>& weights) {
  const int n = state.num_modes();
  if (static_cast<int>(weights.size()) != n) {
    throw std::invalid_argument("collective_quadrature_stats: weight count mismatch");
  }
  const std::vector<cplx> w(weights.begin(), weights.end());
  const double ns = state.norm_sq();
  const FockState down = apply_ladder_combination(state, w, LadderKind::Annihilate);
  const FockState up = apply_ladder_combination(state, w, LadderKind::Create);
  const cplx a = inner(state, down) / ns;
  const cplx a2 = inner(up, down) / ns;
  const double ada = down.norm_sq() / ns;
  const double aad = up.norm_sq() / ns;
  const double scale = 1.0 / (static_cast<double>(n) * n);
  QuadratureStats st;
  st.mean_x = kSqrt2 * a.real() / n;
  st.mean_p = kSqrt2 * a.imag() / n;
  st.var_x = 0.5 * scale * (2.0 * a2.real() + ada + aad) - st.mean_x * st.mean_x;
  st.var_p = 0.5 * scale * (-2.0 * a2.real() + ada + aad) - st.mean_p * st.mean_p;
  return st;
}

// Orthogonality.

cplx overlap_formula_coefficient(const ModeWeights& w, cplx b, cplx g, cplx bp, cplx gp) {
  const double mu = w.mu(), nu = w.nu(), tau = w.tau();
  const double nu2 = nu * nu, tau2 = tau * tau, mu2 = mu * mu;
  const cplx e = -(mu2 + nu2) / (6.0 * nu2) * (nu2 * (std::norm(b) + std::norm(bp)) + tau2 * (std::norm(g) + std::norm(gp))) -
                 mu / (6.0 * nu) * tau2 *
                     (b * std::conj(g) + std::conj(b) * g + bp * std::conj(gp) + std::conj(bp) * gp -
                      2.0 * (b * std::conj(gp) + std::conj(bp) * g)) +
                 (nu2 + tau2) / (3.0 * nu2) * (nu2 * b * std::conj(bp) + mu2 * g * std::conj(gp));
  return std::exp(e);
}

cplx delta_limit_integral(const ModeWeights& w, const CesParams& p, cplx beta_p, cplx gamma_p, Regularization reg) {
  const GaussianKet ket = tripartite_ces_ket(w, p, reg);
  const double t = std::tanh(p.reg_r);
  // The integrand is a Gaussian in x' of precision 2a centred near p.x.
  const double a = 3.0 * (1.0 + t) / (8.0 * (1.0 - t));
  const double half = 12.0 / std::sqrt(2.0 * a);
  const int points = 1201;
  const double h = 2.0 * half / (points - 1);
  cplx acc = 0.0;
  for (int k = 0; k < points; ++k) {
    const double xp = p.x - half + k * h;
    const cplx v = ket_inner(tripartite_ces_ket(w, CesParams{beta_p, gamma_p, xp, p.reg_r}, reg), ket);
    acc += (k == 0 || k == points - 1) ? 0.5 * v : v;
  }
  return acc * h;
}

GaussianFit fit_gaussian_decay(const std::vector<double>& dx, const std::vector<double>& y) {
  if (dx.size() != y.size() || dx.size() < 2) throw std::invalid_argument("fit_gaussian_decay: need >= 2 points");
  const int n = static_cast<int>(dx.size());
  RMatrix a(n, 2);
  RVector b(n);
  for (int i = 0; i < n; ++i) {
    if (!(y[i] > 0.0)) throw DomainError("fit_gaussian_decay: non-positive overlap magnitude");
    a(i, 0) = 1.0;
    a(i, 1) = dx[i] * dx[i];
    b[i] = std::log(y[i]);
  }
  const RVector c = a.colPivHouseholderQr().solve(b);
  if (!(c[1] < 0.0)) throw DomainError("fit_gaussian_decay: overlaps do not decay");
  const double rms = std::sqrt((a * c - b).squaredNorm() / n);
  return {-1.0 / c[1], std::exp(c[0]), rms};
}

OrthogonalityReport orthogonality_check(const ModeWeights& w, const CesParams& p1, const CesParams& p2, int cutoff,
                                        const OrthogonalityOptions& options) {
  p1.validate();
  p2.validate();
  if (p1.reg_r != p2.reg_r) throw std::invalid_argument("orthogonality_check: p1 and p2 must share reg_r");
  const Regularization reg = options.regularization;
  auto normalized_inner = [](const GaussianKet& a, const GaussianKet& b) {
    return ket_inner(a, b) / std::sqrt(ket_norm_sq(a) * ket_norm_sq(b));
  };

  OrthogonalityReport rep;
  rep.cutoff = cutoff;
  const GaussianKet k1 = tripartite_ces_ket(w, p1, reg);
  rep.numeric_overlap = normalized_inner(k1, tripartite_ces_ket(w, p2, reg));
  const bool fock = options.fock_overlaps && cutoff > 0;
  std::optional<FockState> f1;
  if (fock) {
    f1 = tripartite_ces_formula(w, p1, cutoff, reg).normalized();
    const FockState f2 = tripartite_ces_formula(w, p2, cutoff, reg);
    rep.fock_overlap = inner(*f1, f2.normalized());
    rep.fock_leak = std::max(f1->leak(), f2.leak());
  }

  for (double d : options.dx_sweep) {
    CesParams q = p1;
    q.x += d;
    rep.dx.push_back(d);
    rep.sweep_exact.push_back(std::abs(normalized_inner(k1, tripartite_ces_ket(w, q, reg))));
    if (fock) {
      const FockState fq = tripartite_ces_formula(w, q, cutoff, reg);
      rep.sweep_fock.push_back(std::abs(inner(*f1, fq.normalized())));
      rep.fock_leak = std::max(rep.fock_leak, fq.leak());
    }
  }
  rep.expected_delta_width = (8.0 / 3.0) * std::exp(-2.0 * p1.reg_r);
  try {
    const GaussianFit fit = fit_gaussian_decay(rep.dx, rep.sweep_exact);
    rep.fitted_delta_width = fit.width;
    rep.fit_prefactor = fit.prefactor;
    rep.fit_rms = fit.rms;
    rep.fit_ok = true;
    rep.width_within_tolerance =
        std::abs(fit.width / rep.expected_delta_width - 1.0) <= options.fit_tolerance;
    rep.fit_message = rep.width_within_tolerance ? "ok" : "width outside tolerance";
  } catch (const Error& e) {
    rep.fit_message = e.what();
  }
  if (fock) {
    try {
      rep.fock_fitted_width = fit_gaussian_decay(rep.dx, rep.sweep_fock).width;
    } catch (const Error&) {
      rep.fock_fitted_width.reset();
    }
  }

  rep.formula_coefficient = overlap_formula_coefficient(w, p2.beta, p2.gamma, p1.beta, p1.gamma);
  CesParams at{p2.beta, p2.gamma, p2.x, options.coefficient_reg_r};
  CesParams ref{0.0, 0.0, p2.x, options.coefficient_reg_r};
  rep.delta_normalization = delta_limit_integral(w, ref, 0.0, 0.0, reg).real();
  rep.numeric_coefficient = delta_limit_integral(w, at, p1.beta, p1.gamma, reg) / rep.delta_normalization;
  return rep;
}

// Completeness.

CompletenessReport completeness_mc(const ModeWeights& w, const std::vector<FockState>& tests, double reg_r,
                                   const CompletenessOptions& options) {
  validate_reg_r(reg_r);
  if (tests.empty()) throw std::invalid_argument("completeness_mc: no test states");
  if (options.samples < 2 || options.shards < 1) throw std::invalid_argument("completeness_mc: need samples >= 2");
  const int cutoff = tests.front().cutoff();
  for (const auto& s : tests) {
    if (s.num_modes() != 3 || s.cutoff() != cutoff) {
      throw std::invalid_argument("completeness_mc: test states must share a 3-mode box");
    }
    if (s.weight_above_total(4) > 0.0) throw DomainError("completeness_mc: test states must have total photon number <= 4");
  }
  const int m = static_cast<int>(tests.size());
  std::vector<FockState> phi;
  for (const auto& s : tests) phi.push_back(s.normalized());

  const double mu = w.mu(), nu = w.nu(), tau = w.tau(), lam = w.lambda();
  // Precision of exp(2 Re c0) in (Re b, Im b, Re g, Im g, x).
  const double a = nu * nu + tau * tau;
  const double b = tau * tau * (1.0 + mu * mu / (nu * nu));
  const double c = mu * tau * tau / nu;
  RMatrix prec = RMatrix::Zero(5, 5);
  for (int k = 0; k < 2; ++k) {
    prec(k, k) = 2.0 * a / 3.0;
    prec(k + 2, k + 2) = 2.0 * b / 3.0;
    prec(k, k + 2) = prec(k + 2, k) = 2.0 * c / 3.0;
  }
  prec(4, 4) = 3.0;
  const RMatrix cov = options.inflation * options.inflation * prec.inverse();
  const Eigen::LLT<RMatrix> llt(cov);
  const RMatrix chol = llt.matrixL();
  const double log_norm_q = 2.5 * std::log(2.0 * M_PI) + chol.diagonal().array().log().sum();
  const double weight = tau * tau * lam * lam / (M_PI * M_PI * std::sqrt(6.0 * M_PI));

  CMatrix sum = CMatrix::Zero(m, m);
  RMatrix sum_sq = RMatrix::Zero(m, m);
  const std::int64_t base = options.samples / options.shards;
  const std::int64_t extra = options.samples % options.shards;
  for (int shard = 0; shard < options.shards; ++shard) {
    std::seed_seq seq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32),
                      static_cast<std::uint32_t>(shard)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal;
    const std::int64_t count = base + (shard < extra ? 1 : 0);
    CMatrix s_sum = CMatrix::Zero(m, m);
    RMatrix s_sq = RMatrix::Zero(m, m);
    RVector z(5);
    CVector amp(m);
    for (std::int64_t k = 0; k < count; ++k) {
      for (int d = 0; d < 5; ++d) z[d] = normal(rng);
      const RVector v = chol * z;
      const CesParams p{cplx(v[0], v[1]), cplx(v[2], v[3]), v[4], reg_r};
      const FockState psi = build_quadratic_exponential(tripartite_ces_ket(w, p, options.regularization), cutoff);
      for (int i = 0; i < m; ++i) amp[i] = inner(phi[i], psi);
      const double ratio = weight * std::exp(0.5 * z.squaredNorm() + log_norm_q);
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
          const cplx f = ratio * amp[i] * std::conj(amp[j]);
          s_sum(i, j) += f;
          s_sq(i, j) += std::norm(f);
        }
      }
    }
    sum += s_sum;
    sum_sq += s_sq;
  }

  const double n = static_cast<double>(options.samples);
  CompletenessReport rep;
  rep.estimate = sum / n;
  rep.standard_error = RMatrix(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const double var = std::max(0.0, sum_sq(i, j) / n - std::norm(rep.estimate(i, j)));
      rep.standard_error(i, j) = std::sqrt(var / (n - 1.0));
    }
  }
  rep.conclusive = rep.standard_error.maxCoeff() <= options.stderr_bound;
  rep.samples = options.samples;
  rep.seed = options.seed;
  rep.shards = options.shards;
  rep.reg_r = reg_r;
  rep.weight = weight;
  rep.envelope_precision = prec;
  rep.proposal_covariance = cov;
  return rep;
}

// Wigner function of the collective mode.

CollectiveWigner::CollectiveWigner(const GaussianState& state, const ModeWeights& weights)
    : scale_(weights.tau() * weights.tau() * weights.lambda() * weights.lambda()), mean_(2), cov_(2, 2) {
  if (state.num_modes() != 3) throw std::invalid_argument("CollectiveWigner: expected a 3-mode state");
  const std::vector<double> d = MultiWeights(weights).direction();
  const RVector u = Eigen::Map<const RVector>(d.data(), 3);
  mean_ << u.dot(state.mean().head(3)), u.dot(state.mean().tail(3));
  const RMatrix& v = state.cov();
  cov_ << u.dot(v.topLeftCorner(3, 3) * u), u.dot(v.topRightCorner(3, 3) * u), u.dot(v.bottomLeftCorner(3, 3) * u),
      u.dot(v.bottomRightCorner(3, 3) * u);
}

CollectiveWigner::CollectiveWigner(const FockState& state, const ModeWeights& weights, const ExpOptions& options)
    : scale_(weights.tau() * weights.tau() * weights.lambda() * weights.lambda()), mean_(2), cov_(2, 2) {
  if (state.num_modes() != 3) throw std::invalid_argument("CollectiveWigner: expected a 3-mode state");
  const auto [theta, phi] = tripartite_angles(weights);
  FockState s = apply_generator_exponential(state, gen::BeamSplitter{1, 2, -phi}, options);
  s = apply_generator_exponential(s, gen::BeamSplitter{0, 1, -theta}, options);
  leak_ = s.leak();
  const int c = s.cutoff();
  const Eigen::Index s0 = s.stride(0);
  rho_ = CMatrix::Zero(c, c);
  const CVector& psi = s.amplitudes();
  for (Eigen::Index rest = 0; rest < s.dim(); ++rest) {
    if (s.levels(rest)[0] != 0) continue;
    for (int i = 0; i < c; ++i) {
      const cplx ai = psi[i * s0 + rest];
      if (ai == 0.0) continue;
      for (int j = 0; j < c; ++j) rho_(i, j) += ai * std::conj(psi[j * s0 + rest]);
    }
  }
  rho_ /= s.norm_sq();
  cplx a = 0.0, a2 = 0.0;
  double n = 0.0;
  for (int k = 0; k < c; ++k) {
    n += k * rho_(k, k).real();
    if (k >= 1) a += std::sqrt(static_cast<double>(k)) * rho_(k, k - 1);
    if (k >= 2) a2 += std::sqrt(static_cast<double>(k) * (k - 1)) * rho_(k, k - 2);
  }
  mean_ << kSqrt2 * a.real(), kSqrt2 * a.imag();
  cov_(0, 0) = 0.5 * (2.0 * a2.real() + 2.0 * n + 1.0) - mean_[0] * mean_[0];
  cov_(1, 1) = 0.5 * (-2.0 * a2.real() + 2.0 * n + 1.0) - mean_[1] * mean_[1];
  cov_(0, 1) = cov_(1, 0) = a2.imag() - mean_[0] * mean_[1];
}

double CollectiveWigner::density_R(double xr, double pr) const {
  if (!from_fock()) {
    RVector d(2);
    d << xr - mean_[0], pr - mean_[1];
    const double det = cov_.determinant();
    return std::exp(-0.5 * d.dot(cov_.inverse() * d)) / (2.0 * M_PI * std::sqrt(det));
  }
  const int c = static_cast<int>(rho_.rows());
  const cplx alpha = cplx(xr, pr) / kSqrt2;
  const double y = 4.0 * std::norm(alpha);
  double acc = 0.0;
  for (int k = 0; k < c; ++k) {
    // Generalized Laguerre L_m^{(k)}(y) by upward recurrence in m.
    double lm1 = 0.0, l = 1.0;
    cplx part = 0.0;
    for (int m = 0; m + k < c; ++m) {
      if (m == 1) {
        lm1 = 1.0;
        l = 1.0 + k - y;
      } else if (m > 1) {
        const double next = ((2.0 * (m - 1) + 1.0 + k - y) * l - (m - 1 + k) * lm1) / m;
        lm1 = l;
        l = next;
      }
      const double sign = (m % 2 == 0) ? 1.0 : -1.0;
      const double ratio = std::exp(0.5 * (std::lgamma(m + 1.0) - std::lgamma(m + k + 1.0)));
      part += rho_(m, m + k) * (sign * ratio * l);
    }
    if (k == 0) {
      acc += part.real();
    } else {
      acc += 2.0 * (part * std::pow(2.0 * alpha, k)).real();
    }
  }
  return acc * std::exp(-0.5 * y) / M_PI;
}

WignerValue CollectiveWigner::operator()(double x, double p) const {
  const double wr = density_R(kSqrt1p5 * x, kSqrt1p5 * p);
  return {wr / scale_, 1.5 * wr};
}

double CollectiveWigner::marginal(double v, bool integrate_p) const {
  const int idx = integrate_p ? 1 : 0;
  const double sigma = std::sqrt(cov_(idx, idx)) / kSqrt1p5;
  const double centre = mean_[idx] / kSqrt1p5;
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("marginal: degenerate collective variance");
  const int points = 321;  // half-width 8 sigma, step sigma/20
  const double h = 16.0 * sigma / (points - 1);
  double acc = 0.0;
  for (int k = 0; k < points; ++k) {
    const double s = centre - 8.0 * sigma + k * h;
    const double val = integrate_p ? (*this)(v, s).normalized : (*this)(s, v).normalized;
    acc += (k == 0 || k == points - 1) ? 0.5 * val : val;
  }
  return acc * h;
}

double CollectiveWigner::marginal_x(double x) const { return marginal(x, true); }
double CollectiveWigner::marginal_p(double p) const { return marginal(p, false); }

WignerValue wigner_collective(const GaussianState& state, const ModeWeights& weights, double x, double p) {
  return CollectiveWigner(state, weights)(x, p);
}

WignerValue wigner_collective(const FockState& state, const ModeWeights& weights, double x, double p) {
  return CollectiveWigner(state, weights)(x, p);
}

double marginal_x(const GaussianState& state, const ModeWeights& weights, double x) {
  return CollectiveWigner(state, weights).marginal_x(x);
}
double marginal_p(const GaussianState& state, const ModeWeights& weights, double p) {
  return CollectiveWigner(state, weights).marginal_p(p);
}
double marginal_x(const FockState& state, const ModeWeights& weights, double x) {
  return CollectiveWigner(state, weights).marginal_x(x);
}
double marginal_p(const FockState& state, const ModeWeights& weights, double p) {
  return CollectiveWigner(state, weights).marginal_p(p);
}

double collective_density_x(const GaussianState& state, const ModeWeights& weights, double x) {
  const CollectiveWigner cw(state, weights);
  const double v = cw.cov()(0, 0);
  const double d = kSqrt1p5 * x - cw.mean()[0];
  return kSqrt1p5 * std::exp(-0.5 * d * d / v) / std::sqrt(2.0 * M_PI * v);
}

double collective_density_p(const GaussianState& state, const ModeWeights& weights, double p) {
  const CollectiveWigner cw(state, weights);
  const double v = cw.cov()(1, 1);
  const double d = kSqrt1p5 * p - cw.mean()[1];
  return kSqrt1p5 * std::exp(-0.5 * d * d / v) / std::sqrt(2.0 * M_PI * v);
}

// SU(1,1) algebra and the squeezing operator.

Su11Report su11_check(const MultiWeights& weights, int cutoff, double tolerance) {
  if (cutoff < 8) throw std::invalid_argument("su11_check: cutoff must be >= 8");
  const int n = weights.size();
  checked_dimension(n, cutoff);
  const SpMat r = collective_lowering(weights.direction(), cutoff);
  const SpMat rd = r.transpose();
  const Eigen::Index dim = r.rows();
  SpMat id(dim, dim);
  id.setIdentity();
  const SpMat r2 = r * r;
  const SpMat rd2 = rd * rd;
  const SpMat casimir = SpMat(rd * r) + 0.5 * id;  // R^dag R + 1/2
  const SpMat km = 0.5 * r2, kp = 0.5 * rd2, k0 = 0.5 * casimir;

  const int top = cutoff - 4;
  const std::vector<int> tot = totals(n, cutoff);
  std::vector<Eigen::Index> interior;
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (tot[i] <= top) interior.push_back(i);
  }
  SpMat select(dim, static_cast<Eigen::Index>(interior.size()));
  {
    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t k = 0; k < interior.size(); ++k) trip.emplace_back(interior[k], static_cast<Eigen::Index>(k), 1.0);
    select.setFromTriplets(trip.begin(), trip.end());
  }
  auto defect = [&](const SpMat& d) {
    const SpMat ds = d * select;
    const RMatrix gram = RMatrix(SpMat(ds.transpose() * ds));
    const double top_eig = Eigen::SelfAdjointEigenSolver<RMatrix>(gram, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
    return std::sqrt(std::max(0.0, top_eig));
  };
  auto comm = [](const SpMat& a, const SpMat& b) { return SpMat(SpMat(a * b) - SpMat(b * a)); };

  Su11Report rep{cutoff, top, tolerance, {}};
  auto add = [&](const std::string& name, const SpMat& d) {
    const double v = defect(d);
    rep.relations.push_back({name, v, v <= tolerance});
  };
  add("[R, R^dag] = 1", comm(r, rd) - id);
  add("standard: [K0, K+] = K+", comm(k0, kp) - kp);
  add("standard: [K0, K-] = -K-", comm(k0, km) + km);
  add("standard: [K-, K+] = 2 K0", comm(km, kp) - 2.0 * k0);
  add("printed: [R^2, R^dag^2] = 2 (R^dag R + 1/2)", comm(r2, rd2) - 2.0 * casimir);
  add("printed: [(R^dag R + 1/2), R^2] = -R^2", comm(casimir, r2) + r2);
  add("printed: [(R^dag R + 1/2), R^dag^2] = R^dag^2", comm(casimir, rd2) - rd2);
  add("rescaled: [R^2, R^dag^2] = 4 (R^dag R + 1/2)", comm(r2, rd2) - 4.0 * casimir);
  add("rescaled: [(R^dag R + 1/2), R^2] = -2 R^2", comm(casimir, r2) + 2.0 * r2);
  add("rescaled: [(R^dag R + 1/2), R^dag^2] = 2 R^dag^2", comm(casimir, rd2) - 2.0 * rd2);
  return rep;
}

SqueezeReport squeeze_operator_check(const ModeWeights& weights, double l, int cutoff) {
  if (!(l > 0.0) || l > std::exp(1.5)) throw std::invalid_argument("squeeze_operator_check: l must lie in (0, e^1.5]");
  const int top = cutoff / 3;
  if (top + 1 < 4) {
    throw DomainError("squeeze_operator_check: cutoff " + std::to_string(cutoff) +
                      " leaves fewer than 4 interior levels");
  }
  checked_dimension(3, cutoff);
  const double sq = std::log(l);
  const double th = (l * l - 1.0) / (l * l + 1.0);
  const double sech = 2.0 * l / (1.0 + l * l);
  const std::vector<double> u = MultiWeights(weights).direction();
  const SpMat r = collective_lowering(u, cutoff);
  const SpMat rd = r.transpose();
  const SpMat r2 = r * r;
  const SpMat rd2 = rd * rd;
  const Eigen::Index dim = r.rows();

  const std::vector<int> tot = totals(3, cutoff);
  std::vector<Eigen::Index> interior;
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (tot[i] <= top) interior.push_back(i);
  }
  const Eigen::Index ni = static_cast<Eigen::Index>(interior.size());
  RMatrix x0 = RMatrix::Zero(dim, ni);
  for (Eigen::Index k = 0; k < ni; ++k) x0(interior[k], k) = 1.0;

  // Series of a nilpotent operator; stops once the term vanishes.
  auto nilpotent_exp = [](const SpMat& op, const RMatrix& x) {
    RMatrix acc = x, term = x;
    for (int k = 1; term.norm() > 0.0; ++k) {
      term = (op * term) / static_cast<double>(k);
      acc += term;
    }
    return acc;
  };
  // Factored form.
  RMatrix y = nilpotent_exp(SpMat(0.5 * th * r2), x0);
  {
    // exp(R^dag R ln sech) = :exp((sech - 1) R^dag R):, finite on the interior.
    RMatrix acc = y;
    RMatrix down = y;
    double coeff = 1.0;
    for (int k = 1; down.norm() > 0.0; ++k) {
      down = r * down;
      coeff *= (sech - 1.0) / k;
      RMatrix upk = down;
      for (int j = 0; j < k; ++j) upk = rd * upk;
      acc += coeff * upk;
    }
    y = acc;
  }
  y = std::sqrt(sech) * nilpotent_exp(SpMat(-0.5 * th * rd2), y);

  // Generator exponential exp((sq/2)(R^2 - R^dag^2)).
  const Eigen::SparseMatrix<double, Eigen::RowMajor> gen = 0.5 * sq * SpMat(r2 - rd2);
  auto apply = [&](const RMatrix& in, RMatrix& out) { out.noalias() = gen * in; };
  // Steps of 1-norm <= 12: fewer products than unit steps, and the largest
  // intermediate term (about e^12) costs under 1e-10 in rounding.
  const RMatrix g = detail::taylor_expmv(x0, apply, max_abs_column_sum(SpMat(gen)) / 6.0, 1e-16, 200);

  RMatrix fi(ni, ni), gi(ni, ni);
  for (Eigen::Index k = 0; k < ni; ++k) {
    fi.row(k) = y.row(interior[k]);
    gi.row(k) = g.row(interior[k]);
  }
  SqueezeReport rep;
  rep.squeeze_param = sq;
  rep.cutoff = cutoff;
  rep.interior_max_total = top;
  rep.defect = spectral_norm(fi - gi);
  const double ff = fi.squaredNorm();
  rep.measured_ratio = ff > 0.0 ? (fi.array() * gi.array()).sum() / ff : 0.0;
  rep.printed_prefactor = 1.0 / (weights.tau() * weights.tau() * weights.lambda() * weights.lambda());

  // Vacuum is interior column 0 (total photon number 0).
  const CVector vac = y.col(0).cast<cplx>();
  rep.vacuum_norm = g.col(0).norm();
  rep.vacuum_norm_factored = vac.norm();
  rep.vacuum_leak_factored = 1.0 - vac.squaredNorm();
  RVector w(3);
  w << weights.mu(), weights.nu(), weights.tau();
  const RVector uu = Eigen::Map<const RVector>(u.data(), 3);
  auto overlap_with = [&](const CMatrix& quad) {
    const FockState target =
        build_quadratic_exponential(3, cutoff, 0.5 * std::log(sech), CVector::Zero(3), quad);
    return std::abs(target.amplitudes().dot(vac)) / (target.norm() * vac.norm());
  };
  const CMatrix quad = (-0.5 * th) * (uu * uu.transpose()).cast<cplx>();
  rep.vacuum_norm_exact = std::sqrt(ket_norm_sq(GaussianKet{0.5 * std::log(sech), CVector::Zero(3), quad}));
  rep.vacuum_overlap = overlap_with(quad);
  // With unnormalized weights the printed quadratic can exceed the
  // normalizability bound; that state has no overlap and is reported as NaN.
  try {
    rep.vacuum_overlap_printed_quadratic = overlap_with((-th / 6.0) * (w * w.transpose()).cast<cplx>());
  } catch (const DomainError&) {
    rep.vacuum_overlap_printed_quadratic = std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

// Integral utilities.

bool GaussIntegralParams::converges() const {
  const cplx d = zeta * zeta - 4.0 * f * g;
  const cplx plus = zeta + f + g, minus = zeta - f - g;
  const bool a = plus.real() < 0.0 && (d / plus).real() < 0.0;
  const bool b = minus.real() < 0.0 && (d / minus).real() < 0.0;
  return a || b;
}

cplx gaussian_integral_2d(const GaussIntegralParams& p) {
  if (!p.converges()) throw DomainError("gaussian_integral_2d: convergence conditions violated");
  const cplx d = p.zeta * p.zeta - 4.0 * p.f * p.g;
  return std::exp((-p.zeta * p.xi * p.eta + p.xi * p.xi * p.g + p.eta * p.eta * p.f) / d) / std::sqrt(d);
}

cplx gaussian_integral_2d_quadrature(const GaussIntegralParams& p, double radius, int points) {
  if (points < 3 || !(radius > 0.0)) throw std::invalid_argument("gaussian_integral_2d_quadrature: bad grid");
  const double h = 2.0 * radius / (points - 1);
  cplx acc = 0.0;
  for (int i = 0; i < points; ++i) {
    const double u = -radius + i * h;
    const double wu = (i == 0 || i == points - 1) ? 0.5 : 1.0;
    for (int j = 0; j < points; ++j) {
      const double v = -radius + j * h;
      const double wv = (j == 0 || j == points - 1) ? 0.5 : 1.0;
      const cplx z(u, v);
      const cplx e = p.zeta * std::norm(z) + p.xi * z + p.eta * std::conj(z) + p.f * z * z +
                     p.g * std::conj(z) * std::conj(z);
      acc += wu * wv * std::exp(e);
    }
  }
  return acc * h * h / M_PI;
}

double nascent_delta(double x, double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("nascent_delta: epsilon must be positive");
  return std::exp(-x * x / epsilon) / std::sqrt(M_PI * epsilon);
}

}  // namespace cesim
