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

#include "cesim/circuits.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/LU>

namespace cesim {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

void check_betas(const MultiWeights& w, const std::vector<cplx>& betas) {
  if (static_cast<int>(betas.size()) != w.size() - 1) {
    throw std::invalid_argument("expected " + std::to_string(w.size() - 1) + " beta labels for " +
                                std::to_string(w.size()) + " modes, got " + std::to_string(betas.size()));
  }
}

}  // namespace

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::PaperEq18:
      return "PaperEq18";
    case Provenance::PaperEq22:
      return "PaperEq22";
    case Provenance::PaperEq23:
      return "PaperEq23";
    case Provenance::PaperSec6:
      return "PaperSec6";
    case Provenance::ConstraintSolve:
      return "ConstraintSolve";
    case Provenance::AngleSolve:
      return "AngleSolve";
    case Provenance::Regularization:
      return "Regularization";
  }
  throw std::logic_error("unknown provenance");
}

Provenance provenance_from_string(const std::string& s) {
  for (Provenance p : {Provenance::PaperEq18, Provenance::PaperEq22, Provenance::PaperEq23, Provenance::PaperSec6,
                       Provenance::ConstraintSolve, Provenance::AngleSolve, Provenance::Regularization}) {
    if (to_string(p) == s) return p;
  }
  throw ConfigError("unknown provenance '" + s + "'");
}

void Circuit::validate() const {
  if (num_modes < 1) throw std::invalid_argument("Circuit: num_modes must be >= 1");
  if (gates.empty() || !std::holds_alternative<gate::Squeeze>(gates.front().gate)) {
    throw std::invalid_argument("Circuit: the first gate must be the squeeze");
  }
  if (std::get<gate::Squeeze>(gates.front().gate).mode != 0) {
    throw std::invalid_argument("Circuit: the squeeze must act on mode 0");
  }
  int stage = 0;  // 0 squeeze, 1 beam splitters, 2 displacements
  for (std::size_t k = 0; k < gates.size(); ++k) {
    const auto& g = gates[k].gate;
    symplectic_matrix(g, num_modes);  // index validation
    int s = std::holds_alternative<gate::Squeeze>(g) ? 0 : std::holds_alternative<gate::BeamSplitter>(g) ? 1 : 2;
    if (s == 0 && k != 0) throw std::invalid_argument("Circuit: only one squeeze gate is allowed");
    if (s < stage) throw std::invalid_argument("Circuit: beam splitters must precede all displacements");
    stage = s;
  }
}

DeltaParams DeltaParams::canonical_lift(const MultiWeights& weights, const std::vector<cplx>& betas) {
  check_betas(weights, betas);
  const int n = weights.size();
  DeltaParams d{std::vector<cplx>(n, 0.0)};
  for (int i = n - 2; i >= 0; --i) d.delta[i] = betas[i] + (weights[i] / weights[i + 1]) * d.delta[i + 1];
  return d;
}

std::vector<cplx> DeltaParams::induced_betas(const MultiWeights& weights) const {
  const int n = weights.size();
  if (static_cast<int>(delta.size()) != n) throw std::invalid_argument("DeltaParams: length must equal mode count");
  std::vector<cplx> betas(n - 1);
  for (int i = 0; i + 1 < n; ++i) betas[i] = delta[i] - (weights[i] / weights[i + 1]) * delta[i + 1];
  return betas;
}

std::pair<double, double> tripartite_angles(const ModeWeights& w) {
  const double theta = std::atan2(std::hypot(w.nu(), w.tau()), w.mu());
  const double phi = std::atan2(w.tau(), w.nu());
  return {theta, phi};
}

std::vector<double> multipartite_angles(const MultiWeights& weights) {
  const std::vector<double> u = weights.direction();
  const int n = weights.size();
  std::vector<double> theta(n - 1);
  for (int i = 0; i + 1 < n; ++i) {
    if (i == n - 2) {
      theta[i] = std::atan2(u[n - 1], u[n - 2]);
    } else {
      double tail = 0.0;
      for (int k = i + 1; k < n; ++k) tail += u[k] * u[k];
      theta[i] = std::atan2(std::sqrt(tail), u[i]);
    }
    if (std::sin(theta[i]) == 0.0) {
      throw DomainError("degenerate cascade direction: sine of angle " + std::to_string(i + 1) + " vanishes");
    }
  }
  return theta;
}

std::vector<double> direction_cosines(const std::vector<double>& angles) {
  const int n = static_cast<int>(angles.size()) + 1;
  std::vector<double> u(n);
  double prefix = 1.0;
  for (int i = 0; i + 1 < n; ++i) {
    u[i] = prefix * std::cos(angles[i]);
    prefix *= std::sin(angles[i]);
  }
  u[n - 1] = prefix;
  return u;
}

std::vector<cplx> solve_displacements(const MultiWeights& weights, const std::vector<cplx>& betas, double x) {
  check_betas(weights, betas);
  const int n = weights.size();
  const double lam = weights.lambda();
  // Unknowns (Re eps, Im eps); complex equations split into two real rows.
  RMatrix a = RMatrix::Zero(2 * n, 2 * n);
  RVector b = RVector::Zero(2 * n);
  for (int i = 0; i + 1 < n; ++i) {
    const cplx rhs = weights[i + 1] * betas[i] * lam;
    a(2 * i, i) = weights[i + 1];
    a(2 * i, i + 1) = -weights[i];
    a(2 * i + 1, n + i) = weights[i + 1];
    a(2 * i + 1, n + i + 1) = -weights[i];
    b[2 * i] = rhs.real();
    b[2 * i + 1] = rhs.imag();
  }
  for (int i = 0; i < n; ++i) {
    a(2 * n - 2, i) = weights[i];
    a(2 * n - 1, n + i) = weights[i];
  }
  b[2 * n - 2] = n * lam * x / 2.0;
  const Eigen::FullPivLU<RMatrix> lu(a);
  if (!lu.isInvertible()) throw std::logic_error("displacement system is singular for nonzero weights");
  const RVector sol = lu.solve(b);
  if ((a * sol - b).norm() > 1e-12 * std::max(1.0, b.norm())) {
    throw ConvergenceError("displacement system residual above 1e-12");
  }
  std::vector<cplx> eps(n);
  for (int i = 0; i < n; ++i) eps[i] = cplx(sol[i], sol[n + i]);
  return eps;
}

std::vector<cplx> paper_displacements(const MultiWeights& weights, const std::vector<cplx>& betas, double x,
                                      Provenance variant, const std::optional<DeltaParams>& deltas) {
  check_betas(weights, betas);
  const int n = weights.size();
  const double lam = weights.lambda();
  const std::vector<cplx> d = deltas ? deltas->delta : DeltaParams::canonical_lift(weights, betas).delta;
  if (static_cast<int>(d.size()) != n) throw std::invalid_argument("DeltaParams: length must equal mode count");
  switch (variant) {
    case Provenance::PaperEq18: {
      if (n != 3) throw std::invalid_argument("PaperEq18 applies to three modes");
      const double mu = weights[0], nu = weights[1], tau = weights[2];
      const cplx beta = betas[0], gamma = betas[1];
      return {(2.0 * beta * nu * (nu * nu + tau * tau) + 2.0 * gamma * mu * tau * tau + 3.0 * x * mu * nu) /
                  (6.0 * mu * lam),
              (-2.0 * beta * mu * nu + 2.0 * gamma * tau * tau + 3.0 * x * nu) / (6.0 * lam),
              (-2.0 * beta * mu * nu * tau - 2.0 * gamma * tau * (mu * mu + nu * nu) + 3.0 * x * nu * tau) /
                  (6.0 * nu * lam)};
    }
    case Provenance::PaperEq22: {
      if (n != 2) throw std::invalid_argument("PaperEq22 applies to two modes");
      const double mu = weights[0], nu = weights[1];
      return {(d[0] * nu * nu - d[1] * mu * nu + mu * x) / lam, (-d[0] * mu * nu + d[1] * nu * nu + nu * x) / lam};
    }
    case Provenance::PaperEq23: {
      if (n != 3) throw std::invalid_argument("PaperEq23 applies to three modes");
      const double mu = weights[0], nu = weights[1], tau = weights[2];
      const double k = 1.0 / (3.0 * lam);
      return {k * (d[0] * (nu * nu + tau * tau) - d[1] * mu * nu - d[2] * mu * tau + 1.5 * mu * x),
              k * (-d[0] * mu * nu + d[1] * (nu * nu + tau * tau) - d[2] * nu * tau + 1.5 * nu * x),
              k * (-d[0] * mu * tau - d[1] * nu * tau + d[2] * (mu * mu + nu * nu) + 1.5 * tau * x)};
    }
    case Provenance::PaperSec6: {
      std::vector<cplx> eps(n);
      for (int i = 0; i < n; ++i) {
        double others_sq = 0.0;
        cplx others_dmu = 0.0;
        for (int j = 0; j < n; ++j) {
          if (j == i) continue;
          others_sq += weights[j] * weights[j];
          others_dmu += d[j] * weights[j];
        }
        eps[i] = (d[i] * others_sq - weights[i] * others_dmu + 0.5 * n * weights[i] * x) / (n * lam);
      }
      return eps;
    }
    case Provenance::ConstraintSolve:
      return solve_displacements(weights, betas, x);
    default:
      throw std::invalid_argument("paper_displacements: " + to_string(variant) + " is not a displacement formula");
  }
}

std::vector<Provenance> displacement_variants(int num_modes) {
  if (num_modes == 2) return {Provenance::PaperEq22, Provenance::PaperSec6, Provenance::ConstraintSolve};
  if (num_modes == 3) {
    return {Provenance::PaperEq18, Provenance::PaperEq23, Provenance::PaperSec6, Provenance::ConstraintSolve};
  }
  return {Provenance::PaperSec6, Provenance::ConstraintSolve};
}

Circuit generate_ces_circuit(const MultiWeights& weights, const std::vector<cplx>& betas, double x, double reg_r,
                             Provenance displacement_source) {
  validate_reg_r(reg_r);
  const int n = weights.size();
  Circuit c{n, {}};
  c.gates.push_back({gate::Squeeze{0, reg_r}, Provenance::Regularization});
  const std::vector<double> theta = multipartite_angles(weights);
  for (int i = 0; i + 1 < n; ++i) c.gates.push_back({gate::BeamSplitter{i, i + 1, theta[i]}, Provenance::AngleSolve});
  const std::vector<cplx> eps = paper_displacements(weights, betas, x, displacement_source);
  for (int i = 0; i < n; ++i) {
    if (eps[i] != 0.0) c.gates.push_back({gate::Displace{i, eps[i]}, displacement_source});
  }
  c.validate();
  return c;
}

GaussianState execute_gaussian(const Circuit& circuit) {
  circuit.validate();
  GaussianState s = vacuum_gaussian(circuit.num_modes);
  for (const auto& g : circuit.gates) s = apply_gate(s, g.gate);
  return s;
}

FockState execute_fock(const Circuit& circuit, int cutoff, const ExpOptions& options) {
  circuit.validate();
  FockState s = vacuum_fock(circuit.num_modes, cutoff);
  for (const auto& g : circuit.gates) s = apply_generator_exponential(s, to_generator(g.gate), options);
  return s;
}

std::vector<LadderCheck> ladder_checks(const GaussianState& state, const MultiWeights& weights,
                                       const std::vector<cplx>& betas) {
  check_betas(weights, betas);
  const int n = weights.size();
  if (state.num_modes() != n) throw std::invalid_argument("ladder_checks: mode count mismatch");
  const GaussianKet ket = to_ket(state);
  std::vector<LadderCheck> out;
  for (int i = 0; i + 1 < n; ++i) {
    std::vector<cplx> c(n, 0.0);
    c[i] = weights[i + 1];
    c[i + 1] = -weights[i];
    const cplx with_lambda = weights[i + 1] * betas[i] * weights.lambda();
    const cplx without_lambda = weights[i + 1] * betas[i];
    out.push_back({"(mu" + std::to_string(i + 2) + " a" + std::to_string(i + 1) + " - mu" + std::to_string(i + 1) +
                       " a" + std::to_string(i + 2) + ")",
                   with_lambda, ladder_residual(ket, c, with_lambda), ladder_residual(ket, c, without_lambda)});
  }
  return out;
}

AdjudicationReport adjudicate_displacements(const MultiWeights& weights, const std::vector<cplx>& betas, double x,
                                            double reg_r, double tolerance) {
  const std::vector<cplx> truth = solve_displacements(weights, betas, x);
  AdjudicationReport report{{}, tolerance};
  for (Provenance v : displacement_variants(weights.size())) {
    VariantVerdict verdict{v, paper_displacements(weights, betas, x, v), {}, 0.0, 0.0, false, false};
    for (int i = 0; i < weights.size(); ++i) {
      verdict.max_eps_deviation = std::max(verdict.max_eps_deviation, std::abs(verdict.eps[i] - truth[i]));
    }
    const GaussianState s = execute_gaussian(generate_ces_circuit(weights, betas, x, reg_r, v));
    verdict.ladder = ladder_checks(s, weights, betas);
    const QuadratureStats st = collective_quadrature_stats(s, weights.mu());
    verdict.collective_mean_error = std::abs(st.mean_x - weights.lambda() * x / kSqrt2);
    verdict.agrees_with_constraint = verdict.max_eps_deviation <= tolerance;
    verdict.passes = verdict.collective_mean_error <= tolerance;
    for (const auto& l : verdict.ladder) verdict.passes = verdict.passes && l.residual <= tolerance;
    report.verdicts.push_back(std::move(verdict));
  }
  return report;
}

nlohmann::json circuit_to_json(const Circuit& circuit) {
  nlohmann::json gates = nlohmann::json::array();
  for (const auto& g : circuit.gates) {
    nlohmann::json e;
    if (const auto* sq = std::get_if<gate::Squeeze>(&g.gate)) {
      e["gate"] = "squeeze";
      e["params"] = {{"mode", sq->mode}, {"r", sq->r}};
    } else if (const auto* bs = std::get_if<gate::BeamSplitter>(&g.gate)) {
      e["gate"] = "beam_splitter";
      e["params"] = {{"i", bs->i}, {"j", bs->j}, {"theta", bs->theta}};
    } else {
      const auto& d = std::get<gate::Displace>(g.gate);
      e["gate"] = "displace";
      e["params"] = {{"mode", d.mode}, {"eps", {d.eps.real(), d.eps.imag()}}};
    }
    e["provenance"] = to_string(g.provenance);
    gates.push_back(e);
  }
  return {{"num_modes", circuit.num_modes}, {"gates", gates}};
}

Circuit circuit_from_json(const nlohmann::json& j) {
  try {
    const nlohmann::json& gates = j.is_array() ? j : j.at("gates");
    Circuit c;
    int max_mode = -1;
    for (const auto& e : gates) {
      const std::string kind = e.at("gate").get<std::string>();
      const auto& p = e.at("params");
      CircuitGate g{gate::Squeeze{0, 0.0}, provenance_from_string(e.at("provenance").get<std::string>())};
      if (kind == "squeeze") {
        g.gate = gate::Squeeze{p.at("mode").get<int>(), p.at("r").get<double>()};
        max_mode = std::max(max_mode, p.at("mode").get<int>());
      } else if (kind == "beam_splitter") {
        g.gate = gate::BeamSplitter{p.at("i").get<int>(), p.at("j").get<int>(), p.at("theta").get<double>()};
        max_mode = std::max({max_mode, p.at("i").get<int>(), p.at("j").get<int>()});
      } else if (kind == "displace") {
        const auto& eps = p.at("eps");
        g.gate = gate::Displace{p.at("mode").get<int>(), cplx(eps.at(0).get<double>(), eps.at(1).get<double>())};
        max_mode = std::max(max_mode, p.at("mode").get<int>());
      } else {
        throw ConfigError("unknown gate '" + kind + "'");
      }
      c.gates.push_back(g);
    }
    c.num_modes = j.is_array() ? max_mode + 1 : j.at("num_modes").get<int>();
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed circuit JSON: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid circuit: ") + e.what());
  } catch (const std::out_of_range& e) {
    throw ConfigError(std::string("invalid circuit: ") + e.what());
  }
}

}  // namespace cesim
