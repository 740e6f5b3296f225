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

#include "cesim/weights.hpp"

#include <cmath>
#include <string>

namespace cesim {

namespace {

void check_weight(double w, const char* name) {
  if (!std::isfinite(w) || w == 0.0) {
    throw std::invalid_argument(std::string("weight ") + name + " must be finite and nonzero");
  }
}

}  // namespace

ModeWeights::ModeWeights(double mu, double nu, double tau) : mu_(mu), nu_(nu), tau_(tau) {
  check_weight(mu, "mu");
  check_weight(nu, "nu");
  check_weight(tau, "tau");
  lambda_ = std::sqrt((mu * mu + nu * nu + tau * tau) / 3.0);
}

MultiWeights::MultiWeights(std::vector<double> mu) : mu_(std::move(mu)) {
  if (mu_.size() < 2) throw std::invalid_argument("MultiWeights: need at least two modes");
  double s = 0.0;
  for (std::size_t i = 0; i < mu_.size(); ++i) {
    check_weight(mu_[i], ("mu_" + std::to_string(i + 1)).c_str());
    s += mu_[i] * mu_[i];
  }
  lambda_ = std::sqrt(s / static_cast<double>(mu_.size()));
}

std::vector<double> MultiWeights::direction() const {
  std::vector<double> u(mu_.size());
  const double scale = std::sqrt(static_cast<double>(mu_.size())) * lambda_;
  for (std::size_t i = 0; i < mu_.size(); ++i) u[i] = mu_[i] / scale;
  return u;
}

void validate_reg_r(double reg_r) {
  if (!(reg_r > 0.0 && reg_r <= kMaxRegR)) {
    throw std::invalid_argument("reg_r must lie in (0, " + std::to_string(kMaxRegR) + "], got " +
                                std::to_string(reg_r));
  }
}

void CesParams::validate() const {
  validate_reg_r(reg_r);
  if (!std::isfinite(x) || !std::isfinite(std::abs(beta)) || !std::isfinite(std::abs(gamma))) {
    throw std::invalid_argument("CesParams: non-finite label");
  }
}

void ConjugateParams::validate() const {
  validate_reg_r(reg_r);
  if (!std::isfinite(p) || !std::isfinite(std::abs(sigma)) || !std::isfinite(std::abs(kappa))) {
    throw std::invalid_argument("ConjugateParams: non-finite label");
  }
}

}  // namespace cesim
