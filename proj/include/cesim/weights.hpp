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

#include <vector>

#include "cesim/common.hpp"

namespace cesim {

/// Tripartite weights (mu, nu, tau) with lambda^2 = (mu^2 + nu^2 + tau^2) / 3.
class ModeWeights {
 public:
  ModeWeights(double mu, double nu, double tau);

  double mu() const { return mu_; }
  double nu() const { return nu_; }
  double tau() const { return tau_; }
  double lambda() const { return lambda_; }
  std::vector<double> as_vector() const { return {mu_, nu_, tau_}; }

 private:
  double mu_;
  double nu_;
  double tau_;
  double lambda_;
};

/// N-mode weights with lambda^2 = sum(mu_i^2) / N, N >= 2.
class MultiWeights {
 public:
  explicit MultiWeights(std::vector<double> mu);
  MultiWeights(const ModeWeights& w) : MultiWeights(w.as_vector()) {}  // NOLINT: implicit by design

  int size() const { return static_cast<int>(mu_.size()); }
  const std::vector<double>& mu() const { return mu_; }
  double operator[](int i) const { return mu_[i]; }
  double lambda() const { return lambda_; }
  /// mu / (sqrt(N) lambda), a unit vector.
  std::vector<double> direction() const;

 private:
  std::vector<double> mu_;
  double lambda_;
};

/// Largest admissible regularization squeeze strength.
inline constexpr double kMaxRegR = 6.0;

/// Labels (beta, gamma, x) of a tripartite state plus its regularization.
struct CesParams {
  cplx beta{0.0, 0.0};
  cplx gamma{0.0, 0.0};
  double x = 0.0;
  double reg_r = 2.0;

  void validate() const;
};

/// Labels (sigma, kappa, p) of the conjugate (momentum-type) state.
struct ConjugateParams {
  cplx sigma{0.0, 0.0};
  cplx kappa{0.0, 0.0};
  double p = 0.0;
  double reg_r = 2.0;

  void validate() const;
};

void validate_reg_r(double reg_r);

}  // namespace cesim
