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
#include <variant>
#include <vector>

#include "cesim/common.hpp"

namespace cesim {

enum class LadderKind { Annihilate, Create };

/// Default upper bound on cutoff^num_modes for dense Fock tensors.
inline constexpr std::size_t kDefaultMaxDim = std::size_t{1} << 24;

/// Dense amplitude tensor over a truncated multimode number basis.
///
/// Amplitudes are flat-indexed with mode 0 slowest: the stride of mode k is
/// cutoff^(num_modes - 1 - k). The squared norm is cached at construction
/// and the probability lost to truncation by the operations that produced
/// the state is carried in `leak()`.
class FockState {
 public:
  FockState(int num_modes, int cutoff, CVector amplitudes, double leak = 0.0);

  int num_modes() const { return num_modes_; }
  int cutoff() const { return cutoff_; }
  Eigen::Index dim() const { return amplitudes_.size(); }
  const CVector& amplitudes() const { return amplitudes_; }
  double norm_sq() const { return norm_sq_; }
  double norm() const;
  double leak() const { return leak_; }

  Eigen::Index stride(int mode) const;
  Eigen::Index index(const std::vector<int>& levels) const;
  std::vector<int> levels(Eigen::Index flat) const;
  cplx amplitude(const std::vector<int>& levels) const;

  /// Probability weight on basis states with any mode at level cutoff-1.
  double boundary_weight() const;
  /// Probability weight on basis states whose total photon number exceeds
  /// `max_total`.
  double weight_above_total(int max_total) const;

  FockState normalized() const;
  FockState with_leak(double leak) const;

  FockState operator+(const FockState& other) const;
  FockState operator-(const FockState& other) const;
  FockState operator*(cplx scale) const;

 private:
  void check_compatible(const FockState& other) const;

  int num_modes_;
  int cutoff_;
  CVector amplitudes_;
  double norm_sq_;
  double leak_;
};

inline FockState operator*(cplx scale, const FockState& s) { return s * scale; }

/// Throws ResourceError if cutoff^num_modes exceeds `max_dim`.
Eigen::Index checked_dimension(int num_modes, int cutoff, std::size_t max_dim = kDefaultMaxDim);

FockState vacuum_fock(int num_modes, int cutoff, std::size_t max_dim = kDefaultMaxDim);
/// Number state |n_0, n_1, ...>.
FockState basis_fock(const std::vector<int>& levels, int cutoff, std::size_t max_dim = kDefaultMaxDim);

/// Applies a_mode or a_mode^dagger. Amplitude pushed past the top level is
/// dropped and its weight is added to the leak of the result.
FockState apply_ladder(const FockState& state, int mode, LadderKind kind);

/// Applies sum_i coeffs[i] * (a_i or a_i^dagger).
FockState apply_ladder_combination(const FockState& state, const std::vector<cplx>& coeffs, LadderKind kind);

/// exp(i phi N)|state>, N the total number operator (a -> e^{i phi} a on kets).
FockState rotate_phase(const FockState& state, double phi);

/// <s1|s2>, conjugate-linear in the first argument.
cplx inner(const FockState& s1, const FockState& s2);

namespace gen {

/// exp[-theta (a_i^dag a_j - a_i a_j^dag)].
struct BeamSplitter {
  int i;
  int j;
  double theta;
};

/// exp(eps a^dag - eps^* a).
struct Displacement {
  int mode;
  cplx eps;
};

/// exp[(r/2)(a^2 - a^dag^2)].
struct Squeeze {
  int mode;
  double r;
};

/// exp[(r/2)(R^2 - R^dag^2)] with R = sum_i w_i a_i / |w|.
struct CollectiveSqueeze {
  std::vector<double> weights;
  double r;
};

}  // namespace gen

using Generator = std::variant<gen::BeamSplitter, gen::Displacement, gen::Squeeze, gen::CollectiveSqueeze>;

struct ExpOptions {
  double tol = 1e-12;
  int max_terms_per_step = 200;
};

/// exp(G)|state> by iterated Taylor steps on the truncated generator.
///
/// The added leak is the norm change for gates that mix truncated levels,
/// or the weight of the output on basis states the truncated generator
/// cannot represent faithfully (boundary levels of the touched modes; for
/// beam splitters, total photon number above cutoff-1).
FockState apply_generator_exponential(const FockState& state, const Generator& generator,
                                      const ExpOptions& options = {});

}  // namespace cesim
