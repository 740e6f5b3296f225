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

#include "cesim/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cesim/detail/ladder.hpp"

namespace cesim {

namespace detail {

BoxShape::BoxShape(int modes, int cut) : num_modes(modes), cutoff(cut), strides(modes), dim(1) {
  for (int k = modes - 1; k >= 0; --k) {
    strides[k] = dim;
    dim *= cut;
  }
}

void add_ladder(const BoxShape& shape, const CVector& in, CVector& out, cplx coeff, int mode, LadderKind kind) {
  const Eigen::Index s = shape.strides[mode];
  const Eigen::Index block = s * shape.cutoff;
  const int c = shape.cutoff;
  for (Eigen::Index outer = 0; outer < shape.dim; outer += block) {
    for (int n = 1; n < c; ++n) {
      const double amp = std::sqrt(static_cast<double>(n));
      const Eigen::Index hi = outer + n * s;
      const Eigen::Index lo = hi - s;
      if (kind == LadderKind::Annihilate) {
        for (Eigen::Index q = 0; q < s; ++q) out[lo + q] += coeff * amp * in[hi + q];
      } else {
        for (Eigen::Index q = 0; q < s; ++q) out[hi + q] += coeff * amp * in[lo + q];
      }
    }
  }
}

void apply_terms(const BoxShape& shape, const std::vector<OpTerm>& terms, const CVector& in, CVector& out) {
  out.setZero(shape.dim);
  CVector tmp(shape.dim);
  for (const auto& t : terms) {
    if (t.mode2 < 0) {
      add_ladder(shape, in, out, t.coeff, t.mode1, t.kind1);
    } else {
      tmp.setZero();
      add_ladder(shape, in, tmp, 1.0, t.mode2, t.kind2);
      add_ladder(shape, tmp, out, t.coeff, t.mode1, t.kind1);
    }
  }
}

double terms_norm_bound(const BoxShape& shape, const std::vector<OpTerm>& terms) {
  const double a = std::sqrt(static_cast<double>(shape.cutoff - 1));
  double bound = 0.0;
  for (const auto& t : terms) bound += std::abs(t.coeff) * (t.mode2 < 0 ? a : a * a);
  return bound;
}

}  // namespace detail

FockState::FockState(int num_modes, int cutoff, CVector amplitudes, double leak)
    : num_modes_(num_modes), cutoff_(cutoff), amplitudes_(std::move(amplitudes)), leak_(leak) {
  if (num_modes < 1) throw std::invalid_argument("FockState: num_modes must be >= 1");
  if (cutoff < 2) throw std::invalid_argument("FockState: cutoff must be >= 2");
  Eigen::Index expected = 1;
  for (int k = 0; k < num_modes; ++k) expected *= cutoff;
  if (amplitudes_.size() != expected) {
    throw std::invalid_argument("FockState: amplitude count " + std::to_string(amplitudes_.size()) +
                                " does not match cutoff^num_modes = " + std::to_string(expected));
  }
  if (!amplitudes_.allFinite()) throw DomainError("FockState: non-finite amplitude");
  if (!(leak >= 0.0) || !std::isfinite(leak)) throw std::invalid_argument("FockState: leak must be finite and >= 0");
  norm_sq_ = amplitudes_.squaredNorm();
}

double FockState::norm() const { return std::sqrt(norm_sq_); }

Eigen::Index FockState::stride(int mode) const {
  if (mode < 0 || mode >= num_modes_) throw std::out_of_range("FockState: mode index out of range");
  Eigen::Index s = 1;
  for (int k = mode + 1; k < num_modes_; ++k) s *= cutoff_;
  return s;
}

Eigen::Index FockState::index(const std::vector<int>& levels) const {
  if (static_cast<int>(levels.size()) != num_modes_) throw std::invalid_argument("FockState: wrong number of levels");
  Eigen::Index idx = 0;
  for (int n : levels) {
    if (n < 0 || n >= cutoff_) throw std::out_of_range("FockState: level out of range");
    idx = idx * cutoff_ + n;
  }
  return idx;
}

std::vector<int> FockState::levels(Eigen::Index flat) const {
  if (flat < 0 || flat >= dim()) throw std::out_of_range("FockState: flat index out of range");
  std::vector<int> out(num_modes_);
  for (int k = num_modes_ - 1; k >= 0; --k) {
    out[k] = static_cast<int>(flat % cutoff_);
    flat /= cutoff_;
  }
  return out;
}

cplx FockState::amplitude(const std::vector<int>& levels) const { return amplitudes_[index(levels)]; }

double FockState::boundary_weight() const {
  double w = 0.0;
  for (Eigen::Index i = 0; i < dim(); ++i) {
    Eigen::Index f = i;
    for (int k = 0; k < num_modes_; ++k) {
      if (f % cutoff_ == cutoff_ - 1) {
        w += std::norm(amplitudes_[i]);
        break;
      }
      f /= cutoff_;
    }
  }
  return w;
}

double FockState::weight_above_total(int max_total) const {
  double w = 0.0;
  for (Eigen::Index i = 0; i < dim(); ++i) {
    Eigen::Index f = i;
    int total = 0;
    for (int k = 0; k < num_modes_; ++k) {
      total += static_cast<int>(f % cutoff_);
      f /= cutoff_;
    }
    if (total > max_total) w += std::norm(amplitudes_[i]);
  }
  return w;
}

FockState FockState::normalized() const {
  if (norm_sq_ == 0.0) throw DomainError("FockState: cannot normalize the zero vector");
  return FockState(num_modes_, cutoff_, amplitudes_ / norm(), leak_);
}

FockState FockState::with_leak(double leak) const { return FockState(num_modes_, cutoff_, amplitudes_, leak); }

void FockState::check_compatible(const FockState& other) const {
  if (num_modes_ != other.num_modes_ || cutoff_ != other.cutoff_) {
    throw std::invalid_argument("FockState: shape mismatch (" + std::to_string(num_modes_) + "x" +
                                std::to_string(cutoff_) + " vs " + std::to_string(other.num_modes_) + "x" +
                                std::to_string(other.cutoff_) + ")");
  }
}

FockState FockState::operator+(const FockState& other) const {
  check_compatible(other);
  return FockState(num_modes_, cutoff_, amplitudes_ + other.amplitudes_, leak_ + other.leak_);
}

FockState FockState::operator-(const FockState& other) const {
  check_compatible(other);
  return FockState(num_modes_, cutoff_, amplitudes_ - other.amplitudes_, leak_ + other.leak_);
}

FockState FockState::operator*(cplx scale) const { return FockState(num_modes_, cutoff_, amplitudes_ * scale, leak_); }

Eigen::Index checked_dimension(int num_modes, int cutoff, std::size_t max_dim) {
  if (num_modes < 1) throw std::invalid_argument("num_modes must be >= 1");
  if (cutoff < 2) throw std::invalid_argument("cutoff must be >= 2");
  double d = std::pow(static_cast<double>(cutoff), num_modes);
  if (d > static_cast<double>(max_dim)) {
    throw ResourceError("Fock dimension " + std::to_string(cutoff) + "^" + std::to_string(num_modes) + " = " +
                        std::to_string(static_cast<long double>(d)) + " exceeds budget " + std::to_string(max_dim));
  }
  return static_cast<Eigen::Index>(d);
}

FockState vacuum_fock(int num_modes, int cutoff, std::size_t max_dim) {
  const Eigen::Index dim = checked_dimension(num_modes, cutoff, max_dim);
  CVector amps = CVector::Zero(dim);
  amps[0] = 1.0;
  return FockState(num_modes, cutoff, std::move(amps));
}

FockState basis_fock(const std::vector<int>& levels, int cutoff, std::size_t max_dim) {
  const int n = static_cast<int>(levels.size());
  FockState vac = vacuum_fock(n, cutoff, max_dim);
  CVector amps = CVector::Zero(vac.dim());
  amps[vac.index(levels)] = 1.0;
  return FockState(n, cutoff, std::move(amps));
}

FockState apply_ladder(const FockState& state, int mode, LadderKind kind) {
  if (mode < 0 || mode >= state.num_modes()) throw std::out_of_range("apply_ladder: mode index out of range");
  const detail::BoxShape shape(state.num_modes(), state.cutoff());
  CVector out = CVector::Zero(shape.dim);
  detail::add_ladder(shape, state.amplitudes(), out, 1.0, mode, kind);
  double dropped = 0.0;
  if (kind == LadderKind::Create) {
    // a^dag |c-1> = sqrt(c)|c>, which falls outside the box.
    const Eigen::Index s = shape.strides[mode];
    const Eigen::Index block = s * shape.cutoff;
    const Eigen::Index top = (shape.cutoff - 1) * s;
    for (Eigen::Index outer = 0; outer < shape.dim; outer += block) {
      for (Eigen::Index q = 0; q < s; ++q) dropped += shape.cutoff * std::norm(state.amplitudes()[outer + top + q]);
    }
  }
  return FockState(state.num_modes(), state.cutoff(), std::move(out), state.leak() + dropped);
}

FockState apply_ladder_combination(const FockState& state, const std::vector<cplx>& coeffs, LadderKind kind) {
  if (static_cast<int>(coeffs.size()) != state.num_modes()) {
    throw std::invalid_argument("apply_ladder_combination: coefficient count must equal num_modes");
  }
  FockState acc = FockState(state.num_modes(), state.cutoff(), CVector::Zero(state.dim()), state.leak());
  for (int k = 0; k < state.num_modes(); ++k) {
    if (coeffs[k] == 0.0) continue;
    FockState term = apply_ladder(state, k, kind);
    acc = FockState(state.num_modes(), state.cutoff(), acc.amplitudes() + coeffs[k] * term.amplitudes(),
                    acc.leak() + std::norm(coeffs[k]) * (term.leak() - state.leak()));
  }
  return acc;
}

FockState rotate_phase(const FockState& state, double phi) {
  CVector out = state.amplitudes();
  for (Eigen::Index i = 0; i < state.dim(); ++i) {
    int total = 0;
    for (int n : state.levels(i)) total += n;
    out[i] *= std::polar(1.0, phi * total);
  }
  return FockState(state.num_modes(), state.cutoff(), std::move(out), state.leak());
}

cplx inner(const FockState& s1, const FockState& s2) {
  if (s1.num_modes() != s2.num_modes() || s1.cutoff() != s2.cutoff()) {
    throw std::invalid_argument("inner: shape mismatch");
  }
  return s1.amplitudes().dot(s2.amplitudes());
}

namespace {

void check_mode(const FockState& s, int mode) {
  if (mode < 0 || mode >= s.num_modes()) throw std::out_of_range("generator mode index out of range");
}

struct TermsBuilder {
  const FockState& state;

  std::vector<detail::OpTerm> operator()(const gen::BeamSplitter& g) const {
    check_mode(state, g.i);
    check_mode(state, g.j);
    if (g.i == g.j) throw std::invalid_argument("beam splitter needs two distinct modes");
    return {{-g.theta, g.i, LadderKind::Create, g.j, LadderKind::Annihilate},
            {g.theta, g.i, LadderKind::Annihilate, g.j, LadderKind::Create}};
  }
  std::vector<detail::OpTerm> operator()(const gen::Displacement& g) const {
    check_mode(state, g.mode);
    return {{g.eps, g.mode, LadderKind::Create}, {-std::conj(g.eps), g.mode, LadderKind::Annihilate}};
  }
  std::vector<detail::OpTerm> operator()(const gen::Squeeze& g) const {
    check_mode(state, g.mode);
    return {{g.r / 2.0, g.mode, LadderKind::Annihilate, g.mode, LadderKind::Annihilate},
            {-g.r / 2.0, g.mode, LadderKind::Create, g.mode, LadderKind::Create}};
  }
  std::vector<detail::OpTerm> operator()(const gen::CollectiveSqueeze& g) const {
    if (static_cast<int>(g.weights.size()) != state.num_modes()) {
      throw std::invalid_argument("collective squeeze: weight count must equal num_modes");
    }
    const double norm = std::sqrt(std::inner_product(g.weights.begin(), g.weights.end(), g.weights.begin(), 0.0));
    if (norm == 0.0) throw std::invalid_argument("collective squeeze: zero weight vector");
    std::vector<detail::OpTerm> terms;
    for (int i = 0; i < state.num_modes(); ++i) {
      for (int j = 0; j < state.num_modes(); ++j) {
        const double c = g.r / 2.0 * g.weights[i] * g.weights[j] / (norm * norm);
        if (c == 0.0) continue;
        terms.push_back({c, i, LadderKind::Annihilate, j, LadderKind::Annihilate});
        terms.push_back({-c, i, LadderKind::Create, j, LadderKind::Create});
      }
    }
    return terms;
  }
};

bool is_trivial(const Generator& g) {
  return std::visit(
      [](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, gen::BeamSplitter>) return x.theta == 0.0;
        if constexpr (std::is_same_v<T, gen::Displacement>) return x.eps == 0.0;
        if constexpr (std::is_same_v<T, gen::Squeeze>) return x.r == 0.0;
        if constexpr (std::is_same_v<T, gen::CollectiveSqueeze>) return x.r == 0.0;
        return false;
      },
      g);
}

// Weight of `s` on levels the truncated generator cannot represent.
double unrepresented_weight(const FockState& s, const Generator& g) {
  if (std::holds_alternative<gen::BeamSplitter>(g)) return s.weight_above_total(s.cutoff() - 1);
  std::vector<int> modes;
  if (const auto* d = std::get_if<gen::Displacement>(&g)) modes = {d->mode};
  if (const auto* q = std::get_if<gen::Squeeze>(&g)) modes = {q->mode};
  if (std::holds_alternative<gen::CollectiveSqueeze>(g)) return s.boundary_weight();
  // Squeezing couples n to n+2, so both top levels of the mode count.
  const int top_levels = std::holds_alternative<gen::Squeeze>(g) ? 2 : 1;
  double w = 0.0;
  const Eigen::Index stride = s.stride(modes[0]);
  for (Eigen::Index i = 0; i < s.dim(); ++i) {
    const int n = static_cast<int>((i / stride) % s.cutoff());
    if (n >= s.cutoff() - top_levels) w += std::norm(s.amplitudes()[i]);
  }
  return w;
}

}  // namespace

FockState apply_generator_exponential(const FockState& state, const Generator& generator, const ExpOptions& options) {
  const std::vector<detail::OpTerm> terms = std::visit(TermsBuilder{state}, generator);
  if (is_trivial(generator)) return state;
  const detail::BoxShape shape(state.num_modes(), state.cutoff());
  auto apply = [&](const CVector& in, CVector& out) { detail::apply_terms(shape, terms, in, out); };
  CVector out = detail::taylor_expmv(state.amplitudes(), apply, detail::terms_norm_bound(shape, terms), options.tol,
                                     options.max_terms_per_step);
  FockState result(state.num_modes(), state.cutoff(), std::move(out), state.leak());
  const double norm_change = std::abs(result.norm_sq() - state.norm_sq());
  const double added = std::max(norm_change, unrepresented_weight(result, generator));
  return result.with_leak(state.leak() + added);
}

}  // namespace cesim
