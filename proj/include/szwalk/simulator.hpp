#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "szwalk/error.hpp"
#include "szwalk/graph.hpp"
#include "szwalk/operators.hpp"
#include "szwalk/state.hpp"
#include "szwalk/types.hpp"

namespace szwalk {

inline constexpr Real kMeasureNormTol = 1e-8;

/// Per-step node distributions of a walk; index 0 is the initial state.
/// `first`/`second` are filled according to which registers were measured.
struct MeasurementResult {
  Register reg = Register::both;
  std::vector<ProbabilityVector> first;
  std::vector<ProbabilityVector> second;

  const std::vector<ProbabilityVector>& of(Register r) const {
    if (r == Register::first) return first;
    if (r == Register::second) return second;
    throw Error(ErrorCode::InvalidArgument, "pick one register");
  }
};

namespace detail {

// Square moduli of all entries in one streaming pass over Phi: column sums
// are the first register's distribution, row sums the second's. Each column
// is materialized as |.|^2 once and reduced both ways while cache-resident.
template <class Scalar>
void measure_into(const MatrixState<Scalar>& phi, RealVector* p1,
                  RealVector* p2, Real* total) {
  const Index n = phi.rows();
  if (p1) p1->resize(n);
  if (p2) p2->setZero(n);
  Real sum = 0.0;
  if (p2) {
    RealVector buf(n);
    for (Index j = 0; j < n; ++j) {
      buf = phi.col(j).cwiseAbs2();
      const Real col = buf.sum();
      *p2 += buf;
      if (p1) (*p1)(j) = col;
      sum += col;
    }
  } else {
    for (Index j = 0; j < n; ++j) {
      const Real col = phi.col(j).squaredNorm();
      (*p1)(j) = col;
      sum += col;
    }
  }
  *total = sum;
}

inline ProbabilityVector finish_measurement(RealVector v, Real total) {
  if (std::abs(std::sqrt(total) - 1.0) > kMeasureNormTol) {
    throw Error(ErrorCode::NotNormalized,
                "state norm " + std::to_string(std::sqrt(total)) +
                    " deviates from 1 by more than 1e-8");
  }
  if (std::abs(total - 1.0) > kProbabilityRenormTol) v /= total;
  return ProbabilityVector::from_measurement(std::move(v));
}

// Measurement of a state whose storage may be transposed relative to the
// logical state (flipped): storage column sums then belong to the second
// register and row sums to the first.
template <class Scalar>
std::pair<std::optional<ProbabilityVector>, std::optional<ProbabilityVector>>
measure_oriented(const MatrixState<Scalar>& phi, bool flipped, Register reg) {
  const bool want1 = reg == Register::first || reg == Register::both;
  const bool want2 = reg == Register::second || reg == Register::both;
  RealVector col_sums, row_sums;
  Real total = 0.0;
  const bool need_cols = flipped ? want2 : want1;
  const bool need_rows = flipped ? want1 : want2;
  measure_into(phi, need_cols ? &col_sums : nullptr,
               need_rows ? &row_sums : nullptr, &total);
  RealVector& logical1 = flipped ? row_sums : col_sums;
  RealVector& logical2 = flipped ? col_sums : row_sums;
  std::pair<std::optional<ProbabilityVector>, std::optional<ProbabilityVector>>
      out;
  if (want1) out.first = finish_measurement(std::move(logical1), total);
  if (want2) out.second = finish_measurement(std::move(logical2), total);
  return out;
}

}  // namespace detail

/// Distribution over nodes after projecting the first register.
template <class Scalar>
ProbabilityVector measure_first(const MatrixState<Scalar>& phi) {
  return *detail::measure_oriented(phi, false, Register::first).first;
}

/// Distribution over nodes after projecting the second register.
template <class Scalar>
ProbabilityVector measure_second(const MatrixState<Scalar>& phi) {
  return *detail::measure_oriented(phi, false, Register::second).second;
}

/// Both registers from a single pass over |Phi|^2.
template <class Scalar>
std::pair<ProbabilityVector, ProbabilityVector> measure_both(
    const MatrixState<Scalar>& phi) {
  auto [p1, p2] = detail::measure_oriented(phi, false, Register::both);
  return {std::move(*p1), std::move(*p2)};
}

/// Evolution engine. The state is held as storage plus an orientation flag:
/// a swap toggles the flag, the way a transposed view would, instead of
/// moving O(N^2) data. Reflections and oracles dispatch to orientation-aware
/// streaming kernels; the transposed Psi matrices they need are
/// materialized once per engine.
template <class Scalar>
class WalkEngine {
 public:
  explicit WalkEngine(const UnitaryPipeline<Scalar>& u) : u_(&u) {
    bool has_swap = false;
    for (const auto& op : u.ops()) {
      if (std::holds_alternative<SwapOperator>(op)) has_swap = true;
    }
    if (!has_swap) return;
    for (const auto& op : u.ops()) {
      if (const auto* r = std::get_if<ReflectionOperator<Scalar>>(&op)) {
        if (!find_transpose(&r->psi())) {
          transposed_.emplace_back(
              &r->psi(), Matrix<Scalar>(r->psi().matrix().transpose()));
        }
      }
    }
  }

  /// One application of the pipeline (rightmost operator first).
  void apply(MatrixState<Scalar>& p, bool& flipped) const {
    for (auto it = u_->ops().rbegin(); it != u_->ops().rend(); ++it) {
      std::visit([&](const auto& op) { dispatch(op, p, flipped); }, *it);
    }
  }

  /// Materializes the transpose when flagged so that storage matches the
  /// logical state again.
  void align(MatrixState<Scalar>& p, bool& flipped) const {
    if (flipped) {
      apply_swap_in_place(p);
      flipped = false;
    }
  }

  const UnitaryPipeline<Scalar>& pipeline() const noexcept { return *u_; }

 private:
  const Matrix<Scalar>* find_transpose(const PsiMatrix<Scalar>* psi) const {
    for (const auto& entry : transposed_) {
      if (entry.first == psi) return &entry.second;
    }
    return nullptr;
  }

  void dispatch(const ReflectionOperator<Scalar>& r, MatrixState<Scalar>& p,
                bool& flipped) const {
    if (!flipped) {
      apply_reflection_in_place(p, r);
      return;
    }
    const Matrix<Scalar>* psi_t = find_transpose(&r.psi());
    if (!psi_t) {
      throw Error(ErrorCode::InvalidArgument,
                  "engine reached a flipped reflection without a transposed "
                  "Psi; pipeline changed after construction");
    }
    apply_reflection_transposed_in_place(p, *psi_t, r.angle());
  }

  void dispatch(const SwapOperator&, MatrixState<Scalar>& p,
                bool& flipped) const {
    if (p.rows() != p.cols()) {
      throw Error(ErrorCode::ShapeMismatch, "matrix state must be square");
    }
    flipped = !flipped;
  }

  void dispatch(const OracleOperator& q, MatrixState<Scalar>& p,
                bool& flipped) const {
    apply_oracle_oriented_in_place(p, q, flipped);
  }

  const UnitaryPipeline<Scalar>* u_;
  std::vector<std::pair<const PsiMatrix<Scalar>*, Matrix<Scalar>>> transposed_;
};

/// Evolves `phi` in place for `steps` applications of the engine's
/// pipeline, invoking `observe(step, p1, p2)` after measuring each step
/// (step 0 = initial state; unmeasured registers are passed as nullptr).
/// Intermediate states are never stored, so live memory does not grow with
/// `steps`.
template <class Scalar, class Observer>
void evolve_observe(const WalkEngine<Scalar>& engine, MatrixState<Scalar>& phi,
                    int steps, Register reg, Observer&& observe) {
  const UnitaryPipeline<Scalar>& u = engine.pipeline();
  if (steps < 0) {
    throw Error(ErrorCode::InvalidArgument, "step count must be nonnegative");
  }
  if (phi.rows() != phi.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "matrix state must be square");
  }
  if (u.n() != 0 && phi.rows() != u.n()) {
    throw Error(ErrorCode::DimensionMismatch,
                "pipeline built for N=" + std::to_string(u.n()) +
                    " applied to an N=" + std::to_string(phi.rows()) +
                    " state");
  }
  bool flipped = false;
  const auto emit = [&](int step) {
    const auto [p1, p2] = detail::measure_oriented(phi, flipped, reg);
    observe(step, p1 ? &*p1 : nullptr, p2 ? &*p2 : nullptr);
  };
  emit(0);
  for (int k = 1; k <= steps; ++k) {
    engine.apply(phi, flipped);
    emit(k);
  }
  engine.align(phi, flipped);
}

template <class Scalar, class Observer>
void evolve_observe(MatrixState<Scalar>& phi, const UnitaryPipeline<Scalar>& u,
                    int steps, Register reg, Observer&& observe) {
  evolve_observe(WalkEngine<Scalar>(u), phi, steps, reg,
                 std::forward<Observer>(observe));
}

/// Runs the walk for `steps` steps, measuring the chosen register(s) at
/// every step including t = 0. `final_state`, when given, receives the
/// state after the last step (useful for resuming).
template <class Scalar>
MeasurementResult evolve(MatrixState<Scalar> phi0,
                         const UnitaryPipeline<Scalar>& u, int steps,
                         Register reg,
                         MatrixState<Scalar>* final_state = nullptr) {
  MeasurementResult result;
  result.reg = reg;
  const auto count = static_cast<std::size_t>(steps) + 1;
  if (reg != Register::second) result.first.reserve(count);
  if (reg != Register::first) result.second.reserve(count);
  evolve_observe(phi0, u, steps, reg,
                 [&result](int, const ProbabilityVector* p1,
                           const ProbabilityVector* p2) {
                   if (p1) result.first.push_back(*p1);
                   if (p2) result.second.push_back(*p2);
                 });
  if (final_state) *final_state = std::move(phi0);
  return result;
}

/// Independent evolution of every batch member; member k's result equals
/// evolve() on that member alone. Members are processed one at a time so
/// working memory stays at one extra state.
template <class Scalar>
std::vector<MeasurementResult> evolve_batch(const StateBatch<Scalar>& batch,
                                            const UnitaryPipeline<Scalar>& u,
                                            int steps, Register reg) {
  const WalkEngine<Scalar> engine(u);
  std::vector<MeasurementResult> results;
  results.reserve(static_cast<std::size_t>(batch.size()));
  for (Index k = 0; k < batch.size(); ++k) {
    MeasurementResult r;
    r.reg = reg;
    MatrixState<Scalar> phi = batch[k];
    evolve_observe(engine, phi, steps, reg,
                   [&r](int, const ProbabilityVector* p1,
                        const ProbabilityVector* p2) {
                     if (p1) r.first.push_back(*p1);
                     if (p2) r.second.push_back(*p2);
                   });
    results.push_back(std::move(r));
  }
  return results;
}

/// Diagonal mixture over an orthonormal set of pure states.
template <class Scalar>
class MixedStateEnsemble {
 public:
  MixedStateEnsemble(StateBatch<Scalar> members, RealVector weights)
      : members_(std::move(members)), weights_(std::move(weights)) {
    if (weights_.size() != members_.size()) {
      throw Error(ErrorCode::DimensionMismatch,
                  "one weight per ensemble member required");
    }
    for (Index i = 0; i < weights_.size(); ++i) {
      if (!(weights_(i) >= -kNegativeDustTol)) {
        throw Error(ErrorCode::WeightsNotNormalized,
                    "ensemble weight " + std::to_string(i) + " is negative");
      }
      if (weights_(i) < 0.0) weights_(i) = 0.0;
    }
    if (std::abs(weights_.sum() - 1.0) > kProbabilitySumTol) {
      throw Error(ErrorCode::WeightsNotNormalized,
                  "ensemble weights sum to " + std::to_string(weights_.sum()) +
                      ", expected 1 within 1e-10");
    }
    constexpr Real tol = 1e-8;
    for (Index a = 0; a < members_.size(); ++a) {
      for (Index b = a; b < members_.size(); ++b) {
        Complex overlap;
        if constexpr (is_complex_v<Scalar>) {
          overlap = members_[a].conjugate().cwiseProduct(members_[b]).sum();
        } else {
          overlap = members_[a].cwiseProduct(members_[b]).sum();
        }
        const Real expected = (a == b) ? 1.0 : 0.0;
        if (std::abs(overlap - expected) > tol) {
          throw Error(ErrorCode::NotOrthonormal,
                      "ensemble members " + std::to_string(a) + " and " +
                          std::to_string(b) + " are not orthonormal");
        }
      }
    }
  }

  const StateBatch<Scalar>& members() const noexcept { return members_; }
  const RealVector& weights() const noexcept { return weights_; }

 private:
  StateBatch<Scalar> members_;
  RealVector weights_;
};

/// Walk over a diagonal mixed state: the per-step distribution is the
/// weight-averaged distribution of the pure-state evolutions. Members are
/// evolved one at a time; only the running weighted sums are kept.
template <class Scalar>
MeasurementResult mixed_state_probabilities(
    const MixedStateEnsemble<Scalar>& ens, const UnitaryPipeline<Scalar>& u,
    int steps, Register reg) {
  if (steps < 0) {
    throw Error(ErrorCode::InvalidArgument, "step count must be nonnegative");
  }
  const auto count = static_cast<std::size_t>(steps) + 1;
  const Index n = ens.members().n();
  std::vector<RealVector> acc1, acc2;
  if (reg != Register::second) acc1.assign(count, RealVector::Zero(n));
  if (reg != Register::first) acc2.assign(count, RealVector::Zero(n));

  const WalkEngine<Scalar> engine(u);
  for (Index k = 0; k < ens.members().size(); ++k) {
    const Real w = ens.weights()(k);
    MatrixState<Scalar> phi = ens.members()[k];
    evolve_observe(engine, phi, steps, reg,
                   [&](int step, const ProbabilityVector* p1,
                       const ProbabilityVector* p2) {
                     const auto s = static_cast<std::size_t>(step);
                     if (p1) acc1[s] += w * p1->values();
                     if (p2) acc2[s] += w * p2->values();
                   });
  }

  MeasurementResult result;
  result.reg = reg;
  for (auto& v : acc1) {
    result.first.push_back(ProbabilityVector::from_measurement(std::move(v)));
  }
  for (auto& v : acc2) {
    result.second.push_back(ProbabilityVector::from_measurement(std::move(v)));
  }
  return result;
}

}  // namespace szwalk
