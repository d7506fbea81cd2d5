#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "szwalk/error.hpp"
#include "szwalk/graph.hpp"
#include "szwalk/operators.hpp"
#include "szwalk/simulator.hpp"
#include "szwalk/state.hpp"
#include "szwalk/types.hpp"

namespace szwalk {

enum class WalkClass { one = 1, two = 2 };  // class I measures register 1

/// Default chunk: up to 64 states vectorized at once, i.e. a memory budget
/// of 64 N x N matrices on top of the O(N^2) baseline.
inline constexpr Index kDefaultBatchStates = 64;

struct SemiclassicalConfig {
  int quantum_time = 0;    // unitary applications between measurements
  int classical_time = 0;  // repetitions of the evolve-and-measure scheme
  WalkClass walk_class = WalkClass::two;
  Index batch_size = kDefaultBatchStates;
};

/// Column-stochastic matrix of a semiclassical walk: column i is the node
/// distribution after evolving the edge superposition of node i for
/// quantum_time steps and measuring the class register.
class SemiclassicalMatrix {
 public:
  SemiclassicalMatrix(RealMatrix entries, int quantum_time,
                      WalkClass walk_class)
      : entries_(std::move(entries)),
        quantum_time_(quantum_time),
        walk_class_(walk_class) {
    for (Index j = 0; j < entries_.cols(); ++j) {
      const Real sum = entries_.col(j).sum();
      if (std::abs(sum - 1.0) > kProbabilitySumTol) {
        throw Error(ErrorCode::BrokenStochasticity,
                    "semiclassical column " + std::to_string(j) + " sums to " +
                        std::to_string(sum) +
                        "; the underlying unitary is broken");
      }
    }
  }

  Index n() const noexcept { return entries_.rows(); }
  const RealMatrix& matrix() const noexcept { return entries_; }
  int quantum_time() const noexcept { return quantum_time_; }
  WalkClass walk_class() const noexcept { return walk_class_; }

  /// The matrix re-validated as an ordinary transition matrix, so the
  /// classical machinery can drive the semiclassical walk.
  TransitionMatrix as_transition_matrix() const {
    return TransitionMatrix::validated(entries_, StochasticPolicy::strict);
  }

 private:
  RealMatrix entries_;
  int quantum_time_;
  WalkClass walk_class_;
};

/// Builds the semiclassical matrix for `cfg.quantum_time` steps of `u`.
/// The reset states are the plain edge superpositions of `g`; `u` is
/// expected to be built from the same matrix (not checkable here, and
/// deliberately not validated: mismatched inputs are exposed as-is).
/// Initial states are materialized in chunks of `cfg.batch_size`, bounding
/// peak memory by batch_size states plus one working state.
template <class Scalar>
SemiclassicalMatrix build_semiclassical_matrix(const TransitionMatrix& g,
                                               const UnitaryPipeline<Scalar>& u,
                                               const SemiclassicalConfig& cfg) {
  if (cfg.batch_size <= 0) {
    throw Error(ErrorCode::BatchSizeZero, "batch size must be at least 1");
  }
  if (cfg.quantum_time < 0) {
    throw Error(ErrorCode::InvalidArgument, "quantum time must be >= 0");
  }
  const Index n = g.n();
  const PsiMatrix<Real> psi = build_psi_matrix(g);
  const Register reg = cfg.walk_class == WalkClass::one ? Register::first
                                                        : Register::second;
  const WalkEngine<Scalar> engine(u);
  RealMatrix out(n, n);
  const Index chunk = std::min(cfg.batch_size, n);
  std::vector<MatrixState<Scalar>> states;
  states.reserve(static_cast<std::size_t>(chunk));
  for (Index start = 0; start < n; start += chunk) {
    const Index stop = std::min(start + chunk, n);
    states.clear();
    for (Index i = start; i < stop; ++i) {
      if constexpr (is_complex_v<Scalar>) {
        states.push_back(psi_state(psi, i).cast<Complex>());
      } else {
        states.push_back(psi_state(psi, i));
      }
    }
    for (Index i = start; i < stop; ++i) {
      MatrixState<Scalar>& phi = states[static_cast<std::size_t>(i - start)];
      bool flipped = false;
      for (int t = 0; t < cfg.quantum_time; ++t) {
        engine.apply(phi, flipped);
      }
      const auto measured = detail::measure_oriented(phi, flipped, reg);
      out.col(i) = (reg == Register::first ? *measured.first
                                           : *measured.second)
                       .values();
    }
  }
  return SemiclassicalMatrix(std::move(out), cfg.quantum_time, cfg.walk_class);
}

/// The semiclassical walk itself is a classical walk driven by the
/// semiclassical matrix.
inline std::vector<ProbabilityVector> semiclassical_walk(
    const SemiclassicalMatrix& sc, const ProbabilityVector& p0,
    int classical_time) {
  return classical_walk(sc.as_transition_matrix(), p0, classical_time);
}

}  // namespace szwalk
