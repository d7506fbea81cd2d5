#pragma once

#include <string>
#include <utility>
#include <vector>

#include "szwalk/error.hpp"
#include "szwalk/types.hpp"

namespace szwalk {

inline constexpr Real kStochasticTol = 1e-8;
inline constexpr Real kProbabilitySumTol = 1e-10;
inline constexpr Real kProbabilityRenormTol = 1e-12;
inline constexpr Real kNegativeDustTol = 1e-14;

enum class StochasticPolicy { strict, renormalize };

/// Column-stochastic transition matrix of a weighted directed graph.
/// Entry (j, i) is the probability of jumping from node i to node j.
/// Immutable after construction; construct through validated().
class TransitionMatrix {
 public:
  /// Validates a raw square matrix. strict: column sums must already be
  /// within kStochasticTol of 1. renormalize: each column is divided by its
  /// sum first. Zero columns (dangling nodes) are rejected under both
  /// policies; see build_google_matrix for PageRank-style patching.
  static TransitionMatrix validated(RealMatrix raw, StochasticPolicy policy) {
    if (raw.rows() != raw.cols()) {
      throw Error(ErrorCode::NonSquare,
                  "transition matrix must be square, got " +
                      std::to_string(raw.rows()) + "x" +
                      std::to_string(raw.cols()));
    }
    if (raw.size() == 0) {
      throw Error(ErrorCode::NonSquare, "transition matrix must be nonempty");
    }
    for (Index j = 0; j < raw.cols(); ++j) {
      for (Index i = 0; i < raw.rows(); ++i) {
        if (!(raw(i, j) >= 0.0)) {  // also catches NaN
          throw Error(ErrorCode::NegativeEntry,
                      "entry (" + std::to_string(i) + "," + std::to_string(j) +
                          ") = " + std::to_string(raw(i, j)) +
                          " is negative or not a number");
        }
      }
      const Real sum = raw.col(j).sum();
      if (sum == 0.0) {
        throw Error(ErrorCode::ZeroColumn,
                    "column " + std::to_string(j) +
                        " sums to 0 (dangling node)");
      }
      if (policy == StochasticPolicy::renormalize) {
        raw.col(j) /= sum;
      } else if (std::abs(sum - 1.0) > kStochasticTol) {
        throw Error(ErrorCode::NotStochastic,
                    "column " + std::to_string(j) + " sums to " +
                        std::to_string(sum) + ", expected 1 within 1e-8");
      }
    }
    return TransitionMatrix(std::move(raw));
  }

  Index n() const noexcept { return entries_.rows(); }
  const RealMatrix& matrix() const noexcept { return entries_; }

 private:
  explicit TransitionMatrix(RealMatrix entries)
      : entries_(std::move(entries)) {}

  RealMatrix entries_;
};

/// Discrete probability distribution over the N nodes.
class ProbabilityVector {
 public:
  /// Validates caller-supplied data: entries nonnegative, sum 1 within
  /// kProbabilitySumTol.
  static ProbabilityVector validated(RealVector v) {
    return checked(std::move(v), "probability vector");
  }

  /// Wraps a vector produced by measurement or matrix-vector arithmetic.
  /// Negative rounding dust (>= -1e-14) is clamped to 0; the vector is
  /// renormalized when the sum drifts by more than 1e-12, and drift beyond
  /// 1e-10 is an error rather than silently repaired.
  static ProbabilityVector from_measurement(RealVector v) {
    return checked(std::move(v), "measured distribution");
  }

  Index size() const noexcept { return values_.size(); }
  const RealVector& values() const noexcept { return values_; }
  Real operator[](Index i) const { return values_(i); }

 private:
  static ProbabilityVector checked(RealVector v, const std::string& what) {
    if (v.size() == 0) {
      throw Error(ErrorCode::DimensionMismatch, what + " is empty");
    }
    for (Index i = 0; i < v.size(); ++i) {
      if (!(v(i) >= -kNegativeDustTol)) {
        throw Error(ErrorCode::NegativeEntry,
                    what + " entry " + std::to_string(i) + " = " +
                        std::to_string(v(i)) + " is negative");
      }
      if (v(i) < 0.0) v(i) = 0.0;
    }
    const Real sum = v.sum();
    if (std::abs(sum - 1.0) > kProbabilitySumTol) {
      throw Error(ErrorCode::NotNormalized,
                  what + " sums to " + std::to_string(sum) +
                      ", expected 1 within 1e-10");
    }
    if (std::abs(sum - 1.0) > kProbabilityRenormTol) {
      v /= sum;
    }
    return ProbabilityVector(std::move(v));
  }

  explicit ProbabilityVector(RealVector values) : values_(std::move(values)) {}

  RealVector values_;
};

/// One classical step p -> G p.
inline ProbabilityVector classical_step(const TransitionMatrix& g,
                                        const ProbabilityVector& p) {
  if (g.n() != p.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "transition matrix is " + std::to_string(g.n()) +
                    "-dimensional but distribution has " +
                    std::to_string(p.size()) + " entries");
  }
  return ProbabilityVector::from_measurement(g.matrix() * p.values());
}

/// Distributions G^k p0 for k = 0..steps (steps+1 entries, p0 included).
inline std::vector<ProbabilityVector> classical_walk(const TransitionMatrix& g,
                                                     const ProbabilityVector& p0,
                                                     int steps) {
  if (steps < 0) {
    throw Error(ErrorCode::InvalidArgument, "step count must be nonnegative");
  }
  if (g.n() != p0.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "transition matrix is " + std::to_string(g.n()) +
                    "-dimensional but distribution has " +
                    std::to_string(p0.size()) + " entries");
  }
  std::vector<ProbabilityVector> trace;
  trace.reserve(static_cast<std::size_t>(steps) + 1);
  trace.push_back(p0);
  for (int k = 0; k < steps; ++k) {
    trace.push_back(classical_step(g, trace.back()));
  }
  return trace;
}

}  // namespace szwalk
