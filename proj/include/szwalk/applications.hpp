#pragma once

#include <cmath>
#include <numbers>
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

struct PageRankConfig {
  int steps = 50;                        // time steps of the double walk W
  Real theta1 = std::numbers::pi;        // phase of the later reflection
  Real theta2 = std::numbers::pi;        // phase of the first-applied reflection
  Real damping = 0.85;                   // used when building a Google matrix
  bool include_t0 = false;               // average over 0..T instead of 1..T
  bool keep_trace = false;               // retain the full per-step trace
};

struct PageRankResult {
  ProbabilityVector ranking;
  std::vector<ProbabilityVector> per_step;  // empty unless keep_trace
};

/// Google matrix from raw link data: column-normalize the adjacency matrix,
/// patch dangling nodes (zero columns) to the uniform column, then mix with
/// the uniform matrix using the damping factor.
inline TransitionMatrix build_google_matrix(const RealMatrix& adjacency,
                                            Real damping = 0.85) {
  if (adjacency.rows() != adjacency.cols() || adjacency.size() == 0) {
    throw Error(ErrorCode::NonSquare, "adjacency matrix must be square");
  }
  if (!(damping > 0.0) || damping > 1.0) {
    throw Error(ErrorCode::InvalidArgument, "damping must be in (0, 1]");
  }
  const Index n = adjacency.rows();
  RealMatrix h(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      if (!(adjacency(i, j) >= 0.0)) {
        throw Error(ErrorCode::NegativeEntry,
                    "adjacency entry (" + std::to_string(i) + "," +
                        std::to_string(j) + ") is negative or NaN");
      }
    }
    const Real sum = adjacency.col(j).sum();
    if (sum == 0.0) {
      h.col(j).setConstant(1.0 / static_cast<Real>(n));
    } else {
      h.col(j) = adjacency.col(j) / sum;
    }
  }
  const Real teleport = (1.0 - damping) / static_cast<Real>(n);
  RealMatrix google = damping * h;
  google.array() += teleport;
  return TransitionMatrix::validated(std::move(google),
                                     StochasticPolicy::strict);
}

namespace detail {

inline void check_pagerank_config(const PageRankConfig& cfg) {
  if (cfg.steps < 1) {
    throw Error(ErrorCode::InvalidArgument, "PageRank needs at least 1 step");
  }
  constexpr Real two_pi = 2.0 * std::numbers::pi;
  for (Real angle : {cfg.theta1, cfg.theta2}) {
    if (!(angle > -two_pi) || angle > two_pi) {
      throw Error(ErrorCode::InvalidArgument,
                  "phase angles must lie in (-2*pi, 2*pi]");
    }
  }
}

inline bool real_degenerate_angle(Real angle) {
  return angle == 0.0 || is_sign_flip_angle(angle);
}

template <class Scalar>
PageRankResult pagerank_run(const TransitionMatrix& g,
                            const PageRankConfig& cfg,
                            std::shared_ptr<const PsiMatrix<Scalar>> psi) {
  // W = S R(theta1) S R(theta2), R(theta2) applied first; measured on the
  // second register after every W.
  using Pipeline = UnitaryPipeline<Scalar>;
  typename std::vector<typename Pipeline::Op> ops;
  ops.emplace_back(SwapOperator{});
  ops.emplace_back(ReflectionOperator<Scalar>(psi, cfg.theta1));
  ops.emplace_back(SwapOperator{});
  ops.emplace_back(ReflectionOperator<Scalar>(psi, cfg.theta2));
  const Pipeline w{std::move(ops)};

  MatrixState<Scalar> phi = initial_superposition(*psi);
  MeasurementResult trace =
      evolve(std::move(phi), w, cfg.steps, Register::second);

  const std::size_t from = cfg.include_t0 ? 0 : 1;
  RealVector mean = RealVector::Zero(g.n());
  for (std::size_t k = from; k < trace.second.size(); ++k) {
    mean += trace.second[k].values();
  }
  mean /= static_cast<Real>(trace.second.size() - from);

  PageRankResult result{ProbabilityVector::from_measurement(std::move(mean)),
                        {}};
  if (cfg.keep_trace) result.per_step = std::move(trace.second);
  return result;
}

}  // namespace detail

/// Quantum PageRank: time-averaged second-register distribution of the
/// double walk started from the equal edge superposition. By default the
/// average runs over steps 1..T; include_t0 widens it to 0..T.
inline PageRankResult quantum_pagerank(const TransitionMatrix& g,
                                       const PageRankConfig& cfg = {}) {
  detail::check_pagerank_config(cfg);
  if (detail::real_degenerate_angle(cfg.theta1) &&
      detail::real_degenerate_angle(cfg.theta2)) {
    auto psi = std::make_shared<const PsiMatrix<Real>>(build_psi_matrix(g));
    return detail::pagerank_run<Real>(g, cfg, std::move(psi));
  }
  auto psi = std::make_shared<const PsiMatrix<Complex>>(
      build_psi_matrix(g, PhaseMatrix::Zero(g.n(), g.n())));
  return detail::pagerank_run<Complex>(g, cfg, std::move(psi));
}

/// Classical baseline: power iteration from the uniform distribution until
/// the successive 1-norm change drops below `tol`.
inline ProbabilityVector classical_pagerank(const TransitionMatrix& g,
                                            Real tol = 1e-12,
                                            int max_iterations = 100000) {
  if (!(tol > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
  }
  RealVector p =
      RealVector::Constant(g.n(), 1.0 / static_cast<Real>(g.n()));
  for (int it = 0; it < max_iterations; ++it) {
    RealVector next = g.matrix() * p;
    const Real delta = (next - p).template lpNorm<1>();
    p = std::move(next);
    if (delta < tol) {
      return ProbabilityVector::from_measurement(std::move(p));
    }
  }
  throw Error(ErrorCode::NoConvergence,
              "power iteration did not converge within " +
                  std::to_string(max_iterations) + " iterations");
}

}  // namespace szwalk
