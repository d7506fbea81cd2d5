#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "szwalk/error.hpp"
#include "szwalk/graph.hpp"
#include "szwalk/operators.hpp"
#include "szwalk/types.hpp"

// Brute-force construction of the explicit N^2 x N^2 operators and flat
// state-vector evolution. This is the ground-truth oracle for small-N tests;
// it trades an O(N^4) footprint for being a direct transcription of the
// operator definitions, so it shares no kernels with the fast path.

namespace szwalk::reference {

/// Dense construction refuses sizes above this unless the caller raises the
/// cap explicitly: a 33^2-dimensional operator already costs ~17 MB.
inline constexpr Index kDefaultDenseCap = 32;

using DenseOperator = ComplexMatrix;

namespace detail {
inline void check_cap(Index n, Index cap) {
  if (n > cap) {
    throw Error(ErrorCode::CapExceeded,
                "dense operator for N=" + std::to_string(n) +
                    " exceeds cap " + std::to_string(cap));
  }
}
}  // namespace detail

/// Flattened edge-superposition vector of node i: component N*i+k carries
/// e^{i theta_ik} sqrt(G_ki).
inline ComplexVector flat_psi_vector(const TransitionMatrix& g, Index i,
                                     const PhaseMatrix* theta = nullptr) {
  const Index n = g.n();
  ComplexVector v = ComplexVector::Zero(n * n);
  for (Index k = 0; k < n; ++k) {
    const Real amp = std::sqrt(g.matrix()(k, i));
    v(n * i + k) = theta ? std::polar(amp, (*theta)(i, k)) : Complex(amp, 0.0);
  }
  const Real norm = v.norm();
  if (norm != 1.0 && norm > 0.0) v /= norm;
  return v;
}

/// (1 - e^{i theta}) sum_i |psi_i><psi_i| - 1 from the explicit flattened
/// vectors.
inline DenseOperator dense_reflection(const TransitionMatrix& g,
                                      const PhaseMatrix* theta = nullptr,
                                      Real apr_angle = std::numbers::pi,
                                      Index cap = kDefaultDenseCap) {
  detail::check_cap(g.n(), cap);
  const Index n = g.n();
  const Index dim = n * n;
  const Complex scale = is_sign_flip_angle(apr_angle)
                            ? Complex(2.0, 0.0)
                            : Complex(1.0, 0.0) - std::polar(1.0, apr_angle);
  DenseOperator r = -DenseOperator::Identity(dim, dim);
  for (Index i = 0; i < n; ++i) {
    const ComplexVector v = flat_psi_vector(g, i, theta);
    r += scale * (v * v.adjoint());
  }
  return r;
}

/// Permutation matrix exchanging the registers: index N*i+j -> N*j+i.
inline DenseOperator dense_swap(Index n, Index cap = kDefaultDenseCap) {
  detail::check_cap(n, cap);
  DenseOperator s = DenseOperator::Zero(n * n, n * n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      s(n * j + i, n * i + j) = Complex(1.0, 0.0);
    }
  }
  return s;
}

/// Diagonal marking operator: e^{i theta} on every basis state whose chosen
/// register holds a marked node.
inline DenseOperator dense_oracle_operator(Index n,
                                           const std::vector<Index>& marked,
                                           Register reg,
                                           Real angle = std::numbers::pi,
                                           Index cap = kDefaultDenseCap) {
  detail::check_cap(n, cap);
  if (reg != Register::first && reg != Register::second) {
    throw Error(ErrorCode::InvalidArgument,
                "oracle must mark exactly one register");
  }
  const Complex factor = is_sign_flip_angle(angle) ? Complex(-1.0, 0.0)
                                                   : std::polar(1.0, angle);
  DenseOperator q = DenseOperator::Identity(n * n, n * n);
  for (Index m : marked) {
    if (m < 0 || m >= n) {
      throw Error(ErrorCode::IndexOutOfRange,
                  "marked node " + std::to_string(m) + " out of range [0," +
                      std::to_string(n) + ")");
    }
    for (Index k = 0; k < n; ++k) {
      const Index idx = reg == Register::first ? n * m + k : n * k + m;
      q(idx, idx) = factor;
    }
  }
  return q;
}

/// U^t v by t successive dense matrix-vector products.
inline ComplexVector dense_evolve(const DenseOperator& u, ComplexVector v,
                                  int steps) {
  if (u.rows() != u.cols() || u.rows() != v.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "operator and state dimensions do not agree");
  }
  if (steps < 0) {
    throw Error(ErrorCode::InvalidArgument, "step count must be nonnegative");
  }
  for (int t = 0; t < steps; ++t) {
    v = u * v;
  }
  return v;
}

/// Node distribution of a flat state: register 1 sums |a_il|^2 over l,
/// register 2 sums |a_ki|^2 over k.
inline RealVector flat_probabilities(const ComplexVector& v, Register reg) {
  const auto side = static_cast<Index>(std::llround(std::sqrt(
      static_cast<Real>(v.size()))));
  if (side * side != v.size()) {
    throw Error(ErrorCode::NotPerfectSquare,
                "flat state length is not a perfect square");
  }
  RealVector p = RealVector::Zero(side);
  for (Index i = 0; i < side; ++i) {
    for (Index l = 0; l < side; ++l) {
      const Index idx = reg == Register::first ? side * i + l : side * l + i;
      p(i) += std::norm(v(idx));
    }
  }
  return p;
}

}  // namespace szwalk::reference
