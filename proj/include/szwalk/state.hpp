#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "szwalk/error.hpp"
#include "szwalk/operators.hpp"
#include "szwalk/types.hpp"

namespace szwalk {

inline constexpr Real kZeroNormTol = 1e-14;
inline constexpr Real kStateNormTol = 1e-10;

namespace detail {
inline Index square_side(Index len) {
  const auto side = static_cast<Index>(std::llround(std::sqrt(static_cast<Real>(len))));
  if (side <= 0 || side * side != len) {
    throw Error(ErrorCode::NotPerfectSquare,
                "state vector length " + std::to_string(len) +
                    " is not a perfect square");
  }
  return side;
}
}  // namespace detail

/// Reshapes a flat bipartite state vector (component N*i+j is the amplitude
/// of |i>|j>) into matrix form. Pure relabeling: column i of the result is
/// block i of the vector, so the mapping is bit-exact. Inputs whose norm
/// deviates from 1 by more than 1e-10 are renormalized unless `normalize`
/// is off; `renormalized`, when given, reports whether that happened.
template <class Scalar>
MatrixState<Scalar> vector_to_matrix(const Vector<Scalar>& v,
                                     bool normalize = true,
                                     bool* renormalized = nullptr) {
  const Index n = detail::square_side(v.size());
  if (renormalized) *renormalized = false;
  MatrixState<Scalar> phi =
      Eigen::Map<const Matrix<Scalar>>(v.data(), n, n);
  if (normalize) {
    const Real norm = phi.norm();
    if (norm < kZeroNormTol) {
      throw Error(ErrorCode::ZeroNorm, "state vector has (near-)zero norm");
    }
    if (std::abs(norm - 1.0) > kStateNormTol) {
      phi /= Scalar(norm);
      if (renormalized) *renormalized = true;
    }
  }
  return phi;
}

/// Exact inverse of vector_to_matrix.
template <class Scalar>
Vector<Scalar> matrix_to_vector(const MatrixState<Scalar>& phi) {
  return Eigen::Map<const Vector<Scalar>>(phi.data(), phi.size());
}

/// The edge-superposition state of node i: column i of Psi, every other
/// column zero.
template <class Scalar>
MatrixState<Scalar> psi_state(const PsiMatrix<Scalar>& psi, Index i) {
  if (i < 0 || i >= psi.n()) {
    throw Error(ErrorCode::IndexOutOfRange,
                "node index " + std::to_string(i) + " out of range [0," +
                    std::to_string(psi.n()) + ")");
  }
  MatrixState<Scalar> phi = MatrixState<Scalar>::Zero(psi.n(), psi.n());
  phi.col(i) = psi.matrix().col(i);
  return phi;
}

/// Equal superposition of all edge-superposition states: Psi / sqrt(N).
template <class Scalar>
MatrixState<Scalar> initial_superposition(const PsiMatrix<Scalar>& psi) {
  return psi.matrix() / std::sqrt(static_cast<Real>(psi.n()));
}

/// An ordered batch of equally sized matrix states (a logical 3-D stack).
template <class Scalar>
class StateBatch {
 public:
  explicit StateBatch(std::vector<MatrixState<Scalar>> states)
      : states_(std::move(states)) {
    if (states_.empty()) {
      throw Error(ErrorCode::HeterogeneousBatch, "batch must be nonempty");
    }
    const Index n = states_.front().rows();
    for (const auto& s : states_) {
      if (s.rows() != n || s.cols() != n) {
        throw Error(ErrorCode::HeterogeneousBatch,
                    "batch members must all be square matrices of one size");
      }
    }
  }

  Index size() const noexcept { return static_cast<Index>(states_.size()); }
  Index n() const noexcept { return states_.front().rows(); }
  const MatrixState<Scalar>& operator[](Index k) const {
    return states_[static_cast<std::size_t>(k)];
  }
  const std::vector<MatrixState<Scalar>>& states() const noexcept {
    return states_;
  }

 private:
  std::vector<MatrixState<Scalar>> states_;
};

}  // namespace szwalk
