#pragma once

#include <cmath>
#include <algorithm>
#include <memory>
#include <numbers>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "szwalk/error.hpp"
#include "szwalk/graph.hpp"
#include "szwalk/types.hpp"

namespace szwalk {

/// Matrix of per-edge phase angles (radians). Entry (j, i) dresses the
/// amplitude of edge i -> j, i.e. Psi picks up its transpose element-wise.
using PhaseMatrix = RealMatrix;

/// True when the angle is an exact sign flip and the operators can stay in
/// exact -1 / +2 arithmetic instead of evaluating e^{i pi} in floating point.
inline bool is_sign_flip_angle(Real angle) noexcept {
  return angle == std::numbers::pi || angle == -std::numbers::pi;
}

/// Element-wise square roots of the transition matrix: column i holds the
/// amplitudes of the edge superposition leaving node i. Columns are scaled
/// to exactly unit 2-norm (a no-op whenever the column of G sums to exactly
/// 1), which keeps the reflection unitary even for inputs that only meet the
/// 1e-8 stochasticity tolerance.
template <class Scalar>
class PsiMatrix {
 public:
  Index n() const noexcept { return entries_.rows(); }
  const Matrix<Scalar>& matrix() const noexcept { return entries_; }

  friend PsiMatrix<Real> build_psi_matrix(const TransitionMatrix&);
  friend PsiMatrix<Complex> build_psi_matrix(const TransitionMatrix&,
                                             const PhaseMatrix&);

 private:
  explicit PsiMatrix(Matrix<Scalar> entries) : entries_(std::move(entries)) {}

  static void normalize_columns(Matrix<Scalar>& m) {
    for (Index j = 0; j < m.cols(); ++j) {
      const Real norm = m.col(j).norm();
      if (norm != 1.0 && norm > 0.0) m.col(j) /= Scalar(norm);
    }
  }

  Matrix<Scalar> entries_;
};

inline PsiMatrix<Real> build_psi_matrix(const TransitionMatrix& g) {
  RealMatrix m = g.matrix().cwiseSqrt();
  PsiMatrix<Real>::normalize_columns(m);
  return PsiMatrix<Real>(std::move(m));
}

inline PsiMatrix<Complex> build_psi_matrix(const TransitionMatrix& g,
                                           const PhaseMatrix& theta) {
  if (theta.rows() != g.n() || theta.cols() != g.n()) {
    throw Error(ErrorCode::ShapeMismatch,
                "phase matrix shape does not match the transition matrix");
  }
  if (!theta.allFinite()) {
    throw Error(ErrorCode::InvalidArgument,
                "phase matrix has non-finite entries");
  }
  // Phases dress the normalized real amplitudes, so an all-zero phase
  // matrix reproduces the real construction bit for bit.
  RealMatrix base = g.matrix().cwiseSqrt();
  PsiMatrix<Real>::normalize_columns(base);
  ComplexMatrix m(g.n(), g.n());
  for (Index j = 0; j < g.n(); ++j) {
    for (Index i = 0; i < g.n(); ++i) {
      m(i, j) = std::polar(1.0, theta(j, i)) * base(i, j);
    }
  }
  return PsiMatrix<Complex>(std::move(m));
}

/// Reflection (1 - e^{i theta}) Pi - 1 around the span of the edge
/// superpositions; theta = pi recovers the plain reflection 2 Pi - 1.
template <class Scalar>
class ReflectionOperator {
 public:
  explicit ReflectionOperator(std::shared_ptr<const PsiMatrix<Scalar>> psi,
                              Real angle = std::numbers::pi)
      : psi_(std::move(psi)), angle_(angle) {
    if (!psi_) {
      throw Error(ErrorCode::InvalidArgument, "reflection needs a Psi matrix");
    }
    if constexpr (!is_complex_v<Scalar>) {
      if (!is_sign_flip_angle(angle_) && angle_ != 0.0) {
        throw Error(ErrorCode::InvalidArgument,
                    "real-valued reflection supports only angles 0 and pi");
      }
    }
  }

  explicit ReflectionOperator(PsiMatrix<Scalar> psi,
                              Real angle = std::numbers::pi)
      : ReflectionOperator(
            std::make_shared<const PsiMatrix<Scalar>>(std::move(psi)), angle) {}

  const PsiMatrix<Scalar>& psi() const noexcept { return *psi_; }
  Real angle() const noexcept { return angle_; }
  Index n() const noexcept { return psi_->n(); }

 private:
  std::shared_ptr<const PsiMatrix<Scalar>> psi_;
  Real angle_;
};

/// Register swap; acts as plain transposition of the matrix state.
struct SwapOperator {};

/// Marks a node set on one register: scales the corresponding columns
/// (register 1) or rows (register 2) by e^{i theta}, exactly -1 for
/// theta = pi.
class OracleOperator {
 public:
  OracleOperator(std::vector<Index> marked, Register reg,
                 Real angle = std::numbers::pi)
      : marked_(std::move(marked)), register_(reg), angle_(angle) {
    if (reg != Register::first && reg != Register::second) {
      throw Error(ErrorCode::InvalidArgument,
                  "oracle must mark exactly one register");
    }
    std::sort(marked_.begin(), marked_.end());
    marked_.erase(std::unique(marked_.begin(), marked_.end()), marked_.end());
    if (!marked_.empty() && marked_.front() < 0) {
      throw Error(ErrorCode::IndexOutOfRange, "marked node index is negative");
    }
  }

  const std::vector<Index>& marked() const noexcept { return marked_; }
  Register target_register() const noexcept { return register_; }
  Real angle() const noexcept { return angle_; }

 private:
  std::vector<Index> marked_;
  Register register_;
  Real angle_;
};

/// Overlaps C_i = <psi_i|phi>: column i of Psi against column i of Phi.
/// dot() conjugates its left argument, which is what the inner product
/// requires once Psi carries phases; it is a no-op in the real case.
template <class Scalar>
CoefficientVector<Scalar> projection_coefficients(
    const MatrixState<Scalar>& phi, const PsiMatrix<Scalar>& psi) {
  if (phi.rows() != psi.n() || phi.cols() != psi.n()) {
    throw Error(ErrorCode::ShapeMismatch,
                "state and Psi matrix shapes do not match");
  }
  CoefficientVector<Scalar> c(psi.n());
  for (Index j = 0; j < psi.n(); ++j) {
    c(j) = psi.matrix().col(j).dot(phi.col(j));
  }
  return c;
}

// The reflection is column-local: C_j depends only on column j, and only
// column j is rescaled by it. Fusing overlap and update per column keeps
// each column cache-resident and makes the reflection a single streaming
// pass over Phi and Psi with no scratch matrix.
template <class Scalar>
void apply_reflection_in_place(MatrixState<Scalar>& phi,
                               const ReflectionOperator<Scalar>& r) {
  if (phi.rows() != r.n() || phi.cols() != r.n()) {
    throw Error(ErrorCode::ShapeMismatch,
                "state and Psi matrix shapes do not match");
  }
  const Matrix<Scalar>& psi = r.psi().matrix();
  const Index n = psi.rows();
  if (is_sign_flip_angle(r.angle())) {
    // 2 Phi_parallel - Phi, kept in exact real-factor arithmetic.
    for (Index j = 0; j < n; ++j) {
      const Scalar c = psi.col(j).dot(phi.col(j));
      phi.col(j) = 2.0 * c * psi.col(j) - phi.col(j);
    }
  } else if constexpr (is_complex_v<Scalar>) {
    const Complex scale = Complex(1.0, 0.0) - std::polar(1.0, r.angle());
    for (Index j = 0; j < n; ++j) {
      const Scalar c = psi.col(j).dot(phi.col(j));
      phi.col(j) = scale * c * psi.col(j) - phi.col(j);
    }
  } else {
    // Constructor admits only 0 and pi for real scalars; pi was handled above.
    phi = -phi;
  }
}

/// Reflection of a state stored transposed (logical Phi = P^T, as after an
/// odd number of swaps handled as index relabelings). psi_t is the
/// transposed Psi matrix, so every access streams column-wise:
/// C_i = sum_k conj(Psi_ki) P_ik, then P_ik <- s C_i Psi^T_ik - P_ik.
template <class Scalar>
void apply_reflection_transposed_in_place(MatrixState<Scalar>& p,
                                          const Matrix<Scalar>& psi_t,
                                          Real angle) {
  if (p.rows() != psi_t.rows() || p.cols() != psi_t.cols()) {
    throw Error(ErrorCode::ShapeMismatch,
                "state and Psi matrix shapes do not match");
  }
  const Index n = p.rows();
  if (!is_sign_flip_angle(angle) && angle != 0.0 && !is_complex_v<Scalar>) {
    throw Error(ErrorCode::InvalidArgument,
                "real-valued reflection supports only angles 0 and pi");
  }
  if (angle == 0.0) {
    p = -p;
    return;
  }
  CoefficientVector<Scalar> c = CoefficientVector<Scalar>::Zero(n);
  for (Index k = 0; k < n; ++k) {
    if constexpr (is_complex_v<Scalar>) {
      c += psi_t.col(k).conjugate().cwiseProduct(p.col(k));
    } else {
      c += psi_t.col(k).cwiseProduct(p.col(k));
    }
  }
  if (is_sign_flip_angle(angle)) {
    for (Index k = 0; k < n; ++k) {
      p.col(k) = 2.0 * c.cwiseProduct(psi_t.col(k)) - p.col(k);
    }
  } else if constexpr (is_complex_v<Scalar>) {
    const Complex scale = Complex(1.0, 0.0) - std::polar(1.0, angle);
    for (Index k = 0; k < n; ++k) {
      p.col(k) = scale * c.cwiseProduct(psi_t.col(k)) - p.col(k);
    }
  }
}

/// In-place transposition in 64x64 tiles; the naive element-swap walk
/// thrashes the TLB once a row stride exceeds a page.
template <class Scalar>
void apply_swap_in_place(MatrixState<Scalar>& phi) {
  if (phi.rows() != phi.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "matrix state must be square");
  }
  constexpr Index kTile = 64;
  const Index n = phi.rows();
  for (Index jb = 0; jb < n; jb += kTile) {
    const Index jend = std::min(jb + kTile, n);
    for (Index j = jb; j < jend; ++j) {
      for (Index i = jb; i < j; ++i) {
        std::swap(phi(i, j), phi(j, i));
      }
    }
    for (Index ib = jend; ib < n; ib += kTile) {
      const Index iend = std::min(ib + kTile, n);
      for (Index j = jb; j < jend; ++j) {
        for (Index i = ib; i < iend; ++i) {
          std::swap(phi(i, j), phi(j, i));
        }
      }
    }
  }
}

/// Oracle on a possibly transposed-stored state: with `flipped` set, the
/// roles of rows and columns exchange.
template <class Scalar>
void apply_oracle_oriented_in_place(MatrixState<Scalar>& phi,
                                    const OracleOperator& q, bool flipped) {
  const Index n = phi.rows();
  if (!q.marked().empty() && q.marked().back() >= n) {
    throw Error(ErrorCode::IndexOutOfRange,
                "marked node " + std::to_string(q.marked().back()) +
                    " out of range [0," + std::to_string(n) + ")");
  }
  const bool columns = (q.target_register() == Register::first) != flipped;
  if (is_sign_flip_angle(q.angle())) {
    for (Index m : q.marked()) {
      if (columns) {
        phi.col(m) = -phi.col(m);
      } else {
        phi.row(m) = -phi.row(m);
      }
    }
  } else if (q.angle() == 0.0) {
    // e^{i 0} = 1: nothing to do.
  } else if constexpr (is_complex_v<Scalar>) {
    const Complex factor = std::polar(1.0, q.angle());
    for (Index m : q.marked()) {
      if (columns) {
        phi.col(m) *= factor;
      } else {
        phi.row(m) *= factor;
      }
    }
  } else {
    throw Error(ErrorCode::InvalidArgument,
                "real-valued oracle supports only angles 0 and pi");
  }
}

template <class Scalar>
void apply_oracle_in_place(MatrixState<Scalar>& phi, const OracleOperator& q) {
  apply_oracle_oriented_in_place(phi, q, false);
}

/// Ordered operator product defining one walk step. The list reads in
/// operator notation: {S, R} means U = S R, with R applied first.
template <class Scalar>
class UnitaryPipeline {
 public:
  using Op = std::variant<ReflectionOperator<Scalar>, SwapOperator,
                          OracleOperator>;

  explicit UnitaryPipeline(std::vector<Op> ops) : ops_(std::move(ops)) {
    if (ops_.empty()) {
      throw Error(ErrorCode::EmptyPipeline, "pipeline has no operators");
    }
    for (const auto& op : ops_) {
      if (const auto* r = std::get_if<ReflectionOperator<Scalar>>(&op)) {
        if (n_ == 0) {
          n_ = r->n();
        } else if (r->n() != n_) {
          throw Error(ErrorCode::DimensionMismatch,
                      "pipeline mixes reflections of different sizes");
        }
      }
    }
  }

  const std::vector<Op>& ops() const noexcept { return ops_; }
  /// Node count fixed by the pipeline's reflections; 0 when the pipeline
  /// contains none and adapts to any state size.
  Index n() const noexcept { return n_; }

 private:
  std::vector<Op> ops_;
  Index n_ = 0;
};

template <class Scalar>
void apply_pipeline_in_place(MatrixState<Scalar>& phi,
                             const UnitaryPipeline<Scalar>& u) {
  if (phi.rows() != phi.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "matrix state must be square");
  }
  if (u.n() != 0 && phi.rows() != u.n()) {
    throw Error(ErrorCode::DimensionMismatch,
                "pipeline built for N=" + std::to_string(u.n()) +
                    " applied to an N=" + std::to_string(phi.rows()) +
                    " state");
  }
  for (auto it = u.ops().rbegin(); it != u.ops().rend(); ++it) {
    std::visit(
        [&phi](const auto& op) {
          using Op = std::decay_t<decltype(op)>;
          if constexpr (std::is_same_v<Op, ReflectionOperator<Scalar>>) {
            apply_reflection_in_place(phi, op);
          } else if constexpr (std::is_same_v<Op, SwapOperator>) {
            apply_swap_in_place(phi);
          } else {
            apply_oracle_in_place(phi, op);
          }
        },
        *it);
  }
}

template <class Scalar>
MatrixState<Scalar> apply_reflection(MatrixState<Scalar> phi,
                                     const ReflectionOperator<Scalar>& r) {
  apply_reflection_in_place(phi, r);
  return phi;
}

template <class Scalar>
MatrixState<Scalar> apply_swap(MatrixState<Scalar> phi) {
  apply_swap_in_place(phi);
  return phi;
}

template <class Scalar>
MatrixState<Scalar> apply_oracle(MatrixState<Scalar> phi,
                                 const OracleOperator& q) {
  apply_oracle_in_place(phi, q);
  return phi;
}

template <class Scalar>
MatrixState<Scalar> apply_pipeline(MatrixState<Scalar> phi,
                                   const UnitaryPipeline<Scalar>& u) {
  apply_pipeline_in_place(phi, u);
  return phi;
}

}  // namespace szwalk
