#pragma once

#include <Eigen/Dense>

#include <complex>
#include <type_traits>

namespace szwalk {

using Real = double;
using Complex = std::complex<Real>;
using Index = Eigen::Index;

// All dense storage is column-major (Eigen's default): the per-column kernels
// of the walk operators then stride contiguously.
template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using RealMatrix = Matrix<Real>;
using RealVector = Vector<Real>;
using ComplexMatrix = Matrix<Complex>;
using ComplexVector = Vector<Complex>;

/// Bipartite pure state in N x N matrix form. Columns index the first
/// register, rows the second: entry (j, i) is the amplitude of |i>|j>.
template <class Scalar>
using MatrixState = Matrix<Scalar>;

/// Per-node overlap coefficients of a state with the edge-superposition
/// basis; scalar type follows the walk (real or complex).
template <class Scalar>
using CoefficientVector = Vector<Scalar>;

enum class Register { first = 1, second = 2, both = 3 };

template <class T>
inline constexpr bool is_complex_v = false;
template <class T>
inline constexpr bool is_complex_v<std::complex<T>> = true;

}  // namespace szwalk
