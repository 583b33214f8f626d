#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>

namespace dirtk {

// Central scalar type. All dense containers below are templated on the
// scalar so the math core can be instantiated at other precisions; the
// pipeline uses Real throughout.
using Real = double;
using Complex = std::complex<Real>;
using Index = Eigen::Index;

template <class S>
using MatrixT = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using VectorT = Eigen::Matrix<S, Eigen::Dynamic, 1>;
template <class S>
using ArrayT = Eigen::Array<S, Eigen::Dynamic, 1>;

using Matrix = MatrixT<Real>;
using Vector = VectorT<Real>;
using Array = ArrayT<Real>;
using ComplexVector = VectorT<Complex>;
using Vec3 = Eigen::Matrix<Real, 3, 1>;

inline constexpr Real kPi = Real(3.14159265358979323846L);

template <class S>
constexpr S deg2rad(S deg) {
  return deg * S(kPi) / S(180);
}

template <class S>
constexpr S rad2deg(S rad) {
  return rad * S(180) / S(kPi);
}

// Reference pressure for SPL, 20 uPa.
inline constexpr Real kRefPressure = Real(2e-5);

}  // namespace dirtk
