#pragma once

#include <complex>

#include <Eigen/Dense>

namespace nvie {

using Complex = std::complex<double>;

template <typename T>
using Point3 = Eigen::Matrix<T, 3, 1>;

using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;

/// Complex 3x3 tensor value of a kernel at a point pair.
template <typename T>
using DyadicValue = Eigen::Matrix<std::complex<T>, 3, 3>;

using Dyadic = DyadicValue<double>;
using RealDyadic = Eigen::Matrix3d;

inline constexpr double kPi = 3.14159265358979323846264338327950288;

}  // namespace nvie
