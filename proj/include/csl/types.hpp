// types.hpp
// Shared scalar/vector aliases for the crystal stability laboratory.
#pragma once

#include <complex>
#include <array>
#include <vector>
#include <cstddef>
#include <Eigen/Dense>

namespace csl {

using cd = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using Vec3i = Eigen::Vector3i;
using Mat3 = Eigen::Matrix3d;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

} // namespace csl
