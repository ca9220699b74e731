#pragma once

#include "viscobem/model.hpp"
#include "viscobem/types.hpp"

namespace viscobem {

/// Stress-influence block: rows (xx, yy, xy), column k = load direction.
using StressBlock = Eigen::Matrix<double, 3, 2>;

/// Plane-strain Kelvin displacement kernel. U(i,j) is the displacement in
/// direction i at x due to a unit point force in direction j at xi.
Mat2 kelvin_U(const Vec2& x, const Vec2& xi, const Material& mat);

/// Traction kernel on a surface with unit normal n at x, r = x - xi.
/// T(i,j) is the traction component i at x due to a unit force j at xi.
Mat2 kelvin_T(const Vec2& x, const Vec2& xi, const Vec2& n, const Material& mat);

/// Stress at xi produced by a unit traction in direction k applied at x,
/// i.e. the kernel D multiplying t_k in the stress representation.
StressBlock kelvin_D(const Vec2& x, const Vec2& xi, const Material& mat);

/// Stress at xi produced by a unit displacement jump in direction k on a
/// surface with normal n at x, i.e. the kernel S multiplying u_k.
StressBlock kelvin_S(const Vec2& x, const Vec2& xi, const Vec2& n, const Material& mat);

}  // namespace viscobem
