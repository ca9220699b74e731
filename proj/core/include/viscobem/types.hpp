#pragma once

#include <Eigen/Dense>

namespace viscobem {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// In-plane stress components (xx, yy, xy).
using Stress = Eigen::Vector3d;

inline Vec2 rotate90(const Vec2& v) { return {-v.y(), v.x()}; }

}  // namespace viscobem
