#pragma once

#include <vector>

namespace viscobem {

/// Gauss-Legendre rule mapped to [0, 1].
struct GaussRule {
  std::vector<double> points;
  std::vector<double> weights;
  int size() const { return static_cast<int>(points.size()); }
};

/// n-point rule on [0, 1], exact for polynomials of degree 2n-1. Cached per n.
const GaussRule& gauss_legendre(int n);

}  // namespace viscobem
