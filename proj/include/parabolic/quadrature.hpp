#pragma once

#include <array>
#include <vector>

namespace parabolic {

/// Symmetric rule on a triangle in barycentric coordinates. Weights are
/// normalized to sum to one; multiply by the cell area when integrating.
struct Quadrature {
  int degree = 0;
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
};

/// Rules of degree 1 (centroid), 2 (edge midpoints) and 4 (six-point
/// Dunavant). Throws std::invalid_argument for other degrees.
const Quadrature &triangle_rule(int degree);

/// The default rule for loads and nonlinear terms.
inline const Quadrature &default_rule() { return triangle_rule(4); }

} // namespace parabolic
