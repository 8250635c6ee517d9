#include "parabolic/quadrature.hpp"

#include <stdexcept>

namespace parabolic {

namespace {

Quadrature make_degree1() {
  return {1, {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}}, {1.0}};
}

Quadrature make_degree2() {
  Quadrature q;
  q.degree = 2;
  q.points = {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}};
  q.weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  return q;
}

Quadrature make_degree4() {
  constexpr double a1 = 0.445948490915964886318329253883;
  constexpr double w1 = 0.223381589678011465944827343086;
  constexpr double a2 = 0.091576213509770743459571463402;
  constexpr double w2 = 0.109951743655321867388505990247;
  constexpr double b1 = 1.0 - 2.0 * a1;
  constexpr double b2 = 1.0 - 2.0 * a2;
  Quadrature q;
  q.degree = 4;
  q.points = {{a1, a1, b1}, {a1, b1, a1}, {b1, a1, a1},
              {a2, a2, b2}, {a2, b2, a2}, {b2, a2, a2}};
  q.weights = {w1, w1, w1, w2, w2, w2};
  return q;
}

} // namespace

const Quadrature &triangle_rule(int degree) {
  static const Quadrature d1 = make_degree1();
  static const Quadrature d2 = make_degree2();
  static const Quadrature d4 = make_degree4();
  switch (degree) {
  case 1:
    return d1;
  case 2:
    return d2;
  case 4:
    return d4;
  default:
    throw std::invalid_argument("triangle_rule: supported degrees are 1, 2 and 4");
  }
}

} // namespace parabolic
