#include "parabolic/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace parabolic;

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

// int_{T_ref} x^a y^b over the reference triangle, divided by its area 1/2
double reference_mean(int a, int b) { return 2.0 * factorial(a) * factorial(b) / factorial(a + b + 2); }

} // namespace

TEST_CASE("rules integrate monomials up to their degree exactly") {
  for (int degree : {1, 2, 4}) {
    CAPTURE(degree);
    const Quadrature &q = triangle_rule(degree);
    CHECK(q.degree == degree);
    double wsum = 0.0;
    for (double w : q.weights) {
      CHECK(w > 0.0);
      wsum += w;
    }
    CHECK(std::abs(wsum - 1.0) < 1e-15);
    for (const auto &p : q.points) {
      CHECK(std::abs(p[0] + p[1] + p[2] - 1.0) < 1e-15);
      for (double l : p)
        CHECK(l >= 0.0);
    }
    for (int a = 0; a <= degree; ++a)
      for (int b = 0; a + b <= degree; ++b) {
        double s = 0.0;
        for (std::size_t i = 0; i < q.points.size(); ++i)
          s += q.weights[i] * std::pow(q.points[i][1], a) * std::pow(q.points[i][2], b);
        CAPTURE(a);
        CAPTURE(b);
        CHECK(std::abs(s - reference_mean(a, b)) < 1e-14);
      }
  }
}

TEST_CASE("degree-4 rule is not exact for degree 5") {
  const Quadrature &q = triangle_rule(4);
  double s = 0.0;
  for (std::size_t i = 0; i < q.points.size(); ++i)
    s += q.weights[i] * std::pow(q.points[i][1], 5);
  CHECK(std::abs(s - reference_mean(5, 0)) > 1e-8);
}

TEST_CASE("unsupported degrees are rejected") {
  CHECK_THROWS_AS(triangle_rule(3), std::invalid_argument);
  CHECK_THROWS_AS(triangle_rule(0), std::invalid_argument);
  CHECK(default_rule().degree == 4);
}
