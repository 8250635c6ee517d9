#include "parabolic/time_grid.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

using namespace parabolic;

TEST_CASE("uniform grids") {
  const TimeGrid g = build_uniform_grid(1.0, 8);
  CHECK(g.n_slabs() == 8);
  for (std::size_t m = 1; m <= 8; ++m)
    CHECK(g.step(m) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(g.max_step() == doctest::Approx(0.125));
  CHECK(g.min_step() == doctest::Approx(0.125));

  const TimeGrid g2 = build_uniform_grid(2.0, 4);
  const std::vector<double> expect{0.0, 0.5, 1.0, 1.5, 2.0};
  CHECK(g2.nodes() == expect);

  const TimeGrid g1 = build_uniform_grid(1.0, 1);
  CHECK(g1.n_slabs() == 1);
  CHECK(g1.node(0) == 0.0);
  CHECK(g1.node(1) == 1.0);

  CHECK_THROWS_AS(build_uniform_grid(1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(build_uniform_grid(0.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(build_uniform_grid(-1.0, 4), std::invalid_argument);
}

TEST_CASE("explicit node lists") {
  CHECK_THROWS_AS(TimeGrid({0.0, 0.5, 0.5, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(TimeGrid({0.1, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(TimeGrid({0.0}), std::invalid_argument);
  const TimeGrid g({0.0, 0.1, 0.3, 0.6, 1.0});
  const auto k = g.steps();
  CHECK(std::accumulate(k.begin(), k.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(g.max_step() == doctest::Approx(0.4));
  CHECK(g.min_step() == doctest::Approx(0.1));
  CHECK_THROWS_AS(g.step(0), std::out_of_range);
  CHECK_THROWS_AS(g.step(5), std::out_of_range);
  // left-open, right-closed slabs
  CHECK(g.slab_of(0.1) == 1);
  CHECK(g.slab_of(0.10001) == 2);
  CHECK(g.slab_of(1.0) == 4);
}

TEST_CASE("grid validation") {
  const auto r2 = validate_grid(build_uniform_grid(1.0, 2), 0.0, 0.9);
  CHECK_FALSE(r2.quarter_ok);
  CHECK(r2.smallness_ok);

  const auto r8 = validate_grid(build_uniform_grid(1.0, 8), 2.0, 0.5);
  CHECK(r8.smallness_ok);
  CHECK(r8.quarter_ok);

  const auto r4 = validate_grid(build_uniform_grid(1.0, 4), 8.0, 0.5);
  CHECK_FALSE(r4.smallness_ok);
  CHECK(r4.quarter_ok);

  const auto graded = validate_grid(TimeGrid({0.0, 0.1, 0.3, 0.6, 1.0}), 0.0, 0.9);
  CHECK(graded.c_observed == doctest::Approx(2.0));
  CHECK(graded.min_over_max_step == doctest::Approx(0.25));
  CHECK_FALSE(graded.quarter_ok);

  CHECK_THROWS_AS(validate_grid(build_uniform_grid(1.0, 4), 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(validate_grid(build_uniform_grid(1.0, 4), 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(validate_grid(build_uniform_grid(1.0, 4), -1.0, 0.5), std::invalid_argument);

  // pure function of its inputs
  const TimeGrid g = build_uniform_grid(3.0, 17);
  const auto a = validate_grid(g, 1.5, 0.7), b = validate_grid(g, 1.5, 0.7);
  CHECK(a.smallness_ok == b.smallness_ok);
  CHECK(a.c_observed == b.c_observed);
}

TEST_CASE("Gauss-Legendre rules") {
  for (int n = 1; n <= 6; ++n) {
    CAPTURE(n);
    const GaussRule r = gauss_legendre(n);
    REQUIRE(r.points.size() == static_cast<std::size_t>(n));
    // exact for monomials up to degree 2n - 1
    for (int p = 0; p <= 2 * n - 1; ++p) {
      double q = 0.0;
      for (int i = 0; i < n; ++i)
        q += r.weights[i] * std::pow(r.points[i], p);
      const double exact = p % 2 ? 0.0 : 2.0 / (p + 1);
      CHECK(std::abs(q - exact) < 1e-14);
    }
  }
  CHECK_THROWS_AS(gauss_legendre(0), std::invalid_argument);
}

TEST_CASE("temporal mean") {
  const TimeGrid g = build_uniform_grid(1.0, 1);
  CHECK(temporal_mean(g, [](double) { return 3.5; }, 1) == doctest::Approx(3.5).epsilon(1e-14));
  CHECK(temporal_mean(g, [](double t) { return t; }, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(temporal_mean(g, [](double t) { return t * t; }, 1, 2) == doctest::Approx(1.0 / 3).epsilon(1e-15));
  // degree 5 with the default 3-point rule on a shifted slab
  const TimeGrid g4 = build_uniform_grid(2.0, 4);
  const double a = 1.0, b = 1.5;
  const double exact = (std::pow(b, 6) - std::pow(a, 6)) / 6.0 / (b - a);
  CHECK(temporal_mean(g4, [](double t) { return std::pow(t, 5); }, 3) == doctest::Approx(exact).epsilon(1e-13));
  CHECK_THROWS_AS(temporal_mean(g4, [](double t) { return t; }, 5), std::out_of_range);
  CHECK_THROWS_AS(temporal_mean(g4, [](double t) { return t; }, 0), std::out_of_range);
}

TEST_CASE("nodal value") {
  const TimeGrid g = build_uniform_grid(1.0, 1);
  CHECK(nodal_value(g, [](double t) { return t; }, 1) == 1.0);
  CHECK(nodal_value(g, [](double) { return -2.0; }, 1) == -2.0);
  const TimeGrid gp = build_uniform_grid(std::numbers::pi, 2);
  CHECK(nodal_value(gp, [](double t) { return std::sin(t); }, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(nodal_value(gp, [](double t) { return t; }, 3), std::out_of_range);
}

TEST_CASE("projections reproduce dG(0) data") {
  const TimeGrid g({0.0, 0.2, 0.5, 0.7, 1.0});
  const std::vector<double> values{1.0, -3.0, 0.25, 7.0};
  const auto piecewise = [&](double t) { return values[g.slab_of(t) - 1]; };
  for (std::size_t m = 1; m <= g.n_slabs(); ++m) {
    CHECK(temporal_mean(g, piecewise, m) == doctest::Approx(values[m - 1]).epsilon(1e-14));
    CHECK(nodal_value(g, piecewise, m) == values[m - 1]);
  }
}
