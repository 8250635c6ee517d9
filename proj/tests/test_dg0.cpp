#include "parabolic/dg0.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace parabolic;

namespace {

constexpr double pi = std::numbers::pi;

const SpatialFunction sinsin = [](const Point &x) { return std::sin(pi * x.x) * std::sin(pi * x.y); };

std::shared_ptr<const FeSpace> space_at(int level) {
  return std::make_shared<const FeSpace>(build_unit_square_mesh(level));
}

std::shared_ptr<const TimeGrid> grid_of(double T, std::size_t M) {
  return std::make_shared<const TimeGrid>(build_uniform_grid(T, M));
}

std::vector<FeFunction> random_trajectory(std::size_t n, std::size_t M, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<FeFunction> out;
  for (std::size_t m = 0; m < M; ++m) {
    FeFunction v = FeFunction::zero(n);
    for (std::size_t i = 0; i < n; ++i)
      v.coefficients[static_cast<Eigen::Index>(i)] = u(gen);
    out.push_back(v);
  }
  return out;
}

// root of a increasing scalar function by bisection
double bisect(const std::function<double(double)> &g, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

} // namespace

TEST_CASE("linear one-DOF step") {
  const FeSpace space(build_unit_square_mesh(0));
  const TimeGrid grid = build_uniform_grid(0.125, 1);
  const FeFunction one(Vector::Ones(1));
  const StepResult r = step_solve(space, grid, 1, one, builtin("zero"), Vector::Zero(1));
  CHECK(r.value.coefficients[0] == doctest::Approx(0.2).epsilon(1e-10));
  CHECK(r.report.converged);

  const StepResult z = step_solve(space, grid, 1, FeFunction::zero(1), builtin("zero"), Vector::Zero(1));
  CHECK(z.value.coefficients[0] == 0.0);
  CHECK(z.report.iterations <= 1);
}

TEST_CASE("nonlinear one-DOF step against bisection") {
  const double oracle = bisect([](double u) { return 0.625 * u + u * u * u / 160.0 - 0.125; }, 0.0, 1.0);
  CHECK(oracle == doctest::Approx(0.19988).epsilon(1e-4));

  const FeSpace space(build_unit_square_mesh(0));
  const TimeGrid grid = build_uniform_grid(0.125, 1);
  SolverOptions opts;
  opts.newton_tol = 1e-13;
  opts.cg.tol = 1e-14;
  const StepResult r = step_solve(space, grid, 1, FeFunction(Vector::Ones(1)), builtin("cubic"), Vector::Zero(1), opts);
  CHECK(std::abs(r.value.coefficients[0] - oracle) < 1e-12);
  CHECK(r.report.converged);
  CHECK(r.report.residual <= opts.newton_tol * (1.0 + 0.125));
  CHECK(r.report.min_jacobian_weight >= 1.0);
}

TEST_CASE("Jacobian weight guard") {
  // k * alpha = 2.5 leaves the weight at 1 - 2.5 near u = 0
  const FeSpace space(build_unit_square_mesh(1));
  const TimeGrid grid = build_uniform_grid(0.125, 1);
  const Nonlinearity ac = builtin("allen_cahn", {{"alpha", 20.0}});
  const FeFunction small(Vector::Constant(static_cast<Eigen::Index>(space.n_dofs()), 0.01));
  CHECK_THROWS_AS(step_solve(space, grid, 1, small, ac, Vector::Ones(static_cast<Eigen::Index>(space.n_dofs()))),
                  std::logic_error);
  // the march refuses the grid up front
  CHECK_THROWS_AS(march(space_at(1), grid_of(1.0, 4), ac, nullptr, sinsin), std::invalid_argument);
}

TEST_CASE("Newton failure names the slab") {
  SolverOptions opts;
  opts.max_newton_iters = 1;
  opts.newton_tol = 1e-14;
  const Nonlinearity q = builtin("quintic");
  try {
    (void)march(space_at(1), grid_of(1.0, 4), q, nullptr, [](const Point &x) { return 50.0 * sinsin(x); }, opts);
    FAIL("expected NewtonError");
  } catch (const NewtonError &e) {
    CHECK(e.slab() == 1);
    REQUIRE_FALSE(e.report().steps.empty());
    CHECK_FALSE(e.report().steps.back().converged);
  }
}

TEST_CASE("trivial marches") {
  for (const char *name : {"zero", "cubic", "allen_cahn"}) {
    const Nonlinearity d = std::string(name) == "allen_cahn" ? builtin(name, {{"alpha", 0.5}}) : builtin(name);
    const MarchResult r = march(space_at(2), grid_of(1.0, 8), d, nullptr, [](const Point &) { return 0.0; });
    REQUIRE(r.solution.n_slabs() == 8);
    for (const FeFunction &s : r.solution.slabs)
      CHECK(s.coefficients.cwiseAbs().maxCoeff() == 0.0);
    CHECK(r.report.converged());
  }
}

TEST_CASE("heat equation eigenfunction decay") {
  auto space = space_at(3);
  auto grid = grid_of(0.1, 64);
  const MarchResult r = march(space, grid, builtin("zero"), nullptr, sinsin);
  const double decay = std::exp(-2 * pi * pi * 0.1);
  double e2 = 0.0;
  for_each_quadrature_point(space->mesh(), default_rule(), [&](std::size_t c, const Point &x, const auto &l, double w) {
    const double e = decay * sinsin(x) - evaluate_in_cell(space->mesh(), r.solution.slab(64), c, l);
    e2 += w * e * e;
  });
  CHECK(std::sqrt(e2) < 2e-2 * 0.5);
  CHECK(r.report.max_iterations() <= 1);

  // one step shrinks P_h u0 by about (1 + k lambda_h)^{-1}, lambda_h its Rayleigh quotient
  const FeFunction &u0 = r.solution.initial_projection;
  const double lambda_h = (space->stiffness() * u0.coefficients).dot(u0.coefficients) /
                          (space->mass() * u0.coefficients).dot(u0.coefficients);
  const double factor = 1.0 / (1.0 + grid->step(1) * lambda_h);
  CHECK(r.solution.slab(1).coefficients.norm() / u0.coefficients.norm() == doctest::Approx(factor).epsilon(1e-3));
}

TEST_CASE("Galerkin relation against every basis test function") {
  auto space = space_at(2);
  auto grid = grid_of(1.0, 8);
  const Nonlinearity d = builtin("cubic");
  const SpaceTimeFunction f = [](double t, const Point &x) { return (1.0 + t) * sinsin(x) + x.x; };
  SolverOptions opts;
  const MarchResult r = march(space, grid, d, f, [](const Point &x) { return 2.0 * sinsin(x); }, opts);
  const GalerkinResidual g = galerkin_residual(r.solution, d, f, opts);
  CHECK(g.max_abs <= 10 * opts.newton_tol * (1 + g.max_data_norm));

  // independent route through the bilinear form with slab-local basis tests
  const std::size_t n = space->n_dofs(), M = grid->n_slabs();
  const Vector u0_load = space->mass() * r.solution.initial_projection.coefficients;
  double worst = 0.0;
  for (std::size_t m = 1; m <= M; m += 3)
    for (std::size_t i = 0; i < n; i += 7) {
      std::vector<FeFunction> phi(M, FeFunction::zero(n));
      phi[m - 1].coefficients[static_cast<Eigen::Index>(i)] = 1.0;
      const double k = grid->step(m);
      const double B = bilinear_primal(*space, *grid, r.solution.slabs, phi);
      const auto S = space->semilinear(r.solution.slab(m), slab_mean(d, *grid, m));
      const double lhs = B + k * S.residual[static_cast<Eigen::Index>(i)];
      double rhs = k * slab_load(*space, *grid, m, f)[static_cast<Eigen::Index>(i)];
      if (m == 1)
        rhs += u0_load[static_cast<Eigen::Index>(i)];
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  CHECK(worst <= 10 * opts.newton_tol * (1 + g.max_data_norm));
}

TEST_CASE("energy decay for monotone builtins") {
  for (const char *name : {"zero", "cubic", "quintic", "cubic_abs", "exp_m1"}) {
    for (int level = 1; level <= 3; ++level) {
      CAPTURE(name);
      CAPTURE(level);
      auto space = space_at(level);
      const MarchResult r = march(space, grid_of(0.5, 16), builtin(name), nullptr, sinsin);
      double prev = space->norms(r.solution.initial_projection).l2;
      for (const FeFunction &s : r.solution.slabs) {
        const double cur = space->norms(s).l2;
        CHECK(cur <= prev + 1e-12);
        prev = cur;
      }
    }
  }
}

TEST_CASE("marches are deterministic") {
  const auto run = [] {
    return march(space_at(2), grid_of(1.0, 8), builtin("allen_cahn", {{"alpha", 0.5}}),
                 [](double t, const Point &x) { return t * sinsin(x); }, sinsin)
        .solution;
  };
  const SpaceTimeDG0 a = run(), b = run();
  for (std::size_t m = 0; m < a.slabs.size(); ++m)
    CHECK(a.slabs[m].coefficients == b.slabs[m].coefficients);
}

TEST_CASE("linear auxiliary problem") {
  // one-DOF step with b = 1, g = 1
  const SpaceTimeFunction one = [](double, const Point &) { return 1.0; };
  const SpaceTimeDG0 v = solve_linear_aux(space_at(0), grid_of(0.125, 1), one, 0.0, one);
  CHECK(v.slab(1).coefficients[0] == doctest::Approx(0.03125 / 0.640625).epsilon(1e-10));

  const SpaceTimeDG0 zero = solve_linear_aux(space_at(2), grid_of(1.0, 4), one, 0.0, nullptr);
  for (const FeFunction &s : zero.slabs)
    CHECK(s.coefficients.cwiseAbs().maxCoeff() == 0.0);

  // b = 0 is the linear march with f = g
  auto space = space_at(2);
  auto grid = grid_of(1.0, 8);
  const SpaceTimeFunction g = [](double t, const Point &x) { return std::cos(t) * sinsin(x) + x.y; };
  SolverOptions opts;
  opts.cg.tol = 1e-13;
  opts.newton_tol = 1e-13;
  const SpaceTimeDG0 va = solve_linear_aux(space, grid, nullptr, 0.0, g, opts);
  const MarchResult vm = march(space, grid, builtin("zero"), g, [](const Point &) { return 0.0; }, opts);
  for (std::size_t m = 1; m <= 8; ++m)
    CHECK((va.slab(m).coefficients - vm.solution.slab(m).coefficients).cwiseAbs().maxCoeff() < 1e-11);

  // b below -gamma is refused
  const SpaceTimeFunction bneg = [](double, const Point &) { return -20.0; };
  CHECK_THROWS_AS(solve_linear_aux(space, grid_of(1.0, 4), bneg, 0.0, g), std::logic_error);
  CHECK_THROWS_AS(solve_linear_aux(space, grid_of(1.0, 4), bneg, 20.0, g), std::invalid_argument);
  // the lower-bound-only regime b >= -gamma
  const SpaceTimeFunction bhalf = [](double, const Point &) { return -0.5; };
  CHECK_NOTHROW(solve_linear_aux(space, grid_of(1.0, 8), bhalf, 0.5, g));
}

TEST_CASE("dual problem") {
  // one-DOF: z_M = 1, k = 1/8
  DualData data;
  data.terminal = FeFunction(Vector::Ones(1));
  const SpaceTimeDG0 z = solve_dual(space_at(0), grid_of(0.25, 2), nullptr, 0.0, data);
  CHECK(z.slab(2).coefficients[0] == 1.0);
  CHECK(z.slab(1).coefficients[0] == doctest::Approx(0.2).epsilon(1e-10));

  auto space = space_at(2);
  auto grid = grid_of(1.0, 8);
  DualData none;
  none.terminal = FeFunction::zero(space->n_dofs());
  for (const FeFunction &s : solve_dual(space, grid, nullptr, 0.0, none).slabs)
    CHECK(s.coefficients.cwiseAbs().maxCoeff() == 0.0);

  DualData bad;
  bad.terminal = FeFunction::zero(3);
  CHECK_THROWS_AS(solve_dual(space, grid, nullptr, 0.0, bad), std::invalid_argument);
}

TEST_CASE("dual trajectory is the time-reversed primal for b = 0") {
  auto space = space_at(2);
  auto grid = grid_of(1.0, 8);
  SolverOptions opts;
  opts.cg.tol = 1e-13;
  opts.newton_tol = 1e-13;
  const SpatialFunction u0 = [](const Point &x) { return sinsin(x) + x.x * (1 - x.x) * x.y * (1 - x.y) * 3; };
  const MarchResult u = march(space, grid, builtin("zero"), nullptr, u0, opts);
  DualData data;
  data.terminal = u.solution.initial_projection;
  const SpaceTimeDG0 z = solve_dual(space, grid, nullptr, 0.0, data, opts);
  const std::size_t M = grid->n_slabs();
  for (std::size_t j = 1; j < M; ++j)
    CHECK((z.slab(M - j).coefficients - u.solution.slab(j).coefficients).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("duality identity between the forward and backward linear problems") {
  auto space = space_at(2);
  auto grid = grid_of(1.0, 8);
  SolverOptions opts;
  opts.cg.tol = 1e-13;
  const SpaceTimeFunction b = [](double t, const Point &x) { return -0.3 + t * x.x; };
  const SpaceTimeFunction g = [](double t, const Point &x) { return std::exp(t) * sinsin(x); };
  const SpaceTimeFunction s = [](double t, const Point &x) { return x.y * (1.0 - t); };
  const SpaceTimeDG0 v = solve_linear_aux(space, grid, b, 0.3, g, opts);
  DualData data;
  data.source = s;
  const SpaceTimeDG0 z = solve_dual(space, grid, b, 0.3, data, opts);
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t m = 1; m <= grid->n_slabs(); ++m) {
    const double k = grid->step(m);
    lhs += k * slab_load(*space, *grid, m, s, opts).dot(v.slab(m).coefficients);
    rhs += k * slab_load(*space, *grid, m, g, opts).dot(z.slab(m).coefficients);
  }
  CHECK(std::abs(lhs - rhs) <= 1e-10 * std::abs(rhs));
}

TEST_CASE("jumps") {
  auto space = space_at(0);
  SpaceTimeDG0 u;
  u.space = space;
  u.grid = grid_of(1.0, 2);
  u.initial_projection = FeFunction::zero(1);
  u.slabs = {FeFunction(Vector::Constant(1, 1.0)), FeFunction(Vector::Constant(1, 3.0))};
  const auto j = jumps(u);
  REQUIRE(j.size() == 2);
  CHECK(j[0].coefficients[0] == 1.0);
  CHECK(j[1].coefficients[0] == 2.0);

  u.initial_projection = u.slabs[0];
  u.slabs[1] = u.slabs[0];
  for (const FeFunction &f : jumps(u))
    CHECK(f.coefficients[0] == 0.0);

  const MarchResult r = march(space_at(2), grid_of(1.0, 8), builtin("cubic"), nullptr, sinsin);
  Vector sum = Vector::Zero(static_cast<Eigen::Index>(r.solution.space->n_dofs()));
  for (const FeFunction &f : jumps(r.solution))
    sum += f.coefficients;
  CHECK((sum - (r.solution.slab(8).coefficients - r.solution.initial_projection.coefficients)).cwiseAbs().maxCoeff() <
        1e-14);
}

TEST_CASE("primal and dual forms agree") {
  for (int level = 0; level <= 3; ++level) {
    auto space = space_at(level);
    auto grid = grid_of(1.0, 8);
    const std::vector<FeFunction> u = march(space, grid, builtin("cubic"), nullptr, sinsin).solution.slabs;
    for (unsigned s = 0; s < 10; ++s) {
      const auto phi = random_trajectory(space->n_dofs(), grid->n_slabs(), 100 + s);
      const double a = bilinear_primal(*space, *grid, u, phi);
      const double b = bilinear_dual(*space, *grid, u, phi);
      CHECK(std::abs(a - b) <= 1e-10 * std::max(std::abs(a), 1e-300));
    }
  }
  auto space = space_at(1);
  auto grid = grid_of(1.0, 4);
  CHECK_THROWS_AS(bilinear_primal(*space, *grid, random_trajectory(9, 3, 1), random_trajectory(9, 4, 2)),
                  std::invalid_argument);
}
