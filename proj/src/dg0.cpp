#include "parabolic/dg0.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace parabolic {

namespace {

void require_small_steps(const TimeGrid &grid, double gamma, double rho) {
  if (!validate_grid(grid, gamma, rho).smallness_ok)
    throw std::invalid_argument("time step " + std::to_string(grid.max_step()) +
                                " violates k <= rho / gamma = " + std::to_string(rho / gamma));
}

// Slab mean of a space-time coefficient as a spatial function.
SpatialFunction slab_mean_of(const SpaceTimeFunction &b, const TimeGrid &grid, std::size_t m,
                             int quad_points) {
  const SlabRule rule = slab_rule(grid, m, quad_points);
  return [b, rule](const Point &x) {
    double s = 0.0;
    for (std::size_t q = 0; q < rule.times.size(); ++q)
      s += rule.weights[q] * b(rule.times[q], x);
    return s;
  };
}

// M + k K + k Bbar_m, checking the pointwise weight 1 + k bbar >= 1 - rho.
SparseMatrix linear_step_matrix(const FeSpace &space, const TimeGrid &grid, std::size_t m,
                                const SpaceTimeFunction &b, const SolverOptions &opts) {
  const double k = grid.step(m);
  if (!b)
    return linear_combination({{1.0, &space.mass()}, {k, &space.stiffness()}});
  const Quadrature &quad = triangle_rule(opts.space_quad_degree);
  const SpatialFunction bbar = slab_mean_of(b, grid, m, opts.time_quad_points);
  double min_weight = std::numeric_limits<double>::infinity();
  const SparseMatrix B = space.weighted_mass(
      [&](const Point &x) {
        const double v = bbar(x);
        min_weight = std::min(min_weight, 1.0 + k * v);
        return v;
      },
      quad);
  if (min_weight < 1.0 - opts.rho)
    throw std::logic_error("slab " + std::to_string(m) + ": weight 1 + k b = " +
                           std::to_string(min_weight) + " below 1 - rho");
  return linear_combination({{1.0, &space.mass()}, {k, &space.stiffness()}, {k, &B}});
}

} // namespace

bool NewtonReport::converged() const {
  return std::all_of(steps.begin(), steps.end(), [](const NewtonStep &s) { return s.converged; });
}

int NewtonReport::max_iterations() const {
  int n = 0;
  for (const auto &s : steps)
    n = std::max(n, s.iterations);
  return n;
}

int NewtonReport::max_cg_iterations() const {
  int n = 0;
  for (const auto &s : steps)
    n = std::max(n, s.max_cg_iterations);
  return n;
}

double NewtonReport::min_jacobian_weight() const {
  double w = std::numeric_limits<double>::infinity();
  for (const auto &s : steps)
    w = std::min(w, s.min_jacobian_weight);
  return w;
}

Vector slab_load(const FeSpace &space, const TimeGrid &grid, std::size_t m, const SpaceTimeFunction &f,
                 const SolverOptions &opts) {
  if (!f)
    return Vector::Zero(static_cast<Eigen::Index>(space.n_dofs()));
  return space.load(slab_mean_of(f, grid, m, opts.time_quad_points), triangle_rule(opts.space_quad_degree));
}

StepResult step_solve(const FeSpace &space, const TimeGrid &grid, std::size_t m, const FeFunction &U_prev,
                      const Nonlinearity &d, const Vector &fbar_load, const SolverOptions &opts) {
  const double k = grid.step(m);
  const Quadrature &quad = triangle_rule(opts.space_quad_degree);
  const PointwiseMap dbar = slab_mean(d, grid, m, opts.time_quad_points);
  const SparseMatrix A = linear_combination({{1.0, &space.mass()}, {k, &space.stiffness()}});
  const Vector rhs = space.mass() * U_prev.coefficients + k * fbar_load;
  const double target = opts.newton_tol * (1.0 + rhs.norm());

  StepResult result{U_prev, {}};
  NewtonStep &rep = result.report;
  rep.min_jacobian_weight = std::numeric_limits<double>::infinity();

  SemilinearAssembly S = space.semilinear(result.value, dbar, quad);
  Vector F = A * result.value.coefficients + k * S.residual - rhs;
  double fnorm = F.norm();

  const auto fail = [&](const std::string &why) {
    rep.residual = fnorm;
    NewtonReport partial;
    partial.steps.push_back(rep);
    throw NewtonError("slab " + std::to_string(m) + ": " + why, m, std::move(partial));
  };

  while (fnorm > target) {
    if (rep.iterations == opts.max_newton_iters)
      fail("Newton did not converge in " + std::to_string(opts.max_newton_iters) + " iterations");
    ++rep.iterations;

    const double weight = 1.0 + k * S.min_derivative;
    rep.min_jacobian_weight = std::min(rep.min_jacobian_weight, weight);
    if (weight < 1.0 - opts.rho)
      throw std::logic_error("slab " + std::to_string(m) + ": Jacobian weight " + std::to_string(weight) +
                             " below 1 - rho");
    const SparseMatrix J = linear_combination({{1.0, &A}, {k, &S.jacobian}});
    CgResult delta;
    try {
      delta = solve_spd(J, -F, opts.cg);
    } catch (const LinearSolverError &e) {
      fail(std::string("Jacobian solve failed: ") + e.what());
    }
    rep.max_cg_iterations = std::max(rep.max_cg_iterations, delta.iterations);

    // backtracking on the residual norm
    double lambda = 1.0;
    for (int halvings = 0;; ++halvings) {
      FeFunction trial(result.value.coefficients + lambda * delta.x);
      SemilinearAssembly S_trial = space.semilinear(trial, dbar, quad);
      Vector F_trial = A * trial.coefficients + k * S_trial.residual - rhs;
      const double trial_norm = F_trial.norm();
      if (trial_norm < fnorm) {
        result.value = std::move(trial);
        S = std::move(S_trial);
        F = std::move(F_trial);
        fnorm = trial_norm;
        break;
      }
      if (halvings == opts.max_halvings)
        fail("line search stalled at residual " + std::to_string(fnorm));
      ++rep.halvings;
      lambda *= 0.5;
    }
  }
  if (rep.iterations == 0)
    rep.min_jacobian_weight = 1.0 + k * S.min_derivative;
  rep.residual = fnorm;
  rep.converged = true;
  return result;
}

MarchResult march(std::shared_ptr<const FeSpace> space, std::shared_ptr<const TimeGrid> grid,
                  const Nonlinearity &d, const SpaceTimeFunction &f, const SpatialFunction &u0,
                  const SolverOptions &opts) {
  require_small_steps(*grid, d.gamma, opts.rho);

  MarchResult out;
  out.solution.space = space;
  out.solution.grid = grid;
  out.solution.initial_projection = u0 ? space->l2_project(u0, opts.cg) : FeFunction::zero(space->n_dofs());
  out.solution.slabs.reserve(grid->n_slabs());

  const FeFunction *prev = &out.solution.initial_projection;
  for (std::size_t m = 1; m <= grid->n_slabs(); ++m) {
    StepResult step;
    try {
      step = step_solve(*space, *grid, m, *prev, d, slab_load(*space, *grid, m, f, opts), opts);
    } catch (const NewtonError &e) {
      NewtonReport report = out.report;
      report.steps.insert(report.steps.end(), e.report().steps.begin(), e.report().steps.end());
      throw NewtonError(e.what(), m, std::move(report));
    }
    out.report.steps.push_back(step.report);
    out.solution.slabs.push_back(std::move(step.value));
    prev = &out.solution.slabs.back();
  }
  return out;
}

SpaceTimeDG0 solve_linear_aux(std::shared_ptr<const FeSpace> space, std::shared_ptr<const TimeGrid> grid,
                              const SpaceTimeFunction &b, double gamma, const SpaceTimeFunction &g,
                              const SolverOptions &opts) {
  require_small_steps(*grid, gamma, opts.rho);

  SpaceTimeDG0 v;
  v.space = space;
  v.grid = grid;
  v.initial_projection = FeFunction::zero(space->n_dofs());
  v.slabs.reserve(grid->n_slabs());
  const FeFunction *prev = &v.initial_projection;
  for (std::size_t m = 1; m <= grid->n_slabs(); ++m) {
    const double k = grid->step(m);
    const SparseMatrix A = linear_step_matrix(*space, *grid, m, b, opts);
    const Vector rhs = space->mass() * prev->coefficients + k * slab_load(*space, *grid, m, g, opts);
    v.slabs.emplace_back(solve_spd(A, rhs, opts.cg, &prev->coefficients).x);
    prev = &v.slabs.back();
  }
  return v;
}

SpaceTimeDG0 solve_dual(std::shared_ptr<const FeSpace> space, std::shared_ptr<const TimeGrid> grid,
                        const SpaceTimeFunction &b, double gamma, const DualData &data,
                        const SolverOptions &opts) {
  require_small_steps(*grid, gamma, opts.rho);

  const std::size_t M = grid->n_slabs();
  SpaceTimeDG0 z;
  z.space = space;
  z.grid = grid;
  z.initial_projection = FeFunction::zero(space->n_dofs());
  z.slabs.assign(M, FeFunction::zero(space->n_dofs()));

  const auto solve_slab = [&](std::size_t m, const Vector &next) {
    const double k = grid->step(m);
    const SparseMatrix A = linear_step_matrix(*space, *grid, m, b, opts);
    Vector rhs = space->mass() * next;
    if (data.source)
      rhs += k * slab_load(*space, *grid, m, data.source, opts);
    return FeFunction(solve_spd(A, rhs, opts.cg, &next).x);
  };

  if (data.terminal) {
    if (data.terminal->size() != space->n_dofs())
      throw std::invalid_argument("solve_dual: terminal data has wrong length");
    z.slabs[M - 1] = *data.terminal;
  } else {
    z.slabs[M - 1] = solve_slab(M, Vector::Zero(static_cast<Eigen::Index>(space->n_dofs())));
  }
  for (std::size_t m = M - 1; m >= 1; --m)
    z.slabs[m - 1] = solve_slab(m, z.slabs[m].coefficients);
  return z;
}

std::vector<FeFunction> jumps(const SpaceTimeDG0 &u) {
  std::vector<FeFunction> out;
  out.reserve(u.slabs.size());
  const FeFunction *prev = &u.initial_projection;
  for (const FeFunction &s : u.slabs) {
    out.emplace_back(s.coefficients - prev->coefficients);
    prev = &s;
  }
  return out;
}

double bilinear_primal(const FeSpace &space, const TimeGrid &grid, const std::vector<FeFunction> &u,
                       const std::vector<FeFunction> &phi) {
  const std::size_t M = grid.n_slabs();
  if (u.size() != M || phi.size() != M)
    throw std::invalid_argument("bilinear_primal: trajectories must have one entry per slab");
  const SparseMatrix &K = space.stiffness();
  const SparseMatrix &Ms = space.mass();
  double sum = 0.0;
  for (std::size_t m = 1; m <= M; ++m)
    sum += grid.step(m) * u[m - 1].coefficients.dot(K * phi[m - 1].coefficients);
  for (std::size_t m = 2; m <= M; ++m)
    sum += (u[m - 1].coefficients - u[m - 2].coefficients).dot(Ms * phi[m - 1].coefficients);
  sum += u[0].coefficients.dot(Ms * phi[0].coefficients);
  return sum;
}

double bilinear_dual(const FeSpace &space, const TimeGrid &grid, const std::vector<FeFunction> &u,
                     const std::vector<FeFunction> &phi) {
  const std::size_t M = grid.n_slabs();
  if (u.size() != M || phi.size() != M)
    throw std::invalid_argument("bilinear_dual: trajectories must have one entry per slab");
  const SparseMatrix &K = space.stiffness();
  const SparseMatrix &Ms = space.mass();
  double sum = 0.0;
  for (std::size_t m = 1; m <= M; ++m)
    sum += grid.step(m) * u[m - 1].coefficients.dot(K * phi[m - 1].coefficients);
  for (std::size_t m = 1; m + 1 <= M; ++m)
    sum -= u[m - 1].coefficients.dot(Ms * (phi[m].coefficients - phi[m - 1].coefficients));
  sum += u[M - 1].coefficients.dot(Ms * phi[M - 1].coefficients);
  return sum;
}

GalerkinResidual galerkin_residual(const SpaceTimeDG0 &u, const Nonlinearity &d, const SpaceTimeFunction &f,
                                   const SolverOptions &opts) {
  const FeSpace &space = *u.space;
  const TimeGrid &grid = *u.grid;
  const Quadrature &quad = triangle_rule(opts.space_quad_degree);
  GalerkinResidual out;
  const FeFunction *prev = &u.initial_projection;
  for (std::size_t m = 1; m <= grid.n_slabs(); ++m) {
    const double k = grid.step(m);
    const FeFunction &cur = u.slab(m);
    const Vector data = space.mass() * prev->coefficients + k * slab_load(space, grid, m, f, opts);
    const SemilinearAssembly S = space.semilinear(cur, slab_mean(d, grid, m, opts.time_quad_points), quad);
    const Vector r = k * (space.stiffness() * cur.coefficients) + space.mass() * cur.coefficients +
                     k * S.residual - data;
    out.max_abs = std::max(out.max_abs, r.cwiseAbs().maxCoeff());
    out.max_data_norm = std::max(out.max_data_norm, data.norm());
    prev = &cur;
  }
  return out;
}

} // namespace parabolic
