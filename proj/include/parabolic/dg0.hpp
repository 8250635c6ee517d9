#pragma once

#include "parabolic/fem.hpp"
#include "parabolic/nonlinearity.hpp"
#include "parabolic/time_grid.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

namespace parabolic {

using SpaceTimeFunction = std::function<double(double t, const Point &x)>;

/// Piecewise constant in time, P1 in space: slabs[m-1] is the value on I_m.
struct SpaceTimeDG0 {
  std::shared_ptr<const FeSpace> space;
  std::shared_ptr<const TimeGrid> grid;
  std::vector<FeFunction> slabs;
  /// u_{kh,0} = P_h u_0 (zero for the linear and dual problems)
  FeFunction initial_projection;

  /// 1-based slab access
  [[nodiscard]] const FeFunction &slab(std::size_t m) const { return slabs.at(m - 1); }
  [[nodiscard]] std::size_t n_slabs() const { return slabs.size(); }
};

struct SolverOptions {
  double newton_tol = 1e-10;
  int max_newton_iters = 50;
  int max_halvings = 30;
  double rho = 0.9;
  int time_quad_points = 3;
  CgOptions cg{};
  int space_quad_degree = 4;
};

struct NewtonStep {
  int iterations = 0;
  double residual = 0.0;
  int halvings = 0;
  bool converged = false;
  /// min over quadrature points of 1 + k_m d_u dbar_m(x, u_h) over all Jacobians of the step
  double min_jacobian_weight = 1.0;
  int max_cg_iterations = 0;
};

struct NewtonReport {
  std::vector<NewtonStep> steps;

  [[nodiscard]] bool converged() const;
  [[nodiscard]] int max_iterations() const;
  [[nodiscard]] int max_cg_iterations() const;
  [[nodiscard]] double min_jacobian_weight() const;
};

class NewtonError : public std::runtime_error {
public:
  NewtonError(const std::string &what, std::size_t slab, NewtonReport report)
      : std::runtime_error(what), slab_(slab), report_(std::move(report)) {}
  [[nodiscard]] std::size_t slab() const { return slab_; }
  [[nodiscard]] const NewtonReport &report() const { return report_; }

private:
  std::size_t slab_;
  NewtonReport report_;
};

/// (fbar_m, phi_i) with fbar_m the Gauss slab mean of f.
Vector slab_load(const FeSpace &space, const TimeGrid &grid, std::size_t m, const SpaceTimeFunction &f,
                 const SolverOptions &opts = {});

struct StepResult {
  FeFunction value;
  NewtonStep report;
};

/// One step of the scheme: solves
///   (M + k_m K) U + k_m N_m(U) = M U_prev + k_m fbar_load
/// by damped Newton started at U_prev. Throws NewtonError on failure and
/// std::logic_error if a Jacobian weight drops below 1 - rho.
StepResult step_solve(const FeSpace &space, const TimeGrid &grid, std::size_t m, const FeFunction &U_prev,
                      const Nonlinearity &d, const Vector &fbar_load, const SolverOptions &opts = {});

struct MarchResult {
  SpaceTimeDG0 solution;
  NewtonReport report;
};

/// Full semilinear march from u_{kh,0} = P_h u0. Throws std::invalid_argument if
/// the grid violates k <= rho / gamma, NewtonError naming the first failing slab.
MarchResult march(std::shared_ptr<const FeSpace> space, std::shared_ptr<const TimeGrid> grid,
                  const Nonlinearity &d, const SpaceTimeFunction &f, const SpatialFunction &u0,
                  const SolverOptions &opts = {});

/// Linear problem B(v, phi) + (b v, phi) = (g, phi) with zero initial data and b >= -gamma.
SpaceTimeDG0 solve_linear_aux(std::shared_ptr<const FeSpace> space, std::shared_ptr<const TimeGrid> grid,
                              const SpaceTimeFunction &b, double gamma, const SpaceTimeFunction &g,
                              const SolverOptions &opts = {});

struct DualData {
  /// z_{kh,M}; when absent z_M is solved from the source with z_{M+1} = 0
  std::optional<FeFunction> terminal;
  /// distributed source tested per slab; may be empty
  SpaceTimeFunction source;
};

/// Backward scheme (M + k_m K + k_m Bbar_m) z_m = M z_{m+1} + k_m (sbar_m, phi).
SpaceTimeDG0 solve_dual(std::shared_ptr<const FeSpace> space, std::shared_ptr<const TimeGrid> grid,
                        const SpaceTimeFunction &b, double gamma, const DualData &data,
                        const SolverOptions &opts = {});

/// [u]_{m-1} for m = 1..M, with [u]_0 = u_{kh,1} - u_{kh,0}.
std::vector<FeFunction> jumps(const SpaceTimeDG0 &u);

/// B(u, phi) on dG(0) x dG(0) via the jump-tested form.
double bilinear_primal(const FeSpace &space, const TimeGrid &grid, const std::vector<FeFunction> &u,
                       const std::vector<FeFunction> &phi);
/// Same form rearranged with jumps on the test function.
double bilinear_dual(const FeSpace &space, const TimeGrid &grid, const std::vector<FeFunction> &u,
                     const std::vector<FeFunction> &phi);

struct GalerkinResidual {
  double max_abs = 0.0;      // over slabs and basis functions
  double max_data_norm = 0.0; // max over slabs of ||M u_{m-1} + k_m fbar_m||
};

/// Residual of B(u, phi) + (d(u), phi) - (f, phi) - (u_0, phi_1) for every
/// basis test function on every slab, with the quadrature the solver uses.
GalerkinResidual galerkin_residual(const SpaceTimeDG0 &u, const Nonlinearity &d, const SpaceTimeFunction &f,
                                   const SolverOptions &opts = {});

} // namespace parabolic
