#pragma once

#include "parabolic/fem.hpp"
#include "parabolic/mesh.hpp"
#include "parabolic/time_grid.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>

namespace parabolic {

using NonlinearFn = std::function<double(double t, const Point &x, double u)>;

/// Reaction term d(t, x, u) with its u-derivative and the declared
/// monotonicity defect gamma, i.e. d_u d >= -gamma everywhere.
struct Nonlinearity {
  std::string name;
  NonlinearFn eval;
  NonlinearFn deriv;
  double gamma = 0.0;
  /// true when d does not depend on t; slab means are then d itself
  bool autonomous = true;
  std::optional<double> truncation_radius;
  /// bound on |d_u d_R|, set together with truncation_radius
  std::optional<double> derivative_bound;

  double operator()(double t, const Point &x, double u) const { return eval(t, x, u); }
};

/// Builtins: zero, cubic (u^3), quintic (u^5), cubic_abs (u^3 |u|),
/// exp_m1 (e^u - 1), allen_cahn (u^3 - alpha u, needs params["alpha"] > 0).
/// Throws std::invalid_argument for unknown names or bad parameters.
Nonlinearity builtin(const std::string &name, const std::map<std::string, double> &params = {});

/// Linear extension of d outside [-R, R] by its tangent at +-R. The result is
/// globally Lipschitz in u and keeps gamma.
Nonlinearity truncate(const Nonlinearity &d, double R);

/// Slab mean (x, u) -> ((1/k_m) int_{I_m} d dt, (1/k_m) int_{I_m} d_u d dt) by
/// Gauss quadrature in time; returns d itself for autonomous d.
PointwiseMap slab_mean(const Nonlinearity &d, const TimeGrid &grid, std::size_t m,
                       int quad_points = 3);

/// Deterministic sample set used by the assumption checks: u in [-10, 10]
/// step 0.1 and five seeded (t, x) pairs with t in [0, 1].
struct SamplePoint {
  double t;
  Point x;
};
std::vector<SamplePoint> sample_points(unsigned seed = 2024);
std::vector<double> sample_values();

struct AssumptionReport {
  bool vanishes_at_zero = true;
  bool relaxed_monotone = true;   // deriv >= -gamma on the sample set
  bool derivative_bounded = true; // |deriv| <= C_R when truncated
  bool derivative_consistent = true; // central differences match deriv
  double min_derivative = 0.0;
  double max_fd_mismatch = 0.0;
};

AssumptionReport check_assumptions(const Nonlinearity &d, unsigned seed = 2024);

} // namespace parabolic
