#include "parabolic/time_grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace parabolic {

TimeGrid::TimeGrid(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.size() < 2)
    throw std::invalid_argument("TimeGrid: need at least one slab");
  if (nodes_.front() != 0.0)
    throw std::invalid_argument("TimeGrid: first node must be 0");
  k_max_ = 0.0;
  k_min_ = nodes_.back();
  for (std::size_t m = 1; m < nodes_.size(); ++m) {
    const double k = nodes_[m] - nodes_[m - 1];
    if (!(k > 0.0))
      throw std::invalid_argument("TimeGrid: nodes must increase strictly");
    k_max_ = std::max(k_max_, k);
    k_min_ = std::min(k_min_, k);
  }
}

void TimeGrid::check_slab(std::size_t m) const {
  if (m < 1 || m > n_slabs())
    throw std::out_of_range("slab index " + std::to_string(m) + " outside 1.." +
                            std::to_string(n_slabs()));
}

double TimeGrid::step(std::size_t m) const {
  check_slab(m);
  return nodes_[m] - nodes_[m - 1];
}

std::vector<double> TimeGrid::steps() const {
  std::vector<double> k(n_slabs());
  for (std::size_t m = 1; m <= n_slabs(); ++m)
    k[m - 1] = nodes_[m] - nodes_[m - 1];
  return k;
}

std::size_t TimeGrid::slab_of(double t) const {
  if (t <= nodes_[1])
    return 1;
  if (t >= nodes_.back())
    return n_slabs();
  const auto it = std::lower_bound(nodes_.begin(), nodes_.end(), t);
  return static_cast<std::size_t>(it - nodes_.begin());
}

TimeGrid build_uniform_grid(double T, std::size_t M) {
  if (!(T > 0.0))
    throw std::invalid_argument("build_uniform_grid: T must be positive");
  if (M == 0)
    throw std::invalid_argument("build_uniform_grid: M must be positive");
  std::vector<double> nodes(M + 1);
  for (std::size_t m = 0; m <= M; ++m)
    nodes[m] = T * static_cast<double>(m) / static_cast<double>(M);
  nodes[M] = T;
  return TimeGrid(std::move(nodes));
}

GridValidityReport validate_grid(const TimeGrid &grid, double gamma, double rho) {
  if (!(rho > 0.0 && rho < 1.0))
    throw std::invalid_argument("validate_grid: rho must lie in (0, 1)");
  if (!(gamma >= 0.0))
    throw std::invalid_argument("validate_grid: gamma must be nonnegative");

  GridValidityReport report;
  const auto k = grid.steps();
  for (std::size_t m = 0; m + 1 < k.size(); ++m) {
    const double r = k[m] / k[m + 1];
    report.c_observed = std::max({report.c_observed, r, 1.0 / r});
  }
  report.max_neighbor_ratio = report.c_observed;
  report.ratio_ok = std::isfinite(report.c_observed);
  // relative slack absorbs rounding in node differences of uniform grids
  constexpr double slack = 1.0 + 1e-12;
  report.quarter_ok = grid.max_step() <= 0.25 * grid.final_time() * slack;
  report.smallness_ok = gamma == 0.0 || grid.max_step() <= rho / gamma * slack;
  report.min_over_max_step = grid.min_step() / grid.max_step();
  return report;
}

GaussRule gauss_legendre(int n) {
  if (n < 1)
    throw std::invalid_argument("gauss_legendre: need at least one point");
  GaussRule rule;
  rule.points.assign(n, 0.0);
  rule.weights.assign(n, 2.0);
  if (n == 1)
    return rule;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton on P_n from the Chebyshev-like initial guess
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15)
        break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.points[i] = -x;
    rule.points[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1)
    rule.points[n / 2] = 0.0;
  return rule;
}

SlabRule slab_rule(const TimeGrid &grid, std::size_t m, int quad_points) {
  const double k = grid.step(m);
  const double mid = 0.5 * (grid.node(m - 1) + grid.node(m));
  const GaussRule g = gauss_legendre(quad_points);
  SlabRule rule;
  for (std::size_t q = 0; q < g.points.size(); ++q) {
    rule.times.push_back(mid + 0.5 * k * g.points[q]);
    rule.weights.push_back(0.5 * g.weights[q]);
  }
  return rule;
}

double temporal_mean(const TimeGrid &grid, const std::function<double(double)> &v,
                     std::size_t m, int quad_points) {
  const SlabRule rule = slab_rule(grid, m, quad_points);
  double sum = 0.0;
  for (std::size_t q = 0; q < rule.times.size(); ++q)
    sum += rule.weights[q] * v(rule.times[q]);
  return sum;
}

double nodal_value(const TimeGrid &grid, const std::function<double(double)> &v,
                   std::size_t m) {
  if (m < 1 || m > grid.n_slabs())
    throw std::out_of_range("nodal_value: slab index out of range");
  return v(grid.node(m));
}

} // namespace parabolic
