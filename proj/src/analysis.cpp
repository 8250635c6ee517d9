#include "parabolic/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace parabolic {

namespace {

// Time samples of a slab: Gauss points, then the right endpoint t_m.
std::vector<double> sample_times(const TimeGrid &grid, std::size_t m, int quad_points) {
  std::vector<double> t = slab_rule(grid, m, quad_points).times;
  t.push_back(grid.node(m));
  return t;
}

double spatial_l2(const FeSpace &space, const SpatialFunction &g, const Quadrature &quad) {
  double sum = 0.0;
  for_each_quadrature_point(space.mesh(), quad, [&](std::size_t, const Point &x, const auto &, double w) {
    const double v = g(x);
    sum += w * v * v;
  });
  return std::sqrt(sum);
}

double spatial_l1(const FeSpace &space, const SpatialFunction &g, const Quadrature &quad) {
  double sum = 0.0;
  for_each_quadrature_point(space.mesh(), quad,
                            [&](std::size_t, const Point &x, const auto &, double w) { sum += w * std::abs(g(x)); });
  return sum;
}

} // namespace

ErrorTriple error_norms(const SpaceTimeFunction &u_exact, const SpaceTimeDG0 &traj, int time_quad_points,
                        int space_quad_degree) {
  const FeSpace &space = *traj.space;
  const TriMesh &mesh = space.mesh();
  const TimeGrid &grid = *traj.grid;
  const Quadrature &quad = triangle_rule(space_quad_degree);

  ErrorTriple out;
  double l2l2_sq = 0.0;
  for (std::size_t m = 1; m <= grid.n_slabs(); ++m) {
    const FeFunction &uh = traj.slab(m);
    const SlabRule rule = slab_rule(grid, m, time_quad_points);
    const auto times = sample_times(grid, m, time_quad_points);
    for (std::size_t s = 0; s < times.size(); ++s) {
      const double t = times[s];
      double l2_sq = 0.0;
      double sup = 0.0;
      for_each_quadrature_point(mesh, quad, [&](std::size_t c, const Point &x, const auto &l, double w) {
        const double e = u_exact(t, x) - evaluate_in_cell(mesh, uh, c, l);
        l2_sq += w * e * e;
        sup = std::max(sup, std::abs(e));
      });
      for (std::size_t v = 0; v < mesh.n_vertices(); ++v) {
        const int i = mesh.vertex_to_dof[v];
        const double uh_v = i >= 0 ? uh.coefficients[i] : 0.0;
        sup = std::max(sup, std::abs(u_exact(t, mesh.vertices[v]) - uh_v));
      }
      if (s < rule.times.size())
        l2l2_sq += grid.step(m) * rule.weights[s] * l2_sq;
      out.linf_l2 = std::max(out.linf_l2, std::sqrt(l2_sq));
      out.linf_linf = std::max(out.linf_linf, sup);
    }
  }
  out.l2l2 = std::sqrt(l2l2_sq);
  out.samples = "time: " + std::to_string(time_quad_points) +
                "-point Gauss per slab + t_m; space: degree-" + std::to_string(space_quad_degree) +
                " points per cell + vertices";
  return out;
}

std::vector<double> eoc(const std::vector<double> &errors, const std::vector<double> &hs) {
  if (errors.size() != hs.size() || errors.size() < 2)
    throw std::invalid_argument("eoc: need two or more (error, h) pairs of equal count");
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!(errors[i] > 0.0) || !(hs[i] > 0.0))
      throw std::invalid_argument("eoc: errors and mesh sizes must be positive");
    if (i > 0 && !(hs[i] < hs[i - 1]))
      throw std::invalid_argument("eoc: mesh sizes must decrease strictly");
  }
  std::vector<double> rates;
  for (std::size_t i = 0; i + 1 < errors.size(); ++i)
    rates.push_back(std::log(errors[i] / errors[i + 1]) / std::log(hs[i] / hs[i + 1]));
  return rates;
}

BoundednessResult boundedness_check(const SpaceTimeDG0 &traj, double u_exact_sup) {
  BoundednessResult out;
  for (const FeFunction &s : traj.slabs)
    if (s.size() > 0)
      out.max_abs_ukh = std::max(out.max_abs_ukh, s.coefficients.cwiseAbs().maxCoeff());
  out.pass = out.max_abs_ukh <= u_exact_sup + 1.0;
  return out;
}

DeltaHRatios delta_h_ratios(const FeSpace &space, const FeFunction &w, const CgOptions &cg) {
  const FeFunction lap = space.laplacian(w, cg);
  const FeNorms wn = space.norms(w);
  const FeNorms ln = space.norms(lap);
  const double lap_l1 = space.l1_norm(lap);
  if (!(ln.l2 > 0.0) || !(lap_l1 > 0.0))
    throw std::invalid_argument("delta_h_ratios: w must be nonzero");
  return {wn.linf_nodal / ln.l2, wn.l2 / lap_l1};
}

RegularityRatios regularity_probe(std::shared_ptr<const FeSpace> space, std::shared_ptr<const TimeGrid> grid,
                                  const SpaceTimeFunction &b, double gamma, const SpaceTimeFunction &g,
                                  const SolverOptions &opts) {
  const Quadrature &quad = triangle_rule(opts.space_quad_degree);
  const int tq = opts.time_quad_points;
  const double T = grid->final_time();
  const double log_factor = std::log(T / grid->max_step());
  if (!(log_factor > 0.0))
    throw std::invalid_argument("regularity_probe: need T / k > 1");

  // data norms
  double g_l1_l2 = 0.0, g_linf_l2 = 0.0, g_l1_l1 = 0.0, b_sup = 0.0;
  for (std::size_t m = 1; m <= grid->n_slabs(); ++m) {
    const SlabRule rule = slab_rule(*grid, m, tq);
    for (double t : sample_times(*grid, m, tq)) {
      const SpatialFunction gt = [&](const Point &x) { return g(t, x); };
      g_linf_l2 = std::max(g_linf_l2, spatial_l2(*space, gt, quad));
      if (b)
        for_each_quadrature_point(space->mesh(), quad, [&](std::size_t, const Point &x, const auto &, double) {
          b_sup = std::max(b_sup, std::abs(b(t, x)));
        });
    }
    for (std::size_t q = 0; q < rule.times.size(); ++q) {
      const double t = rule.times[q];
      const SpatialFunction gt = [&](const Point &x) { return g(t, x); };
      g_l1_l2 += grid->step(m) * rule.weights[q] * spatial_l2(*space, gt, quad);
      g_l1_l1 += grid->step(m) * rule.weights[q] * spatial_l1(*space, gt, quad);
    }
  }
  if (!(g_l1_l2 > 0.0))
    throw std::invalid_argument("regularity_probe: data g vanishes");

  const SpaceTimeDG0 v = solve_linear_aux(space, grid, b, gamma, g, opts);
  const std::vector<FeFunction> jump = jumps(v);

  double v_linf_l2 = 0.0, lap_linf_l2 = 0.0, jump_max = 0.0, lap_l1_l1 = 0.0, jump_sum_l1 = 0.0;
  RegularityRatios out;
  for (std::size_t m = 1; m <= grid->n_slabs(); ++m) {
    const double k = grid->step(m);
    const FeFunction &vm = v.slab(m);
    const FeFunction lap = space->laplacian(vm, opts.cg);
    const FeNorms vn = space->norms(vm);
    const FeNorms ln = space->norms(lap);
    const double lap_l1 = space->l1_norm(lap, quad);
    v_linf_l2 = std::max(v_linf_l2, vn.l2);
    lap_linf_l2 = std::max(lap_linf_l2, ln.l2);
    lap_l1_l1 += k * lap_l1;
    jump_max = std::max(jump_max, space->norms(jump[m - 1]).l2 / k);
    jump_sum_l1 += space->l1_norm(jump[m - 1], quad);
    if (ln.l2 > 0.0 && lap_l1 > 0.0) {
      out.delta_h.linf_over_l2 = std::max(out.delta_h.linf_over_l2, vn.linf_nodal / ln.l2);
      out.delta_h.l2_over_l1 = std::max(out.delta_h.l2_over_l1, vn.l2 / lap_l1);
    }
  }

  out.log_factor = log_factor;
  out.stability_ratio = v_linf_l2 / g_l1_l2;
  out.linf_regularity_ratio = (lap_linf_l2 + jump_max) / (log_factor * (1.0 + b_sup) * g_linf_l2);
  out.l1_regularity_ratio =
      (lap_l1_l1 + jump_sum_l1) / (log_factor * log_factor * (1.0 + b_sup * b_sup) * g_l1_l1);
  return out;
}

bool ConvergenceReport::failed() const {
  return std::any_of(rows.begin(), rows.end(), [](const ConvergenceRow &r) { return r.failed; });
}

void compute_rates(ConvergenceReport &report) {
  report.eoc_l2l2.clear();
  report.eoc_linf_l2.clear();
  report.eoc_linf_linf.clear();
  const auto nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i + 1 < report.rows.size(); ++i) {
    const ConvergenceRow &a = report.rows[i];
    const ConvergenceRow &b = report.rows[i + 1];
    if (a.failed || b.failed) {
      report.eoc_l2l2.push_back(nan);
      report.eoc_linf_l2.push_back(nan);
      report.eoc_linf_linf.push_back(nan);
      continue;
    }
    const double ratio = report.rates_in_time ? a.k / b.k : a.h / b.h;
    const auto rate = [&](double ea, double eb) {
      return ea > 0.0 && eb > 0.0 ? std::log(ea / eb) / std::log(ratio) : nan;
    };
    report.eoc_l2l2.push_back(rate(a.errors.l2l2, b.errors.l2l2));
    report.eoc_linf_l2.push_back(rate(a.errors.linf_l2, b.errors.linf_l2));
    report.eoc_linf_linf.push_back(rate(a.errors.linf_linf, b.errors.linf_linf));
  }
}

} // namespace parabolic
