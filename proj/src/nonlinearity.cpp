#include "parabolic/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace parabolic {

namespace {

Nonlinearity autonomous(std::string name, std::function<double(double)> f,
                        std::function<double(double)> df, double gamma) {
  Nonlinearity d;
  d.name = std::move(name);
  d.eval = [f = std::move(f)](double, const Point &, double u) { return f(u); };
  d.deriv = [df = std::move(df)](double, const Point &, double u) { return df(u); };
  d.gamma = gamma;
  d.autonomous = true;
  return d;
}

} // namespace

Nonlinearity builtin(const std::string &name, const std::map<std::string, double> &params) {
  if (name == "zero")
    return autonomous(
        name, [](double) { return 0.0; }, [](double) { return 0.0; }, 0.0);
  if (name == "cubic")
    return autonomous(
        name, [](double u) { return u * u * u; }, [](double u) { return 3.0 * u * u; }, 0.0);
  if (name == "quintic")
    return autonomous(
        name, [](double u) { return std::pow(u, 5); }, [](double u) { return 5.0 * std::pow(u, 4); },
        0.0);
  if (name == "cubic_abs")
    return autonomous(
        name, [](double u) { return u * u * u * std::abs(u); },
        [](double u) { return 4.0 * u * u * std::abs(u); }, 0.0);
  if (name == "exp_m1")
    return autonomous(
        name, [](double u) { return std::expm1(u); }, [](double u) { return std::exp(u); }, 0.0);
  if (name == "allen_cahn") {
    const auto it = params.find("alpha");
    if (it == params.end())
      throw std::invalid_argument("allen_cahn: parameter alpha is required");
    const double alpha = it->second;
    if (!(alpha > 0.0))
      throw std::invalid_argument("allen_cahn: alpha must be positive");
    // min over u of 3u^2 - alpha is -alpha
    return autonomous(
        name, [alpha](double u) { return u * u * u - alpha * u; },
        [alpha](double u) { return 3.0 * u * u - alpha; }, alpha);
  }
  throw std::invalid_argument("unknown nonlinearity '" + name + "'");
}

Nonlinearity truncate(const Nonlinearity &d, double R) {
  if (!(R > 0.0))
    throw std::invalid_argument("truncate: R must be positive");

  Nonlinearity out = d;
  out.name = d.name + "_R";
  const NonlinearFn f = d.eval;
  const NonlinearFn df = d.deriv;
  out.eval = [f, df, R](double t, const Point &x, double u) {
    if (u > R)
      return f(t, x, R) + (u - R) * df(t, x, R);
    if (u < -R)
      return f(t, x, -R) + (u + R) * df(t, x, -R);
    return f(t, x, u);
  };
  out.deriv = [df, R](double t, const Point &x, double u) { return df(t, x, std::clamp(u, -R, R)); };
  out.truncation_radius = R;

  double bound = 0.0;
  constexpr int n = 2000;
  for (const SamplePoint &s : sample_points())
    for (int i = 0; i <= n; ++i) {
      const double u = -R + 2.0 * R * i / n;
      bound = std::max(bound, std::abs(df(s.t, s.x, u)));
    }
  out.derivative_bound = bound;
  return out;
}

PointwiseMap slab_mean(const Nonlinearity &d, const TimeGrid &grid, std::size_t m, int quad_points) {
  if (d.autonomous) {
    const double t = grid.node(m);
    return [f = d.eval, df = d.deriv, t](const Point &x, double u) {
      return std::pair{f(t, x, u), df(t, x, u)};
    };
  }
  const SlabRule rule = slab_rule(grid, m, quad_points);
  return [f = d.eval, df = d.deriv, rule](const Point &x, double u) {
    double value = 0.0, derivative = 0.0;
    for (std::size_t q = 0; q < rule.times.size(); ++q) {
      value += rule.weights[q] * f(rule.times[q], x, u);
      derivative += rule.weights[q] * df(rule.times[q], x, u);
    }
    return std::pair{value, derivative};
  };
}

std::vector<SamplePoint> sample_points(unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<SamplePoint> pts;
  for (int i = 0; i < 5; ++i) {
    const double t = unit(rng);
    const double x = unit(rng);
    const double y = unit(rng);
    pts.push_back({t, {x, y}});
  }
  return pts;
}

std::vector<double> sample_values() {
  std::vector<double> u;
  for (int i = -100; i <= 100; ++i)
    u.push_back(0.1 * i);
  return u;
}

AssumptionReport check_assumptions(const Nonlinearity &d, unsigned seed) {
  constexpr double eps = 1e-5;
  AssumptionReport report;
  report.min_derivative = std::numeric_limits<double>::infinity();
  for (const SamplePoint &s : sample_points(seed)) {
    if (d.eval(s.t, s.x, 0.0) != 0.0)
      report.vanishes_at_zero = false;
    for (double u : sample_values()) {
      const double du = d.deriv(s.t, s.x, u);
      report.min_derivative = std::min(report.min_derivative, du);
      if (du < -d.gamma)
        report.relaxed_monotone = false;
      if (d.derivative_bound && std::abs(du) > *d.derivative_bound)
        report.derivative_bounded = false;
      const double fd = (d.eval(s.t, s.x, u + eps) - d.eval(s.t, s.x, u - eps)) / (2.0 * eps);
      const double mismatch = std::abs(du - fd) / (1.0 + std::abs(du));
      report.max_fd_mismatch = std::max(report.max_fd_mismatch, mismatch);
    }
  }
  report.derivative_consistent = report.max_fd_mismatch <= 1e-6;
  return report;
}

} // namespace parabolic
