#include "parabolic/study.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace parabolic {

namespace {

constexpr double pi = std::numbers::pi;

double sinsin(const Point &x) { return std::sin(pi * x.x) * std::sin(pi * x.y); }

std::string fmt(double v) {
  if (std::isnan(v))
    return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// u(t, x) = a(t) s(x, y) with s = sin(pi x) sin(pi y)
MmsProblem separable(std::string name, std::function<double(double)> a, std::function<double(double)> da,
                     double sup_abs) {
  MmsProblem p;
  p.name = std::move(name);
  p.u = [a](double t, const Point &x) { return a(t) * sinsin(x); };
  p.u_t = [da](double t, const Point &x) { return da(t) * sinsin(x); };
  p.grad_u = [a](double t, const Point &x) -> std::array<double, 2> {
    return {a(t) * pi * std::cos(pi * x.x) * std::sin(pi * x.y),
            a(t) * pi * std::sin(pi * x.x) * std::cos(pi * x.y)};
  };
  p.laplace_u = [a](double t, const Point &x) { return -2.0 * pi * pi * a(t) * sinsin(x); };
  p.sup_abs = sup_abs;
  return p;
}

double parse_double(const std::string &key, const std::string &value) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception &) {
    throw ConfigError("config: '" + key + "' expects a number, got '" + value + "'");
  }
  if (pos != value.size() || !std::isfinite(v))
    throw ConfigError("config: '" + key + "' expects a finite number, got '" + value + "'");
  return v;
}

long long parse_int(const std::string &key, const std::string &value) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(value, &pos);
  } catch (const std::exception &) {
    throw ConfigError("config: '" + key + "' expects an integer, got '" + value + "'");
  }
  if (pos != value.size())
    throw ConfigError("config: '" + key + "' expects an integer, got '" + value + "'");
  return v;
}

bool parse_bool(const std::string &key, const std::string &value) {
  if (value == "true" || value == "1")
    return true;
  if (value == "false" || value == "0")
    return false;
  throw ConfigError("config: '" + key + "' expects true or false, got '" + value + "'");
}

std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

SolverOptions solver_options(const StudyConfig &c) {
  SolverOptions opts;
  opts.newton_tol = c.newton_tol;
  opts.rho = c.rho;
  opts.cg.tol = c.cg_tol;
  return opts;
}

// Checks k <= T/4, k <= rho/gamma and k <= C h^sigma for every level of the study.
void check_grids(const StudyConfig &c, double gamma) {
  const double C = c.coupling_constant();
  for (int row = 0; row < c.levels; ++row) {
    const int level = c.mesh_level(row);
    const std::size_t M = c.steps_at(row);
    const TimeGrid grid = build_uniform_grid(c.T, M);
    const GridValidityReport rep = validate_grid(grid, gamma, c.rho);
    const std::string where = "level " + std::to_string(level) + " (M = " + std::to_string(M) + ")";
    if (!rep.quarter_ok)
      throw ConfigError("grid at " + where + " violates k <= T/4");
    if (!rep.smallness_ok)
      throw ConfigError("grid at " + where + " violates k <= rho/gamma");
    const double h = build_unit_square_mesh(level).h;
    if (grid.max_step() > C * std::pow(h, c.sigma) * (1.0 + 1e-9))
      throw ConfigError("grid at " + where + " violates k <= C h^sigma");
  }
}

} // namespace

MmsProblem exact_solution(const std::string &id) {
  if (id == "eigen_decay") {
    const double lambda = 2.0 * pi * pi;
    return separable(
        id, [lambda](double t) { return std::exp(-lambda * t); },
        [lambda](double t) { return -lambda * std::exp(-lambda * t); }, 1.0);
  }
  if (id == "exp_decay")
    return separable(
        id, [](double t) { return std::exp(-t); }, [](double t) { return -std::exp(-t); }, 1.0);
  if (id == "stationary")
    return separable(
        id, [](double) { return 1.0; }, [](double) { return 0.0; }, 1.0);
  if (id == "zero")
    return separable(
        id, [](double) { return 0.0; }, [](double) { return 0.0; }, 0.0);
  throw std::invalid_argument("unknown exact solution '" + id + "'");
}

SpaceTimeFunction mms_source(const MmsProblem &exact, const Nonlinearity &d) {
  for (double t : {0.0, 0.25, 0.5, 1.0})
    for (int i = 0; i <= 10; ++i) {
      const double s = 0.1 * i;
      for (const Point &p : {Point{s, 0.0}, Point{s, 1.0}, Point{0.0, s}, Point{1.0, s}})
        if (std::abs(exact.u(t, p)) > 1e-12)
          throw std::invalid_argument("mms_source: exact solution '" + exact.name +
                                      "' has a nonzero boundary trace");
    }
  return [u = exact.u, u_t = exact.u_t, lap = exact.laplace_u, d](double t, const Point &x) {
    return u_t(t, x) - lap(t, x) + d(t, x, u(t, x));
  };
}

MmsCheck check_mms(const MmsProblem &exact, const Nonlinearity &d, double T, unsigned seed, double tol) {
  const SpaceTimeFunction f = mms_source(exact, d);
  const auto &u = exact.u;
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> ut(0.1 * T, 0.9 * T);
  std::uniform_real_distribution<double> ux(0.1, 0.9);

  const auto dt = [&](double t, const Point &x, double e) { return (u(t + e, x) - u(t - e, x)) / (2.0 * e); };
  const auto lap = [&](double t, const Point &x, double e) {
    return (u(t, {x.x + e, x.y}) + u(t, {x.x - e, x.y}) + u(t, {x.x, x.y + e}) + u(t, {x.x, x.y - e}) -
            4.0 * u(t, x)) /
           (e * e);
  };

  MmsCheck out;
  for (int s = 0; s < 50; ++s) {
    const double t = ut(gen);
    const Point x{ux(gen), ux(gen)};
    const double et = 2e-4, ex = 2e-3;
    const double u_t = (4.0 * dt(t, x, et / 2) - dt(t, x, et)) / 3.0;
    const double lap_u = (4.0 * lap(t, x, ex / 2) - lap(t, x, ex)) / 3.0;
    const double fv = f(t, x);
    const double mismatch = std::abs(fv - (u_t - lap_u + d(t, x, u(t, x)))) / (1.0 + std::abs(fv));
    out.max_mismatch = std::max(out.max_mismatch, mismatch);
  }
  out.ok = out.max_mismatch <= tol;
  return out;
}

StudyConfig StudyConfig::for_problem(const std::string &problem) {
  StudyConfig c;
  c.problem = problem;
  if (problem == "eigen") {
    c.exact = "eigen_decay";
    c.nonlinearity = "zero";
    c.T = 0.1;
    c.base_level = 2;
    c.levels = 4;
    c.steps = 4;
  } else if (problem == "cubic_mms") {
    c.exact = "exp_decay";
    c.nonlinearity = "cubic";
    c.T = 1.0;
    c.base_level = 2;
    c.levels = 4;
    c.steps = 8;
  } else if (problem == "allen_cahn_mms") {
    c.exact = "exp_decay";
    c.nonlinearity = "allen_cahn";
    c.alpha = 0.5;
    c.T = 1.0;
    c.base_level = 5;
    c.levels = 4;
    c.steps = 8;
    c.time_refinement = true;
  } else if (problem == "zero") {
    c.exact = "zero";
    c.nonlinearity = "zero";
    c.T = 0.1;
    c.base_level = 1;
    c.levels = 3;
    c.steps = 4;
  } else {
    throw ConfigError("unknown problem '" + problem + "'");
  }
  return c;
}

void StudyConfig::set(const std::string &key, const std::string &value) {
  if (key == "problem")
    problem = value;
  else if (key == "nonlinearity")
    nonlinearity = value;
  else if (key == "alpha")
    alpha = parse_double(key, value);
  else if (key == "exact")
    exact = value;
  else if (key == "T")
    T = parse_double(key, value);
  else if (key == "base_level")
    base_level = static_cast<int>(parse_int(key, value));
  else if (key == "levels")
    levels = static_cast<int>(parse_int(key, value));
  else if (key == "steps") {
    const long long v = parse_int(key, value);
    if (v < 1)
      throw ConfigError("config: steps must be positive");
    steps = static_cast<std::size_t>(v);
  } else if (key == "sigma")
    sigma = parse_double(key, value);
  else if (key == "coupling") {
    if (value.empty() || value == "auto")
      coupling.reset();
    else
      coupling = parse_double(key, value);
  } else if (key == "time_refinement")
    time_refinement = parse_bool(key, value);
  else if (key == "newton_tol")
    newton_tol = parse_double(key, value);
  else if (key == "cg_tol")
    cg_tol = parse_double(key, value);
  else if (key == "rho")
    rho = parse_double(key, value);
  else if (key == "out")
    out = value;
  else if (key == "seed") {
    const long long v = parse_int(key, value);
    if (v < 0 || v > std::numeric_limits<unsigned>::max())
      throw ConfigError("config: seed out of range");
    seed = static_cast<unsigned>(v);
  } else if (key == "probe")
    probe = parse_bool(key, value);
  else if (key == "probe_b")
    probe_b = parse_double(key, value);
  else if (key == "probe_g_scale")
    probe_g_scale = parse_double(key, value);
  else
    throw ConfigError("config: unknown key '" + key + "'");
}

void StudyConfig::validate() const {
  if (levels < 2)
    throw ConfigError("config: levels must be at least 2");
  if (!(sigma > 0.0))
    throw ConfigError("config: sigma must be positive");
  if (!(T > 0.0))
    throw ConfigError("config: T must be positive");
  if (base_level < 0 || base_level + levels - 1 > 8)
    throw ConfigError("config: mesh levels must lie in [0, 8]");
  if (steps < 1)
    throw ConfigError("config: steps must be positive");
  if (coupling && !(*coupling > 0.0))
    throw ConfigError("config: coupling must be positive");
  if (!(newton_tol > 0.0) || !(cg_tol > 0.0))
    throw ConfigError("config: tolerances must be positive");
  if (!(rho > 0.0 && rho < 1.0))
    throw ConfigError("config: rho must lie in (0, 1)");
  if (!(probe_g_scale != 0.0))
    throw ConfigError("config: probe_g_scale must be nonzero");
  try {
    (void)exact_solution(exact);
    (void)make_nonlinearity();
  } catch (const std::invalid_argument &e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

Nonlinearity StudyConfig::make_nonlinearity() const {
  if (nonlinearity == "allen_cahn")
    return builtin(nonlinearity, {{"alpha", alpha}});
  return builtin(nonlinearity);
}

double StudyConfig::coupling_constant() const {
  if (coupling)
    return *coupling;
  const double h = build_unit_square_mesh(base_level).h;
  return (T / static_cast<double>(steps)) / std::pow(h, sigma);
}

int StudyConfig::mesh_level(int row) const { return time_refinement ? base_level : base_level + row; }

std::size_t StudyConfig::steps_at(int row) const {
  if (time_refinement)
    return steps << row;
  const double h = build_unit_square_mesh(mesh_level(row)).h;
  const double x = T / (coupling_constant() * std::pow(h, sigma));
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(x * (1.0 - 1e-12))));
}

ConfigEntries read_config_entries(std::istream &in) {
  ConfigEntries entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    line = trim(line);
    if (line.empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    entries.emplace_back(std::move(key), trim(line.substr(eq + 1)));
  }
  return entries;
}

StudyConfig build_config(const ConfigEntries &entries) {
  std::string problem = "eigen";
  for (const auto &[k, v] : entries)
    if (k == "problem")
      problem = v;
  StudyConfig c = StudyConfig::for_problem(problem);
  for (const auto &[k, v] : entries)
    if (k != "problem")
      c.set(k, v);
  return c;
}

void write_config(std::ostream &out, const StudyConfig &c) {
  out << "problem = " << c.problem << '\n'
      << "nonlinearity = " << c.nonlinearity << '\n'
      << "alpha = " << fmt(c.alpha) << '\n'
      << "exact = " << c.exact << '\n'
      << "T = " << fmt(c.T) << '\n'
      << "base_level = " << c.base_level << '\n'
      << "levels = " << c.levels << '\n'
      << "steps = " << c.steps << '\n'
      << "sigma = " << fmt(c.sigma) << '\n'
      << "coupling = " << (c.coupling ? fmt(*c.coupling) : std::string("auto")) << '\n'
      << "time_refinement = " << (c.time_refinement ? "true" : "false") << '\n'
      << "newton_tol = " << fmt(c.newton_tol) << '\n'
      << "cg_tol = " << fmt(c.cg_tol) << '\n'
      << "rho = " << fmt(c.rho) << '\n'
      << "out = " << c.out << '\n'
      << "seed = " << c.seed << '\n'
      << "probe = " << (c.probe ? "true" : "false") << '\n'
      << "probe_b = " << fmt(c.probe_b) << '\n'
      << "probe_g_scale = " << fmt(c.probe_g_scale) << '\n';
}

ConvergenceReport run_convergence_study(const StudyConfig &config) {
  config.validate();
  const Nonlinearity d = config.make_nonlinearity();
  const MmsProblem exact = exact_solution(config.exact);
  check_grids(config, d.gamma);
  const SpaceTimeFunction f = mms_source(exact, d);
  const SolverOptions opts = solver_options(config);

  ConvergenceReport report;
  report.rates_in_time = config.time_refinement;
  for (int row = 0; row < config.levels; ++row) {
    ConvergenceRow r;
    r.level = config.mesh_level(row);
    r.M = config.steps_at(row);
    auto space = std::make_shared<const FeSpace>(build_unit_square_mesh(r.level));
    auto grid = std::make_shared<const TimeGrid>(build_uniform_grid(config.T, r.M));
    r.h = space->mesh().h;
    r.k = grid->max_step();
    r.ndof = space->n_dofs();
    try {
      const MarchResult res = march(space, grid, d, f, exact.initial(), opts);
      r.errors = error_norms(exact.u, res.solution, opts.time_quad_points, opts.space_quad_degree);
      const BoundednessResult b = boundedness_check(res.solution, exact.sup_abs);
      r.max_abs_ukh = b.max_abs_ukh;
      r.bounded = b.pass;
      r.newton_max_iters = res.report.max_iterations();
      r.cg_max_iters = res.report.max_cg_iterations();
      r.min_jacobian_weight = res.report.min_jacobian_weight();
    } catch (const std::exception &e) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      r.failed = true;
      r.failure = e.what();
      r.errors.l2l2 = r.errors.linf_l2 = r.errors.linf_linf = nan;
      r.max_abs_ukh = nan;
      r.bounded = false;
      report.rows.push_back(std::move(r));
      break;
    }
    report.rows.push_back(std::move(r));
  }
  compute_rates(report);
  return report;
}

void write_convergence_csv(std::ostream &out, const ConvergenceReport &report) {
  out << "level,h,k,M,ndof,err_l2l2,err_linfl2,err_linflinf,eoc_l2l2,eoc_linfl2,eoc_linflinf,"
         "max_abs_ukh,newton_max_iters,cg_max_iters\n";
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const ConvergenceRow &r = report.rows[i];
    out << r.level << ',' << fmt(r.h) << ',' << fmt(r.k) << ',' << r.M << ',' << r.ndof << ','
        << fmt(r.errors.l2l2) << ',' << fmt(r.errors.linf_l2) << ',' << fmt(r.errors.linf_linf) << ',';
    if (i == 0)
      out << ",,,";
    else
      out << fmt(report.eoc_l2l2[i - 1]) << ',' << fmt(report.eoc_linf_l2[i - 1]) << ','
          << fmt(report.eoc_linf_linf[i - 1]) << ',';
    out << fmt(r.max_abs_ukh) << ',';
    if (r.failed)
      out << ",\n";
    else
      out << r.newton_max_iters << ',' << r.cg_max_iters << '\n';
  }
}

std::vector<ProbeRow> run_probe(const StudyConfig &config) {
  config.validate();
  const double gamma = std::max(0.0, -config.probe_b);
  check_grids(config, gamma);
  const SolverOptions opts = solver_options(config);
  const double b0 = config.probe_b;
  const double scale = config.probe_g_scale;
  const SpaceTimeFunction b = [b0](double, const Point &) { return b0; };
  const SpaceTimeFunction g = [scale](double, const Point &x) { return scale * sinsin(x); };

  std::vector<ProbeRow> rows;
  for (int row = 0; row < config.levels; ++row) {
    ProbeRow p;
    p.level = config.mesh_level(row);
    p.M = config.steps_at(row);
    auto space = std::make_shared<const FeSpace>(build_unit_square_mesh(p.level));
    auto grid = std::make_shared<const TimeGrid>(build_uniform_grid(config.T, p.M));
    p.h = space->mesh().h;
    p.k = grid->max_step();
    p.ndof = space->n_dofs();
    p.ratios = regularity_probe(space, grid, b, gamma, g, opts);
    rows.push_back(p);
  }
  return rows;
}

void write_probe_csv(std::ostream &out, const std::vector<ProbeRow> &rows) {
  out << "level,h,k,M,ndof,stability_ratio,linf_regularity_ratio,l1_regularity_ratio,deltaH_linf_l2,deltaH_l2_l1\n";
  for (const ProbeRow &p : rows)
    out << p.level << ',' << fmt(p.h) << ',' << fmt(p.k) << ',' << p.M << ',' << p.ndof << ','
        << fmt(p.ratios.stability_ratio) << ',' << fmt(p.ratios.linf_regularity_ratio) << ',' << fmt(p.ratios.l1_regularity_ratio)
        << ',' << fmt(p.ratios.delta_h.linf_over_l2) << ',' << fmt(p.ratios.delta_h.l2_over_l1) << '\n';
}

FeFunction random_smooth_function(const TriMesh &mesh, unsigned seed, int modes) {
  if (modes < 1)
    throw std::invalid_argument("random_smooth_function: modes must be positive");
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::vector<double> a(static_cast<std::size_t>(modes * modes));
  for (double &c : a)
    c = coef(gen);
  FeFunction w = FeFunction::zero(mesh.n_dofs());
  for (std::size_t i = 0; i < mesh.n_dofs(); ++i) {
    const Point &p = mesh.vertices[mesh.dof_to_vertex[i]];
    double v = 0.0;
    for (int m = 1; m <= modes; ++m)
      for (int n = 1; n <= modes; ++n)
        v += a[(m - 1) * modes + (n - 1)] * std::sin(m * pi * p.x) * std::sin(n * pi * p.y);
    w.coefficients[static_cast<Eigen::Index>(i)] = v;
  }
  return w;
}

} // namespace parabolic
