#pragma once

#include "parabolic/analysis.hpp"

#include <array>
#include <iosfwd>
#include <utility>
#include <vector>
#include <optional>
#include <stdexcept>
#include <string>

namespace parabolic {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Manufactured solution u with the derivatives needed to form the forcing.
struct MmsProblem {
  std::string name;
  SpaceTimeFunction u;
  SpaceTimeFunction u_t;
  std::function<std::array<double, 2>(double, const Point &)> grad_u;
  SpaceTimeFunction laplace_u;
  /// sup |u| over [0, T] x Omega
  double sup_abs = 0.0;

  [[nodiscard]] SpatialFunction initial() const {
    return [u = u](const Point &x) { return u(0.0, x); };
  }
};

/// Exact solutions: "eigen_decay" e^{-2 pi^2 t} s(x,y), "exp_decay" e^{-t} s(x,y),
/// "stationary" s(x,y), "zero"; s = sin(pi x) sin(pi y).
MmsProblem exact_solution(const std::string &id);

/// f = u_t - Laplace u + d(t, x, u). Throws std::invalid_argument if u has a
/// nonzero trace on sampled boundary points.
SpaceTimeFunction mms_source(const MmsProblem &exact, const Nonlinearity &d);

struct MmsCheck {
  double max_mismatch = 0.0; // max |f - (u_t - Lap u + d)_fd| / (1 + |f|)
  bool ok = false;
};

/// Compares the analytic forcing with one built from centered differences in t
/// and a Richardson-extrapolated five-point Laplacian on seeded samples.
MmsCheck check_mms(const MmsProblem &exact, const Nonlinearity &d, double T, unsigned seed,
                   double tol = 1e-8);

struct StudyConfig {
  std::string problem = "eigen";
  std::string nonlinearity = "zero";
  double alpha = 0.5;
  std::string exact = "eigen_decay";
  double T = 0.1;
  int base_level = 2;
  int levels = 4;
  std::size_t steps = 4; // M at the base level
  double sigma = 2.0;
  std::optional<double> coupling; // C in k <= C h^sigma; default k_base / h_base^sigma
  bool time_refinement = false;   // fixed mesh, M doubles per level
  double newton_tol = 1e-10;
  double cg_tol = 1e-10;
  double rho = 0.9;
  std::string out;
  unsigned seed = 1;
  bool probe = false;
  double probe_b = 0.0;
  double probe_g_scale = 1.0;

  /// Defaults of a named problem: eigen, cubic_mms, allen_cahn_mms, zero.
  static StudyConfig for_problem(const std::string &problem);
  void set(const std::string &key, const std::string &value);
  void validate() const;
  [[nodiscard]] Nonlinearity make_nonlinearity() const;
  [[nodiscard]] double coupling_constant() const;
  /// Number of slabs at a level under the k <= C h^sigma rule.
  [[nodiscard]] std::size_t steps_at(int level) const;
  [[nodiscard]] int mesh_level(int row) const;
};

using ConfigEntries = std::vector<std::pair<std::string, std::string>>;

/// Flat "key = value" lines; '#' starts a comment.
ConfigEntries read_config_entries(std::istream &in);

/// Starts from the defaults of the last "problem" entry (or "eigen") and
/// applies the remaining entries in order. Throws ConfigError.
StudyConfig build_config(const ConfigEntries &entries);

/// Writes every key so that build_config(read_config_entries(...)) restores `config`.
void write_config(std::ostream &out, const StudyConfig &config);

/// Runs every level, never throws for solver failures: a failing level is
/// recorded as a failed row and the study stops there.
ConvergenceReport run_convergence_study(const StudyConfig &config);

void write_convergence_csv(std::ostream &out, const ConvergenceReport &report);

struct ProbeRow {
  int level = 0;
  double h = 0.0;
  double k = 0.0;
  std::size_t M = 0;
  std::size_t ndof = 0;
  RegularityRatios ratios;
};

/// Regularity quotients per level for constant b = probe_b and
/// g = probe_g_scale * sin(pi x) sin(pi y).
std::vector<ProbeRow> run_probe(const StudyConfig &config);

void write_probe_csv(std::ostream &out, const std::vector<ProbeRow> &rows);

/// Seeded random smooth discrete function: nodal interpolant of a random
/// combination of sin(i pi x) sin(j pi y), 1 <= i, j <= modes.
FeFunction random_smooth_function(const TriMesh &mesh, unsigned seed, int modes = 3);

} // namespace parabolic
