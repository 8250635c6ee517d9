#pragma once

#include "parabolic/dg0.hpp"

#include <string>
#include <vector>

namespace parabolic {

/// Errors in L2(I x Omega), L-inf(I; L2(Omega)) and L-inf(I x Omega).
/// The sup-norms are maxima over the declared sample sets and hence lower
/// bounds of the true suprema.
struct ErrorTriple {
  double l2l2 = 0.0;
  double linf_l2 = 0.0;
  double linf_linf = 0.0;
  std::string samples;
};

/// Time samples per slab: the Gauss points of the slab plus t_m. Space samples:
/// quadrature points of every cell plus all vertices.
ErrorTriple error_norms(const SpaceTimeFunction &u_exact, const SpaceTimeDG0 &traj, int time_quad_points = 3,
                        int space_quad_degree = 4);

/// rate_i = log(e_i / e_{i+1}) / log(h_i / h_{i+1}).
/// Throws std::invalid_argument for nonpositive entries, mismatched lengths,
/// fewer than two entries or non-decreasing hs.
std::vector<double> eoc(const std::vector<double> &errors, const std::vector<double> &hs);

struct BoundednessResult {
  double max_abs_ukh = 0.0;
  bool pass = true;
};

/// max over slabs of the nodal sup, compared with sup|u| + 1.
BoundednessResult boundedness_check(const SpaceTimeDG0 &traj, double u_exact_sup);

struct DeltaHRatios {
  double linf_over_l2 = 0.0; // ||w||_inf / ||Delta_h w||_2
  double l2_over_l1 = 0.0;   // ||w||_2 / ||Delta_h w||_1
};

DeltaHRatios delta_h_ratios(const FeSpace &space, const FeFunction &w, const CgOptions &cg = {});

struct RegularityRatios {
  double stability_ratio = 0.0;
  double linf_regularity_ratio = 0.0;
  double l1_regularity_ratio = 0.0;
  DeltaHRatios delta_h;
  double log_factor = 0.0; // ln(T / k)
};

/// Solves the linear problem for (b, g) and forms the stability and maximal
/// regularity quotients with their ln(T/k) normalizations. Throws
/// std::invalid_argument for vanishing data or T/k <= 1.
RegularityRatios regularity_probe(std::shared_ptr<const FeSpace> space, std::shared_ptr<const TimeGrid> grid,
                                  const SpaceTimeFunction &b, double gamma, const SpaceTimeFunction &g,
                                  const SolverOptions &opts = {});

struct ConvergenceRow {
  int level = 0;
  double h = 0.0;
  double k = 0.0;
  std::size_t M = 0;
  std::size_t ndof = 0;
  ErrorTriple errors;
  double max_abs_ukh = 0.0;
  bool bounded = true;
  int newton_max_iters = 0;
  int cg_max_iters = 0;
  double min_jacobian_weight = 1.0;
  bool failed = false;
  std::string failure;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  /// eoc_*[i] is the rate between rows i and i+1
  std::vector<double> eoc_l2l2;
  std::vector<double> eoc_linf_l2;
  std::vector<double> eoc_linf_linf;
  bool rates_in_time = false; // rates measured against k instead of h

  [[nodiscard]] bool failed() const;
};

/// Fills the eoc columns from the successful rows.
void compute_rates(ConvergenceReport &report);

} // namespace parabolic
