#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace parabolic {

/// Partition 0 = t_0 < t_1 < ... < t_M = T into slabs I_m = (t_{m-1}, t_m].
/// Slabs are indexed 1..M throughout the public API.
class TimeGrid {
public:
  /// Throws std::invalid_argument unless the nodes start at 0 and increase strictly.
  explicit TimeGrid(std::vector<double> nodes);

  [[nodiscard]] std::size_t n_slabs() const { return nodes_.size() - 1; }
  [[nodiscard]] double final_time() const { return nodes_.back(); }
  [[nodiscard]] double node(std::size_t m) const { return nodes_.at(m); }
  [[nodiscard]] const std::vector<double> &nodes() const { return nodes_; }
  /// k_m = t_m - t_{m-1}
  [[nodiscard]] double step(std::size_t m) const;
  [[nodiscard]] std::vector<double> steps() const;
  [[nodiscard]] double max_step() const { return k_max_; }
  [[nodiscard]] double min_step() const { return k_min_; }
  /// Slab containing t under the left-open, right-closed convention.
  [[nodiscard]] std::size_t slab_of(double t) const;

private:
  void check_slab(std::size_t m) const;

  std::vector<double> nodes_;
  double k_max_ = 0.0;
  double k_min_ = 0.0;
};

TimeGrid build_uniform_grid(double T, std::size_t M);

struct GridValidityReport {
  bool ratio_ok = true;
  double max_neighbor_ratio = 1.0;
  bool quarter_ok = false;
  bool smallness_ok = false;
  /// observed c with c^{-1} <= k_m / k_{m+1} <= c
  double c_observed = 1.0;
  /// observed k_min / k; the constants c1, c2 are not fixed, so this is reported only
  double min_over_max_step = 1.0;
};

/// Pure function of (grid, gamma, rho). Throws std::invalid_argument unless 0 < rho < 1
/// and gamma >= 0.
GridValidityReport validate_grid(const TimeGrid &grid, double gamma, double rho);

struct GaussRule {
  std::vector<double> points;  // on [-1, 1]
  std::vector<double> weights; // sum to 2
};

/// n-point Gauss-Legendre rule on [-1, 1], exact for degree 2n - 1.
GaussRule gauss_legendre(int n);

/// Quadrature nodes and weights for the slab mean over I_m: sum_q w_q v(t_q)
/// approximates (1/k_m) int_{I_m} v dt, weights sum to 1.
struct SlabRule {
  std::vector<double> times;
  std::vector<double> weights;
};

SlabRule slab_rule(const TimeGrid &grid, std::size_t m, int quad_points);

/// (P_k v)|_{I_m} by Gauss-Legendre with quad_points nodes.
double temporal_mean(const TimeGrid &grid, const std::function<double(double)> &v,
                     std::size_t m, int quad_points = 3);

/// (Pi_k v)|_{I_m} = v(t_m).
double nodal_value(const TimeGrid &grid, const std::function<double(double)> &v,
                   std::size_t m);

} // namespace parabolic
