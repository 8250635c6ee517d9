#pragma once

#include "parabolic/mesh.hpp"
#include "parabolic/quadrature.hpp"
#include "parabolic/sparse.hpp"

#include <array>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>

namespace parabolic {

/// P1 function with homogeneous Dirichlet data: one coefficient per interior vertex.
struct FeFunction {
  Vector coefficients;

  FeFunction() = default;
  explicit FeFunction(Vector c) : coefficients(std::move(c)) {}
  static FeFunction zero(std::size_t n) { return FeFunction(Vector::Zero(static_cast<Eigen::Index>(n))); }

  [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(coefficients.size()); }
};

using SpatialFunction = std::function<double(const Point &)>;
using SpatialGradient = std::function<std::array<double, 2>(const Point &)>;
/// (x, u) -> (value, d/du value)
using PointwiseMap = std::function<std::pair<double, double>(const Point &, double)>;

/// Raised when a nonlinearity evaluates to inf/nan during assembly.
class NonFiniteEvaluation : public std::runtime_error {
public:
  NonFiniteEvaluation(const Point &where, double u)
      : std::runtime_error("non-finite nonlinearity at quadrature point (" + std::to_string(where.x) +
                           ", " + std::to_string(where.y) + ") with u = " + std::to_string(u)),
        where_(where), u_(u) {}
  [[nodiscard]] const Point &where() const { return where_; }
  [[nodiscard]] double u() const { return u_; }

private:
  Point where_;
  double u_;
};

/// Local P1 element matrices on cell c, indexed by the cell's local vertices.
using ElementMatrix = std::array<std::array<double, 3>, 3>;
ElementMatrix element_mass(const TriMesh &mesh, std::size_t c);
ElementMatrix element_stiffness(const TriMesh &mesh, std::size_t c);

/// Pattern of the interior-DOF P1 couplings (shared by mass, stiffness and
/// every weighted mass on the mesh).
std::shared_ptr<const SparsityPattern> make_pattern(const TriMesh &mesh);

SparseMatrix assemble_mass(const TriMesh &mesh, std::shared_ptr<const SparsityPattern> pattern = nullptr);
SparseMatrix assemble_stiffness(const TriMesh &mesh,
                                std::shared_ptr<const SparsityPattern> pattern = nullptr);
Vector assemble_load(const TriMesh &mesh, const SpatialFunction &g,
                     const Quadrature &quad = default_rule());

/// Weighted mass (b phi_j, phi_i) by quadrature.
SparseMatrix assemble_weighted_mass(const TriMesh &mesh, const SpatialFunction &weight,
                                    const Quadrature &quad = default_rule(),
                                    std::shared_ptr<const SparsityPattern> pattern = nullptr);

struct SemilinearAssembly {
  Vector residual;       // (d(x, u_h), phi_i)
  SparseMatrix jacobian; // (d_u d(x, u_h) phi_j, phi_i)
  double min_derivative = 0.0;
};

/// Throws NonFiniteEvaluation naming the offending quadrature point.
SemilinearAssembly assemble_semilinear(const TriMesh &mesh, const FeFunction &U,
                                       const PointwiseMap &dbar,
                                       const Quadrature &quad = default_rule(),
                                       std::shared_ptr<const SparsityPattern> pattern = nullptr);

FeFunction l2_project(const TriMesh &mesh, const SpatialFunction &f,
                      const Quadrature &quad = default_rule(), const CgOptions &cg = {});
FeFunction ritz_project(const TriMesh &mesh, const SpatialGradient &grad_u,
                        const Quadrature &quad = default_rule(), const CgOptions &cg = {});
/// Delta_h v, i.e. the w with M w = -K v.
FeFunction discrete_laplacian(const TriMesh &mesh, const FeFunction &v, const CgOptions &cg = {});

struct FeNorms {
  double l2 = 0.0;
  double h1_semi = 0.0;
  double linf_nodal = 0.0;
};

FeNorms fe_norms(const TriMesh &mesh, const FeFunction &v);

/// Nodal interpolant of f at the interior vertices.
FeFunction interpolate(const TriMesh &mesh, const SpatialFunction &f);

/// Cached P1 discretization of one mesh: pattern, mass and stiffness.
class FeSpace {
public:
  explicit FeSpace(TriMesh mesh);

  [[nodiscard]] const TriMesh &mesh() const { return mesh_; }
  [[nodiscard]] std::size_t n_dofs() const { return mesh_.n_dofs(); }
  [[nodiscard]] const std::shared_ptr<const SparsityPattern> &pattern() const { return pattern_; }
  [[nodiscard]] const SparseMatrix &mass() const { return mass_; }
  [[nodiscard]] const SparseMatrix &stiffness() const { return stiffness_; }

  [[nodiscard]] Vector load(const SpatialFunction &g, const Quadrature &quad = default_rule()) const;
  [[nodiscard]] SparseMatrix weighted_mass(const SpatialFunction &weight,
                                           const Quadrature &quad = default_rule()) const;
  [[nodiscard]] SemilinearAssembly semilinear(const FeFunction &U, const PointwiseMap &dbar,
                                              const Quadrature &quad = default_rule()) const;

  [[nodiscard]] FeFunction l2_project(const SpatialFunction &f, const CgOptions &cg = {}) const;
  [[nodiscard]] FeFunction laplacian(const FeFunction &v, const CgOptions &cg = {}) const;
  [[nodiscard]] FeNorms norms(const FeFunction &v) const;
  /// ||v||_{L^1} by quadrature of |v_h|.
  [[nodiscard]] double l1_norm(const FeFunction &v, const Quadrature &quad = default_rule()) const;
  /// Point evaluation; linear scan over cells.
  [[nodiscard]] double evaluate(const FeFunction &v, const Point &p) const;

private:
  TriMesh mesh_;
  std::shared_ptr<const SparsityPattern> pattern_;
  SparseMatrix mass_;
  SparseMatrix stiffness_;
};

/// Visits every quadrature point of every cell: f(cell, point, barycentric, weight * area).
void for_each_quadrature_point(
    const TriMesh &mesh, const Quadrature &quad,
    const std::function<void(std::size_t, const Point &, const std::array<double, 3> &, double)> &f);

/// Value of a P1 function at barycentric coordinates of a cell.
double evaluate_in_cell(const TriMesh &mesh, const FeFunction &v, std::size_t cell,
                        const std::array<double, 3> &bary);

} // namespace parabolic
