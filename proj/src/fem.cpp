#include "parabolic/fem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace parabolic {

namespace {

// Gradients of the barycentric coordinates; constant on the cell.
std::array<std::array<double, 2>, 3> barycentric_gradients(const TriMesh &mesh, std::size_t c) {
  const Cell &t = mesh.cells[c];
  const double two_area = 2.0 * mesh.signed_area(c);
  std::array<std::array<double, 2>, 3> g{};
  for (int a = 0; a < 3; ++a) {
    const Point &p = mesh.vertices[t[(a + 1) % 3]];
    const Point &q = mesh.vertices[t[(a + 2) % 3]];
    g[a] = {(p.y - q.y) / two_area, (q.x - p.x) / two_area};
  }
  return g;
}

std::shared_ptr<const SparsityPattern> pattern_or_new(const TriMesh &mesh,
                                                      std::shared_ptr<const SparsityPattern> p) {
  return p ? std::move(p) : make_pattern(mesh);
}

// Scatters a local matrix into the interior-DOF matrix, dropping boundary rows/columns.
void scatter(const TriMesh &mesh, std::size_t c, const ElementMatrix &local, SparseMatrix &A) {
  const Cell &t = mesh.cells[c];
  for (int a = 0; a < 3; ++a) {
    const int i = mesh.vertex_to_dof[t[a]];
    if (i < 0)
      continue;
    for (int b = 0; b < 3; ++b) {
      const int j = mesh.vertex_to_dof[t[b]];
      if (j >= 0)
        A.add(i, j, local[a][b]);
    }
  }
}

} // namespace

ElementMatrix element_mass(const TriMesh &mesh, std::size_t c) {
  const double area = mesh.signed_area(c);
  ElementMatrix m{};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      m[a][b] = area * (a == b ? 2.0 : 1.0) / 12.0;
  return m;
}

ElementMatrix element_stiffness(const TriMesh &mesh, std::size_t c) {
  const double area = mesh.signed_area(c);
  const auto g = barycentric_gradients(mesh, c);
  ElementMatrix k{};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      k[a][b] = area * (g[a][0] * g[b][0] + g[a][1] * g[b][1]);
  return k;
}

std::shared_ptr<const SparsityPattern> make_pattern(const TriMesh &mesh) {
  std::vector<std::vector<int>> rows(mesh.n_dofs());
  for (const Cell &t : mesh.cells)
    for (int a = 0; a < 3; ++a) {
      const int i = mesh.vertex_to_dof[t[a]];
      if (i < 0)
        continue;
      for (int b = 0; b < 3; ++b) {
        const int j = mesh.vertex_to_dof[t[b]];
        if (j >= 0)
          rows[i].push_back(j);
      }
    }
  return std::make_shared<const SparsityPattern>(mesh.n_dofs(), rows);
}

SparseMatrix assemble_mass(const TriMesh &mesh, std::shared_ptr<const SparsityPattern> pattern) {
  SparseMatrix M(pattern_or_new(mesh, std::move(pattern)));
  for (std::size_t c = 0; c < mesh.n_cells(); ++c)
    scatter(mesh, c, element_mass(mesh, c), M);
  return M;
}

SparseMatrix assemble_stiffness(const TriMesh &mesh, std::shared_ptr<const SparsityPattern> pattern) {
  SparseMatrix K(pattern_or_new(mesh, std::move(pattern)));
  for (std::size_t c = 0; c < mesh.n_cells(); ++c)
    scatter(mesh, c, element_stiffness(mesh, c), K);
  return K;
}

void for_each_quadrature_point(
    const TriMesh &mesh, const Quadrature &quad,
    const std::function<void(std::size_t, const Point &, const std::array<double, 3> &, double)> &f) {
  for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
    const Cell &t = mesh.cells[c];
    const double area = mesh.signed_area(c);
    for (std::size_t q = 0; q < quad.points.size(); ++q) {
      const auto &l = quad.points[q];
      Point x{0.0, 0.0};
      for (int a = 0; a < 3; ++a) {
        x.x += l[a] * mesh.vertices[t[a]].x;
        x.y += l[a] * mesh.vertices[t[a]].y;
      }
      f(c, x, l, quad.weights[q] * area);
    }
  }
}

double evaluate_in_cell(const TriMesh &mesh, const FeFunction &v, std::size_t cell,
                        const std::array<double, 3> &bary) {
  const Cell &t = mesh.cells[cell];
  double u = 0.0;
  for (int a = 0; a < 3; ++a) {
    const int i = mesh.vertex_to_dof[t[a]];
    if (i >= 0)
      u += bary[a] * v.coefficients[i];
  }
  return u;
}

Vector assemble_load(const TriMesh &mesh, const SpatialFunction &g, const Quadrature &quad) {
  Vector b = Vector::Zero(static_cast<Eigen::Index>(mesh.n_dofs()));
  for_each_quadrature_point(mesh, quad, [&](std::size_t c, const Point &x, const auto &l, double w) {
    const double gx = g(x);
    const Cell &t = mesh.cells[c];
    for (int a = 0; a < 3; ++a)
      if (const int i = mesh.vertex_to_dof[t[a]]; i >= 0)
        b[i] += w * gx * l[a];
  });
  return b;
}

SparseMatrix assemble_weighted_mass(const TriMesh &mesh, const SpatialFunction &weight,
                                    const Quadrature &quad,
                                    std::shared_ptr<const SparsityPattern> pattern) {
  SparseMatrix B(pattern_or_new(mesh, std::move(pattern)));
  for_each_quadrature_point(mesh, quad, [&](std::size_t c, const Point &x, const auto &l, double w) {
    const double bx = w * weight(x);
    ElementMatrix local{};
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        local[a][b] = bx * l[a] * l[b];
    scatter(mesh, c, local, B);
  });
  return B;
}

SemilinearAssembly assemble_semilinear(const TriMesh &mesh, const FeFunction &U,
                                       const PointwiseMap &dbar, const Quadrature &quad,
                                       std::shared_ptr<const SparsityPattern> pattern) {
  SemilinearAssembly out{Vector::Zero(static_cast<Eigen::Index>(mesh.n_dofs())),
                         SparseMatrix(pattern_or_new(mesh, std::move(pattern))),
                         std::numeric_limits<double>::infinity()};
  for_each_quadrature_point(mesh, quad, [&](std::size_t c, const Point &x, const auto &l, double w) {
    const double u = evaluate_in_cell(mesh, U, c, l);
    const auto [value, derivative] = dbar(x, u);
    if (!std::isfinite(value) || !std::isfinite(derivative))
      throw NonFiniteEvaluation(x, u);
    out.min_derivative = std::min(out.min_derivative, derivative);
    const Cell &t = mesh.cells[c];
    ElementMatrix local{};
    for (int a = 0; a < 3; ++a) {
      if (const int i = mesh.vertex_to_dof[t[a]]; i >= 0)
        out.residual[i] += w * value * l[a];
      for (int b = 0; b < 3; ++b)
        local[a][b] = w * derivative * l[a] * l[b];
    }
    scatter(mesh, c, local, out.jacobian);
  });
  return out;
}

FeFunction l2_project(const TriMesh &mesh, const SpatialFunction &f, const Quadrature &quad,
                      const CgOptions &cg) {
  const SparseMatrix M = assemble_mass(mesh);
  return FeFunction(solve_spd(M, assemble_load(mesh, f, quad), cg).x);
}

FeFunction ritz_project(const TriMesh &mesh, const SpatialGradient &grad_u, const Quadrature &quad,
                        const CgOptions &cg) {
  const SparseMatrix K = assemble_stiffness(mesh);
  Vector b = Vector::Zero(static_cast<Eigen::Index>(mesh.n_dofs()));
  for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
    const auto g = barycentric_gradients(mesh, c);
    const Cell &t = mesh.cells[c];
    const double area = mesh.signed_area(c);
    for (std::size_t q = 0; q < quad.points.size(); ++q) {
      const auto &l = quad.points[q];
      Point x{0.0, 0.0};
      for (int a = 0; a < 3; ++a) {
        x.x += l[a] * mesh.vertices[t[a]].x;
        x.y += l[a] * mesh.vertices[t[a]].y;
      }
      const auto du = grad_u(x);
      const double w = quad.weights[q] * area;
      for (int a = 0; a < 3; ++a)
        if (const int i = mesh.vertex_to_dof[t[a]]; i >= 0)
          b[i] += w * (du[0] * g[a][0] + du[1] * g[a][1]);
    }
  }
  return FeFunction(solve_spd(K, b, cg).x);
}

FeFunction discrete_laplacian(const TriMesh &mesh, const FeFunction &v, const CgOptions &cg) {
  const SparseMatrix M = assemble_mass(mesh);
  const SparseMatrix K = assemble_stiffness(mesh, M.pattern_ptr());
  return FeFunction(solve_spd(M, -(K * v.coefficients), cg).x);
}

FeNorms fe_norms(const TriMesh &mesh, const FeFunction &v) {
  const SparseMatrix M = assemble_mass(mesh);
  const SparseMatrix K = assemble_stiffness(mesh, M.pattern_ptr());
  const Vector &c = v.coefficients;
  return {std::sqrt(std::max(0.0, c.dot(M * c))), std::sqrt(std::max(0.0, c.dot(K * c))),
          c.size() ? c.cwiseAbs().maxCoeff() : 0.0};
}

FeFunction interpolate(const TriMesh &mesh, const SpatialFunction &f) {
  FeFunction v = FeFunction::zero(mesh.n_dofs());
  for (std::size_t i = 0; i < mesh.n_dofs(); ++i)
    v.coefficients[static_cast<Eigen::Index>(i)] = f(mesh.vertices[mesh.dof_to_vertex[i]]);
  return v;
}

FeSpace::FeSpace(TriMesh mesh)
    : mesh_(std::move(mesh)), pattern_(make_pattern(mesh_)), mass_(assemble_mass(mesh_, pattern_)),
      stiffness_(assemble_stiffness(mesh_, pattern_)) {}

Vector FeSpace::load(const SpatialFunction &g, const Quadrature &quad) const {
  return assemble_load(mesh_, g, quad);
}

SparseMatrix FeSpace::weighted_mass(const SpatialFunction &weight, const Quadrature &quad) const {
  return assemble_weighted_mass(mesh_, weight, quad, pattern_);
}

SemilinearAssembly FeSpace::semilinear(const FeFunction &U, const PointwiseMap &dbar,
                                       const Quadrature &quad) const {
  return assemble_semilinear(mesh_, U, dbar, quad, pattern_);
}

FeFunction FeSpace::l2_project(const SpatialFunction &f, const CgOptions &cg) const {
  return FeFunction(solve_spd(mass_, load(f), cg).x);
}

FeFunction FeSpace::laplacian(const FeFunction &v, const CgOptions &cg) const {
  return FeFunction(solve_spd(mass_, -(stiffness_ * v.coefficients), cg).x);
}

FeNorms FeSpace::norms(const FeFunction &v) const {
  const Vector &c = v.coefficients;
  return {std::sqrt(std::max(0.0, c.dot(mass_ * c))), std::sqrt(std::max(0.0, c.dot(stiffness_ * c))),
          c.size() ? c.cwiseAbs().maxCoeff() : 0.0};
}

double FeSpace::l1_norm(const FeFunction &v, const Quadrature &quad) const {
  double sum = 0.0;
  for_each_quadrature_point(mesh_, quad, [&](std::size_t c, const Point &, const auto &l, double w) {
    sum += w * std::abs(evaluate_in_cell(mesh_, v, c, l));
  });
  return sum;
}

double FeSpace::evaluate(const FeFunction &v, const Point &p) const {
  constexpr double eps = 1e-12;
  for (std::size_t c = 0; c < mesh_.n_cells(); ++c) {
    const Cell &t = mesh_.cells[c];
    const Point &a = mesh_.vertices[t[0]];
    const Point &b = mesh_.vertices[t[1]];
    const Point &d = mesh_.vertices[t[2]];
    const double two_area = 2.0 * mesh_.signed_area(c);
    const double l1 = ((b.x - p.x) * (d.y - p.y) - (d.x - p.x) * (b.y - p.y)) / two_area;
    const double l2 = ((d.x - p.x) * (a.y - p.y) - (a.x - p.x) * (d.y - p.y)) / two_area;
    const double l3 = 1.0 - l1 - l2;
    if (l1 >= -eps && l2 >= -eps && l3 >= -eps)
      return evaluate_in_cell(mesh_, v, c, {l1, l2, l3});
  }
  throw std::out_of_range("FeSpace::evaluate: point outside the unit square");
}

} // namespace parabolic
