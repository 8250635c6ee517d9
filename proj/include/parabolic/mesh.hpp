#pragma once

#include <array>
#include <iosfwd>
#include <vector>

namespace parabolic {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

using Cell = std::array<int, 3>;

/// Conforming triangulation of the unit square (0,1)^2.
///
/// Vertices are ordered lexicographically by (y, x). Boundary vertices carry
/// homogeneous Dirichlet data and are eliminated from the degree-of-freedom
/// numbering: `vertex_to_dof[v]` is -1 for boundary vertices and a contiguous
/// index otherwise, and `dof_to_vertex` is its inverse.
struct TriMesh {
  std::vector<Point> vertices;
  std::vector<Cell> cells;
  std::vector<bool> boundary_flags;
  std::vector<int> vertex_to_dof;
  std::vector<int> dof_to_vertex;
  double h = 0.0;
  // smallest C with h <= C * sqrt(area(cell)) for every cell
  double shape_constant = 0.0;
  int level = 0;

  [[nodiscard]] std::size_t n_vertices() const { return vertices.size(); }
  [[nodiscard]] std::size_t n_cells() const { return cells.size(); }
  [[nodiscard]] std::size_t n_dofs() const { return dof_to_vertex.size(); }

  [[nodiscard]] double signed_area(std::size_t cell) const;
  [[nodiscard]] double diameter(std::size_t cell) const;
};

/// Structured mesh with n = 2^(level+1) subdivisions per side; every square
/// is split along its (i,j)-(i+1,j+1) diagonal.
TriMesh build_unit_square_mesh(int level);

/// Red refinement: each triangle is split into four congruent children via
/// its edge midpoints. The result is renumbered lexicographically.
TriMesh refine_uniform(const TriMesh &mesh);

struct DofMapping {
  std::size_t count = 0;
  std::vector<int> vertex_to_dof;
  std::vector<int> dof_to_vertex;
};

DofMapping interior_dofs(const TriMesh &mesh);

/// Structural checks: positive orientation, edge conformity, tiling of the
/// unit square, boundary classification and the quasi-uniformity bound.
/// Throws std::logic_error describing the first violation.
void check_mesh(const TriMesh &mesh);

/// Plain-text dump: "VERTICES <n> CELLS <m>", then "x y boundary_flag" per
/// vertex, then "i j k" per cell (0-based).
void write_mesh(std::ostream &out, const TriMesh &mesh);

} // namespace parabolic
