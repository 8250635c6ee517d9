#include "parabolic/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

namespace parabolic {

namespace {

bool on_boundary(const Point &p) {
  return p.x == 0.0 || p.x == 1.0 || p.y == 0.0 || p.y == 1.0;
}

double distance(const Point &a, const Point &b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

std::pair<int, int> edge_key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

// Fills boundary flags, the DOF map, h and the shape constant.
void finalize(TriMesh &mesh) {
  mesh.boundary_flags.resize(mesh.vertices.size());
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v)
    mesh.boundary_flags[v] = on_boundary(mesh.vertices[v]);

  const DofMapping map = interior_dofs(mesh);
  mesh.vertex_to_dof = map.vertex_to_dof;
  mesh.dof_to_vertex = map.dof_to_vertex;

  mesh.h = 0.0;
  double min_area = 1.0;
  for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
    mesh.h = std::max(mesh.h, mesh.diameter(c));
    min_area = std::min(min_area, mesh.signed_area(c));
  }
  mesh.shape_constant = mesh.h / std::sqrt(min_area);
}

} // namespace

double TriMesh::signed_area(std::size_t cell) const {
  const Point &a = vertices[cells[cell][0]];
  const Point &b = vertices[cells[cell][1]];
  const Point &c = vertices[cells[cell][2]];
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

double TriMesh::diameter(std::size_t cell) const {
  const Point &a = vertices[cells[cell][0]];
  const Point &b = vertices[cells[cell][1]];
  const Point &c = vertices[cells[cell][2]];
  return std::max({distance(a, b), distance(b, c), distance(c, a)});
}

TriMesh build_unit_square_mesh(int level) {
  if (level < 0)
    throw std::invalid_argument("build_unit_square_mesh: level must be nonnegative");

  const int n = 1 << (level + 1);
  TriMesh mesh;
  mesh.level = level;
  mesh.vertices.reserve(static_cast<std::size_t>(n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      mesh.vertices.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});

  const auto id = [n](int i, int j) { return j * (n + 1) + i; };
  mesh.cells.reserve(static_cast<std::size_t>(2) * n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const int v00 = id(i, j), v10 = id(i + 1, j);
      const int v01 = id(i, j + 1), v11 = id(i + 1, j + 1);
      mesh.cells.push_back({v00, v10, v11});
      mesh.cells.push_back({v00, v11, v01});
    }

  finalize(mesh);
  check_mesh(mesh);
  return mesh;
}

TriMesh refine_uniform(const TriMesh &mesh) {
  std::vector<Point> vertices = mesh.vertices;
  std::map<std::pair<int, int>, int> midpoint;
  const auto mid = [&](int a, int b) {
    const auto key = edge_key(a, b);
    if (auto it = midpoint.find(key); it != midpoint.end())
      return it->second;
    const Point &p = vertices[a];
    const Point &q = vertices[b];
    vertices.push_back({0.5 * (p.x + q.x), 0.5 * (p.y + q.y)});
    const int idx = static_cast<int>(vertices.size()) - 1;
    midpoint.emplace(key, idx);
    return idx;
  };

  std::vector<Cell> cells;
  cells.reserve(4 * mesh.cells.size());
  for (const Cell &c : mesh.cells) {
    const int a = c[0], b = c[1], d = c[2];
    const int ab = mid(a, b), bd = mid(b, d), da = mid(d, a);
    cells.push_back({a, ab, da});
    cells.push_back({ab, b, bd});
    cells.push_back({da, bd, d});
    cells.push_back({ab, bd, da});
  }

  // renumber lexicographically by (y, x)
  std::vector<int> order(vertices.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int l, int r) {
    const Point &p = vertices[l];
    const Point &q = vertices[r];
    return p.y != q.y ? p.y < q.y : p.x < q.x;
  });
  std::vector<int> new_index(vertices.size());
  TriMesh fine;
  fine.level = mesh.level + 1;
  fine.vertices.reserve(vertices.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    new_index[order[k]] = static_cast<int>(k);
    fine.vertices.push_back(vertices[order[k]]);
  }
  fine.cells.reserve(cells.size());
  for (const Cell &c : cells)
    fine.cells.push_back({new_index[c[0]], new_index[c[1]], new_index[c[2]]});

  finalize(fine);
  check_mesh(fine);
  return fine;
}

DofMapping interior_dofs(const TriMesh &mesh) {
  DofMapping map;
  map.vertex_to_dof.assign(mesh.vertices.size(), -1);
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    if (on_boundary(mesh.vertices[v]))
      continue;
    map.vertex_to_dof[v] = static_cast<int>(map.dof_to_vertex.size());
    map.dof_to_vertex.push_back(static_cast<int>(v));
  }
  map.count = map.dof_to_vertex.size();
  return map;
}

void check_mesh(const TriMesh &mesh) {
  const auto fail = [](const std::string &what) {
    throw std::logic_error("invalid mesh: " + what);
  };

  double total_area = 0.0;
  std::map<std::pair<int, int>, int> edge_count;
  for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
    const double area = mesh.signed_area(c);
    if (!(area > 0.0))
      fail("cell " + std::to_string(c) + " is not counterclockwise");
    total_area += area;
    const Cell &t = mesh.cells[c];
    for (int e = 0; e < 3; ++e)
      ++edge_count[edge_key(t[e], t[(e + 1) % 3])];
  }
  if (std::abs(total_area - 1.0) > 1e-12)
    fail("cells do not tile the unit square");

  for (const auto &[edge, count] : edge_count) {
    const Point &p = mesh.vertices[edge.first];
    const Point &q = mesh.vertices[edge.second];
    const bool boundary_edge = (p.x == q.x && (p.x == 0.0 || p.x == 1.0)) ||
                               (p.y == q.y && (p.y == 0.0 || p.y == 1.0));
    if (count != (boundary_edge ? 1 : 2))
      fail("non-conforming edge (" + std::to_string(edge.first) + ", " +
           std::to_string(edge.second) + ")");
  }

  if (mesh.boundary_flags.size() != mesh.vertices.size())
    fail("boundary flags have wrong length");
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v)
    if (mesh.boundary_flags[v] != on_boundary(mesh.vertices[v]))
      fail("boundary flag of vertex " + std::to_string(v));

  for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
    if (mesh.diameter(c) > mesh.h)
      fail("cell diameter exceeds h");
    if (mesh.h > mesh.shape_constant * std::sqrt(mesh.signed_area(c)) * (1.0 + 1e-12))
      fail("quasi-uniformity bound violated");
  }
}

void write_mesh(std::ostream &out, const TriMesh &mesh) {
  out << "VERTICES " << mesh.vertices.size() << " CELLS " << mesh.cells.size() << '\n';
  const auto old_precision = out.precision(17);
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v)
    out << mesh.vertices[v].x << ' ' << mesh.vertices[v].y << ' '
        << (mesh.boundary_flags[v] ? 1 : 0) << '\n';
  out.precision(old_precision);
  for (const Cell &c : mesh.cells)
    out << c[0] << ' ' << c[1] << ' ' << c[2] << '\n';
}

} // namespace parabolic
