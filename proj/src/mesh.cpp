#include "fsi/mesh.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>

namespace fsi {

const char* to_string(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::Inlet: return "INLET";
    case BoundaryTag::Outlet: return "OUTLET";
    case BoundaryTag::Interface: return "INTERFACE";
    case BoundaryTag::Bottom: return "BOTTOM";
    case BoundaryTag::StructureOuter: return "STRUCTURE_OUTER";
  }
  return "?";
}

double Mesh2D::triangle_area(int t) const {
  const auto& tri = triangles[t];
  const auto& a = vertices[tri[0]];
  const auto& b = vertices[tri[1]];
  const auto& c = vertices[tri[2]];
  return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

double Mesh2D::total_area() const {
  double s = 0.0;
  for (int t = 0; t < n_triangles(); ++t) s += triangle_area(t);
  return s;
}

Mesh2D build_rectangle_mesh(double L, double H, int nx, int ny,
                            const RectTags& tags) {
  if (L <= 0.0 || H <= 0.0)
    throw std::invalid_argument("build_rectangle_mesh: dimensions must be positive");
  if (nx < 1 || ny < 1)
    throw std::invalid_argument("build_rectangle_mesh: cell counts must be >= 1");

  Mesh2D mesh;
  mesh.grid = {nx, ny, L, H};
  mesh.vertices.reserve((nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j) {
    // Pin the far row/column to exactly H and L so that interface nodes of
    // separately built blocks coincide bitwise.
    const double y = (j == ny) ? H : (H * j) / ny;
    for (int i = 0; i <= nx; ++i) {
      const double x = (i == nx) ? L : (L * i) / nx;
      mesh.vertices.push_back({x, y});
    }
  }

  auto v = [nx](int i, int j) { return j * (nx + 1) + i; };

  mesh.triangles.reserve(2 * nx * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      // Fixed bottom-left -> top-right diagonal in every cell.
      mesh.triangles.push_back({v(i, j), v(i + 1, j), v(i + 1, j + 1)});
      mesh.triangles.push_back({v(i, j), v(i + 1, j + 1), v(i, j + 1)});
    }

  for (int i = 0; i < nx; ++i) {
    mesh.boundary_edges.push_back({v(i, 0), v(i + 1, 0), tags.bottom});
    mesh.boundary_edges.push_back({v(i, ny), v(i + 1, ny), tags.top});
  }
  for (int j = 0; j < ny; ++j) {
    mesh.boundary_edges.push_back({v(0, j), v(0, j + 1), tags.left});
    mesh.boundary_edges.push_back({v(nx, j), v(nx, j + 1), tags.right});
  }
  return mesh;
}

InterfaceMesh1D extract_interface(const Mesh2D& mesh) {
  std::vector<char> on_interface(mesh.n_vertices(), 0);
  bool any = false;
  for (const auto& e : mesh.boundary_edges)
    if (e.tag == BoundaryTag::Interface) {
      on_interface[e.a] = on_interface[e.b] = 1;
      any = true;
    }
  if (!any)
    throw std::runtime_error("extract_interface: mesh has no INTERFACE-tagged edges");

  InterfaceMesh1D iface;
  for (int vi = 0; vi < mesh.n_vertices(); ++vi)
    if (on_interface[vi]) iface.parent_vertex.push_back(vi);
  std::sort(iface.parent_vertex.begin(), iface.parent_vertex.end(),
            [&](int a, int b) { return mesh.vertices[a][0] < mesh.vertices[b][0]; });
  iface.nodes.reserve(iface.parent_vertex.size());
  for (int vi : iface.parent_vertex) iface.nodes.push_back(mesh.vertices[vi][0]);
  for (size_t k = 1; k < iface.nodes.size(); ++k)
    if (!(iface.nodes[k] > iface.nodes[k - 1]))
      throw std::runtime_error("extract_interface: interface nodes not strictly increasing in x");
  return iface;
}

Mesh2D uniform_refine(const Mesh2D& mesh) {
  Mesh2D fine;
  fine.grid = {2 * mesh.grid.nx, 2 * mesh.grid.ny, mesh.grid.L, mesh.grid.H};
  fine.vertices = mesh.vertices;

  std::map<std::pair<int, int>, int> midpoint;  // sorted vertex pair -> new vertex
  auto mid = [&](int a, int b) {
    auto key = std::minmax(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    const auto& pa = mesh.vertices[a];
    const auto& pb = mesh.vertices[b];
    int idx = static_cast<int>(fine.vertices.size());
    fine.vertices.push_back({0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])});
    midpoint.emplace(key, idx);
    return idx;
  };

  fine.triangles.reserve(4 * mesh.n_triangles());
  for (const auto& tri : mesh.triangles) {
    const int a = tri[0], b = tri[1], c = tri[2];
    const int ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
    fine.triangles.push_back({a, ab, ca});
    fine.triangles.push_back({b, bc, ab});
    fine.triangles.push_back({c, ca, bc});
    fine.triangles.push_back({ab, bc, ca});
  }

  for (const auto& e : mesh.boundary_edges) {
    const int m = mid(e.a, e.b);
    fine.boundary_edges.push_back({e.a, m, e.tag});
    fine.boundary_edges.push_back({m, e.b, e.tag});
  }
  return fine;
}

std::vector<std::pair<int, int>> boundary_edge_owners(const Mesh2D& mesh) {
  std::map<std::pair<int, int>, std::pair<int, int>> owner;  // edge -> (tri, opp)
  std::map<std::pair<int, int>, int> count;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      auto key = std::minmax(tri[k], tri[(k + 1) % 3]);
      owner[key] = {t, tri[(k + 2) % 3]};
      ++count[key];
    }
  }
  std::vector<std::pair<int, int>> result;
  result.reserve(mesh.boundary_edges.size());
  for (const auto& e : mesh.boundary_edges) {
    auto key = std::minmax(e.a, e.b);
    auto it = count.find(key);
    if (it == count.end() || it->second != 1)
      throw std::runtime_error("boundary edge (" + std::to_string(e.a) + "," +
                               std::to_string(e.b) +
                               ") is not owned by exactly one triangle");
    result.push_back(owner[key]);
  }
  return result;
}

void write_mesh(std::ostream& os, const Mesh2D& mesh) {
  char buf[128];
  os << "vertices " << mesh.n_vertices() << "\n";
  for (const auto& p : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", p[0], p[1]);
    os << buf;
  }
  os << "triangles " << mesh.n_triangles() << "\n";
  for (const auto& t : mesh.triangles)
    os << t[0] << ' ' << t[1] << ' ' << t[2] << "\n";
  os << "boundary " << mesh.boundary_edges.size() << "\n";
  for (const auto& e : mesh.boundary_edges)
    os << e.a << ' ' << e.b << ' ' << to_string(e.tag) << "\n";
}

}  // namespace fsi
