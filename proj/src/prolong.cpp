#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fsi/fem.hpp"

namespace fsi {
namespace {

// Vertex id at each lattice site (i, j), recovered from coordinates so that
// any vertex ordering works (uniform_refine appends midpoints after the
// parent vertices instead of emitting row-major order).
std::vector<int> lattice_index(const Mesh2D& mesh) {
  const GridMeta& g = mesh.grid;
  if (g.nx < 1 || g.ny < 1)
    throw std::invalid_argument("lattice_index: mesh carries no lattice metadata");
  const size_t n_sites = static_cast<size_t>(g.nx + 1) * (g.ny + 1);
  if (static_cast<size_t>(mesh.n_vertices()) != n_sites)
    throw std::invalid_argument("lattice_index: vertex count does not match lattice");

  const double hx = g.L / g.nx, hy = g.H / g.ny;
  const double tol = 1e-9 * std::max({g.L, g.H, 1.0});
  std::vector<int> idx(n_sites, -1);
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    const double x = mesh.vertices[v][0], y = mesh.vertices[v][1];
    const long i = std::lround(x / hx), j = std::lround(y / hy);
    if (i < 0 || i > g.nx || j < 0 || j > g.ny ||
        std::fabs(x - i * hx) > tol || std::fabs(y - j * hy) > tol)
      throw std::invalid_argument("lattice_index: vertex off the advertised lattice");
    int& slot = idx[static_cast<size_t>(j) * (g.nx + 1) + i];
    if (slot != -1)
      throw std::invalid_argument("lattice_index: two vertices share a lattice site");
    slot = v;
  }
  return idx;
}

double point_value_indexed(const Mesh2D& mesh, const std::vector<int>& idx,
                           const std::vector<double>& vertex_values, double x,
                           double y) {
  const GridMeta& g = mesh.grid;
  const double hx = g.L / g.nx, hy = g.H / g.ny;
  int i = std::clamp(static_cast<int>(std::floor(x / hx)), 0, g.nx - 1);
  int j = std::clamp(static_cast<int>(std::floor(y / hy)), 0, g.ny - 1);
  const double s = x / hx - i, t = y / hy - j;

  auto v = [&](int ii, int jj) {
    return vertex_values[idx[static_cast<size_t>(jj) * (g.nx + 1) + ii]];
  };
  const double f00 = v(i, j), f10 = v(i + 1, j), f01 = v(i, j + 1),
               f11 = v(i + 1, j + 1);
  // The cell is split along its bottom-left -> top-right diagonal.
  if (s >= t) return f00 + s * (f10 - f00) + t * (f11 - f10);
  return f00 + s * (f11 - f01) + t * (f01 - f00);
}

}  // namespace

double p1_point_value(const Mesh2D& mesh, const std::vector<double>& vertex_values,
                      double x, double y) {
  if (vertex_values.size() != static_cast<size_t>(mesh.n_vertices()))
    throw std::invalid_argument("p1_point_value: value vector does not match mesh");
  return point_value_indexed(mesh, lattice_index(mesh), vertex_values, x, y);
}

std::vector<double> prolong_p1_scalar(const Mesh2D& from,
                                      const std::vector<double>& values,
                                      const Mesh2D& to) {
  if (from.grid.L != to.grid.L || from.grid.H != to.grid.H)
    throw std::invalid_argument("prolong_p1_scalar: meshes cover different rectangles");
  if (values.size() != static_cast<size_t>(from.n_vertices()))
    throw std::invalid_argument("prolong_p1_scalar: value vector does not match mesh");
  const std::vector<int> idx = lattice_index(from);
  std::vector<double> out(to.n_vertices());
  for (int v = 0; v < to.n_vertices(); ++v)
    out[v] = point_value_indexed(from, idx, values, to.vertices[v][0],
                                 to.vertices[v][1]);
  return out;
}

DenseVector prolong_p1_vector(const Mesh2D& from, const DenseVector& values,
                              const Mesh2D& to) {
  if (values.size() != 2 * from.n_vertices())
    throw std::invalid_argument("prolong_p1_vector: expected interleaved vertex values");
  std::vector<double> comp(from.n_vertices());
  DenseVector out(2 * to.n_vertices());
  for (int c = 0; c < 2; ++c) {
    for (int v = 0; v < from.n_vertices(); ++v) comp[v] = values[2 * v + c];
    const auto fine = prolong_p1_scalar(from, comp, to);
    for (int v = 0; v < to.n_vertices(); ++v) out[2 * v + c] = fine[v];
  }
  return out;
}

}  // namespace fsi
