#include <cmath>
#include <stdexcept>

#include "fsi/fem.hpp"

namespace fsi {

DofMap DofMap::p1_scalar(const Mesh2D& mesh) {
  DofMap m;
  m.kind = SpaceKind::P1Scalar;
  m.n_vertices = mesh.n_vertices();
  m.n_triangles = mesh.n_triangles();
  m.n_dofs = m.n_vertices;
  return m;
}

DofMap DofMap::p1_vector(const Mesh2D& mesh) {
  DofMap m;
  m.kind = SpaceKind::P1Vector;
  m.n_vertices = mesh.n_vertices();
  m.n_triangles = mesh.n_triangles();
  m.n_dofs = 2 * m.n_vertices;
  return m;
}

DofMap DofMap::mini_velocity(const Mesh2D& mesh) {
  DofMap m;
  m.kind = SpaceKind::MiniVelocity;
  m.n_vertices = mesh.n_vertices();
  m.n_triangles = mesh.n_triangles();
  m.n_dofs = 2 * m.n_vertices + 2 * m.n_triangles;
  return m;
}

DofMap DofMap::interface_scalar(const InterfaceMesh1D& iface) {
  DofMap m;
  m.kind = SpaceKind::InterfaceScalar;
  m.n_nodes = iface.n_nodes();
  m.n_dofs = m.n_nodes;
  return m;
}

DofMap DofMap::interface_vector(const InterfaceMesh1D& iface) {
  DofMap m;
  m.kind = SpaceKind::InterfaceVector;
  m.n_nodes = iface.n_nodes();
  m.n_dofs = 2 * m.n_nodes;
  return m;
}

int DofMap::idof(int node, int comp) const {
  if (kind == SpaceKind::InterfaceScalar) {
    if (comp != 0)
      throw std::invalid_argument("idof: scalar interface space has one component");
    return node;
  }
  if (kind == SpaceKind::InterfaceVector) return 2 * node + comp;
  throw std::invalid_argument("idof: not an interface space");
}

double pressure_pulse(double t, double p_max, double t_max) {
  if (t < 0.0) throw std::invalid_argument("pressure_pulse: negative time");
  if (t > t_max) return 0.0;
  constexpr double two_pi = 6.283185307179586476925286766559;
  return 0.5 * p_max * (1.0 - std::cos(two_pi * t / t_max));
}

}  // namespace fsi
