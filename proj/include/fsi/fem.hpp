// Finite-element spaces (P1, MINI, P1 on a refined mesh for the inf-sup
// stable P1-iso-P2 pair), quadrature, and assembly of every bilinear form
// and load vector the coupling schemes need.
#pragma once

#include <array>
#include <vector>

#include "fsi/linsolve.hpp"
#include "fsi/mesh.hpp"

namespace fsi {

enum class SpaceKind {
  P1Scalar,         // one dof per vertex
  P1Vector,         // two dofs per vertex, interleaved (x0,y0,x1,y1,...)
  MiniVelocity,     // P1Vector plus one cubic bubble per triangle per component
  InterfaceScalar,  // one dof per interface node
  InterfaceVector,  // two dofs per interface node, interleaved
};

struct DofMap {
  SpaceKind kind = SpaceKind::P1Scalar;
  int n_vertices = 0;   // vertices of the parent 2D mesh
  int n_triangles = 0;  // for bubble dofs
  int n_nodes = 0;      // interface spaces
  int n_dofs = 0;

  static DofMap p1_scalar(const Mesh2D& mesh);
  static DofMap p1_vector(const Mesh2D& mesh);
  static DofMap mini_velocity(const Mesh2D& mesh);
  static DofMap interface_scalar(const InterfaceMesh1D& iface);
  static DofMap interface_vector(const InterfaceMesh1D& iface);

  int vdof(int vertex, int comp) const { return 2 * vertex + comp; }
  int bdof(int tri, int comp) const { return 2 * n_vertices + 2 * tri + comp; }
  int idof(int node, int comp = 0) const;
};

// A coefficient vector bound to its space.
struct Field {
  const DofMap* map = nullptr;
  DenseVector coeffs;
};

// Barycentric quadrature on the reference triangle (weights sum to 1/2).
struct QuadratureRule {
  int degree = 0;
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
};

// Gauss rule on [0,1] (weights sum to 1).
struct SegmentRule {
  int degree = 0;
  std::vector<double> points;
  std::vector<double> weights;
};

// Smallest stocked rule exact for polynomials of the given total degree.
// Triangle rules are stocked for degrees 1, 2, 4 and 6.
const QuadratureRule& triangle_rule(int degree);
const SegmentRule& segment_rule(int degree);

enum class AssemblyMode { Serial, Parallel };

// 2*mu * integral of D(u):D(phi); MINI or P1 vector spaces.
SparseMatrix assemble_fluid_stiffness(const Mesh2D& mesh, const DofMap& vel,
                                      double mu,
                                      AssemblyMode mode = AssemblyMode::Parallel);

// (B u)_q = integral of q * div(u). Pressure is P1 on `pres_mesh`, which is
// either the velocity mesh itself (MINI) or its unrefined parent (P1-iso-P2,
// children of coarse triangle k at slots 4k..4k+3).
SparseMatrix assemble_divergence(const Mesh2D& vel_mesh, const DofMap& vel,
                                 const Mesh2D& pres_mesh, const DofMap& pres,
                                 AssemblyMode mode = AssemblyMode::Parallel);

SparseMatrix assemble_mass(const Mesh2D& mesh, const DofMap& space,
                           double weight,
                           AssemblyMode mode = AssemblyMode::Parallel);
SparseMatrix assemble_mass(const InterfaceMesh1D& iface, const DofMap& space,
                           double weight);

// a_s(eta, xi) = integral over the interface of C0*eta*xi + C1*eta'*xi'.
// Returned unclamped; end conditions enter through system constraints.
SparseMatrix assemble_string_operator(const InterfaceMesh1D& iface, double C0,
                                      double C1);

// a_ts(eta, xi) = 2*mu_s D:D + lambda_s div*div + c_as eta.xi on P1 vectors.
SparseMatrix assemble_thick_elasticity(const Mesh2D& mesh, const DofMap& disp,
                                       double mu_s, double lambda_s,
                                       double c_as,
                                       AssemblyMode mode = AssemblyMode::Parallel);

// Entries integral_tag p_val * phi_i . n with n the outward normal. Schemes
// impose the traction sigma.n = -p n by subtracting this vector from the RHS.
DenseVector assemble_boundary_load(const Mesh2D& mesh, const DofMap& vel,
                                   BoundaryTag tag, double p_val);

// Nodal identification of velocity values on the interface. Scalar trace
// spaces pick the y (radial) component; vector trace spaces take both.
// Bubble dofs never appear (zero trace).
SparseMatrix trace_matrix(const DofMap& vel, const InterfaceMesh1D& iface,
                          const DofMap& trace_space);

// Global velocity dof carrying interface-trace dof `i` (the columns of
// trace_matrix as a plain index list).
std::vector<int> trace_dofs(const DofMap& vel, const InterfaceMesh1D& iface,
                            const DofMap& trace_space);

// Half-cosine inflow pulse: p_max/2 * (1 - cos(2 pi t / t_max)), 0 past t_max.
double pressure_pulse(double t, double p_max, double t_max);

// Evaluate a P1 scalar field (one value per vertex) at a point, using the
// structured-lattice metadata of its mesh. Exact for points in the closure.
double p1_point_value(const Mesh2D& mesh, const std::vector<double>& vertex_values,
                      double x, double y);

// Transfer P1 fields between structured meshes of the same rectangle by
// point evaluation at the target vertices (exact when the meshes nest).
std::vector<double> prolong_p1_scalar(const Mesh2D& from,
                                      const std::vector<double>& values,
                                      const Mesh2D& to);
DenseVector prolong_p1_vector(const Mesh2D& from, const DenseVector& values,
                              const Mesh2D& to);

}  // namespace fsi
