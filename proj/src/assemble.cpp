#include <cmath>
#include <cstring>
#include <stdexcept>

#include "fsi/fem.hpp"

namespace fsi {
namespace {

struct TriGeom {
  double px[3], py[3];
  double area;
  double gx[3], gy[3];  // gradients of the vertex hat functions
};

TriGeom tri_geom(const Mesh2D& mesh, int t) {
  TriGeom g;
  const auto& tri = mesh.triangles[t];
  for (int k = 0; k < 3; ++k) {
    g.px[k] = mesh.vertices[tri[k]][0];
    g.py[k] = mesh.vertices[tri[k]][1];
  }
  const double two_a = (g.px[1] - g.px[0]) * (g.py[2] - g.py[0]) -
                       (g.px[2] - g.px[0]) * (g.py[1] - g.py[0]);
  g.area = 0.5 * two_a;
  for (int k = 0; k < 3; ++k) {
    const int k1 = (k + 1) % 3, k2 = (k + 2) % 3;
    g.gx[k] = (g.py[k1] - g.py[k2]) / two_a;
    g.gy[k] = (g.px[k2] - g.px[k1]) / two_a;
  }
  return g;
}

void require_velocity_space(const DofMap& vel, const Mesh2D& mesh,
                            const char* who) {
  if (vel.kind != SpaceKind::MiniVelocity && vel.kind != SpaceKind::P1Vector)
    throw std::invalid_argument(std::string(who) + ": velocity space must be MINI or P1 vector");
  if (vel.n_vertices != mesh.n_vertices() || vel.n_triangles != mesh.n_triangles())
    throw std::invalid_argument(std::string(who) + ": dof map does not match mesh");
}

// Shared element loop: compute per-element local matrices (parallel in
// Parallel mode), then scatter serially in element order so the result is
// bitwise independent of the thread count.
template <typename LocalFn>
SparseMatrix assemble_cellwise(const Mesh2D& mesh, int n_rows, int n_cols,
                               int n_local_r, int n_local_c, AssemblyMode mode,
                               LocalFn&& local_fn) {
  const int nt = mesh.n_triangles();
  const int block = n_local_r * n_local_c;
  std::vector<double> locals(static_cast<size_t>(nt) * block);
  std::vector<int> rows(static_cast<size_t>(nt) * n_local_r);
  std::vector<int> cols(static_cast<size_t>(nt) * n_local_c);

  const bool par = (mode == AssemblyMode::Parallel);
#pragma omp parallel for schedule(static) if (par)
  for (int t = 0; t < nt; ++t)
    local_fn(t, &locals[static_cast<size_t>(t) * block],
             &rows[static_cast<size_t>(t) * n_local_r],
             &cols[static_cast<size_t>(t) * n_local_c]);

  std::vector<Triplet> trips;
  trips.reserve(locals.size());
  for (int t = 0; t < nt; ++t) {
    const double* lm = &locals[static_cast<size_t>(t) * block];
    const int* lr = &rows[static_cast<size_t>(t) * n_local_r];
    const int* lc = &cols[static_cast<size_t>(t) * n_local_c];
    for (int i = 0; i < n_local_r; ++i)
      for (int j = 0; j < n_local_c; ++j)
        trips.push_back({lr[i], lc[j], lm[i * n_local_c + j]});
  }
  return SparseMatrix::from_triplets(n_rows, n_cols, std::move(trips));
}

// Scalar shape values and gradients at one barycentric point; P1 hats plus
// an optional cubic bubble (27*l0*l1*l2, unit value at the centroid).
void shape_at(const TriGeom& g, const std::array<double, 3>& bc, bool bubble,
              double* val, double* dx, double* dy) {
  for (int k = 0; k < 3; ++k) {
    val[k] = bc[k];
    dx[k] = g.gx[k];
    dy[k] = g.gy[k];
  }
  if (bubble) {
    val[3] = 27.0 * bc[0] * bc[1] * bc[2];
    dx[3] = 27.0 * (bc[1] * bc[2] * g.gx[0] + bc[0] * bc[2] * g.gx[1] +
                    bc[0] * bc[1] * g.gx[2]);
    dy[3] = 27.0 * (bc[1] * bc[2] * g.gy[0] + bc[0] * bc[2] * g.gy[1] +
                    bc[0] * bc[1] * g.gy[2]);
  }
}

}  // namespace

SparseMatrix assemble_fluid_stiffness(const Mesh2D& mesh, const DofMap& vel,
                                      double mu, AssemblyMode mode) {
  require_velocity_space(vel, mesh, "assemble_fluid_stiffness");
  const bool mini = (vel.kind == SpaceKind::MiniVelocity);
  const int ns = mini ? 4 : 3;  // scalar shapes per element
  const int nl = 2 * ns;
  // Bubble-gradient products have total degree 4; pure P1 needs degree 0.
  const QuadratureRule& rule = triangle_rule(mini ? 4 : 2);

  auto local = [&](int t, double* lm, int* lr, int* lc) {
    const TriGeom g = tri_geom(mesh, t);
    std::memset(lm, 0, sizeof(double) * nl * nl);
    double val[4], dx[4], dy[4];
    for (size_t q = 0; q < rule.points.size(); ++q) {
      shape_at(g, rule.points[q], mini, val, dx, dy);
      const double w = rule.weights[q] * 2.0 * g.area;
      for (int a = 0; a < ns; ++a)
        for (int b = 0; b < ns; ++b) {
          // 2*mu * D(N_a e_c) : D(N_b e_d)
          const double xx = 2.0 * mu * (dx[a] * dx[b] + 0.5 * dy[a] * dy[b]);
          const double xy = mu * dy[a] * dx[b];
          const double yx = mu * dx[a] * dy[b];
          const double yy = 2.0 * mu * (dy[a] * dy[b] + 0.5 * dx[a] * dx[b]);
          lm[(2 * a + 0) * nl + 2 * b + 0] += w * xx;
          lm[(2 * a + 0) * nl + 2 * b + 1] += w * xy;
          lm[(2 * a + 1) * nl + 2 * b + 0] += w * yx;
          lm[(2 * a + 1) * nl + 2 * b + 1] += w * yy;
        }
    }
    const auto& tri = mesh.triangles[t];
    for (int a = 0; a < 3; ++a)
      for (int c = 0; c < 2; ++c) lr[2 * a + c] = vel.vdof(tri[a], c);
    if (mini)
      for (int c = 0; c < 2; ++c) lr[6 + c] = vel.bdof(t, c);
    std::memcpy(lc, lr, sizeof(int) * nl);
  };
  return assemble_cellwise(mesh, vel.n_dofs, vel.n_dofs, nl, nl, mode, local);
}

SparseMatrix assemble_divergence(const Mesh2D& vel_mesh, const DofMap& vel,
                                 const Mesh2D& pres_mesh, const DofMap& pres,
                                 AssemblyMode mode) {
  require_velocity_space(vel, vel_mesh, "assemble_divergence");
  if (pres.kind != SpaceKind::P1Scalar)
    throw std::invalid_argument("assemble_divergence: pressure space must be P1 scalar");
  const bool same_mesh = (&vel_mesh == &pres_mesh) ||
                         (vel_mesh.n_triangles() == pres_mesh.n_triangles() &&
                          vel_mesh.n_vertices() == pres_mesh.n_vertices());
  if (!same_mesh && vel_mesh.n_triangles() != 4 * pres_mesh.n_triangles())
    throw std::invalid_argument(
        "assemble_divergence: velocity mesh must be the pressure mesh or its uniform refinement");
  if (pres.n_vertices != pres_mesh.n_vertices())
    throw std::invalid_argument("assemble_divergence: pressure dof map does not match mesh");

  const bool mini = (vel.kind == SpaceKind::MiniVelocity);
  const int ns = mini ? 4 : 3;
  const int nl_c = 2 * ns;
  // q * div(bubble) has degree 3; the P1-iso-P2 cross-mesh product degree 1.
  const QuadratureRule& rule = triangle_rule(mini ? 4 : 2);

  auto local = [&](int t, double* lm, int* lr, int* lc) {
    const TriGeom g = tri_geom(vel_mesh, t);
    std::memset(lm, 0, sizeof(double) * 3 * nl_c);
    const int tp = same_mesh ? t : t / 4;  // refine() puts children at 4k..4k+3
    const TriGeom gp = same_mesh ? g : tri_geom(pres_mesh, tp);
    const auto& tri_p = pres_mesh.triangles[tp];

    double val[4], dx[4], dy[4];
    for (size_t q = 0; q < rule.points.size(); ++q) {
      const auto& bc = rule.points[q];
      shape_at(g, bc, mini, val, dx, dy);
      const double w = rule.weights[q] * 2.0 * g.area;
      // Pressure hats evaluated at the physical quadrature point.
      double qv[3];
      if (same_mesh) {
        for (int a = 0; a < 3; ++a) qv[a] = bc[a];
      } else {
        const double x = bc[0] * g.px[0] + bc[1] * g.px[1] + bc[2] * g.px[2];
        const double y = bc[0] * g.py[0] + bc[1] * g.py[1] + bc[2] * g.py[2];
        for (int a = 0; a < 3; ++a) {
          const int anchor = (a + 1) % 3;  // hat a vanishes at the other two
          qv[a] = gp.gx[a] * (x - gp.px[anchor]) + gp.gy[a] * (y - gp.py[anchor]);
        }
      }
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < ns; ++b) {
          lm[a * nl_c + 2 * b + 0] += w * qv[a] * dx[b];
          lm[a * nl_c + 2 * b + 1] += w * qv[a] * dy[b];
        }
    }
    for (int a = 0; a < 3; ++a) lr[a] = tri_p[a];
    const auto& tri = vel_mesh.triangles[t];
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 2; ++c) lc[2 * b + c] = vel.vdof(tri[b], c);
    if (mini)
      for (int c = 0; c < 2; ++c) lc[6 + c] = vel.bdof(t, c);
  };
  return assemble_cellwise(vel_mesh, pres.n_dofs, vel.n_dofs, 3, nl_c, mode, local);
}

SparseMatrix assemble_mass(const Mesh2D& mesh, const DofMap& space,
                           double weight, AssemblyMode mode) {
  const bool mini = (space.kind == SpaceKind::MiniVelocity);
  const bool vector =
      mini || space.kind == SpaceKind::P1Vector;
  if (space.kind == SpaceKind::InterfaceScalar || space.kind == SpaceKind::InterfaceVector)
    throw std::invalid_argument("assemble_mass: interface spaces take the 1D overload");
  if (space.n_vertices != mesh.n_vertices())
    throw std::invalid_argument("assemble_mass: dof map does not match mesh");

  const int ns = mini ? 4 : 3;
  const int nc = vector ? 2 : 1;
  const int nl = ns * nc;
  // bubble*bubble is degree 6; plain P1 products are degree 2.
  const QuadratureRule& rule = triangle_rule(mini ? 4 : 2);

  auto local = [&](int t, double* lm, int* lr, int* lc) {
    const TriGeom g = tri_geom(mesh, t);
    std::memset(lm, 0, sizeof(double) * nl * nl);
    double val[4], dx[4], dy[4];
    for (size_t q = 0; q < rule.points.size(); ++q) {
      shape_at(g, rule.points[q], mini, val, dx, dy);
      const double w = weight * rule.weights[q] * 2.0 * g.area;
      for (int a = 0; a < ns; ++a)
        for (int b = 0; b < ns; ++b) {
          const double m = w * val[a] * val[b];
          for (int c = 0; c < nc; ++c)
            lm[(nc * a + c) * nl + nc * b + c] += m;
        }
    }
    const auto& tri = mesh.triangles[t];
    for (int a = 0; a < 3; ++a)
      for (int c = 0; c < nc; ++c)
        lr[nc * a + c] = vector ? space.vdof(tri[a], c) : tri[a];
    if (mini)
      for (int c = 0; c < 2; ++c) lr[6 + c] = space.bdof(t, c);
    std::memcpy(lc, lr, sizeof(int) * nl);
  };
  return assemble_cellwise(mesh, space.n_dofs, space.n_dofs, nl, nl, mode, local);
}

SparseMatrix assemble_mass(const InterfaceMesh1D& iface, const DofMap& space,
                           double weight) {
  const bool vector = (space.kind == SpaceKind::InterfaceVector);
  if (!vector && space.kind != SpaceKind::InterfaceScalar)
    throw std::invalid_argument("assemble_mass(1D): interface space required");
  if (space.n_nodes != iface.n_nodes())
    throw std::invalid_argument("assemble_mass(1D): dof map does not match interface");

  const int nc = vector ? 2 : 1;
  std::vector<Triplet> trips;
  for (int s = 0; s + 1 < iface.n_nodes(); ++s) {
    const double len = iface.nodes[s + 1] - iface.nodes[s];
    // Exact P1 segment mass: len * [[1/3,1/6],[1/6,1/3]].
    const double d = weight * len / 3.0, o = weight * len / 6.0;
    for (int c = 0; c < nc; ++c) {
      const int i0 = space.idof(s, c), i1 = space.idof(s + 1, c);
      trips.push_back({i0, i0, d});
      trips.push_back({i1, i1, d});
      trips.push_back({i0, i1, o});
      trips.push_back({i1, i0, o});
    }
  }
  return SparseMatrix::from_triplets(space.n_dofs, space.n_dofs, std::move(trips));
}

SparseMatrix assemble_string_operator(const InterfaceMesh1D& iface, double C0,
                                      double C1) {
  if (C0 < 0.0 || C1 < 0.0)
    throw std::invalid_argument("assemble_string_operator: coefficients must be nonnegative");
  if (C0 == 0.0 && C1 == 0.0)
    throw std::invalid_argument("assemble_string_operator: C0 and C1 cannot both vanish");

  std::vector<Triplet> trips;
  for (int s = 0; s + 1 < iface.n_nodes(); ++s) {
    const double len = iface.nodes[s + 1] - iface.nodes[s];
    const double md = C0 * len / 3.0, mo = C0 * len / 6.0;
    const double k = C1 / len;
    trips.push_back({s, s, md + k});
    trips.push_back({s + 1, s + 1, md + k});
    trips.push_back({s, s + 1, mo - k});
    trips.push_back({s + 1, s, mo - k});
  }
  return SparseMatrix::from_triplets(iface.n_nodes(), iface.n_nodes(), std::move(trips));
}

SparseMatrix assemble_thick_elasticity(const Mesh2D& mesh, const DofMap& disp,
                                       double mu_s, double lambda_s, double c_as,
                                       AssemblyMode mode) {
  if (disp.kind != SpaceKind::P1Vector)
    throw std::invalid_argument("assemble_thick_elasticity: displacement space must be P1 vector");
  if (disp.n_vertices != mesh.n_vertices())
    throw std::invalid_argument("assemble_thick_elasticity: dof map does not match mesh");
  if (mu_s <= 0.0 || lambda_s < 0.0 || c_as < 0.0)
    throw std::invalid_argument("assemble_thick_elasticity: invalid coefficients");

  const QuadratureRule& rule = triangle_rule(2);
  const int nl = 6;
  auto local = [&](int t, double* lm, int* lr, int* lc) {
    const TriGeom g = tri_geom(mesh, t);
    std::memset(lm, 0, sizeof(double) * nl * nl);
    double val[4], dx[4], dy[4];
    for (size_t q = 0; q < rule.points.size(); ++q) {
      shape_at(g, rule.points[q], false, val, dx, dy);
      const double w = rule.weights[q] * 2.0 * g.area;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          const double m = c_as * val[a] * val[b];
          // 2*mu_s D:D + lambda_s (div)(div) + c_as mass
          const double xx = 2.0 * mu_s * (dx[a] * dx[b] + 0.5 * dy[a] * dy[b]) +
                            lambda_s * dx[a] * dx[b] + m;
          const double xy = mu_s * dy[a] * dx[b] + lambda_s * dx[a] * dy[b];
          const double yx = mu_s * dx[a] * dy[b] + lambda_s * dy[a] * dx[b];
          const double yy = 2.0 * mu_s * (dy[a] * dy[b] + 0.5 * dx[a] * dx[b]) +
                            lambda_s * dy[a] * dy[b] + m;
          lm[(2 * a + 0) * nl + 2 * b + 0] += w * xx;
          lm[(2 * a + 0) * nl + 2 * b + 1] += w * xy;
          lm[(2 * a + 1) * nl + 2 * b + 0] += w * yx;
          lm[(2 * a + 1) * nl + 2 * b + 1] += w * yy;
        }
    }
    const auto& tri = mesh.triangles[t];
    for (int a = 0; a < 3; ++a)
      for (int c = 0; c < 2; ++c) lr[2 * a + c] = disp.vdof(tri[a], c);
    std::memcpy(lc, lr, sizeof(int) * nl);
  };
  return assemble_cellwise(mesh, disp.n_dofs, disp.n_dofs, nl, nl, mode, local);
}

DenseVector assemble_boundary_load(const Mesh2D& mesh, const DofMap& vel,
                                   BoundaryTag tag, double p_val) {
  require_velocity_space(vel, mesh, "assemble_boundary_load");
  bool tag_exists = false;
  for (const auto& e : mesh.boundary_edges)
    if (e.tag == tag) tag_exists = true;
  if (!tag_exists)
    throw std::invalid_argument(std::string("assemble_boundary_load: no edges tagged ") +
                                to_string(tag));

  const auto owners = boundary_edge_owners(mesh);
  DenseVector load = DenseVector::Zero(vel.n_dofs);
  for (size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
    const auto& be = mesh.boundary_edges[e];
    if (be.tag != tag) continue;
    const auto& pa = mesh.vertices[be.a];
    const auto& pb = mesh.vertices[be.b];
    const double ex = pb[0] - pa[0], ey = pb[1] - pa[1];
    const double len = std::hypot(ex, ey);
    double nx = ey / len, ny = -ex / len;
    // Orient outward: away from the vertex opposite the edge.
    const auto& opp = mesh.vertices[owners[e].second];
    const double mx = 0.5 * (pa[0] + pb[0]) - opp[0];
    const double my = 0.5 * (pa[1] + pb[1]) - opp[1];
    if (nx * mx + ny * my < 0.0) {
      nx = -nx;
      ny = -ny;
    }
    // integral of a hat over its edge is len/2 (exact); bubbles have zero trace.
    const double c = p_val * 0.5 * len;
    load[vel.vdof(be.a, 0)] += c * nx;
    load[vel.vdof(be.a, 1)] += c * ny;
    load[vel.vdof(be.b, 0)] += c * nx;
    load[vel.vdof(be.b, 1)] += c * ny;
  }
  return load;
}

SparseMatrix trace_matrix(const DofMap& vel, const InterfaceMesh1D& iface,
                          const DofMap& trace_space) {
  const auto dofs = trace_dofs(vel, iface, trace_space);
  std::vector<Triplet> trips;
  trips.reserve(dofs.size());
  for (size_t i = 0; i < dofs.size(); ++i)
    trips.push_back({static_cast<int>(i), dofs[i], 1.0});
  return SparseMatrix::from_triplets(trace_space.n_dofs, vel.n_dofs, std::move(trips));
}

std::vector<int> trace_dofs(const DofMap& vel, const InterfaceMesh1D& iface,
                            const DofMap& trace_space) {
  if (vel.kind != SpaceKind::MiniVelocity && vel.kind != SpaceKind::P1Vector)
    throw std::invalid_argument("trace_dofs: velocity space must be MINI or P1 vector");
  if (trace_space.n_nodes != iface.n_nodes())
    throw std::invalid_argument("trace_dofs: trace space does not match interface");

  std::vector<int> dofs(trace_space.n_dofs);
  for (int i = 0; i < iface.n_nodes(); ++i) {
    const int pv = iface.parent_vertex[i];
    if (pv < 0 || pv >= vel.n_vertices)
      throw std::runtime_error("trace_dofs: interface node " + std::to_string(i) +
                               " has no matching velocity vertex");
    if (trace_space.kind == SpaceKind::InterfaceScalar) {
      dofs[i] = vel.vdof(pv, 1);  // radial (y) component
    } else if (trace_space.kind == SpaceKind::InterfaceVector) {
      dofs[2 * i + 0] = vel.vdof(pv, 0);
      dofs[2 * i + 1] = vel.vdof(pv, 1);
    } else {
      throw std::invalid_argument("trace_dofs: trace space must live on the interface");
    }
  }
  return dofs;
}

}  // namespace fsi
