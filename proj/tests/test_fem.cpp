#include <cmath>

#include "doctest.h"
#include "fsi/fem.hpp"

using namespace fsi;

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

// Exact integral of x^a y^b over the reference triangle {x,y>=0, x+y<=1}.
double monomial_integral(int a, int b) {
  return factorial(a) * factorial(b) / factorial(a + b + 2);
}

double rule_integral(const QuadratureRule& rule, int a, int b) {
  double s = 0.0;
  for (size_t q = 0; q < rule.points.size(); ++q) {
    const double x = rule.points[q][1], y = rule.points[q][2];
    s += rule.weights[q] * std::pow(x, a) * std::pow(y, b);
  }
  return s;
}

bool bitwise_equal(const SparseMatrix& a, const SparseMatrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         a.row_ptr() == b.row_ptr() && a.col_idx() == b.col_idx() &&
         a.values() == b.values();
}

}  // namespace

TEST_CASE("triangle rules integrate monomials up to their degree") {
  for (int degree : {1, 2, 4, 6}) {
    const QuadratureRule& rule = triangle_rule(degree);
    CHECK(rule.degree >= degree);
    double wsum = 0.0;
    for (double w : rule.weights) {
      CHECK(w > 0.0);
      wsum += w;
    }
    CHECK(wsum == doctest::Approx(0.5).epsilon(1e-14));
    for (int a = 0; a + 0 <= rule.degree; ++a)
      for (int b = 0; a + b <= rule.degree; ++b)
        CHECK(rule_integral(rule, a, b) ==
              doctest::Approx(monomial_integral(a, b)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(triangle_rule(7), std::invalid_argument);
}

TEST_CASE("segment rules are Gauss-exact on [0,1]") {
  for (int degree : {1, 3, 5}) {
    const SegmentRule& rule = segment_rule(degree);
    CHECK(rule.degree >= degree);
    for (int k = 0; k <= rule.degree; ++k) {
      double s = 0.0;
      for (size_t q = 0; q < rule.points.size(); ++q)
        s += rule.weights[q] * std::pow(rule.points[q], k);
      CHECK(s == doctest::Approx(1.0 / (k + 1)).epsilon(1e-14));
    }
  }
  CHECK_THROWS_AS(segment_rule(6), std::invalid_argument);
}

TEST_CASE("interface mass on one unit segment is the classic 2x2") {
  const Mesh2D mesh = build_rectangle_mesh(1.0, 0.5, 1, 1, fluid_tags());
  const InterfaceMesh1D iface = extract_interface(mesh);
  REQUIRE(iface.n_nodes() == 2);
  const DofMap map = DofMap::interface_scalar(iface);
  const SparseMatrix M = assemble_mass(iface, map, 1.0);
  CHECK(M.coeff(0, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(M.coeff(0, 1) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(M.coeff(1, 0) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(M.coeff(1, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("2D mass matrices reproduce areas and are symmetric") {
  const Mesh2D mesh = build_rectangle_mesh(2.0, 1.0, 4, 2, fluid_tags());
  for (SpaceKind kind : {SpaceKind::P1Scalar, SpaceKind::P1Vector,
                         SpaceKind::MiniVelocity}) {
    const DofMap map = kind == SpaceKind::P1Scalar ? DofMap::p1_scalar(mesh)
                       : kind == SpaceKind::P1Vector
                           ? DofMap::p1_vector(mesh)
                           : DofMap::mini_velocity(mesh);
    const SparseMatrix M = assemble_mass(mesh, map, 1.0);
    CHECK(M.symmetry_error() <= 1e-13);
    // Constant-one field integrates to the area (per component).
    DenseVector ones = DenseVector::Zero(map.n_dofs);
    const int stride = kind == SpaceKind::P1Scalar ? 1 : 2;
    for (int v = 0; v < mesh.n_vertices(); ++v) ones[stride * v] = 1.0;
    CHECK(M.quad_form(ones, ones) == doctest::Approx(2.0).epsilon(1e-12));
  }
}

TEST_CASE("fluid stiffness annihilates rigid motions") {
  const Mesh2D mesh = build_rectangle_mesh(5.0, 0.5, 8, 4, fluid_tags());
  const DofMap vel = DofMap::mini_velocity(mesh);
  const SparseMatrix A = assemble_fluid_stiffness(mesh, vel, 0.035);
  double amax = 0.0;
  for (double v : A.values()) amax = std::max(amax, std::fabs(v));

  for (int mode = 0; mode < 3; ++mode) {
    DenseVector u = DenseVector::Zero(vel.n_dofs);
    for (int v = 0; v < mesh.n_vertices(); ++v) {
      const double x = mesh.vertices[v][0], y = mesh.vertices[v][1];
      if (mode == 0) u[vel.vdof(v, 0)] = 1.0;
      if (mode == 1) u[vel.vdof(v, 1)] = 1.0;
      if (mode == 2) {
        u[vel.vdof(v, 0)] = -y;
        u[vel.vdof(v, 1)] = x;
      }
    }
    const DenseVector r = A.multiply(u);
    CHECK(r.lpNorm<Eigen::Infinity>() <= 1e-10 * amax);
  }
}

TEST_CASE("fluid stiffness energy of a uniform stretch is 2 mu area") {
  const double mu = 0.035;
  const Mesh2D mesh = build_rectangle_mesh(2.0, 1.5, 3, 2, fluid_tags());
  const DofMap vel = DofMap::mini_velocity(mesh);
  const SparseMatrix A = assemble_fluid_stiffness(mesh, vel, mu);
  DenseVector u = DenseVector::Zero(vel.n_dofs);
  for (int v = 0; v < mesh.n_vertices(); ++v)
    u[vel.vdof(v, 0)] = mesh.vertices[v][0];  // u = (x, 0), D(u) = diag(1, 0)
  CHECK(A.quad_form(u, u) == doctest::Approx(2.0 * mu * 3.0).epsilon(1e-12));
}

TEST_CASE("thick elasticity matches hand energies") {
  const double mu_s = 2.586e5, lambda_s = 2.328e6;
  const Mesh2D mesh = build_rectangle_mesh(1.0, 1.0, 3, 3, structure_tags());
  const DofMap disp = DofMap::p1_vector(mesh);

  // Without the spring term, rigid motions carry no energy.
  const SparseMatrix K0 = assemble_thick_elasticity(mesh, disp, mu_s, lambda_s, 0.0);
  double kmax = 0.0;
  for (double v : K0.values()) kmax = std::max(kmax, std::fabs(v));
  for (int mode = 0; mode < 3; ++mode) {
    DenseVector u = DenseVector::Zero(disp.n_dofs);
    for (int v = 0; v < mesh.n_vertices(); ++v) {
      const double x = mesh.vertices[v][0], y = mesh.vertices[v][1];
      if (mode == 0) u[disp.vdof(v, 0)] = 1.0;
      if (mode == 1) u[disp.vdof(v, 1)] = 1.0;
      if (mode == 2) {
        u[disp.vdof(v, 0)] = -y;
        u[disp.vdof(v, 1)] = x;
      }
    }
    CHECK(K0.multiply(u).lpNorm<Eigen::Infinity>() <= 1e-10 * kmax);
  }

  // u = (x, 0): 2 mu D:D + lambda (div)^2 = 2 mu + lambda on the unit square,
  // and the spring term adds c_as * integral of x^2 = c_as / 3.
  DenseVector u = DenseVector::Zero(disp.n_dofs);
  for (int v = 0; v < mesh.n_vertices(); ++v)
    u[disp.vdof(v, 0)] = mesh.vertices[v][0];
  CHECK(K0.quad_form(u, u) ==
        doctest::Approx(2.0 * mu_s + lambda_s).epsilon(1e-12));
  const double c_as = 4.0e6;
  const SparseMatrix K1 =
      assemble_thick_elasticity(mesh, disp, mu_s, lambda_s, c_as);
  CHECK(K1.quad_form(u, u) ==
        doctest::Approx(2.0 * mu_s + lambda_s + c_as / 3.0).epsilon(1e-12));
}

TEST_CASE("string operator reproduces membrane energies on the wall") {
  const double C0 = 4.0e5, C1 = 2.5e4, L = 5.0;
  const Mesh2D mesh = build_rectangle_mesh(L, 0.5, 10, 2, fluid_tags());
  const InterfaceMesh1D iface = extract_interface(mesh);
  const SparseMatrix K = assemble_string_operator(iface, C0, C1);

  DenseVector ones = DenseVector::Ones(iface.n_nodes());
  CHECK(K.quad_form(ones, ones) == doctest::Approx(C0 * L).epsilon(1e-12));

  DenseVector lin(iface.n_nodes());
  for (int i = 0; i < iface.n_nodes(); ++i) lin[i] = iface.nodes[i];
  CHECK(K.quad_form(lin, lin) ==
        doctest::Approx(C0 * L * L * L / 3.0 + C1 * L).epsilon(1e-12));
}

TEST_CASE("inlet load points into the channel and lives on inlet dofs only") {
  const Mesh2D mesh = build_rectangle_mesh(5.0, 0.5, 8, 4, fluid_tags());
  const DofMap vel = DofMap::mini_velocity(mesh);
  const double p = 1.3333e4;
  const DenseVector load = assemble_boundary_load(mesh, vel, BoundaryTag::Inlet, p);

  double sum_x = 0.0;
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    const bool on_inlet = mesh.vertices[v][0] == 0.0;
    if (!on_inlet) {
      CHECK(load[vel.vdof(v, 0)] == 0.0);
    }
    CHECK(load[vel.vdof(v, 1)] == 0.0);  // n = (-1, 0) has no y part
    sum_x += load[vel.vdof(v, 0)];
  }
  // integral of p phi . n over the inlet with n = (-1,0) sums to -p*H; the
  // schemes subtract the vector, so the net x-forcing is positive (inflow).
  CHECK(sum_x == doctest::Approx(-p * 0.5).epsilon(1e-12));
  for (int t = 0; t < mesh.n_triangles(); ++t)
    for (int c = 0; c < 2; ++c) CHECK(load[vel.bdof(t, c)] == 0.0);
}

TEST_CASE("traces pick the interface velocity dofs") {
  const Mesh2D mesh = build_rectangle_mesh(5.0, 0.5, 4, 2, fluid_tags());
  const InterfaceMesh1D iface = extract_interface(mesh);
  const DofMap vel = DofMap::mini_velocity(mesh);

  const DofMap tr_s = DofMap::interface_scalar(iface);
  const auto dofs_s = trace_dofs(vel, iface, tr_s);
  REQUIRE(static_cast<int>(dofs_s.size()) == iface.n_nodes());
  for (int i = 0; i < iface.n_nodes(); ++i)
    CHECK(dofs_s[i] == vel.vdof(iface.parent_vertex[i], 1));  // radial = y

  const DofMap tr_v = DofMap::interface_vector(iface);
  const auto dofs_v = trace_dofs(vel, iface, tr_v);
  REQUIRE(static_cast<int>(dofs_v.size()) == 2 * iface.n_nodes());
  for (int i = 0; i < iface.n_nodes(); ++i)
    for (int c = 0; c < 2; ++c)
      CHECK(dofs_v[2 * i + c] == vel.vdof(iface.parent_vertex[i], c));

  // The trace matrix realizes the same gather.
  const SparseMatrix T = trace_matrix(vel, iface, tr_s);
  DenseVector u = DenseVector::Zero(vel.n_dofs);
  for (int v = 0; v < mesh.n_vertices(); ++v)
    u[vel.vdof(v, 1)] = mesh.vertices[v][0] + 2.0;
  const DenseVector g = T.multiply(u);
  for (int i = 0; i < iface.n_nodes(); ++i)
    CHECK(g[i] == iface.nodes[i] + 2.0);
}

TEST_CASE("divergence annihilates divergence-free linear fields") {
  const Mesh2D mesh = build_rectangle_mesh(2.0, 1.0, 4, 2, fluid_tags());
  const DofMap vel = DofMap::mini_velocity(mesh);
  const DofMap pres = DofMap::p1_scalar(mesh);
  const SparseMatrix B = assemble_divergence(mesh, vel, mesh, pres);
  REQUIRE(B.rows() == pres.n_dofs);
  REQUIRE(B.cols() == vel.n_dofs);

  DenseVector u = DenseVector::Zero(vel.n_dofs);
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    u[vel.vdof(v, 0)] = mesh.vertices[v][0];   // u = (x, -y), div u = 0
    u[vel.vdof(v, 1)] = -mesh.vertices[v][1];
  }
  CHECK(B.multiply(u).lpNorm<Eigen::Infinity>() <= 1e-12);

  // And the constant field, which is also divergence-free.
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    u[vel.vdof(v, 0)] = 1.0;
    u[vel.vdof(v, 1)] = 0.0;
  }
  CHECK(B.multiply(u).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("cross-mesh divergence couples the refined velocity to coarse pressure") {
  const Mesh2D coarse = build_rectangle_mesh(2.0, 1.0, 2, 1, fluid_tags());
  const Mesh2D fine = uniform_refine(coarse);
  const DofMap vel = DofMap::p1_vector(fine);
  const DofMap pres = DofMap::p1_scalar(coarse);
  const SparseMatrix B = assemble_divergence(fine, vel, coarse, pres);
  REQUIRE(B.rows() == pres.n_dofs);
  REQUIRE(B.cols() == vel.n_dofs);

  // (B u)_q = integral q div(u); for u = (x, 0), div u = 1, so summing over
  // the pressure hats gives the area.
  DenseVector u = DenseVector::Zero(vel.n_dofs);
  for (int v = 0; v < fine.n_vertices(); ++v)
    u[vel.vdof(v, 0)] = fine.vertices[v][0];
  const DenseVector bu = B.multiply(u);
  CHECK(bu.sum() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("MINI Stokes system with benchmark-style boundaries is nonsingular") {
  const Mesh2D mesh = build_rectangle_mesh(1.0, 1.0, 4, 4, fluid_tags());
  const DofMap vel = DofMap::mini_velocity(mesh);
  const DofMap pres = DofMap::p1_scalar(mesh);
  const SparseMatrix A = assemble_fluid_stiffness(mesh, vel, 1.0);
  const SparseMatrix B = assemble_divergence(mesh, vel, mesh, pres);

  std::vector<Triplet> trips;
  A.append_triplets(trips, 1.0, 0, 0);
  B.append_triplets(trips, -1.0, vel.n_dofs, 0);
  B.append_triplets(trips, -1.0, 0, vel.n_dofs, true);

  LinearSystem sys;
  sys.A = SparseMatrix::from_triplets(vel.n_dofs + pres.n_dofs,
                                      vel.n_dofs + pres.n_dofs, std::move(trips));
  sys.b = DenseVector::Zero(sys.A.rows());
  // No-slip top and bottom; inlet/outlet stay natural so the pressure level
  // is pinned by the boundary and the saddle matrix is invertible.
  for (int v = 0; v < mesh.n_vertices(); ++v)
    if (mesh.vertices[v][1] == 0.0 || mesh.vertices[v][1] == 1.0)
      for (int c = 0; c < 2; ++c)
        sys.constraints.push_back({vel.vdof(v, c), 0.0});
  for (int i = 0; i < vel.n_dofs + pres.n_dofs; ++i)
    sys.b[i] = std::sin(0.1 * i);  // arbitrary nonzero data

  // factor_and_solve verifies the residual internally and would throw on a
  // singular or badly solved system.
  const DenseVector x = factor_and_solve(sys);
  CHECK(x.allFinite());
}

TEST_CASE("pressure pulse hits its documented waypoints") {
  const double p_max = 1.3333e4, t_max = 3.0e-3;
  CHECK(pressure_pulse(0.0, p_max, t_max) == 0.0);
  CHECK(pressure_pulse(0.25 * t_max, p_max, t_max) ==
        doctest::Approx(0.5 * p_max).epsilon(1e-12));
  CHECK(pressure_pulse(0.5 * t_max, p_max, t_max) ==
        doctest::Approx(p_max).epsilon(1e-12));
  CHECK(pressure_pulse(t_max, p_max, t_max) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(pressure_pulse(1.5 * t_max, p_max, t_max) == 0.0);
}

TEST_CASE("point evaluation and transfer are exact for affine fields") {
  const Mesh2D coarse = build_rectangle_mesh(5.0, 0.5, 10, 4, fluid_tags());
  const Mesh2D fine = uniform_refine(coarse);

  // p1_point_value must cope with the midpoint-appended vertex order of the
  // refined mesh, not just the row-major order of directly built meshes.
  for (const Mesh2D* m : {&coarse, &fine}) {
    std::vector<double> vals(m->n_vertices());
    for (int v = 0; v < m->n_vertices(); ++v)
      vals[v] = 3.0 * (*m).vertices[v][0] - 2.0 * (*m).vertices[v][1] + 1.0;
    for (double x : {0.0, 0.31, 2.5, 4.99})
      for (double y : {0.0, 0.17, 0.5})
        CHECK(p1_point_value(*m, vals, x, y) ==
              doctest::Approx(3.0 * x - 2.0 * y + 1.0).epsilon(1e-13));
  }

  // Vector transfer from the refined mesh onto a twice-finer direct mesh.
  const Mesh2D target = build_rectangle_mesh(5.0, 0.5, 40, 16, fluid_tags());
  DenseVector f(2 * fine.n_vertices());
  for (int v = 0; v < fine.n_vertices(); ++v) {
    f[2 * v] = fine.vertices[v][0] + 2.0 * fine.vertices[v][1];
    f[2 * v + 1] = 3.0 * fine.vertices[v][0] - fine.vertices[v][1];
  }
  const DenseVector g = prolong_p1_vector(fine, f, target);
  double maxerr = 0.0;
  for (int v = 0; v < target.n_vertices(); ++v) {
    const double x = target.vertices[v][0], y = target.vertices[v][1];
    maxerr = std::max(maxerr, std::fabs(g[2 * v] - (x + 2.0 * y)));
    maxerr = std::max(maxerr, std::fabs(g[2 * v + 1] - (3.0 * x - y)));
  }
  CHECK(maxerr <= 1e-12);

  CHECK_THROWS_AS(prolong_p1_vector(fine, DenseVector::Zero(3), target),
                  std::invalid_argument);
}

TEST_CASE("serial and parallel assembly agree bitwise") {
  const Mesh2D mesh = build_rectangle_mesh(5.0, 0.5, 16, 8, fluid_tags());
  const DofMap vel = DofMap::mini_velocity(mesh);
  const DofMap pres = DofMap::p1_scalar(mesh);

  CHECK(bitwise_equal(
      assemble_fluid_stiffness(mesh, vel, 0.035, AssemblyMode::Serial),
      assemble_fluid_stiffness(mesh, vel, 0.035, AssemblyMode::Parallel)));
  CHECK(bitwise_equal(assemble_mass(mesh, vel, 1.0, AssemblyMode::Serial),
                      assemble_mass(mesh, vel, 1.0, AssemblyMode::Parallel)));
  CHECK(bitwise_equal(
      assemble_divergence(mesh, vel, mesh, pres, AssemblyMode::Serial),
      assemble_divergence(mesh, vel, mesh, pres, AssemblyMode::Parallel)));
}
