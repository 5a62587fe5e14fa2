// Compares the element-parallel assembly and row-parallel matrix-vector
// kernels against single-threaded references. The parallel paths must produce
// bitwise identical results; timings are best-of-N wall clock.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

#include "CLI11.hpp"

#include "fsi/fem.hpp"
#include "fsi/mesh.hpp"

namespace {

using fsi::AssemblyMode;
using fsi::DenseVector;
using fsi::SparseMatrix;

double best_of(int reps, const std::function<void()>& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

bool bitwise_equal(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  if (a.row_ptr() != b.row_ptr() || a.col_idx() != b.col_idx()) return false;
  const auto& av = a.values();
  const auto& bv = b.values();
  for (size_t i = 0; i < av.size(); ++i)
    if (av[i] != bv[i]) return false;
  return true;
}

DenseVector serial_spmv(const SparseMatrix& m, const DenseVector& x) {
  DenseVector y = DenseVector::Zero(m.rows());
  for (int r = 0; r < m.rows(); ++r) {
    double acc = 0.0;
    for (int k = m.row_ptr()[r]; k < m.row_ptr()[r + 1]; ++k)
      acc += m.values()[k] * x[m.col_idx()[k]];
    y[r] = acc;
  }
  return y;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"assembly and matrix-vector kernel benchmark"};
  int nx = 64, reps = 3;
  app.add_option("--nx", nx, "square mesh resolution");
  app.add_option("--reps", reps, "repetitions per measurement (best-of)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  const fsi::Mesh2D mesh = fsi::build_rectangle_mesh(1.0, 1.0, nx, nx, fsi::fluid_tags());
  const fsi::DofMap vel = fsi::DofMap::mini_velocity(mesh);
  std::printf("mesh %dx%d: %d triangles, %d velocity dofs\n", nx, nx,
              mesh.n_triangles(), vel.n_dofs);

  SparseMatrix a_serial, a_parallel;
  const double t_as = best_of(reps, [&] {
    a_serial = fsi::assemble_fluid_stiffness(mesh, vel, 0.035, AssemblyMode::Serial);
  });
  const double t_ap = best_of(reps, [&] {
    a_parallel = fsi::assemble_fluid_stiffness(mesh, vel, 0.035, AssemblyMode::Parallel);
  });
  const bool assembly_ok = bitwise_equal(a_serial, a_parallel);
  std::printf("%-22s %10.3f ms %10.3f ms  speedup %.2fx  bitwise %s\n",
              "viscous assembly", t_as, t_ap, t_as / t_ap,
              assembly_ok ? "equal" : "DIFFERENT");

  SparseMatrix m_serial, m_parallel;
  const double t_ms = best_of(reps, [&] {
    m_serial = fsi::assemble_mass(mesh, vel, 1.0, AssemblyMode::Serial);
  });
  const double t_mp = best_of(reps, [&] {
    m_parallel = fsi::assemble_mass(mesh, vel, 1.0, AssemblyMode::Parallel);
  });
  const bool mass_ok = bitwise_equal(m_serial, m_parallel);
  std::printf("%-22s %10.3f ms %10.3f ms  speedup %.2fx  bitwise %s\n",
              "mass assembly", t_ms, t_mp, t_ms / t_mp,
              mass_ok ? "equal" : "DIFFERENT");

  DenseVector x(vel.n_dofs);
  for (int i = 0; i < vel.n_dofs; ++i) x[i] = std::sin(0.37 * i);
  DenseVector y_serial, y_parallel;
  const double t_ss = best_of(reps, [&] { y_serial = serial_spmv(a_serial, x); });
  const double t_sp = best_of(reps, [&] { y_parallel = a_parallel.multiply(x); });
  bool spmv_ok = y_serial.size() == y_parallel.size();
  for (int i = 0; spmv_ok && i < y_serial.size(); ++i)
    spmv_ok = y_serial[i] == y_parallel[i];
  std::printf("%-22s %10.3f ms %10.3f ms  speedup %.2fx  bitwise %s\n",
              "matrix-vector product", t_ss, t_sp, t_ss / t_sp,
              spmv_ok ? "equal" : "DIFFERENT");

  return (assembly_ok && mass_ok && spmv_ok) ? 0 : 1;
}
