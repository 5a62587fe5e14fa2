#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"

#include "fsi/config.hpp"
#include "fsi/fem.hpp"
#include "fsi/harness.hpp"

namespace fsi {

namespace {

void apply_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

std::string g17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string g6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

void write_field(std::ostream& out, const char* name, const DenseVector& x) {
  out << "field " << name << " " << x.size() << "\n";
  for (int i = 0; i < x.size(); ++i) out << i << " " << g17(x[i]) << "\n";
}

void write_state(const std::string& dir, const FsiState& st) {
  std::ofstream out(dir + "/snapshot_final.txt");
  write_field(out, "u", st.u.coeffs);
  write_field(out, "p", st.p.coeffs);
  write_field(out, "eta", st.eta.coeffs);
  write_field(out, "v", st.v.coeffs);
  write_field(out, "v_tilde", st.v_tilde.coeffs);
  write_field(out, "lambda", st.lambda.coeffs);
}

void dump_meshes(const ThinSolver& s, const std::string& dir) {
  std::ofstream out(dir + "/mesh_fluid.txt");
  write_mesh(out, s.mesh());
}

void dump_meshes(const ThickSolver& s, const std::string& dir) {
  {
    std::ofstream out(dir + "/mesh_fluid.txt");
    write_mesh(out, s.fluid_mesh());
  }
  std::ofstream out(dir + "/mesh_structure.txt");
  write_mesh(out, s.structure_mesh());
}

const char* scheme_name(SchemeKind k) {
  switch (k) {
    case SchemeKind::SplitThin: return "split_thin";
    case SchemeKind::MonolithicThin: return "monolithic_thin";
    case SchemeKind::SplitThick: return "split_thick";
  }
  return "?";
}

template <class Solver>
int finish_run(Solver& solver, const RunConfig& rc, bool stability_mode) {
  solver.run();
  std::filesystem::create_directories(rc.output_dir);
  {
    std::ofstream led(rc.output_dir + "/ledger.csv");
    solver.ledger().write_csv(led);
  }
  if (rc.write_snapshots) {
    write_state(rc.output_dir, solver.state());
    dump_meshes(solver, rc.output_dir);
  }

  double max_resid = 0.0;
  for (const auto& row : solver.ledger().rows)
    max_resid = std::max(max_resid, row.balance_residual);
  const auto& last = solver.ledger().rows.back();
  std::cout << "run: scheme=" << scheme_name(solver.config().scheme)
            << " steps=" << solver.state().n << " E_f=" << g6(last.E_f)
            << " E_v=" << g6(last.E_v) << " E_s=" << g6(last.E_s)
            << " T_lambda=" << g6(last.T_lambda)
            << " max_balance_residual=" << g6(max_resid) << "\n";

  if (!stability_mode) return 0;
  const StabilityReport rep =
      check_stability_bound(solver.ledger(), solver.params(), solver.config());
  std::cout << "stability: lhs=" << g17(rep.lhs) << " rhs=" << g17(rep.rhs)
            << " ratio=" << g6(rep.ratio) << " monotone_after_pulse="
            << (rep.monotone_after_pulse ? "yes" : "no")
            << " max_violation=" << g6(rep.max_violation)
            << " zero_inflow_steps=" << rep.zero_inflow_steps << "\n";
  return rep.monotone_after_pulse ? 0 : 2;
}

int cmd_run(const RunConfig& rc, bool stability_mode) {
  if (rc.scheme.scheme == SchemeKind::SplitThick) {
    ThickSolver s(rc.phys, rc.scheme);
    return finish_run(s, rc, stability_mode);
  }
  ThinSolver s(rc.phys, rc.scheme);
  return finish_run(s, rc, stability_mode);
}

StudySpec study_from(const RunConfig& rc) {
  StudySpec s;
  s.base = rc.scheme;
  s.phys = rc.phys;
  if (!rc.beta_list.empty()) s.betas = rc.beta_list;
  s.dts = rc.dt_list;
  s.dt_ref = rc.dt_ref;
  s.nx_list = rc.nx_list;
  s.ref_nx = rc.ref_nx;
  s.c_linear = rc.c_linear;
  s.c_threehalf = rc.c_threehalf;
  s.output_dir = rc.output_dir;
  s.write_figures = rc.write_figures;
  return s;
}

int cmd_converge_time(const RunConfig& rc) {
  const RateReport rep = run_time_convergence(study_from(rc));
  for (const auto& s : rep.series)
    std::cout << "converge-time: case=" << s.case_name << " norm=" << s.norm
              << " slope=" << g6(s.slope) << "\n";
  return 0;
}

int cmd_converge_thick(const RunConfig& rc) {
  const RateReport rep = run_thick_scaling(study_from(rc));
  for (const auto& s : rep.series)
    std::cout << "converge-thick: case=" << s.case_name << " norm=" << s.norm
              << " slope=" << g6(s.slope) << "\n";
  for (const auto& r : rep.runs)
    std::cout << "converge-thick: case=" << r.case_name << " nx=" << r.nx
              << " dt=" << g6(r.dt) << " monotone_after_pulse="
              << (r.stability.monotone_after_pulse ? "yes" : "no") << "\n";
  return 0;
}

bool seed_expect(const char* label, bool ok, const std::string& detail = "") {
  std::cout << "seed-check: " << label << " "
            << (ok ? "ok" : "FAILED" + (detail.empty() ? "" : " (" + detail + ")"))
            << "\n";
  return ok;
}

int run_seed_checks() {
  bool all = true;

  {
    const Mesh2D m = build_rectangle_mesh(5.0, 0.5, 8, 4, fluid_tags());
    all &= seed_expect("mesh counts", m.n_vertices() == 45 && m.n_triangles() == 64);
    all &= seed_expect("mesh area", std::abs(m.total_area() - 2.5) <= 1e-12);
    const Mesh2D m4 = build_rectangle_mesh(5.0, 0.5, 4, 2, fluid_tags());
    const InterfaceMesh1D itf = extract_interface(m4);
    bool nodes_ok = itf.n_nodes() == 5;
    const double want[5] = {0.0, 1.25, 2.5, 3.75, 5.0};
    for (int i = 0; nodes_ok && i < 5; ++i)
      nodes_ok = std::abs(itf.nodes[i] - want[i]) <= 1e-14;
    all &= seed_expect("interface nodes", nodes_ok);
  }
  {
    const Mesh2D m = build_rectangle_mesh(1.0, 0.5, 1, 1, fluid_tags());
    const InterfaceMesh1D itf = extract_interface(m);
    const SparseMatrix mg =
        assemble_mass(itf, DofMap::interface_scalar(itf), 1.0);
    const bool ok = std::abs(mg.coeff(0, 0) - 1.0 / 3.0) <= 1e-15 &&
                    std::abs(mg.coeff(0, 1) - 1.0 / 6.0) <= 1e-15 &&
                    std::abs(mg.coeff(1, 1) - 1.0 / 3.0) <= 1e-15;
    all &= seed_expect("segment mass", ok);
  }
  {
    const Mesh2D m = build_rectangle_mesh(2.0, 1.0, 4, 2, fluid_tags());
    const DofMap vel = DofMap::mini_velocity(m);
    const SparseMatrix a = assemble_fluid_stiffness(m, vel, 0.035);
    double amax = 0.0;
    for (double v : a.values()) amax = std::max(amax, std::abs(v));
    bool ok = true;
    for (int motion = 0; motion < 3 && ok; ++motion) {
      DenseVector x = DenseVector::Zero(vel.n_dofs);
      for (int v = 0; v < m.n_vertices(); ++v) {
        const auto& pt = m.vertices[v];
        if (motion == 0) x[vel.vdof(v, 0)] = 1.0;
        if (motion == 1) x[vel.vdof(v, 1)] = 1.0;
        if (motion == 2) {
          x[vel.vdof(v, 0)] = -pt[1];
          x[vel.vdof(v, 1)] = pt[0];
        }
      }
      ok = a.multiply(x).lpNorm<Eigen::Infinity>() <= 1e-10 * amax;
    }
    all &= seed_expect("rigid motions", ok);
  }
  {
    const PhysicalParams phys = PhysicalParams::benchmark();
    const bool ok =
        pressure_pulse(0.0, phys.p_max, phys.t_max) == 0.0 &&
        std::abs(pressure_pulse(0.5 * phys.t_max, phys.p_max, phys.t_max) -
                 phys.p_max) <= 1e-12 * phys.p_max &&
        pressure_pulse(2.0 * phys.t_max, phys.p_max, phys.t_max) == 0.0;
    all &= seed_expect("pressure pulse", ok);
  }
  {
    const SparseMatrix a = SparseMatrix::from_triplets(
        2, 2, {{0, 0, 2.0}, {0, 1, -1.0}, {1, 0, -1.0}, {1, 1, 2.0}});
    DenseVector b(2);
    b << 1.0, 2.0;
    const DenseVector x = Factorization(a).solve(b);
    const bool ok = std::abs(x[0] - 4.0 / 3.0) <= 1e-12 &&
                    std::abs(x[1] - 5.0 / 3.0) <= 1e-12;
    all &= seed_expect("sparse solve", ok);
  }
  {
    SchemeConfig cfg;
    cfg.scheme = SchemeKind::SplitThin;
    cfg.nx = 8;
    cfg.ny = 4;
    cfg.dt = 1e-3;
    cfg.T = 4e-3;
    const PhysicalParams phys = PhysicalParams::benchmark();
    auto run_once = [&]() {
      ThinSolver s(phys, cfg);
      s.run();
      std::ostringstream led;
      s.ledger().write_csv(led);
      double max_resid = 0.0;
      for (const auto& r : s.ledger().rows)
        max_resid = std::max(max_resid, r.balance_residual);
      return std::tuple<std::string, double, double, double>(
          led.str(), max_resid, s.splitting_identity_error(),
          s.divergence_residual());
    };
    const auto [led1, resid1, split1, div1] = run_once();
    const auto [led2, resid2, split2, div2] = run_once();
    all &= seed_expect("deterministic ledger", led1 == led2);
    all &= seed_expect("energy balance", resid1 <= 1e-8, g6(resid1));
    all &= seed_expect("splitting identity", split1 <= 1e-12, g6(split1));
    all &= seed_expect("discrete divergence", div1 <= 1e-10, g6(div1));
  }

  std::cout << "seed-check: " << (all ? "PASS" : "FAIL") << "\n";
  return all ? 0 : 1;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"kinematically split fluid-structure interaction benchmark"};
  app.require_subcommand(0, 1);

  bool seed = false;
  app.add_flag("--seed-check", seed, "run built-in self checks");

  struct Common {
    std::string config;
    std::string output;
    int threads = 0;
  };
  Common copt[4];
  const char* names[4] = {"run", "converge-time", "converge-thick", "stability"};
  const char* descs[4] = {
      "time-step one scheme and write its energy ledger",
      "time-step refinement study for the thin-wall schemes",
      "step/mesh scaling study for the thick-wall scheme",
      "run one scheme and check the discrete energy bound"};
  CLI::App* subs[4];
  for (int i = 0; i < 4; ++i) {
    subs[i] = app.add_subcommand(names[i], descs[i]);
    subs[i]->add_option("--config", copt[i].config, "JSON configuration file")
        ->required();
    subs[i]->add_option("--output", copt[i].output,
                        "output directory (overrides the configuration)");
    subs[i]->add_option("--threads", copt[i].threads, "OpenMP thread count");
    subs[i]->add_flag("--seed-check", seed, "run self checks first");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (seed) {
      const int rc = run_seed_checks();
      if (rc != 0 || app.get_subcommands().empty()) return rc;
    }
    for (int i = 0; i < 4; ++i) {
      if (!subs[i]->parsed()) continue;
      RunConfig rc = parse_config_file(copt[i].config);
      if (!copt[i].output.empty()) rc.output_dir = copt[i].output;
      apply_threads(copt[i].threads);
      switch (i) {
        case 0: return cmd_run(rc, false);
        case 1: return cmd_converge_time(rc);
        case 2: return cmd_converge_thick(rc);
        case 3: return cmd_run(rc, true);
      }
    }
    std::cout << app.help();
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace fsi
