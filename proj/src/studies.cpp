#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "fsi/fem.hpp"
#include "fsi/harness.hpp"

namespace fsi {

namespace {

std::string fmt_g(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", x);
  return buf;
}

void fit_series(RateSeries& s) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& p : s.points) pts.push_back({p.step, p.error});
  s.slope = fit_rate(pts);
}

void write_outputs(const RateReport& rep, const StudySpec& spec,
                   const std::string& figure_name, const std::string& xlabel) {
  if (spec.output_dir.empty()) return;
  std::filesystem::create_directories(spec.output_dir);
  std::ofstream csv(spec.output_dir + "/rates.csv");
  write_rates_csv(csv, rep);
  if (!spec.write_figures) return;
  std::vector<svg::Series> plot;
  for (const auto& s : rep.series) {
    svg::Series ps{s.case_name + " [" + s.norm + "]", {}};
    for (const auto& p : s.points) ps.points.push_back({p.step, p.error});
    plot.push_back(std::move(ps));
  }
  std::ofstream fig(spec.output_dir + "/" + figure_name);
  svg::write_loglog(fig, "relative error vs " + xlabel, xlabel,
                    "relative error", plot);
}

}  // namespace

void write_rates_csv(std::ostream& out, const RateReport& report) {
  out << "case,norm,step,error,slope\n";
  char buf[256];
  for (const auto& s : report.series)
    for (const auto& p : s.points) {
      std::snprintf(buf, sizeof(buf), "%s,%s,%.17g,%.17g,%.17g\n",
                    s.case_name.c_str(), s.norm.c_str(), p.step, p.error,
                    s.slope);
      out << buf;
    }
}

RateReport run_time_convergence(const StudySpec& spec) {
  if (spec.dts.empty())
    throw std::invalid_argument("time convergence study: empty step list");
  if (!(spec.dt_ref > 0.0))
    throw std::invalid_argument("time convergence study: dt_ref must be positive");
  for (double dt : spec.dts)
    if (spec.dt_ref >= dt)
      throw std::invalid_argument(
          "time convergence study: dt_ref must be finer than every candidate step");

  SchemeConfig rc = spec.base;
  rc.scheme = SchemeKind::SplitThin;
  rc.beta = 1.0;
  rc.dt = spec.dt_ref;
  ThinSolver ref(spec.phys, rc);
  ref.run();
  const DenseVector u_ref = ref.state().u.coeffs;
  const DenseVector eta_ref = ref.state().eta.coeffs;

  RateReport rep;
  for (double beta : spec.betas) {
    RateSeries su{"beta=" + fmt_g(beta), "velocity_L2", {}, 0.0};
    RateSeries se{"beta=" + fmt_g(beta), "displacement_S", {}, 0.0};
    for (double dt : spec.dts) {
      SchemeConfig cc = spec.base;
      cc.scheme = SchemeKind::SplitThin;
      cc.beta = beta;
      cc.dt = dt;
      ThinSolver sol(spec.phys, cc);
      sol.run();
      su.points.push_back(
          {dt, relative_error(sol.state().u.coeffs, u_ref, ref.velocity_mass())});
      se.points.push_back(
          {dt, relative_error(sol.state().eta.coeffs, eta_ref, ref.string_operator())});
    }
    fit_series(su);
    fit_series(se);
    rep.series.push_back(std::move(su));
    rep.series.push_back(std::move(se));
  }
  write_outputs(rep, spec, "figure_time_convergence.svg", "dt");
  return rep;
}

RateReport run_split_monolithic_gap(const StudySpec& spec) {
  if (spec.dts.empty())
    throw std::invalid_argument("scheme gap study: empty step list");

  RateReport rep;
  RateSeries su{"split_vs_monolithic", "velocity_L2", {}, 0.0};
  RateSeries se{"split_vs_monolithic", "displacement_S", {}, 0.0};
  for (double dt : spec.dts) {
    SchemeConfig cs = spec.base;
    cs.scheme = SchemeKind::SplitThin;
    cs.beta = 1.0;
    cs.dt = dt;
    ThinSolver split(spec.phys, cs);
    split.run();

    SchemeConfig cm = cs;
    cm.scheme = SchemeKind::MonolithicThin;
    ThinSolver mono(spec.phys, cm);
    mono.run();

    su.points.push_back({dt, relative_error(split.state().u.coeffs,
                                            mono.state().u.coeffs,
                                            mono.velocity_mass())});
    se.points.push_back({dt, relative_error(split.state().eta.coeffs,
                                            mono.state().eta.coeffs,
                                            mono.string_operator())});
  }
  fit_series(su);
  fit_series(se);
  rep.series.push_back(std::move(su));
  rep.series.push_back(std::move(se));
  write_outputs(rep, spec, "figure_scheme_gap.svg", "dt");
  return rep;
}

RateReport run_thick_scaling(const StudySpec& spec) {
  if (spec.nx_list.empty())
    throw std::invalid_argument("thick scaling study: empty resolution list");
  if (spec.ref_nx <= 0 || !(spec.dt_ref > 0.0))
    throw std::invalid_argument("thick scaling study: reference run not specified");
  for (int nx : spec.nx_list)
    if (nx >= spec.ref_nx)
      throw std::invalid_argument(
          "thick scaling study: reference mesh must be finer than every candidate");

  SchemeConfig rc = spec.base;
  rc.scheme = SchemeKind::SplitThick;
  rc.beta = 1.0;
  rc.nx = spec.ref_nx;
  rc.ny = 0;
  rc.dt = spec.dt_ref;
  ThickSolver ref(spec.phys, rc);
  ref.run();
  const DenseVector u_ref = ref.state().u.coeffs;
  const DenseVector eta_ref = ref.state().eta.coeffs;

  struct Ladder {
    const char* name;
    double c;
    double alpha;
  };
  const Ladder ladders[] = {{"dt~h", spec.c_linear, 1.0},
                            {"dt~h^1.5", spec.c_threehalf, 1.5}};

  RateReport rep;
  for (const auto& lad : ladders) {
    RateSeries su{lad.name, "velocity_L2", {}, 0.0};
    RateSeries se{lad.name, "displacement_S", {}, 0.0};
    for (int nx : spec.nx_list) {
      const double h = spec.base.L / nx;
      const double dt_raw = lad.c * std::pow(h, lad.alpha);
      const long long n = std::max(1ll, std::llround(spec.base.T / dt_raw));
      SchemeConfig cc = spec.base;
      cc.scheme = SchemeKind::SplitThick;
      cc.beta = 1.0;
      cc.nx = nx;
      cc.ny = 0;
      cc.dt = spec.base.T / static_cast<double>(n);
      ThickSolver sol(spec.phys, cc);
      sol.run();

      const DenseVector pu = prolong_p1_vector(sol.fluid_mesh(),
                                               sol.state().u.coeffs,
                                               ref.fluid_mesh());
      const DenseVector pe = prolong_p1_vector(sol.structure_mesh(),
                                               sol.state().eta.coeffs,
                                               ref.structure_mesh());
      su.points.push_back({h, relative_error(pu, u_ref, ref.velocity_mass())});
      se.points.push_back(
          {h, relative_error(pe, eta_ref, ref.elasticity_operator())});
      rep.runs.push_back({lad.name, nx, h, cc.dt,
                          check_stability_bound(sol.ledger(), spec.phys, cc)});
    }
    fit_series(su);
    fit_series(se);
    rep.series.push_back(std::move(su));
    rep.series.push_back(std::move(se));
  }
  write_outputs(rep, spec, "figure_thick_scaling.svg", "h");
  return rep;
}

}  // namespace fsi
