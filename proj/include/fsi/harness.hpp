#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "fsi/fsisolver.hpp"

namespace fsi {

enum class TimeNormKind { L2, Max };

// sqrt(x^T M x) for a symmetric positive semidefinite M; tiny negative
// round-off under the quadratic form is clamped to zero.
double spatial_norm(const SparseMatrix& M, const DenseVector& x);

// Discrete-in-time norm of a scalar sample sequence: sqrt(dt sum s_n^2) or
// max_n |s_n|.
double time_discrete_norm(const std::vector<double>& samples, double dt,
                          TimeNormKind kind);

// Same reduction applied to the M-norms of a sequence of coefficient vectors.
double time_discrete_norm(const std::vector<DenseVector>& samples, double dt,
                          TimeNormKind kind, const SparseMatrix& M);

// ||cand - ref||_M / ||ref||_M; throws if the reference has zero norm.
double relative_error(const DenseVector& cand, const DenseVector& ref,
                      const SparseMatrix& M);

// Least-squares slope of log(error) against log(step); needs at least two
// points and strictly positive coordinates.
double fit_rate(const std::vector<std::pair<double, double>>& step_error);

struct RatePoint {
  double step = 0.0;  // dt for time studies, h for the thick-wall study
  double error = 0.0;
};

struct RateSeries {
  std::string case_name;
  std::string norm;  // "velocity_L2" or "displacement_S"
  std::vector<RatePoint> points;
  double slope = 0.0;
};

struct ThickRunInfo {
  std::string case_name;
  int nx = 0;
  double h = 0.0;
  double dt = 0.0;
  StabilityReport stability;
};

struct RateReport {
  std::vector<RateSeries> series;
  std::vector<ThickRunInfo> runs;  // filled by the thick-wall study
  const RateSeries* find(const std::string& case_name,
                         const std::string& norm) const;
};

struct StudySpec {
  SchemeConfig base;  // geometry/mesh/horizon; dt and beta set per run
  PhysicalParams phys = PhysicalParams::benchmark();

  // Time-refinement study.
  std::vector<double> betas{1.0};
  std::vector<double> dts;
  double dt_ref = 0.0;

  // Thick-wall step/mesh scaling study.
  std::vector<int> nx_list;
  int ref_nx = 0;
  double c_linear = 4e-3;     // dt = c h
  double c_threehalf = 4e-3;  // dt = c h^{3/2}

  std::string output_dir;  // empty: keep everything in memory
  bool write_figures = false;
};

// Splitting scheme against a fine-step run of itself on the same mesh; one
// series per (beta, norm), case names "beta=<value>".
RateReport run_time_convergence(const StudySpec& spec);

// Distance between the splitting scheme (beta = 1) and the implicit coupled
// scheme at matched steps; case name "split_vs_monolithic".
RateReport run_split_monolithic_gap(const StudySpec& spec);

// Thick-wall scheme under the two step ladders dt = c h and dt = c h^{3/2}
// ("dt~h", "dt~h^1.5"), measured against a fine space-time reference.
RateReport run_thick_scaling(const StudySpec& spec);

void write_rates_csv(std::ostream& out, const RateReport& report);

int cli_main(int argc, char** argv);

namespace svg {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;  // strictly positive
};

// Self-contained log-log scatter/line plot with decade ticks and a legend.
void write_loglog(std::ostream& out, const std::string& title,
                  const std::string& xlabel, const std::string& ylabel,
                  const std::vector<Series>& series);

}  // namespace svg

}  // namespace fsi
