#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fsi/harness.hpp"

namespace fsi {

double spatial_norm(const SparseMatrix& M, const DenseVector& x) {
  return std::sqrt(std::max(0.0, M.quad_form(x, x)));
}

double time_discrete_norm(const std::vector<double>& samples, double dt,
                          TimeNormKind kind) {
  if (kind == TimeNormKind::Max) {
    double m = 0.0;
    for (double s : samples) m = std::max(m, std::abs(s));
    return m;
  }
  double acc = 0.0;
  for (double s : samples) acc += s * s;
  return std::sqrt(dt * acc);
}

double time_discrete_norm(const std::vector<DenseVector>& samples, double dt,
                          TimeNormKind kind, const SparseMatrix& M) {
  std::vector<double> norms;
  norms.reserve(samples.size());
  for (const auto& s : samples) norms.push_back(spatial_norm(M, s));
  return time_discrete_norm(norms, dt, kind);
}

double relative_error(const DenseVector& cand, const DenseVector& ref,
                      const SparseMatrix& M) {
  const double den = spatial_norm(M, ref);
  if (den == 0.0)
    throw std::runtime_error("relative_error: reference field has zero norm");
  return spatial_norm(M, cand - ref) / den;
}

double fit_rate(const std::vector<std::pair<double, double>>& step_error) {
  if (step_error.size() < 2)
    throw std::invalid_argument("fit_rate: need at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [step, err] : step_error) {
    if (!(step > 0.0) || !(err > 0.0))
      throw std::invalid_argument("fit_rate: coordinates must be positive");
    const double x = std::log(step), y = std::log(err);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(step_error.size());
  const double var = sxx - sx * sx / n;
  if (var <= 0.0)
    throw std::invalid_argument("fit_rate: steps must be distinct");
  return (sxy - sx * sy / n) / var;
}

const RateSeries* RateReport::find(const std::string& case_name,
                                   const std::string& norm) const {
  for (const auto& s : series)
    if (s.case_name == case_name && s.norm == norm) return &s;
  return nullptr;
}

}  // namespace fsi
