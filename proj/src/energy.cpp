#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "fsi/fsisolver.hpp"

namespace fsi {

PhysicalParams PhysicalParams::benchmark(double R) {
  PhysicalParams p;
  p.derive_membrane_coefficients(R);
  return p;
}

void PhysicalParams::derive_membrane_coefficients(double R) {
  C0 = E * eps / (R * R * (1.0 - sigma * sigma));
  C1 = E * eps / (2.0 * (1.0 + sigma));
}

void PhysicalParams::validate() const {
  if (rho_f <= 0.0 || rho_s <= 0.0 || mu <= 0.0 || eps <= 0.0)
    throw std::invalid_argument("PhysicalParams: densities, viscosity and thickness must be positive");
  if (C0 < 0.0 || C1 < 0.0 || (C0 == 0.0 && C1 == 0.0))
    throw std::invalid_argument("PhysicalParams: membrane coefficients not set");
  if (t_max <= 0.0) throw std::invalid_argument("PhysicalParams: t_max must be positive");
}

void SchemeConfig::validate() const {
  if (beta < 0.0 || beta > 1.0)
    throw std::invalid_argument("SchemeConfig: beta must lie in [0,1]");
  if (dt <= 0.0 || T <= 0.0) throw std::invalid_argument("SchemeConfig: dt and T must be positive");
  const double steps = T / dt;
  if (std::abs(steps - std::round(steps)) > 1e-8 * steps)
    throw std::invalid_argument("SchemeConfig: T must be an integer multiple of dt");
  if (nx < 2) throw std::invalid_argument("SchemeConfig: nx must be at least 2");
  if (L <= 0.0 || R <= 0.0 || H_s <= 0.0)
    throw std::invalid_argument("SchemeConfig: geometry must be positive");
}

int SchemeConfig::n_steps() const { return static_cast<int>(std::llround(T / dt)); }

int SchemeConfig::ny_or_default() const {
  if (ny > 0) return ny;
  return std::max(1, nx / 10);
}

void EnergyLedger::write_csv(std::ostream& os) const {
  os << "step,t,E_f,E_v,E_s,D_visc,K_tilde,K_split,T_lambda,W_in,balance_residual\n";
  char buf[512];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf,
                  "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  r.step, r.t, r.E_f, r.E_v, r.E_s, r.D_visc, r.K_tilde,
                  r.K_split, r.T_lambda, r.W_in, r.balance_residual);
    os << buf;
  }
}

StabilityReport check_stability_bound(const EnergyLedger& ledger,
                                      const PhysicalParams& phys,
                                      const SchemeConfig& cfg) {
  StabilityReport rep;
  if (ledger.rows.empty()) return rep;

  double dissipation = 0.0;
  for (size_t i = 1; i < ledger.rows.size(); ++i)
    dissipation += ledger.rows[i].dissipation();
  rep.lhs = ledger.rows.back().total_energy() + dissipation;

  // Forcing strength: dt * sum ||p_in(t^{n+1})||^2 over the inlet (the
  // boundary datum is constant on the inlet edge of length R).
  double forcing = 0.0;
  for (size_t i = 1; i < ledger.rows.size(); ++i) {
    const double p = pressure_pulse(ledger.rows[i].t, phys.p_max, phys.t_max);
    forcing += cfg.dt * p * p * cfg.R;
  }
  rep.rhs = ledger.rows.front().total_energy() + forcing;
  rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : 0.0;

  for (size_t i = 1; i < ledger.rows.size(); ++i) {
    const double p = pressure_pulse(ledger.rows[i].t, phys.p_max, phys.t_max);
    if (p != 0.0) continue;  // step received boundary work
    ++rep.zero_inflow_steps;
    const double before = ledger.rows[i - 1].total_energy();
    const double after = ledger.rows[i].total_energy();
    const double viol = (after - before) / std::max(before, 1e-30);
    rep.max_violation = std::max(rep.max_violation, viol);
  }
  rep.monotone_after_pulse = rep.max_violation <= 1e-10;
  return rep;
}

}  // namespace fsi
