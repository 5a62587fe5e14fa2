// Time-stepping schemes for the Stokes / elastic-wall benchmark: the
// loosely coupled splitting scheme (structure step with beta-scaled traction
// load, fluid step with interface inertia, algebraic traction update), the
// monolithic backward-Euler reference, and the thick-wall variant, plus the
// per-step energy ledger and the stability report.
#pragma once

#include <array>
#include <iosfwd>
#include <memory>
#include <optional>

#include "fsi/fem.hpp"

namespace fsi {

struct PhysicalParams {
  double rho_f = 1.0;    // g/cm^3
  double mu = 0.035;     // g/(cm s)
  double rho_s = 1.1;    // g/cm^3
  double eps = 0.1;      // cm, thin wall thickness
  double E = 7.5e5;      // dyne/cm^2, Young modulus (thin wall)
  double sigma = 0.5;    // Poisson ratio (thin wall)
  double C0 = 0.0;       // dyne/cm^3, membrane stiffness (derived if 0)
  double C1 = 0.0;       // dyne/cm,   bending/tension coefficient (derived if 0)
  double mu_s = 2.586e5;     // dyne/cm^2, thick wall shear modulus
  double lambda_s = 2.328e6;  // dyne/cm^2, thick wall first Lame parameter
  double c_as = 4.0e6;       // dyne/cm^4, spring keeping the thick wall in place
  double p_max = 1.3333e4;   // dyne/cm^2, pulse amplitude
  double t_max = 3.0e-3;     // s, pulse duration

  // Benchmark constants; fills C0 = E*eps/(R^2(1-sigma^2)), C1 = E*eps/(2(1+sigma)).
  static PhysicalParams benchmark(double R = 0.5);
  void derive_membrane_coefficients(double R);
  void validate() const;
};

enum class SchemeKind { SplitThin, MonolithicThin, SplitThick };

struct SchemeConfig {
  SchemeKind scheme = SchemeKind::SplitThin;
  double beta = 1.0;
  double dt = 1.0e-3;  // s
  double T = 16.0e-3;  // s, must be an integer multiple of dt
  int nx = 40;
  int ny = 0;          // 0: nx/10, which keeps cells square for the benchmark box
  double L = 5.0;      // cm
  double R = 0.5;      // cm, fluid channel height
  double H_s = 0.1;    // cm, thick wall height
  bool lumped_interface_mass = false;  // thick traction update only
  double solver_tol = 1e-10;
  AssemblyMode assembly = AssemblyMode::Parallel;

  void validate() const;
  int n_steps() const;
  int ny_or_default() const;
};

// Everything the schemes evolve, one time level.
struct FsiState {
  Field u;        // fluid velocity
  Field p;        // pressure
  Field eta;      // structure displacement
  Field v;        // structure velocity
  Field v_tilde;  // intermediate structure velocity (structure step output)
  Field lambda;   // interface traction (discrete sigma(u,p) n on the wall)
  double t = 0.0;
  int n = 0;
};

struct LedgerRow {
  int step = 0;
  double t = 0.0;
  double E_f = 0.0, E_v = 0.0, E_s = 0.0;
  double D_visc = 0.0;    // 2 mu dt ||D(u^{n+1})||^2
  double K_tilde = 0.0;   // structure-step velocity kick(s)
  double K_split = 0.0;   // fluid-step interface kick(s); 0 for monolithic
  double T_lambda = 0.0;  // traction energy (dt^2 / 2 rho) in the scheme's norm
  double W_in = 0.0;      // boundary-pressure work over the step
  double balance_residual = 0.0;
  // Terms of the per-step identity that are not ledger CSV columns:
  double du_kick = 0.0;    // (rho_f/2)||u^{n+1}-u^n||^2 (thin schemes)
  double deta_kick = 0.0;  // (1/2)||eta^{n+1}-eta^n||^2 in the elastic norm

  double total_energy() const { return E_f + E_v + E_s + T_lambda; }
  double dissipation() const {
    return D_visc + K_tilde + K_split + du_kick + deta_kick;
  }
};

struct EnergyLedger {
  std::vector<LedgerRow> rows;  // row 0 holds the initial energies
  void write_csv(std::ostream& os) const;
};

struct StabilityReport {
  double lhs = 0.0;    // final total energy + accumulated dissipation
  double rhs = 0.0;    // initial total energy + dt sum ||p_in||^2_{L2(inlet)}
  double ratio = 0.0;  // measured stability constant lhs/rhs (0 if rhs = 0)
  bool monotone_after_pulse = true;
  double max_violation = 0.0;  // worst relative energy increase, zero-inflow steps
  int zero_inflow_steps = 0;
};

// Evaluates the global energy estimate over a finished run and checks that
// total energy is non-increasing on every step with zero boundary forcing.
StabilityReport check_stability_bound(const EnergyLedger& ledger,
                                      const PhysicalParams& phys,
                                      const SchemeConfig& cfg);

// Thin-wall solver: MINI velocity / P1 pressure in the channel, P1 radial
// displacement on the wall. Runs either the splitting scheme or the
// monolithic backward-Euler reference depending on cfg.scheme.
class ThinSolver {
 public:
  ThinSolver(const PhysicalParams& phys, const SchemeConfig& cfg);
  ~ThinSolver();
  ThinSolver(const ThinSolver&) = delete;
  ThinSolver& operator=(const ThinSolver&) = delete;

  void advance();  // one time step, appends a ledger row
  void run();      // all n_steps()

  // Splitting-scheme stages, exposed for white-box tests (split config
  // only); call in this order, after which the step is fully booked.
  void step_structure();
  void step_fluid();
  void update_traction();

  std::array<double, 3> compute_energies() const;  // {E_f, E_v, E_s}

  const FsiState& state() const;
  const EnergyLedger& ledger() const;
  const SchemeConfig& config() const;
  const PhysicalParams& params() const;

  const Mesh2D& mesh() const;
  const InterfaceMesh1D& interface() const;
  const SparseMatrix& velocity_mass() const;
  const SparseMatrix& fluid_stiffness() const;
  const SparseMatrix& divergence() const;
  const SparseMatrix& interface_mass() const;
  const SparseMatrix& string_operator() const;

  // max nodal defect of lambda^{n+1} - beta lambda^n + (rho_s eps/dt)(v - vtilde),
  // relative to the fields' magnitude; refreshed every step.
  double splitting_identity_error() const;
  // ||B u^{n+1}|| / max(||u^{n+1}||, eps) from the last fluid solve.
  double divergence_residual() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Thick-wall solver: P1 velocity on the once-refined fluid mesh with P1
// pressure on the coarse mesh, P1 vector displacement on the wall block.
class ThickSolver {
 public:
  ThickSolver(const PhysicalParams& phys, const SchemeConfig& cfg);
  ~ThickSolver();
  ThickSolver(const ThickSolver&) = delete;
  ThickSolver& operator=(const ThickSolver&) = delete;

  void advance();
  void run();

  std::array<double, 3> compute_energies() const;

  const FsiState& state() const;
  const EnergyLedger& ledger() const;
  const SchemeConfig& config() const;
  const PhysicalParams& params() const;

  const Mesh2D& fluid_mesh() const;      // refined velocity mesh
  const Mesh2D& structure_mesh() const;
  const InterfaceMesh1D& interface() const;
  const SparseMatrix& velocity_mass() const;
  const SparseMatrix& structure_mass() const;
  const SparseMatrix& elasticity_operator() const;

  // Defect of the variational traction update, relative to field magnitude.
  double splitting_identity_error() const;
  double divergence_residual() const;
  // ||v^{n+1} - v_tilde|| restricted to interior structure dofs (exact zero).
  double interior_velocity_defect() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace fsi
