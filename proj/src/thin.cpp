#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "fsi/fsisolver.hpp"
#include "scheme_common.hpp"

namespace fsi {

using detail::append_lifted;
using detail::gather;
using detail::scatter_add;
using detail::zero_constrained;

struct ThinSolver::Impl {
  PhysicalParams phys;
  SchemeConfig cfg;

  Mesh2D mesh;
  InterfaceMesh1D iface;
  DofMap vel_map, pres_map, itf_map;

  SparseMatrix M_f;   // MINI velocity mass (unit weight)
  SparseMatrix A_f;   // 2 mu D:D
  SparseMatrix B;     // pressure rows x velocity cols
  SparseMatrix M_G;   // interface P1 mass
  SparseMatrix K_s;   // membrane operator C0 m + C1 k
  std::vector<int> tdofs;  // interface node -> global y-velocity dof
  DenseVector load_unit;   // inlet load at unit pressure

  std::vector<Constraint> fluid_cs;   // saddle system, velocity dofs only
  std::vector<Constraint> struct_cs;  // clamped wall ends

  std::optional<Factorization> struct_fac;
  std::optional<Factorization> fluid_fac;  // split or monolithic saddle

  int n_u = 0, n_p = 0;

  FsiState st;
  EnergyLedger ledger;

  // snapshots taken at the start of each step for the energy bookkeeping
  DenseVector u_prev, v_prev, eta_prev, lam_prev;
  double last_p_in = 0.0;
  double split_err = 0.0;
  double div_resid = 0.0;
  int stage = 0;  // 0 between steps, 1/2 inside a staged split step

  double rho_se() const { return phys.rho_s * phys.eps; }

  void build();
  void begin_step();
  void finish_step();
  void do_step_structure();
  void do_step_fluid(const Factorization& fac);
  void do_update_traction();
  void append_row();
  std::array<double, 3> energies() const;
};

void ThinSolver::Impl::build() {
  phys.validate();
  cfg.validate();
  const int ny = cfg.ny_or_default();

  mesh = build_rectangle_mesh(cfg.L, cfg.R, cfg.nx, ny, fluid_tags());
  iface = extract_interface(mesh);
  vel_map = DofMap::mini_velocity(mesh);
  pres_map = DofMap::p1_scalar(mesh);
  itf_map = DofMap::interface_scalar(iface);
  n_u = vel_map.n_dofs;
  n_p = pres_map.n_dofs;

  M_f = assemble_mass(mesh, vel_map, 1.0, cfg.assembly);
  A_f = assemble_fluid_stiffness(mesh, vel_map, phys.mu, cfg.assembly);
  B = assemble_divergence(mesh, vel_map, mesh, pres_map, cfg.assembly);
  M_G = assemble_mass(iface, itf_map, 1.0);
  K_s = assemble_string_operator(iface, phys.C0, phys.C1);
  tdofs = trace_dofs(vel_map, iface, itf_map);
  load_unit = assemble_boundary_load(mesh, vel_map, BoundaryTag::Inlet, 1.0);

  // Wall ends are clamped; the intermediate wall velocity vanishes there.
  struct_cs = {{0, 0.0}, {iface.n_nodes() - 1, 0.0}};

  // Fluid constraints: no axial slip on the wall (the wall moves radially),
  // full no-slip at the clamped wall ends, symmetry u_y = 0 at the bottom.
  {
    std::vector<char> fix(n_u, 0);
    for (int i = 0; i < iface.n_nodes(); ++i)
      fix[vel_map.vdof(iface.parent_vertex[i], 0)] = 1;
    fix[tdofs.front()] = 1;
    fix[tdofs.back()] = 1;
    for (const auto& e : mesh.boundary_edges)
      if (e.tag == BoundaryTag::Bottom) {
        fix[vel_map.vdof(e.a, 1)] = 1;
        fix[vel_map.vdof(e.b, 1)] = 1;
      }
    for (int d = 0; d < n_u; ++d)
      if (fix[d]) fluid_cs.push_back({d, 0.0});
  }

  const double dt = cfg.dt;
  const int N = n_u + n_p;

  if (cfg.scheme == SchemeKind::SplitThin) {
    std::vector<Triplet> t;
    M_G.append_triplets(t, rho_se() / dt, 0, 0);
    K_s.append_triplets(t, dt, 0, 0);
    LinearSystem sys{SparseMatrix::from_triplets(iface.n_nodes(), iface.n_nodes(), std::move(t)),
                     DenseVector::Zero(iface.n_nodes()), struct_cs};
    struct_fac.emplace(eliminate_constraints(sys).A, cfg.solver_tol);
  }

  {
    std::vector<Triplet> t;
    M_f.append_triplets(t, phys.rho_f / dt, 0, 0);
    A_f.append_triplets(t, 1.0, 0, 0);
    append_lifted(t, M_G, tdofs, rho_se() / dt);  // wall inertia on the trace
    if (cfg.scheme == SchemeKind::MonolithicThin)
      append_lifted(t, K_s, tdofs, dt);  // eliminated wall elasticity
    B.append_triplets(t, -1.0, n_u, 0);
    B.append_triplets(t, -1.0, 0, n_u, /*transpose=*/true);
    LinearSystem sys{SparseMatrix::from_triplets(N, N, std::move(t)),
                     DenseVector::Zero(N), fluid_cs};
    fluid_fac.emplace(eliminate_constraints(sys).A, cfg.solver_tol);
  }

  st.u = {&vel_map, DenseVector::Zero(n_u)};
  st.p = {&pres_map, DenseVector::Zero(n_p)};
  st.eta = {&itf_map, DenseVector::Zero(iface.n_nodes())};
  st.v = {&itf_map, DenseVector::Zero(iface.n_nodes())};
  st.v_tilde = {&itf_map, DenseVector::Zero(iface.n_nodes())};
  st.lambda = {&itf_map, DenseVector::Zero(iface.n_nodes())};

  LedgerRow r0;
  const auto e = energies();
  r0.E_f = e[0];
  r0.E_v = e[1];
  r0.E_s = e[2];
  ledger.rows.push_back(r0);
}

std::array<double, 3> ThinSolver::Impl::energies() const {
  return {0.5 * phys.rho_f * M_f.quad_form(st.u.coeffs, st.u.coeffs),
          0.5 * rho_se() * M_G.quad_form(st.v.coeffs, st.v.coeffs),
          0.5 * K_s.quad_form(st.eta.coeffs, st.eta.coeffs)};
}

void ThinSolver::Impl::do_step_structure() {
  const double dt = cfg.dt;
  // (rho_s eps/dt) M v^n - K eta^n - beta M lambda^n
  DenseVector rhs =
      M_G.multiply((rho_se() / dt) * st.v.coeffs - cfg.beta * st.lambda.coeffs) -
      K_s.multiply(st.eta.coeffs);
  zero_constrained(rhs, struct_cs);
  st.v_tilde.coeffs = struct_fac->solve(rhs);
  st.eta.coeffs += dt * st.v_tilde.coeffs;
}

void ThinSolver::Impl::do_step_fluid(const Factorization& fac) {
  const double dt = cfg.dt;
  last_p_in = pressure_pulse((st.n + 1) * dt, phys.p_max, phys.t_max);

  DenseVector rhs = DenseVector::Zero(n_u + n_p);
  rhs.head(n_u) = M_f.multiply((phys.rho_f / dt) * st.u.coeffs) - last_p_in * load_unit;
  DenseVector iface_rhs;
  if (cfg.scheme == SchemeKind::SplitThin) {
    iface_rhs = M_G.multiply((rho_se() / dt) * st.v_tilde.coeffs +
                             cfg.beta * st.lambda.coeffs);
  } else {
    iface_rhs = M_G.multiply((rho_se() / dt) * st.v.coeffs) -
                K_s.multiply(st.eta.coeffs);
  }
  scatter_add(rhs, tdofs, iface_rhs);
  zero_constrained(rhs, fluid_cs);

  const DenseVector sol = fac.solve(rhs);
  st.u.coeffs = sol.head(n_u);
  st.p.coeffs = sol.tail(n_p);
  st.v.coeffs = gather(st.u.coeffs, tdofs);

  const double bu = B.multiply(st.u.coeffs).norm();
  div_resid = bu / std::max(st.u.coeffs.norm(), 1e-30);
}

void ThinSolver::Impl::do_update_traction() {
  const DenseVector kick =
      (rho_se() / cfg.dt) * (st.v.coeffs - st.v_tilde.coeffs);
  const DenseVector lam_new = cfg.beta * st.lambda.coeffs - kick;

  double scale = std::max({lam_new.lpNorm<Eigen::Infinity>(),
                           st.lambda.coeffs.lpNorm<Eigen::Infinity>(),
                           kick.lpNorm<Eigen::Infinity>(), 1e-30});
  split_err = (lam_new - cfg.beta * st.lambda.coeffs + kick).lpNorm<Eigen::Infinity>() / scale;
  st.lambda.coeffs = lam_new;
}

void ThinSolver::Impl::append_row() {
  const double dt = cfg.dt;
  LedgerRow r;
  r.step = st.n;
  r.t = st.t;
  const auto e = energies();
  r.E_f = e[0];
  r.E_v = e[1];
  r.E_s = e[2];
  r.D_visc = dt * A_f.quad_form(st.u.coeffs, st.u.coeffs);

  const DenseVector du = st.u.coeffs - u_prev;
  const DenseVector deta = st.eta.coeffs - eta_prev;
  r.du_kick = 0.5 * phys.rho_f * M_f.quad_form(du, du);
  r.deta_kick = 0.5 * K_s.quad_form(deta, deta);
  r.W_in = -dt * last_p_in * load_unit.dot(st.u.coeffs);

  double rhs_id = r.W_in;
  if (cfg.scheme == SchemeKind::SplitThin) {
    const DenseVector dvt = st.v_tilde.coeffs - v_prev;
    const DenseVector dsp = st.v.coeffs - st.v_tilde.coeffs;
    r.K_tilde = 0.5 * rho_se() * M_G.quad_form(dvt, dvt);
    r.K_split = 0.5 * rho_se() * M_G.quad_form(dsp, dsp);
    r.T_lambda =
        dt * dt / (2.0 * rho_se()) * M_G.quad_form(st.lambda.coeffs, st.lambda.coeffs);
    rhs_id += cfg.beta * dt * M_G.quad_form(lam_prev, dsp);
  } else {
    const DenseVector dv = st.v.coeffs - v_prev;
    r.K_tilde = 0.5 * rho_se() * M_G.quad_form(dv, dv);
  }

  const LedgerRow& prev = ledger.rows.back();
  const double lhs = (r.E_f - prev.E_f) + (r.E_v - prev.E_v) + (r.E_s - prev.E_s) +
                     r.D_visc + r.K_tilde + r.K_split + r.du_kick + r.deta_kick;
  const double scale =
      std::max({r.E_f, prev.E_f, r.E_v, prev.E_v, r.E_s, prev.E_s, r.D_visc,
                r.K_tilde, r.K_split, r.du_kick, r.deta_kick, std::abs(r.W_in),
                std::abs(rhs_id), 1e-30});
  r.balance_residual = std::abs(lhs - rhs_id) / scale;
  ledger.rows.push_back(r);
}

ThinSolver::ThinSolver(const PhysicalParams& phys, const SchemeConfig& cfg)
    : impl_(std::make_unique<Impl>()) {
  if (cfg.scheme == SchemeKind::SplitThick)
    throw std::invalid_argument("ThinSolver: thick scheme requested; use ThickSolver");
  impl_->phys = phys;
  impl_->cfg = cfg;
  impl_->build();
}

ThinSolver::~ThinSolver() = default;

void ThinSolver::Impl::begin_step() {
  u_prev = st.u.coeffs;
  v_prev = st.v.coeffs;
  eta_prev = st.eta.coeffs;
  lam_prev = st.lambda.coeffs;
}

void ThinSolver::Impl::finish_step() {
  st.n += 1;
  st.t = st.n * cfg.dt;
  append_row();
}

void ThinSolver::step_structure() {
  if (impl_->cfg.scheme != SchemeKind::SplitThin)
    throw std::logic_error("step_structure: only defined for the splitting scheme");
  if (impl_->stage != 0)
    throw std::logic_error("step_structure: a staged step is already in progress");
  impl_->begin_step();
  impl_->do_step_structure();
  impl_->stage = 1;
}

void ThinSolver::step_fluid() {
  if (impl_->cfg.scheme != SchemeKind::SplitThin)
    throw std::logic_error("step_fluid: only defined for the splitting scheme");
  if (impl_->stage != 1)
    throw std::logic_error("step_fluid: call step_structure first");
  impl_->do_step_fluid(*impl_->fluid_fac);
  impl_->stage = 2;
}

void ThinSolver::update_traction() {
  if (impl_->cfg.scheme != SchemeKind::SplitThin)
    throw std::logic_error("update_traction: only defined for the splitting scheme");
  if (impl_->stage != 2)
    throw std::logic_error("update_traction: call step_fluid first");
  impl_->do_update_traction();
  impl_->stage = 0;
  impl_->finish_step();
}

void ThinSolver::advance() {
  auto& im = *impl_;
  if (im.stage != 0)
    throw std::logic_error("advance: finish the staged step first");
  im.begin_step();
  if (im.cfg.scheme == SchemeKind::SplitThin) {
    im.do_step_structure();
    im.do_step_fluid(*im.fluid_fac);
    im.do_update_traction();
  } else {
    im.do_step_fluid(*im.fluid_fac);  // monolithic: one coupled solve
    im.st.eta.coeffs += im.cfg.dt * im.st.v.coeffs;
    im.st.v_tilde.coeffs = im.st.v.coeffs;
    im.split_err = 0.0;
  }
  im.finish_step();
}

void ThinSolver::run() {
  const int n = impl_->cfg.n_steps();
  while (impl_->st.n < n) advance();
}

std::array<double, 3> ThinSolver::compute_energies() const { return impl_->energies(); }

const FsiState& ThinSolver::state() const { return impl_->st; }
const EnergyLedger& ThinSolver::ledger() const { return impl_->ledger; }
const SchemeConfig& ThinSolver::config() const { return impl_->cfg; }
const PhysicalParams& ThinSolver::params() const { return impl_->phys; }
const Mesh2D& ThinSolver::mesh() const { return impl_->mesh; }
const InterfaceMesh1D& ThinSolver::interface() const { return impl_->iface; }
const SparseMatrix& ThinSolver::velocity_mass() const { return impl_->M_f; }
const SparseMatrix& ThinSolver::fluid_stiffness() const { return impl_->A_f; }
const SparseMatrix& ThinSolver::divergence() const { return impl_->B; }
const SparseMatrix& ThinSolver::interface_mass() const { return impl_->M_G; }
const SparseMatrix& ThinSolver::string_operator() const { return impl_->K_s; }
double ThinSolver::splitting_identity_error() const { return impl_->split_err; }
double ThinSolver::divergence_residual() const { return impl_->div_resid; }

}  // namespace fsi
