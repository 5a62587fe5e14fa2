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

namespace {

// Power-of-two row count that keeps wall elements near unit aspect ratio and
// the wall mesh nested under uniform refinement of coarser configurations.
int wall_rows(int nx_fine, double H_s, double L) {
  const double target = std::log2(nx_fine * H_s / L);
  const int p = std::max(0, static_cast<int>(std::llround(target)));
  return 1 << p;
}

SparseMatrix lump_diagonal(const SparseMatrix& M) {
  std::vector<Triplet> t;
  DenseVector ones = DenseVector::Ones(M.cols());
  const DenseVector d = M.multiply(ones);
  t.reserve(M.rows());
  for (int i = 0; i < M.rows(); ++i) t.push_back({i, i, d[i]});
  return SparseMatrix::from_triplets(M.rows(), M.cols(), std::move(t));
}

}  // namespace

struct ThickSolver::Impl {
  PhysicalParams phys;
  SchemeConfig cfg;

  Mesh2D coarse;   // pressure mesh
  Mesh2D fine;     // velocity mesh = uniform_refine(coarse)
  Mesh2D smesh;    // wall block, local coordinates (0,L) x (0,H_s)
  InterfaceMesh1D iface_f, iface_s;

  DofMap vel_map, pres_map, disp_map, itf_map;

  SparseMatrix M_F, A_f, B;     // fluid mass, viscous form, divergence
  SparseMatrix M_S, K_ts;       // wall mass and elasticity (incl. spring term)
  SparseMatrix M_G;             // consistent interface vector mass
  SparseMatrix Mop;             // traction mass actually used (may be lumped)
  SparseMatrix A_F_G, A_S_G;    // interface blocks of M_F and M_S

  std::vector<int> tf, ts;      // interface dof -> global fluid / wall dof
  DenseVector load_unit;

  std::vector<Constraint> fluid_cs, struct_cs;

  std::optional<Factorization> fac_s, fac_f, fac_mg, fac_asg;

  int n_u = 0, n_p = 0, n_s = 0, n_g = 0;

  FsiState st;
  EnergyLedger ledger;

  double last_p_in = 0.0;
  double split_err = 0.0;
  double div_resid = 0.0;
  double interior_defect = 0.0;

  void build();
  void do_advance();
  std::array<double, 3> energies() const;
  double traction_energy(const DenseVector& lam) const;
};

void ThickSolver::Impl::build() {
  phys.validate();
  cfg.validate();
  if (cfg.scheme != SchemeKind::SplitThick)
    throw std::invalid_argument("ThickSolver: config does not request the thick scheme");
  const int ny = cfg.ny_or_default();

  coarse = build_rectangle_mesh(cfg.L, cfg.R, cfg.nx, ny, fluid_tags());
  fine = uniform_refine(coarse);
  smesh = build_rectangle_mesh(cfg.L, cfg.H_s, 2 * cfg.nx,
                               wall_rows(2 * cfg.nx, cfg.H_s, cfg.L),
                               structure_tags());
  iface_f = extract_interface(fine);
  iface_s = extract_interface(smesh);
  if (iface_f.n_nodes() != iface_s.n_nodes())
    throw std::runtime_error("thick scheme: interface vertex counts do not match");
  for (int i = 0; i < iface_f.n_nodes(); ++i)
    if (std::abs(iface_f.nodes[i] - iface_s.nodes[i]) > 1e-12 * std::max(1.0, cfg.L))
      throw std::runtime_error("thick scheme: interface vertices do not line up");

  vel_map = DofMap::p1_vector(fine);
  pres_map = DofMap::p1_scalar(coarse);
  disp_map = DofMap::p1_vector(smesh);
  itf_map = DofMap::interface_vector(iface_f);
  n_u = vel_map.n_dofs;
  n_p = pres_map.n_dofs;
  n_s = disp_map.n_dofs;
  n_g = itf_map.n_dofs;

  M_F = assemble_mass(fine, vel_map, 1.0, cfg.assembly);
  A_f = assemble_fluid_stiffness(fine, vel_map, phys.mu, cfg.assembly);
  B = assemble_divergence(fine, vel_map, coarse, pres_map, cfg.assembly);
  M_S = assemble_mass(smesh, disp_map, 1.0, cfg.assembly);
  K_ts = assemble_thick_elasticity(smesh, disp_map, phys.mu_s, phys.lambda_s,
                                   phys.c_as, cfg.assembly);
  M_G = assemble_mass(iface_f, itf_map, 1.0);
  Mop = cfg.lumped_interface_mass ? lump_diagonal(M_G) : M_G;
  tf = trace_dofs(vel_map, iface_f, itf_map);
  ts = trace_dofs(disp_map, iface_s, DofMap::interface_vector(iface_s));
  A_F_G = M_F.submatrix(tf, tf);
  A_S_G = M_S.submatrix(ts, ts);
  load_unit = assemble_boundary_load(fine, vel_map, BoundaryTag::Inlet, 1.0);

  // Wall is clamped on both vertical ends.
  {
    std::vector<char> fix(n_s, 0);
    for (const auto& e : smesh.boundary_edges)
      if (e.tag == BoundaryTag::Inlet || e.tag == BoundaryTag::Outlet)
        for (int v : {e.a, e.b})
          for (int c = 0; c < 2; ++c) fix[disp_map.vdof(v, c)] = 1;
    for (int d = 0; d < n_s; ++d)
      if (fix[d]) struct_cs.push_back({d, 0.0});
  }
  // Fluid: symmetry at the bottom, no slip at the clamped interface corners.
  {
    std::vector<char> fix(n_u, 0);
    for (const auto& e : fine.boundary_edges)
      if (e.tag == BoundaryTag::Bottom) {
        fix[vel_map.vdof(e.a, 1)] = 1;
        fix[vel_map.vdof(e.b, 1)] = 1;
      }
    for (int node : {0, iface_f.n_nodes() - 1})
      for (int c = 0; c < 2; ++c)
        fix[vel_map.vdof(iface_f.parent_vertex[node], c)] = 1;
    for (int d = 0; d < n_u; ++d)
      if (fix[d]) fluid_cs.push_back({d, 0.0});
  }

  const double dt = cfg.dt;
  {
    std::vector<Triplet> t;
    M_S.append_triplets(t, phys.rho_s / dt, 0, 0);
    K_ts.append_triplets(t, dt, 0, 0);
    append_lifted(t, A_F_G, ts, phys.rho_f / dt);  // fluid inertia seen by the wall
    LinearSystem sys{SparseMatrix::from_triplets(n_s, n_s, std::move(t)),
                     DenseVector::Zero(n_s), struct_cs};
    fac_s.emplace(eliminate_constraints(sys).A, cfg.solver_tol);
  }
  {
    const int N = n_u + n_p;
    std::vector<Triplet> t;
    M_F.append_triplets(t, phys.rho_f / dt, 0, 0);
    A_f.append_triplets(t, 1.0, 0, 0);
    append_lifted(t, A_S_G, tf, phys.rho_s / dt);  // wall inertia seen by the fluid
    B.append_triplets(t, -1.0, n_u, 0);
    B.append_triplets(t, -1.0, 0, n_u, /*transpose=*/true);
    LinearSystem sys{SparseMatrix::from_triplets(N, N, std::move(t)),
                     DenseVector::Zero(N), fluid_cs};
    fac_f.emplace(eliminate_constraints(sys).A, cfg.solver_tol);
  }
  fac_mg.emplace(Mop, cfg.solver_tol);
  fac_asg.emplace(A_S_G, cfg.solver_tol);

  st.u = {&vel_map, DenseVector::Zero(n_u)};
  st.p = {&pres_map, DenseVector::Zero(n_p)};
  st.eta = {&disp_map, DenseVector::Zero(n_s)};
  st.v = {&disp_map, DenseVector::Zero(n_s)};
  st.v_tilde = {&disp_map, DenseVector::Zero(n_s)};
  st.lambda = {&itf_map, DenseVector::Zero(n_g)};

  LedgerRow r0;
  const auto e = energies();
  r0.E_f = e[0];
  r0.E_v = e[1];
  r0.E_s = e[2];
  ledger.rows.push_back(r0);
}

std::array<double, 3> ThickSolver::Impl::energies() const {
  return {0.5 * phys.rho_f * M_F.quad_form(st.u.coeffs, st.u.coeffs),
          0.5 * phys.rho_s * M_S.quad_form(st.v.coeffs, st.v.coeffs),
          0.5 * K_ts.quad_form(st.eta.coeffs, st.eta.coeffs)};
}

double ThickSolver::Impl::traction_energy(const DenseVector& lam) const {
  const DenseVector w = Mop.multiply(lam);
  const DenseVector z = fac_asg->solve(w);
  return cfg.dt * cfg.dt / (2.0 * phys.rho_s) * w.dot(z);
}

void ThickSolver::Impl::do_advance() {
  const double dt = cfg.dt;
  const double beta = cfg.beta;
  const DenseVector u_prev = st.u.coeffs;
  const DenseVector v_prev = st.v.coeffs;
  const DenseVector eta_prev = st.eta.coeffs;
  const DenseVector lam_prev = st.lambda.coeffs;
  const DenseVector uG_prev = gather(u_prev, tf);
  last_p_in = pressure_pulse((st.n + 1) * dt, phys.p_max, phys.t_max);

  // Step 1: implicit wall step, loaded by the explicit fluid trace and the
  // lagged traction. Unknown is the intermediate wall velocity.
  DenseVector rhs_s =
      M_S.multiply((phys.rho_s / dt) * v_prev) - K_ts.multiply(eta_prev);
  scatter_add(rhs_s, ts, A_F_G.multiply(uG_prev), phys.rho_f / dt);
  scatter_add(rhs_s, ts, Mop.multiply(lam_prev), -beta);
  zero_constrained(rhs_s, struct_cs);
  st.v_tilde.coeffs = fac_s->solve(rhs_s);
  st.eta.coeffs += dt * st.v_tilde.coeffs;
  const DenseVector vtG = gather(st.v_tilde.coeffs, ts);

  // Step 2: fluid with Robin-type wall inertia on the interface. The fluid
  // restarts from the previous velocity with its trace moved to the wall's.
  DenseVector u_tilde = u_prev;
  for (size_t i = 0; i < tf.size(); ++i) u_tilde[tf[i]] = vtG[static_cast<int>(i)];

  DenseVector rhs_f = DenseVector::Zero(n_u + n_p);
  rhs_f.head(n_u) = M_F.multiply((phys.rho_f / dt) * u_tilde) - last_p_in * load_unit;
  {
    DenseVector g = (phys.rho_s / dt) * A_S_G.multiply(vtG) +
                    beta * Mop.multiply(lam_prev);
    scatter_add(rhs_f, tf, g);
  }
  zero_constrained(rhs_f, fluid_cs);
  const DenseVector sol = fac_f->solve(rhs_f);
  st.u.coeffs = sol.head(n_u);
  st.p.coeffs = sol.tail(n_p);
  const DenseVector uG = gather(st.u.coeffs, tf);
  div_resid = B.multiply(st.u.coeffs).norm() / std::max(st.u.coeffs.norm(), 1e-30);

  // End-of-step wall velocity: kinematic continuity on the interface, the
  // intermediate velocity elsewhere.
  st.v.coeffs = st.v_tilde.coeffs;
  scatter_add(st.v.coeffs, ts, uG - vtG);
  {
    DenseVector d = st.v.coeffs - st.v_tilde.coeffs;
    for (int i : ts) d[i] = 0.0;
    interior_defect = d.lpNorm<Eigen::Infinity>();
  }

  // Variational traction update.
  const DenseVector delta2 = uG - vtG;
  const DenseVector g2 = (phys.rho_s / dt) * A_S_G.multiply(delta2);
  const DenseVector lam_new = beta * lam_prev - fac_mg->solve(g2);
  {
    const DenseVector r = Mop.multiply(lam_new - beta * lam_prev) + g2;
    const double scale = std::max({Mop.multiply(lam_new).lpNorm<Eigen::Infinity>(),
                                   Mop.multiply(lam_prev).lpNorm<Eigen::Infinity>(),
                                   g2.lpNorm<Eigen::Infinity>(), 1e-30});
    split_err = r.lpNorm<Eigen::Infinity>() / scale;
  }
  st.lambda.coeffs = lam_new;

  st.n += 1;
  st.t = st.n * dt;

  // Ledger row: both sub-steps' energy identities, summed.
  LedgerRow r;
  r.step = st.n;
  r.t = st.t;
  const auto e = energies();
  r.E_f = e[0];
  r.E_v = e[1];
  r.E_s = e[2];
  r.D_visc = dt * A_f.quad_form(st.u.coeffs, st.u.coeffs);
  r.T_lambda = traction_energy(st.lambda.coeffs);
  r.W_in = -dt * last_p_in * load_unit.dot(st.u.coeffs);

  const DenseVector dvt = st.v_tilde.coeffs - v_prev;
  const DenseVector d1 = vtG - uG_prev;
  const DenseVector du = st.u.coeffs - u_tilde;
  const DenseVector deta = st.eta.coeffs - eta_prev;
  r.K_tilde = 0.5 * phys.rho_s * M_S.quad_form(dvt, dvt) +
              0.5 * phys.rho_f * A_F_G.quad_form(d1, d1);
  r.K_split = 0.5 * phys.rho_f * M_F.quad_form(du, du) +
              0.5 * phys.rho_s * A_S_G.quad_form(delta2, delta2);
  r.deta_kick = 0.5 * K_ts.quad_form(deta, deta);

  const double s1_wall_new = 0.5 * phys.rho_s * M_S.quad_form(st.v_tilde.coeffs, st.v_tilde.coeffs);
  const double s1_wall_old = 0.5 * phys.rho_s * M_S.quad_form(v_prev, v_prev);
  const double s1_el_new = 0.5 * K_ts.quad_form(st.eta.coeffs, st.eta.coeffs);
  const double s1_el_old = 0.5 * K_ts.quad_form(eta_prev, eta_prev);
  const double s1_tr_new = 0.5 * phys.rho_f * A_F_G.quad_form(vtG, vtG);
  const double s1_tr_old = 0.5 * phys.rho_f * A_F_G.quad_form(uG_prev, uG_prev);
  const double s1_k_wall = 0.5 * phys.rho_s * M_S.quad_form(dvt, dvt);
  const double s1_k_tr = 0.5 * phys.rho_f * A_F_G.quad_form(d1, d1);
  const double s1_rhs = -beta * dt * Mop.quad_form(lam_prev, vtG);

  const double s2_fl_new = 0.5 * phys.rho_f * M_F.quad_form(st.u.coeffs, st.u.coeffs);
  const double s2_fl_old = 0.5 * phys.rho_f * M_F.quad_form(u_tilde, u_tilde);
  const double s2_tr_new = 0.5 * phys.rho_s * A_S_G.quad_form(uG, uG);
  const double s2_tr_old = 0.5 * phys.rho_s * A_S_G.quad_form(vtG, vtG);
  const double s2_k_fl = 0.5 * phys.rho_f * M_F.quad_form(du, du);
  const double s2_k_tr = 0.5 * phys.rho_s * A_S_G.quad_form(delta2, delta2);
  const double s2_rhs = beta * dt * Mop.quad_form(lam_prev, uG) + r.W_in;

  const double lhs = (s1_wall_new - s1_wall_old + s1_k_wall) +
                     (s1_el_new - s1_el_old + r.deta_kick) +
                     (s1_tr_new - s1_tr_old + s1_k_tr) +
                     (s2_fl_new - s2_fl_old + s2_k_fl) + r.D_visc +
                     (s2_tr_new - s2_tr_old + s2_k_tr);
  const double rhs_id = s1_rhs + s2_rhs;
  const double scale =
      std::max({s1_wall_new, s1_wall_old, s1_el_new, s1_el_old, s1_tr_new,
                s1_tr_old, s1_k_wall, s1_k_tr, std::abs(s1_rhs), s2_fl_new,
                s2_fl_old, s2_tr_new, s2_tr_old, s2_k_fl, s2_k_tr, r.D_visc,
                r.deta_kick, std::abs(r.W_in), std::abs(rhs_id), 1e-30});
  r.balance_residual = std::abs(lhs - rhs_id) / scale;
  ledger.rows.push_back(r);
}

ThickSolver::ThickSolver(const PhysicalParams& phys, const SchemeConfig& cfg)
    : impl_(std::make_unique<Impl>()) {
  impl_->phys = phys;
  impl_->cfg = cfg;
  impl_->build();
}

ThickSolver::~ThickSolver() = default;

void ThickSolver::advance() { impl_->do_advance(); }

void ThickSolver::run() {
  const int n = impl_->cfg.n_steps();
  while (impl_->st.n < n) advance();
}

std::array<double, 3> ThickSolver::compute_energies() const { return impl_->energies(); }

const FsiState& ThickSolver::state() const { return impl_->st; }
const EnergyLedger& ThickSolver::ledger() const { return impl_->ledger; }
const SchemeConfig& ThickSolver::config() const { return impl_->cfg; }
const PhysicalParams& ThickSolver::params() const { return impl_->phys; }
const Mesh2D& ThickSolver::fluid_mesh() const { return impl_->fine; }
const Mesh2D& ThickSolver::structure_mesh() const { return impl_->smesh; }
const InterfaceMesh1D& ThickSolver::interface() const { return impl_->iface_f; }
const SparseMatrix& ThickSolver::velocity_mass() const { return impl_->M_F; }
const SparseMatrix& ThickSolver::structure_mass() const { return impl_->M_S; }
const SparseMatrix& ThickSolver::elasticity_operator() const { return impl_->K_ts; }
double ThickSolver::splitting_identity_error() const { return impl_->split_err; }
double ThickSolver::divergence_residual() const { return impl_->div_resid; }
double ThickSolver::interior_velocity_defect() const { return impl_->interior_defect; }

}  // namespace fsi
