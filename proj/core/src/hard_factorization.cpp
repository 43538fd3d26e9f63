#include "zf/hard_factorization.hpp"

#include <stdexcept>

#include "zf/analysis.hpp"

namespace zf {

using Eigen::MatrixXd;
using Eigen::RowVectorXd;
using Eigen::VectorXd;

Complex AugmentedRealization::response(int i, Complex z) const {
  const int nx = states();
  const Eigen::MatrixXcd m = z * Eigen::MatrixXcd::Identity(nx, nx) - a_tilde.cast<Complex>();
  const Eigen::VectorXcd x = m.partialPivLu().solve(b_tilde.cast<Complex>());
  return (c_at(i).cast<Complex>() * x)(0) + d_at(i);
}

MatrixXd AugmentedRealization::m_f() const {
  const int nx = states();
  MatrixXd out = MatrixXd::Zero(n_f + n_b + 2, nx + 1);
  for (int i = -n_f; i <= n_b; ++i) {
    out.row(i + n_f).head(nx) = c_at(i);
    out(i + n_f, nx) = d_at(i);
  }
  out(n_f + n_b + 1, nx) = 1.0;
  return out;
}

AugmentedRealization build_augmentation(const StateSpaceModel& p, int n_f, int n_b) {
  if (n_f < 0 || n_b < 0) throw std::invalid_argument("tap counts must be nonnegative");
  const int n = std::max(n_f, n_b);
  if (n == 0) throw std::invalid_argument("augmentation needs at least one delay (n = 0)");
  if (p.order() > 0 && p.spectral_radius() >= 1.0 - kBoundaryTolerance)
    throw std::invalid_argument("augmentation requires a stable realization");

  AugmentedRealization aug;
  aug.n_p = p.order();
  aug.n_f = n_f;
  aug.n_b = n_b;
  aug.n = n;
  const int np = aug.n_p;
  const int nx = np + n;

  aug.a_tilde = MatrixXd::Zero(nx, nx);
  aug.a_tilde.topLeftCorner(np, np) = p.a;
  aug.a_tilde.block(0, np, np, 1) = p.b;
  for (int j = 0; j + 1 < n; ++j) aug.a_tilde(np + j, np + j + 1) = 1.0;
  aug.b_tilde = VectorXd::Unit(nx, nx - 1);
  aug.c_n = RowVectorXd::Zero(nx);
  aug.c_n.head(np) = p.c;
  aug.c_n(np) = p.d;
  for (int j = 1; j <= n_f; ++j) aug.c_d.push_back(RowVectorXd::Unit(nx, np + n - j));

  // Powers C_n Ã^l for l = 0..n+n_f.
  std::vector<RowVectorXd> cpow{aug.c_n};
  for (int l = 1; l <= n + n_f; ++l) cpow.push_back(cpow.back() * aug.a_tilde);
  auto markov = [&](int l) { return (cpow[l] * aug.b_tilde)(0); };

  for (int i = -n_f; i <= n_b; ++i) {
    RowVectorXd ci = cpow[n - i];
    double di = 0.0;
    if (i == 0) {
      di = markov(n - 1);
    } else if (i < 0) {
      for (int j = 1; j <= -i; ++j) ci += markov(n - i - j - 1) * aug.c_d[j - 1];
      di = markov(n - i - 1);
    }
    aug.c.push_back(std::move(ci));
    aug.d.push_back(di);
  }
  return aug;
}

FirMultiplier TapVariables::value(std::span<const double> values) const {
  FirMultiplier out(n_f, n_b);
  for (int i = -n_f; i <= n_b; ++i) {
    if (i == 0) continue;
    const int slot = i + n_f;
    out.set(i, odd ? values[m_plus[slot]] - values[m_minus[slot]] : values[m[slot]]);
  }
  return out;
}

TapVariables add_tap_variables(sdp::LmiProblem& problem, int n_f, int n_b, bool odd) {
  using sdp::LinearExpr;
  using sdp::LinearSense;
  TapVariables tv;
  tv.n_f = n_f;
  tv.n_b = n_b;
  tv.odd = odd;
  const int taps = n_f + n_b + 1;
  tv.expr.resize(taps);
  tv.m.assign(taps, -1);
  tv.m_plus.assign(taps, -1);
  tv.m_minus.assign(taps, -1);
  LinearExpr offsum;
  for (int i = -n_f; i <= n_b; ++i) {
    const int slot = i + n_f;
    if (i == 0) {
      tv.expr[slot] = LinearExpr::value(1.0);
      continue;
    }
    const std::string tag = std::to_string(i);
    if (odd) {
      tv.m_plus[slot] = problem.add_scalar("m+[" + tag + "]");
      tv.m_minus[slot] = problem.add_scalar("m-[" + tag + "]");
      tv.expr[slot] = LinearExpr::variable(tv.m_plus[slot]) - LinearExpr::variable(tv.m_minus[slot]);
      problem.add_linear(LinearExpr::variable(tv.m_plus[slot], -1.0), LinearSense::less_equal, 0.0);
      problem.add_linear(LinearExpr::variable(tv.m_minus[slot], -1.0), LinearSense::less_equal, 0.0);
      offsum += LinearExpr::variable(tv.m_plus[slot]) + LinearExpr::variable(tv.m_minus[slot]);
    } else {
      tv.m[slot] = problem.add_scalar("m[" + tag + "]");
      tv.expr[slot] = LinearExpr::variable(tv.m[slot]);
      problem.add_linear(tv.expr[slot], LinearSense::less_equal, 0.0);
      offsum += LinearExpr::variable(tv.m[slot], -1.0);
    }
  }
  if (taps > 1) problem.add_linear(offsum, LinearSense::less, 1.0);
  return tv;
}

HardLmi assemble_hard_lmi(const AugmentedRealization& aug, bool odd) {
  HardLmi lmi;
  const int nx = aug.states();
  const int taps = aug.n_f + aug.n_b + 1;
  lmi.x = lmi.problem.add_symmetric("X", nx);
  lmi.taps = add_tap_variables(lmi.problem, aug.n_f, aug.n_b, odd);

  auto& f = lmi.problem.add_matrix_constraint(nx + 1, sdp::MatrixSense::negative_definite, "kyp");
  MatrixXd ab(nx, nx + 1);
  ab << aug.a_tilde, aug.b_tilde;
  MatrixXd i0 = MatrixXd::Zero(nx, nx + 1);
  i0.leftCols(nx).setIdentity();
  f.add_congruence(lmi.x, ab, 1.0);
  f.add_congruence(lmi.x, i0, -1.0);
  const MatrixXd mf = aug.m_f();
  const VectorXd g = mf.row(taps).transpose();
  for (int slot = 0; slot < taps; ++slot)
    f.add_outer(-1.0 * lmi.taps.expr[slot], mf.row(slot).transpose(), g);
  return lmi;
}

StateSpaceModel loop_transform(const RationalTransferFunction& g, double k) {
  StateSpaceModel p = balanced_realization(g);
  p.c *= k;
  p.d = 1.0 + k * p.d;
  return p;
}

FirSearchResult solve_hard(const RationalTransferFunction& g, double k, int n_f, int n_b, bool odd,
                           const sdp::SolverOptions& options) {
  const AugmentedRealization aug = build_augmentation(loop_transform(g, k), n_f, n_b);
  const HardLmi lmi = assemble_hard_lmi(aug, odd);
  const sdp::LmiSolution sol = sdp::solve_feasibility(lmi.problem, options);

  FirSearchResult out;
  out.status = sol.status;
  out.solver_margin = sol.margin;
  out.diagnostics = sol.diagnostics;
  if (sol.status != sdp::SolveStatus::feasible) return out;

  FirMultiplier m = lmi.taps.value(sol.values);
  const ClassCheck cls = check_zf_class(m, odd);
  out.fdi_margin = verify_fdi(m, g, k);
  if (!cls.pass || !(out.fdi_margin > 0.0)) {
    out.status = sdp::SolveStatus::inaccurate;
    out.diagnostics += cls.pass ? " frequency check failed" : " class check failed: " + cls.reason;
    return out;
  }
  out.x = lmi.x.value(sol.values);
  out.multiplier = std::move(m);
  return out;
}

}  // namespace zf
