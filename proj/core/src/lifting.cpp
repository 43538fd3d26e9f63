#include "zf/lifting.hpp"

#include <stdexcept>

#include "zf/analysis.hpp"

namespace zf {

using Eigen::MatrixXd;
using Eigen::VectorXd;

Eigen::VectorXcd LiftedRealization::response(Complex z) const {
  const int nx = states();
  const Eigen::MatrixXcd m = z * Eigen::MatrixXcd::Identity(nx, nx) - a.cast<Complex>();
  const Eigen::VectorXcd x = m.partialPivLu().solve(b.cast<Complex>());
  return c.cast<Complex>() * x + d.cast<Complex>();
}

LiftedRealization build_lifted(const StateSpaceModel& g, int n) {
  if (n < 1) throw std::invalid_argument("lifting needs n >= 1");
  if (g.order() > 0 && g.spectral_radius() >= 1.0 - kBoundaryTolerance)
    throw std::invalid_argument("lifting requires a stable plant");
  const int np = g.order();
  const int nx = np + 2 * n;
  const int yd = np;       // first output-delay state
  const int ud = np + n;   // first input-delay state

  LiftedRealization out;
  out.n = n;
  out.a = MatrixXd::Zero(nx, nx);
  out.b = VectorXd::Zero(nx);
  out.a.topLeftCorner(np, np) = g.a;
  out.b.head(np) = g.b;
  out.a.block(yd, 0, 1, np) = g.c;
  out.b(yd) = g.d;
  out.b(ud) = 1.0;
  for (int i = 1; i < n; ++i) {
    out.a(yd + i, yd + i - 1) = 1.0;
    out.a(ud + i, ud + i - 1) = 1.0;
  }

  out.c = MatrixXd::Zero(2 * (n + 1), nx);
  out.d = VectorXd::Zero(2 * (n + 1));
  out.c.block(0, 0, 1, np) = -g.c;
  out.d(0) = -g.d;
  out.d(n + 1) = 1.0;
  for (int i = 1; i <= n; ++i) {
    out.c(i, yd + i - 1) = -1.0;
    out.c(n + 1 + i, ud + i - 1) = 1.0;
  }
  return out;
}

MatrixXd build_kappa(double k, const FirMultiplier& m) {
  const int n = m.n_b();
  if (m.n_f() != n) throw std::invalid_argument("lifting needs n_f == n_b");
  const int c = n + 1;
  MatrixXd kap = MatrixXd::Zero(2 * c, 2 * c);
  kap(0, c) = k * m[0];
  kap(c, c) = -2.0 * m[0];
  for (int i = 1; i <= n; ++i) {
    kap(0, c + i) = k * m[i];
    kap(i, c) = k * m[-i];
    kap(c, c + i) = -m[i] - m[-i];
  }
  return MatrixXd(kap.selfadjointView<Eigen::Upper>());
}

FirMultiplier reversed(const FirMultiplier& m) {
  std::vector<double> coeffs(m.coeffs().rbegin(), m.coeffs().rend());
  return FirMultiplier(m.n_b(), m.n_f(), std::move(coeffs));
}

FirSearchResult solve_lifted(const RationalTransferFunction& g, double k, int n, bool odd,
                             const sdp::SolverOptions& options) {
  const StateSpaceModel ss = balanced_realization(g);
  const LiftedRealization lift = build_lifted(ss, n);
  const int nx = lift.states();
  const int dim = 2 * (n + 1);

  sdp::LmiProblem problem;
  const sdp::MatrixVariable x = problem.add_symmetric("X", nx);
  const TapVariables taps = add_tap_variables(problem, n, n, odd);

  auto& f = problem.add_matrix_constraint(nx + 1, sdp::MatrixSense::negative_definite, "kyp");
  MatrixXd ab(nx, nx + 1);
  ab << lift.a, lift.b;
  MatrixXd i0 = MatrixXd::Zero(nx, nx + 1);
  i0.leftCols(nx).setIdentity();
  f.add_congruence(x, ab, 1.0);
  f.add_congruence(x, i0, -1.0);

  MatrixXd w(dim, nx + 1);
  w << lift.c, lift.d;
  const MatrixXd k0 = build_kappa(k, FirMultiplier(n, n));
  f.add_constant(0, 0, w.transpose() * k0 * w);
  for (int i = -n; i <= n; ++i) {
    if (i == 0) continue;
    FirMultiplier unit(n, n);
    unit.set(i, 1.0);
    const MatrixXd ki = build_kappa(k, unit) - k0;
    for (int s = 0; s < dim; ++s)
      for (int r = 0; r <= s; ++r) {
        if (ki(r, s) == 0.0) continue;
        const double scale = r == s ? 0.5 * ki(r, s) : ki(r, s);
        f.add_outer(scale * taps.at(i), w.row(r).transpose(), w.row(s).transpose());
      }
  }

  const sdp::LmiSolution sol = sdp::solve_feasibility(problem, options);
  FirSearchResult out;
  out.status = sol.status;
  out.solver_margin = sol.margin;
  out.diagnostics = sol.diagnostics;
  if (sol.status != sdp::SolveStatus::feasible) return out;

  FirMultiplier m = reversed(taps.value(sol.values));
  const ClassCheck cls = check_zf_class(m, odd);
  out.fdi_margin = verify_fdi(m, g, k);
  if (!cls.pass || !(out.fdi_margin > 0.0)) {
    out.status = sdp::SolveStatus::inaccurate;
    out.diagnostics += cls.pass ? " frequency check failed" : " class check failed: " + cls.reason;
    return out;
  }
  out.x = x.value(sol.values);
  out.multiplier = std::move(m);
  return out;
}

}  // namespace zf
