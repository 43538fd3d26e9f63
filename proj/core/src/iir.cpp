#include "zf/iir.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "zf/analysis.hpp"
#include "zf/hard_factorization.hpp"

namespace zf {

using Eigen::MatrixXd;
using Eigen::RowVectorXd;
using Eigen::VectorXd;

std::vector<double> IirSearchConfig::default_lambda_grid(int count) {
  return log_grid(0.01, 0.99, count);
}

Complex IirMultiplier::evaluate(double omega) const {
  const int n = static_cast<int>(a_u.rows());
  if (n == 0) return 1.0;
  const Complex z = std::polar(1.0, direction == IirDirection::causal ? omega : -omega);
  const Eigen::MatrixXcd m = z * Eigen::MatrixXcd::Identity(n, n) - a_u.cast<Complex>();
  const Eigen::VectorXcd x = m.partialPivLu().solve(b_u.cast<Complex>());
  return 1.0 + (c_u.cast<Complex>() * x)(0);
}

std::optional<StateSpaceModel> IirMultiplier::forward_realization() const {
  if (direction == IirDirection::causal) return StateSpaceModel{a_u, b_u, c_u, 1.0};
  Eigen::FullPivLU<MatrixXd> lu(a_u);
  if (!lu.isInvertible()) return std::nullopt;
  const MatrixXd ait = lu.inverse().transpose();
  StateSpaceModel ss;
  ss.a = ait;
  ss.b = ait * c_u.transpose();
  ss.c = b_u.transpose() * ait;
  ss.d = 1.0 - (b_u.transpose() * ait * c_u.transpose())(0);
  return ss;
}

RecoveredMatrices recover_multiplier(const MatrixXd& s11, const MatrixXd& p11, const MatrixXd& a_hat,
                                     const VectorXd& b_hat, const RowVectorXd& c_hat) {
  const MatrixXd diff = p11 - s11;
  Eigen::JacobiSVD<MatrixXd> svd(diff);
  const auto& sv = svd.singularValues();
  const double cond = sv.size() == 0 ? 1.0
                      : sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1)
                                                : std::numeric_limits<double>::infinity();
  if (!(cond < 1e12)) {
    std::ostringstream os;
    os << "P11 - S11 is near singular (condition number " << cond << ")";
    throw std::runtime_error(os.str());
  }
  const Eigen::PartialPivLU<MatrixXd> lu(diff);
  return {-lu.solve(a_hat), -lu.solve(b_hat), c_hat};
}

double l1_norm_bound(const MatrixXd& a, const VectorXd& b, const RowVectorXd& c) {
  if (a.rows() == 0) return 0.0;
  const double rho = a.eigenvalues().cwiseAbs().maxCoeff();
  if (rho >= 1.0) return std::numeric_limits<double>::infinity();
  double sum = 0.0;
  VectorXd x = b;
  const double cb = c.norm() * b.norm();
  double rho_n = 1.0;
  for (int j = 1; j <= 200000; ++j) {
    sum += std::abs(c.dot(x));
    x = a * x;
    rho_n *= rho;
    if (j >= 200) {
      const double tail = cb * rho_n / (1.0 - rho);
      if (tail < 1e-9 || j == 200000) return sum + tail;
    }
  }
  return sum;
}

namespace {

struct IirLmi {
  sdp::LmiProblem problem;
  sdp::MatrixVariable s11, p11, a_hat, b_hat, c_hat;
};

IirLmi assemble(const StateSpaceModel& p, double lambda) {
  using sdp::LinearExpr;
  const int n = p.order();
  IirLmi lmi;
  auto& pr = lmi.problem;
  lmi.s11 = pr.add_symmetric("S11", n);
  lmi.p11 = pr.add_symmetric("P11", n);
  lmi.a_hat = pr.add_matrix("Ahat", n, n);
  lmi.b_hat = pr.add_matrix("Bhat", n, 1);
  lmi.c_hat = pr.add_matrix("Chat", 1, n);
  const int mu = pr.add_scalar("mu");
  const MatrixXd id = MatrixXd::Identity(n, n);
  const MatrixXd one = MatrixXd::Ones(1, 1);
  const MatrixXd ap = p.a;
  const MatrixXd bp = p.b;
  const MatrixXd cp = p.c;

  {
    const int o1 = 0, o2 = n, o3 = 2 * n, o4 = 2 * n + 1, o5 = 3 * n + 1;
    auto& m1 = pr.add_matrix_constraint(4 * n + 1, sdp::MatrixSense::negative_definite, "M1");
    m1.add_product(o1, o1, id, lmi.s11, id, -1.0);
    m1.add_product(o2, o1, id, lmi.s11, id, -1.0);
    m1.add_product(o2, o2, id, lmi.p11, id, -1.0);
    m1.add_constant(o3, o1, -cp);
    m1.add_product(o3, o1, one, lmi.c_hat, id, -1.0);
    m1.add_constant(o3, o2, -cp);
    m1.add_constant(o3, o3, MatrixXd::Constant(1, 1, -2.0 * p.d));
    m1.add_product(o4, o1, id, lmi.s11, ap);
    m1.add_product(o4, o2, id, lmi.s11, ap);
    m1.add_product(o4, o3, id, lmi.s11, bp);
    m1.add_product(o4, o4, id, lmi.s11, id, -1.0);
    for (int col : {o1, o2}) {
      m1.add_product(o5, col, id, lmi.p11, ap);
      m1.add_product(o5, col, id, lmi.b_hat, cp);
    }
    m1.add_product(o5, o1, id, lmi.a_hat, id);
    m1.add_product(o5, o3, id, lmi.p11, bp);
    m1.add_product(o5, o3, id, lmi.b_hat, MatrixXd::Constant(1, 1, p.d));
    m1.add_product(o5, o4, id, lmi.s11, id, -1.0);
    m1.add_product(o5, o5, id, lmi.p11, id, -1.0);
  }
  {
    auto& m2 = pr.add_matrix_constraint(2 * n + 1, sdp::MatrixSense::negative_definite, "M2");
    m2.add_product(0, 0, id, lmi.s11, id, lambda);
    m2.add_product(0, 0, id, lmi.p11, id, -lambda);
    m2.add_scaled(n, n, LinearExpr::variable(mu, -1.0), one);
    m2.add_product(n + 1, 0, id, lmi.a_hat, id, -1.0);
    m2.add_product(n + 1, n, id, lmi.b_hat, one, -1.0);
    m2.add_product(n + 1, n + 1, id, lmi.s11, id);
    m2.add_product(n + 1, n + 1, id, lmi.p11, id, -1.0);
  }
  {
    auto& m3 = pr.add_matrix_constraint(n + 2, sdp::MatrixSense::negative_definite, "M3");
    m3.add_product(0, 0, id, lmi.p11, id, lambda - 1.0);
    m3.add_product(0, 0, id, lmi.s11, id, 1.0 - lambda);
    m3.add_scaled(n, n, LinearExpr::variable(mu) - LinearExpr::value(1.0), one);
    m3.add_product(n + 1, 0, one, lmi.c_hat, id);
    m3.add_constant(n + 1, n + 1, MatrixXd::Constant(1, 1, -1.0));
  }
  pr.add_matrix_constraint(n, sdp::MatrixSense::negative_definite, "S11>0")
      .add_product(0, 0, id, lmi.s11, id, -1.0);
  pr.add_matrix_constraint(n, sdp::MatrixSense::negative_definite, "P11>0")
      .add_product(0, 0, id, lmi.p11, id, -1.0);
  pr.add_linear(LinearExpr::variable(mu, -1.0), sdp::LinearSense::less, 0.0);
  pr.add_linear(LinearExpr::variable(mu), sdp::LinearSense::less, 1.0);
  return lmi;
}

IirSearchResult search(const StateSpaceModel& p, const RationalTransferFunction& g, double k,
                       IirDirection dir, const IirSearchConfig& cfg, int first) {
  if (p.order() == 0) throw std::invalid_argument("IIR search needs a dynamic plant");
  IirSearchResult out;
  std::vector<int> order;
  const int count = static_cast<int>(cfg.lambda_grid.size());
  if (first >= 0 && first < count) order.push_back(first);
  for (int i = 0; i < count; ++i)
    if (i != first) order.push_back(i);

  std::ostringstream diag;
  for (int idx : order) {
    const double lambda = cfg.lambda_grid[idx];
    if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("lambda must lie in (0, 1)");
    const IirLmi lmi = assemble(p, lambda);
    const sdp::LmiSolution sol = sdp::solve_feasibility(lmi.problem, cfg.solver);
    if (sol.status != sdp::SolveStatus::feasible) {
      if (sol.status == sdp::SolveStatus::inaccurate)
        diag << "lambda " << lambda << ": solver inaccurate (" << sol.diagnostics << "); ";
      continue;
    }
    RecoveredMatrices rec;
    try {
      rec = recover_multiplier(lmi.s11.value(sol.values), lmi.p11.value(sol.values),
                               lmi.a_hat.value(sol.values), lmi.b_hat.value(sol.values),
                               lmi.c_hat.value(sol.values));
    } catch (const std::runtime_error& e) {
      diag << "lambda " << lambda << ": " << e.what() << "; ";
      continue;
    }
    IirMultiplier m{dir, rec.a_u, rec.b_u, rec.c_u, l1_norm_bound(rec.a_u, rec.b_u, rec.c_u), lambda};
    if (!(m.l1_bound < 1.0 + 1e-6)) {
      diag << "lambda " << lambda << ": l1 bound " << m.l1_bound << "; ";
      continue;
    }
    const double margin = verify_fdi([&](double w) { return m.evaluate(w); }, g, k, cfg.verify_grid);
    if (!(margin > 0.0)) {
      diag << "lambda " << lambda << ": frequency margin " << margin << "; ";
      continue;
    }
    out.multiplier = std::move(m);
    out.lambda = lambda;
    out.fdi_margin = margin;
    break;
  }
  out.diagnostics = diag.str();
  return out;
}

}  // namespace

IirSearchResult causal_search(const RationalTransferFunction& g, double k, const IirSearchConfig& cfg,
                              int first_lambda) {
  const StateSpaceModel p = loop_transform(g, k);
  return search(p, g, k, IirDirection::causal, cfg, first_lambda);
}

IirSearchResult anticausal_search(const RationalTransferFunction& g, double k,
                                  const IirSearchConfig& cfg, int first_lambda) {
  const StateSpaceModel sg = balanced_realization(g);
  const double den = k * sg.d + 1.0;
  if (std::abs(den) < 1e-12) throw std::invalid_argument("1 + kD_g is singular");
  StateSpaceModel p;
  p.a = sg.a - sg.b * (k / den) * sg.c;
  p.b = -sg.b / den;
  p.c = (k / den) * sg.c;
  p.d = 1.0 / den;
  return search(p, g, k, IirDirection::anticausal, cfg, first_lambda);
}

void to_json(nlohmann::json& j, const IirMultiplier& m) {
  auto rows = [](const MatrixXd& a) {
    std::vector<std::vector<double>> out(a.rows(), std::vector<double>(a.cols()));
    for (int r = 0; r < a.rows(); ++r)
      for (int c = 0; c < a.cols(); ++c) out[r][c] = a(r, c);
    return out;
  };
  j = nlohmann::json{{"direction", m.direction == IirDirection::causal ? "causal" : "anticausal"},
                     {"A_u", rows(m.a_u)},
                     {"B_u", std::vector<double>(m.b_u.data(), m.b_u.data() + m.b_u.size())},
                     {"C_u", std::vector<double>(m.c_u.data(), m.c_u.data() + m.c_u.size())},
                     {"l1_bound", m.l1_bound},
                     {"lambda", m.lambda}};
}

}  // namespace zf
