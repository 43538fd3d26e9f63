// Primal-dual interior-point method for the phase-one feasibility problem
//
//   maximise t  s.t.  Z_j = -F0_j - Σ x_i F_ij - t I ⪰ 0,
//                     s_r = b_r - a_rᵀx - t ≥ 0,   R ∓ x_i ≥ 0,   1 - t ≥ 0,
//
// written as the dual of a standard-form SDP with y = (x, t) and b = e_t.
// Equality rows are eliminated beforehand by x = x0 + T z.

#include "zf/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>

namespace zf::sdp {

SolverOptions SolverOptions::from_environment() {
  SolverOptions opts;
  if (const char* env = std::getenv("ZF_SOLVER_MAXITER")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) opts.max_iterations = static_cast<int>(v);
  }
  return opts;
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Term {
  int u;
  int v;
  double c;
};

struct Block {
  int dim = 0;
  MatrixXd basis;                         // dim × K
  MatrixXd c;                             // -F0 after substitution
  std::vector<std::vector<Term>> terms;   // per reduced variable
  std::vector<int> active;
  MatrixXd x, z, zinv;
};

struct LpRow {
  double c;
  std::vector<std::pair<int, double>> a;  // over y = (z, t)
};

// x = x0 + T z with T stored sparsely per original variable.
struct Reduction {
  VectorXd x0;
  std::vector<std::vector<std::pair<int, double>>> map;
  int size = 0;
  bool inconsistent = false;

  std::vector<double> expand(const VectorXd& z) const {
    std::vector<double> x(x0.data(), x0.data() + x0.size());
    for (std::size_t p = 0; p < map.size(); ++p)
      for (const auto& [j, c] : map[p]) x[p] += c * z[j];
    return x;
  }
};

Reduction eliminate_equalities(const LmiProblem& problem) {
  const int n = problem.num_variables();
  std::vector<const LinearConstraint*> rows;
  for (const auto& r : problem.linear_constraints())
    if (r.sense == LinearSense::equal) rows.push_back(&r);

  Reduction red;
  red.x0 = VectorXd::Zero(n);
  red.map.assign(n, {});
  if (rows.empty()) {
    red.size = n;
    for (int p = 0; p < n; ++p) red.map[p] = {{p, 1.0}};
    return red;
  }

  const int m = static_cast<int>(rows.size());
  MatrixXd e = MatrixXd::Zero(m, n + 1);
  for (int i = 0; i < m; ++i) {
    for (const auto& [idx, c] : rows[i]->coeffs) e(i, idx) += c;
    e(i, n) = rows[i]->bound;
  }
  std::vector<int> pivot_col;
  int rank = 0;
  const double scale = std::max(1.0, e.leftCols(n).cwiseAbs().maxCoeff());
  for (int col = 0; col < n && rank < m; ++col) {
    Eigen::Index best;
    const double mag = e.col(col).segment(rank, m - rank).cwiseAbs().maxCoeff(&best);
    if (mag <= 1e-12 * scale) continue;
    e.row(rank).swap(e.row(rank + static_cast<int>(best)));
    e.row(rank) /= e(rank, col);
    for (int i = 0; i < m; ++i)
      if (i != rank && e(i, col) != 0.0) e.row(i) -= e(i, col) * e.row(rank);
    pivot_col.push_back(col);
    ++rank;
  }
  for (int i = rank; i < m; ++i)
    if (std::abs(e(i, n)) > 1e-9 * (1.0 + std::abs(e(i, n)))) red.inconsistent = true;

  std::vector<int> free_index(n, -1);
  std::vector<bool> is_pivot(n, false);
  for (int c : pivot_col) is_pivot[c] = true;
  for (int p = 0; p < n; ++p)
    if (!is_pivot[p]) {
      free_index[p] = red.size++;
      red.map[p] = {{free_index[p], 1.0}};
    }
  for (int r = 0; r < rank; ++r) {
    const int p = pivot_col[r];
    red.x0[p] = e(r, n);
    for (int q = 0; q < n; ++q)
      if (!is_pivot[q] && e(r, q) != 0.0) red.map[p].push_back({free_index[q], -e(r, q)});
  }
  return red;
}

double max_step(const MatrixXd& x, const MatrixXd& dx) {
  Eigen::LLT<MatrixXd> llt(x);
  if (llt.info() != Eigen::Success) return 0.0;
  MatrixXd s = llt.matrixL().solve(dx);
  const MatrixXd st = llt.matrixL().solve(s.transpose());
  s = st.transpose();
  s = (0.5 * (s + s.transpose())).eval();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(s, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  return lmin >= 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / lmin;
}

double max_step(const VectorXd& x, const VectorXd& dx) {
  double step = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (dx[i] < 0.0) step = std::min(step, -x[i] / dx[i]);
  return step;
}

bool invert_spd(const MatrixXd& m, MatrixXd& inv) {
  Eigen::LLT<MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) return false;
  inv = llt.solve(MatrixXd::Identity(m.rows(), m.cols()));
  inv = (0.5 * (inv + inv.transpose())).eval();
  return true;
}

class Solver {
 public:
  Solver(const LmiProblem& problem, const SolverOptions& options)
      : problem_(problem), options_(options) {}

  LmiSolution run();

 private:
  void build();
  VectorXd apply_a(const std::vector<MatrixXd>& ys, const VectorXd& ylp) const;
  MatrixXd apply_at(const Block& blk, const VectorXd& dy) const;
  VectorXd apply_at_lp(const VectorXd& dy) const;
  MatrixXd schur() const;
  double check(const VectorXd& y, std::vector<double>& values) const;

  const LmiProblem& problem_;
  SolverOptions options_;
  Reduction red_;
  int n_ = 0;  // reduced variables; t sits at index n_
  std::vector<Block> blocks_;
  std::vector<LpRow> lp_;
  VectorXd lp_x_, lp_s_;
  double eps_req_ = 0.0;
  bool trace_ = std::getenv("ZF_SOLVER_TRACE") != nullptr;
};

void Solver::build() {
  red_ = eliminate_equalities(problem_);
  n_ = red_.size;
  bool strict = false;
  for (const auto& m : problem_.matrix_constraints()) {
    if (m.sense() == MatrixSense::negative_definite) strict = true;
    Block blk;
    blk.dim = m.dim();
    const int k = static_cast<int>(m.basis().size());
    blk.basis.resize(blk.dim, k);
    for (int i = 0; i < k; ++i) blk.basis.col(i) = m.basis()[i];
    blk.c = -m.constant();
    blk.terms.assign(n_, {});
    for (const auto& t : m.terms()) {
      const double x0 = red_.x0[t.variable];
      if (x0 != 0.0) {
        const VectorXd& bu = m.basis()[t.u];
        const VectorXd& bv = m.basis()[t.v];
        blk.c.noalias() -= (t.coeff * x0) * (bu * bv.transpose() + bv * bu.transpose());
      }
      for (const auto& [j, c] : red_.map[t.variable]) blk.terms[j].push_back({t.u, t.v, t.coeff * c});
    }
    for (int j = 0; j < n_; ++j)
      if (!blk.terms[j].empty()) blk.active.push_back(j);
    blocks_.push_back(std::move(blk));
  }
  eps_req_ = strict ? problem_.strictness_margin() : 0.0;

  for (const auto& row : problem_.linear_constraints()) {
    if (row.sense == LinearSense::equal) continue;
    LpRow lp{row.bound - (row.sense == LinearSense::less ? problem_.linear_margin() : 0.0), {}};
    std::vector<double> dense(n_, 0.0);
    for (const auto& [p, a] : row.coeffs) {
      lp.c -= a * red_.x0[p];
      for (const auto& [j, c] : red_.map[p]) dense[j] += a * c;
    }
    for (int j = 0; j < n_; ++j)
      if (dense[j] != 0.0) lp.a.push_back({j, dense[j]});
    lp.a.push_back({n_, 1.0});
    lp_.push_back(std::move(lp));
  }
  const double r = problem_.variable_bound();
  for (int j = 0; j < n_; ++j) {
    lp_.push_back({r, {{j, 1.0}}});
    lp_.push_back({r, {{j, -1.0}}});
  }
  lp_.push_back({1.0, {{n_, 1.0}}});
}

// A(Y)_i = ⟨A_i, Y⟩ where Z = C − Σ y_i A_i; for t the coefficient is I.
VectorXd Solver::apply_a(const std::vector<MatrixXd>& ys, const VectorXd& ylp) const {
  VectorXd out = VectorXd::Zero(n_ + 1);
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const Block& blk = blocks_[b];
    const MatrixXd yh = blk.basis.transpose() * ys[b] * blk.basis;
    for (int j : blk.active) {
      double acc = 0.0;
      for (const auto& t : blk.terms[j]) acc += t.c * (yh(t.u, t.v) + yh(t.v, t.u));
      out[j] += acc;
    }
    out[n_] += ys[b].trace();
  }
  for (std::size_t r = 0; r < lp_.size(); ++r)
    for (const auto& [j, a] : lp_[r].a) out[j] += a * ylp[r];
  return out;
}

// Σ y_i A_i for one block.
MatrixXd Solver::apply_at(const Block& blk, const VectorXd& dy) const {
  const int k = static_cast<int>(blk.basis.cols());
  MatrixXd gamma = MatrixXd::Zero(k, k);
  for (int j : blk.active)
    for (const auto& t : blk.terms[j]) gamma(t.u, t.v) += t.c * dy[j];
  MatrixXd out = blk.basis * (gamma + gamma.transpose()) * blk.basis.transpose();
  out.diagonal().array() += dy[n_];
  return out;
}

VectorXd Solver::apply_at_lp(const VectorXd& dy) const {
  VectorXd out(lp_.size());
  for (std::size_t r = 0; r < lp_.size(); ++r) {
    double acc = 0.0;
    for (const auto& [j, a] : lp_[r].a) acc += a * dy[j];
    out[r] = acc;
  }
  return out;
}

// M_ij = tr(A_i X A_j Z⁻¹) summed over blocks, plus Σ a_i a_j x/s for LP rows.
MatrixXd Solver::schur() const {
  MatrixXd m = MatrixXd::Zero(n_ + 1, n_ + 1);
  for (const Block& blk : blocks_) {
    const MatrixXd xb = blk.x * blk.basis;
    const MatrixXd xh = blk.basis.transpose() * xb;
    const MatrixXd zh = blk.basis.transpose() * blk.zinv * blk.basis;
    const MatrixXd yh = xb.transpose() * blk.zinv * blk.basis;  // Bᵀ X Z⁻¹ B
    const auto& act = blk.active;
    for (std::size_t a = 0; a < act.size(); ++a) {
      const int i = act[a];
      const auto& ti = blk.terms[i];
      for (std::size_t b = a; b < act.size(); ++b) {
        const int j = act[b];
        double acc = 0.0;
        for (const auto& s : ti) {
          for (const auto& r : blk.terms[j]) {
            acc += s.c * r.c *
                   (xh(s.v, r.u) * zh(r.v, s.u) + xh(s.v, r.v) * zh(r.u, s.u) +
                    xh(s.u, r.u) * zh(r.v, s.v) + xh(s.u, r.v) * zh(r.u, s.v));
          }
        }
        m(i, j) += acc;
      }
      double acc = 0.0;
      for (const auto& s : ti) acc += s.c * (yh(s.v, s.u) + yh(s.u, s.v));
      m(i, n_) += acc;
    }
    m(n_, n_) += (blk.x.cwiseProduct(blk.zinv.transpose())).sum();
  }
  for (std::size_t r = 0; r < lp_.size(); ++r) {
    const double w = lp_x_[r] / lp_s_[r];
    const auto& a = lp_[r].a;
    for (std::size_t p = 0; p < a.size(); ++p)
      for (std::size_t q = p; q < a.size(); ++q) {
        const int i = std::min(a[p].first, a[q].first);
        const int j = std::max(a[p].first, a[q].first);
        m(i, j) += a[p].second * a[q].second * w;
      }
  }
  return m.selfadjointView<Eigen::Upper>();
}

double Solver::check(const VectorXd& y, std::vector<double>& values) const {
  values = red_.expand(y.head(n_));
  return max_violation(problem_, values);
}

LmiSolution Solver::run() {
  LmiSolution sol;
  std::ostringstream diag;
  build();
  const int nvars = problem_.num_variables();
  if (red_.inconsistent) {
    sol.status = SolveStatus::infeasible;
    sol.values.assign(nvars, 0.0);
    sol.diagnostics = "inconsistent equality constraints";
    return sol;
  }

  // Dual-feasible start y = (0, t0) and a centred primal X = μ0 Z⁻¹.
  double lo = 1.0;
  for (const Block& blk : blocks_) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(blk.c, Eigen::EigenvaluesOnly);
    lo = std::min(lo, es.eigenvalues().minCoeff());
  }
  for (const auto& row : lp_) lo = std::min(lo, row.c);
  VectorXd y = VectorXd::Zero(n_ + 1);
  y[n_] = lo - 1.0 - 0.1 * std::abs(lo);

  int ntot = 0;
  double tr_sum = 0.0;
  for (Block& blk : blocks_) {
    blk.z = blk.c;
    blk.z.diagonal().array() -= y[n_];
    if (!invert_spd(blk.z, blk.zinv)) {
      sol.diagnostics = "initial slack not positive definite";
      return sol;
    }
    tr_sum += blk.zinv.trace();
    ntot += blk.dim;
  }
  lp_s_.resize(lp_.size());
  for (std::size_t r = 0; r < lp_.size(); ++r) {
    double acc = 0.0;
    for (const auto& [j, a] : lp_[r].a) acc += a * y[j];
    lp_s_[r] = lp_[r].c - acc;
    for (const auto& [j, a] : lp_[r].a)
      if (j == n_) tr_sum += 1.0 / lp_s_[r];
  }
  ntot += static_cast<int>(lp_.size());
  const double mu0 = 1.0 / tr_sum;
  for (Block& blk : blocks_) blk.x = mu0 * blk.zinv;
  lp_x_ = mu0 * lp_s_.cwiseInverse();

  double cnorm = 1.0;
  for (const Block& blk : blocks_) cnorm = std::max(cnorm, blk.c.cwiseAbs().maxCoeff());

  const double bound = problem_.variable_bound();
  sol.status = SolveStatus::inaccurate;
  std::vector<double> values;
  int iter = 0;
  for (; iter < options_.max_iterations; ++iter) {
    // Residuals.
    std::vector<MatrixXd> xs;
    for (const Block& blk : blocks_) xs.push_back(blk.x);
    VectorXd rp = -apply_a(xs, lp_x_);
    rp[n_] += 1.0;
    std::vector<MatrixXd> rd;
    double rd_norm = 0.0;
    for (const Block& blk : blocks_) {
      MatrixXd r = blk.c - blk.z - apply_at(blk, y);
      rd_norm = std::max(rd_norm, r.cwiseAbs().maxCoeff());
      rd.push_back(std::move(r));
    }
    const VectorXd rd_lp = [&] {
      VectorXd c(lp_.size());
      for (std::size_t r = 0; r < lp_.size(); ++r) c[r] = lp_[r].c;
      return VectorXd(c - lp_s_ - apply_at_lp(y));
    }();
    rd_norm = std::max(rd_norm, rd_lp.size() ? rd_lp.cwiseAbs().maxCoeff() : 0.0);

    double gap = lp_x_.dot(lp_s_);
    double pobj = 0.0;
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      gap += blocks_[b].x.cwiseProduct(blocks_[b].z).sum();
      pobj += blocks_[b].x.cwiseProduct(blocks_[b].c).sum();
    }
    for (std::size_t r = 0; r < lp_.size(); ++r) pobj += lp_[r].c * lp_x_[r];
    const double mu = gap / ntot;
    const double dobj = y[n_];
    const double rp_norm = rp.cwiseAbs().maxCoeff();

    if (dobj >= eps_req_ && options_.stop_at_certificate) {
      const double v = check(y, values);
      if (v <= 0.0) {
        sol.status = SolveStatus::feasible;
        sol.max_constraint_violation = v;
        break;
      }
    }
    double rigorous = pobj + std::abs(rp[n_]);
    double estimate = pobj;
    for (int j = 0; j < n_; ++j) {
      rigorous += bound * std::abs(rp[j]);
      estimate += 10.0 * std::abs(y[j]) * std::abs(rp[j]);
    }
    estimate += 10.0 * std::abs(rp[n_]);
    if (rigorous < eps_req_ ||
        (rp_norm <= 1e-8 * (1.0 + cnorm) && estimate + 1e-10 < eps_req_)) {
      sol.status = SolveStatus::infeasible;
      diag << "upper bound " << (rigorous < eps_req_ ? rigorous : estimate) << " below margin";
      break;
    }
    const double relgap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    if (relgap <= options_.gap_tolerance && rp_norm <= options_.feasibility_tolerance * (1.0 + cnorm) &&
        rd_norm <= options_.feasibility_tolerance * (1.0 + cnorm)) {
      if (dobj >= eps_req_) {
        const double v = check(y, values);
        sol.status = v <= 0.0 ? SolveStatus::feasible : SolveStatus::inaccurate;
        sol.max_constraint_violation = v;
      } else {
        sol.status = SolveStatus::infeasible;
      }
      diag << "converged";
      break;
    }

    if (trace_)
      std::fprintf(stderr, "it %3d t=% .6e pobj=% .6e mu=%.3e rp=%.2e rd=%.2e\n", iter, dobj, pobj, mu,
                   rp_norm, rd_norm);

    // Schur complement.
    bool ok = true;
    for (Block& blk : blocks_) ok = ok && invert_spd(blk.z, blk.zinv);
    if (!ok) {
      diag << "slack lost definiteness";
      break;
    }
    MatrixXd m = schur();
    Eigen::LLT<MatrixXd> llt(m);
    for (int attempt = 0; attempt < 4 && llt.info() != Eigen::Success; ++attempt) {
      const double reg = std::pow(10.0, -12 + 2 * attempt) * std::max(1.0, m.diagonal().maxCoeff());
      m.diagonal().array() += reg;
      llt.compute(m);
    }
    if (llt.info() != Eigen::Success) {
      diag << "Schur complement factorisation failed";
      break;
    }

    auto direction = [&](double sigma_mu, const std::vector<MatrixXd>* corr,
                         const VectorXd* corr_lp, VectorXd& dy, std::vector<MatrixXd>& dz,
                         std::vector<MatrixXd>& dx, VectorXd& dz_lp, VectorXd& dx_lp) {
      std::vector<MatrixXd> h;
      for (std::size_t b = 0; b < blocks_.size(); ++b) {
        const Block& blk = blocks_[b];
        MatrixXd hb = sigma_mu * blk.zinv - blk.x - blk.x * rd[b] * blk.zinv;
        if (corr) hb -= (*corr)[b] * blk.zinv;
        h.push_back(std::move(hb));
      }
      VectorXd hlp = sigma_mu * lp_s_.cwiseInverse() - lp_x_ -
                     lp_x_.cwiseProduct(rd_lp).cwiseQuotient(lp_s_);
      if (corr_lp) hlp -= corr_lp->cwiseQuotient(lp_s_);
      dy = llt.solve(rp - apply_a(h, hlp));
      dz.clear();
      dx.clear();
      for (std::size_t b = 0; b < blocks_.size(); ++b) {
        const Block& blk = blocks_[b];
        MatrixXd dzb = rd[b] - apply_at(blk, dy);
        MatrixXd dxb = sigma_mu * blk.zinv - blk.x - blk.x * dzb * blk.zinv;
        if (corr) dxb -= (*corr)[b] * blk.zinv;
        dxb = (0.5 * (dxb + dxb.transpose())).eval();
        dz.push_back(std::move(dzb));
        dx.push_back(std::move(dxb));
      }
      dz_lp = rd_lp - apply_at_lp(dy);
      dx_lp = sigma_mu * lp_s_.cwiseInverse() - lp_x_ - lp_x_.cwiseProduct(dz_lp).cwiseQuotient(lp_s_);
      if (corr_lp) dx_lp -= corr_lp->cwiseQuotient(lp_s_);
    };
    auto steps = [&](const std::vector<MatrixXd>& dx, const std::vector<MatrixXd>& dz,
                     const VectorXd& dx_lp, const VectorXd& dz_lp) {
      double ap = max_step(lp_x_, dx_lp), ad = max_step(lp_s_, dz_lp);
      for (std::size_t b = 0; b < blocks_.size(); ++b) {
        ap = std::min(ap, max_step(blocks_[b].x, dx[b]));
        ad = std::min(ad, max_step(blocks_[b].z, dz[b]));
      }
      return std::pair{ap, ad};
    };

    VectorXd dy, dz_lp, dx_lp;
    std::vector<MatrixXd> dz, dx;
    direction(0.0, nullptr, nullptr, dy, dz, dx, dz_lp, dx_lp);
    auto [ap_aff, ad_aff] = steps(dx, dz, dx_lp, dz_lp);
    ap_aff = std::min(1.0, ap_aff);
    ad_aff = std::min(1.0, ad_aff);
    double gap_aff = (lp_x_ + ap_aff * dx_lp).dot(lp_s_ + ad_aff * dz_lp);
    for (std::size_t b = 0; b < blocks_.size(); ++b)
      gap_aff += (blocks_[b].x + ap_aff * dx[b]).cwiseProduct(blocks_[b].z + ad_aff * dz[b]).sum();
    const double sigma = std::clamp(std::pow(std::max(gap_aff, 0.0) / gap, 3.0), 0.0, 1.0);

    std::vector<MatrixXd> corr;
    for (std::size_t b = 0; b < blocks_.size(); ++b) corr.push_back(dx[b] * dz[b]);
    const VectorXd corr_lp = dx_lp.cwiseProduct(dz_lp);
    direction(sigma * mu, &corr, &corr_lp, dy, dz, dx, dz_lp, dx_lp);
    auto [ap, ad] = steps(dx, dz, dx_lp, dz_lp);
    const double gamma = 0.9 + 0.09 * std::min(ap_aff, ad_aff);
    ap = std::min(1.0, gamma * ap);
    ad = std::min(1.0, gamma * ad);

    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      Block& blk = blocks_[b];
      blk.x += ap * dx[b];
      blk.z += ad * dz[b];
      blk.x = (0.5 * (blk.x + blk.x.transpose())).eval();
      blk.z = (0.5 * (blk.z + blk.z.transpose())).eval();
    }
    lp_x_ += ap * dx_lp;
    lp_s_ += ad * dz_lp;
    y += ad * dy;
    if (ap < 1e-10 && ad < 1e-10) {
      diag << "step length collapsed";
      break;
    }
  }
  if (iter == options_.max_iterations) diag << "iteration limit";

  sol.iterations = iter;
  sol.margin = y[n_];
  if (values.empty() || sol.status != SolveStatus::feasible) {
    const double v = check(y, values);
    if (sol.status != SolveStatus::feasible) sol.max_constraint_violation = v;
  }
  sol.values = std::move(values);
  sol.diagnostics = diag.str();
  return sol;
}

}  // namespace

LmiSolution solve_feasibility(const LmiProblem& problem, const SolverOptions& options) {
  if (options.strictness_margin > 0.0) {
    LmiProblem copy = problem;
    copy.set_strictness_margin(options.strictness_margin);
    Solver solver(copy, options);
    return solver.run();
  }
  Solver solver(problem, options);
  return solver.run();
}

}  // namespace zf::sdp
