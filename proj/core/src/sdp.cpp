#include "zf/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace zf::sdp {

LinearExpr& LinearExpr::operator+=(const LinearExpr& other) {
  constant += other.constant;
  terms.insert(terms.end(), other.terms.begin(), other.terms.end());
  return *this;
}

LinearExpr& LinearExpr::operator*=(double s) {
  constant *= s;
  for (auto& [idx, c] : terms) c *= s;
  return *this;
}

Eigen::MatrixXd MatrixVariable::value(std::span<const double> values) const {
  Eigen::MatrixXd out(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) out(r, c) = values[(*this)(r, c)];
  return out;
}

MatrixConstraint::MatrixConstraint(int dim, MatrixSense sense, std::string name)
    : dim_(dim), sense_(sense), name_(std::move(name)), constant_(Eigen::MatrixXd::Zero(dim, dim)) {
  if (dim <= 0) throw std::invalid_argument("matrix constraint dimension must be positive");
}

int MatrixConstraint::register_basis(const Eigen::VectorXd& v) {
  std::string key(reinterpret_cast<const char*>(v.data()), sizeof(double) * v.size());
  auto [it, inserted] = basis_lookup_.try_emplace(std::move(key), static_cast<int>(basis_.size()));
  if (inserted) basis_.push_back(v);
  return it->second;
}

Eigen::VectorXd MatrixConstraint::embed(const Eigen::VectorXd& v, int offset) const {
  if (offset < 0 || offset + v.size() > dim_)
    throw std::out_of_range("block does not fit inside the matrix constraint");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dim_);
  out.segment(offset, v.size()) = v;
  return out;
}

void MatrixConstraint::add_term(const LinearExpr& expr, const Eigen::VectorXd& u,
                                const Eigen::VectorXd& v, double scale) {
  if (scale == 0.0 || u.isZero(0.0) || v.isZero(0.0)) return;
  if (expr.constant != 0.0) {
    const double c = scale * expr.constant;
    constant_.noalias() += c * (u * v.transpose());
    constant_.noalias() += c * (v * u.transpose());
  }
  if (expr.terms.empty()) return;
  const int iu = register_basis(u);
  const int iv = register_basis(v);
  for (const auto& [var, coeff] : expr.terms) {
    if (coeff != 0.0) terms_.push_back({var, iu, iv, scale * coeff});
  }
}

void MatrixConstraint::add_product(int row, int col, const Eigen::MatrixXd& left,
                                   const MatrixVariable& var, const Eigen::MatrixXd& right,
                                   double scale) {
  if (left.cols() != var.rows || right.rows() != var.cols)
    throw std::invalid_argument("product dimensions do not match the matrix variable");
  const double factor = row == col ? 0.5 : 1.0;
  for (int b = 0; b < var.cols; ++b) {
    const Eigen::VectorXd v = embed(right.row(b).transpose(), col);
    if (v.isZero(0.0)) continue;
    for (int a = 0; a < var.rows; ++a) {
      const Eigen::VectorXd u = embed(left.col(a), row);
      add_term(LinearExpr::variable(var(a, b)), u, v, scale * factor);
    }
  }
}

void MatrixConstraint::add_scaled(int row, int col, const LinearExpr& expr,
                                  const Eigen::MatrixXd& block) {
  const double factor = row == col ? 0.5 : 1.0;
  for (int j = 0; j < block.cols(); ++j) {
    for (int i = 0; i < block.rows(); ++i) {
      if (block(i, j) == 0.0) continue;
      add_term(expr, embed(Eigen::VectorXd::Unit(block.rows(), i), row),
               embed(Eigen::VectorXd::Unit(block.cols(), j), col), factor * block(i, j));
    }
  }
}

void MatrixConstraint::add_constant(int row, int col, const Eigen::MatrixXd& block) {
  if (row < 0 || col < 0 || row + block.rows() > dim_ || col + block.cols() > dim_)
    throw std::out_of_range("constant block does not fit inside the matrix constraint");
  if (row == col) {
    if (block.rows() != block.cols())
      throw std::invalid_argument("diagonal constant block must be square");
    constant_.block(row, col, block.rows(), block.cols()) += 0.5 * (block + block.transpose());
  } else {
    constant_.block(row, col, block.rows(), block.cols()) += block;
    constant_.block(col, row, block.cols(), block.rows()) += block.transpose();
  }
}

void MatrixConstraint::add_outer(const LinearExpr& expr, const Eigen::VectorXd& u,
                                 const Eigen::VectorXd& v) {
  if (u.size() != dim_ || v.size() != dim_)
    throw std::invalid_argument("outer product vectors must match the constraint dimension");
  add_term(expr, u, v, 1.0);
}

void MatrixConstraint::add_congruence(const MatrixVariable& x, const Eigen::MatrixXd& n,
                                      double scale) {
  if (!x.symmetric || x.rows != n.rows() || n.cols() != dim_)
    throw std::invalid_argument("congruence needs a symmetric variable and a conforming N");
  for (int a = 0; a < x.rows; ++a) {
    const Eigen::VectorXd na = n.row(a).transpose();
    for (int b = a; b < x.rows; ++b) {
      add_term(LinearExpr::variable(x(a, b)), na, n.row(b).transpose(),
               a == b ? 0.5 * scale : scale);
    }
  }
}

Eigen::MatrixXd MatrixConstraint::evaluate(std::span<const double> values) const {
  const int k = static_cast<int>(basis_.size());
  Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(k, k);
  for (const auto& t : terms_) gamma(t.u, t.v) += t.coeff * values[t.variable];
  Eigen::MatrixXd basis(dim_, k);
  for (int i = 0; i < k; ++i) basis.col(i) = basis_[i];
  Eigen::MatrixXd sym = gamma + gamma.transpose();
  return constant_ + basis * sym * basis.transpose();
}

Eigen::MatrixXd MatrixConstraint::coefficient(int variable) const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim_, dim_);
  for (const auto& t : terms_) {
    if (t.variable != variable) continue;
    out.noalias() += t.coeff * (basis_[t.u] * basis_[t.v].transpose());
    out.noalias() += t.coeff * (basis_[t.v] * basis_[t.u].transpose());
  }
  return out;
}

int LmiProblem::add_scalar(std::string name) {
  names_.push_back(std::move(name));
  return static_cast<int>(names_.size()) - 1;
}

MatrixVariable LmiProblem::add_symmetric(const std::string& name, int n) {
  MatrixVariable var{n, n, true, std::vector<int>(static_cast<std::size_t>(n) * n)};
  for (int c = 0; c < n; ++c) {
    for (int r = 0; r <= c; ++r) {
      const int idx = add_scalar(name + "[" + std::to_string(r) + "," + std::to_string(c) + "]");
      var.index[static_cast<std::size_t>(c) * n + r] = idx;
      var.index[static_cast<std::size_t>(r) * n + c] = idx;
    }
  }
  return var;
}

MatrixVariable LmiProblem::add_matrix(const std::string& name, int rows, int cols) {
  MatrixVariable var{rows, cols, false, std::vector<int>(static_cast<std::size_t>(rows) * cols)};
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r)
      var.index[static_cast<std::size_t>(c) * rows + r] =
          add_scalar(name + "[" + std::to_string(r) + "," + std::to_string(c) + "]");
  return var;
}

MatrixConstraint& LmiProblem::add_matrix_constraint(int dim, MatrixSense sense, std::string name) {
  if (name.empty()) name = "lmi" + std::to_string(matrices_.size());
  matrices_.emplace_back(dim, sense, std::move(name));
  return matrices_.back();
}

void LmiProblem::add_linear(const LinearExpr& lhs, LinearSense sense, double rhs) {
  LinearConstraint row{{}, sense, rhs - lhs.constant};
  for (const auto& [idx, c] : lhs.terms) {
    if (idx < 0 || idx >= num_variables()) throw std::out_of_range("unknown variable in linear constraint");
    auto it = std::find_if(row.coeffs.begin(), row.coeffs.end(),
                           [idx = idx](const auto& p) { return p.first == idx; });
    if (it == row.coeffs.end()) row.coeffs.emplace_back(idx, c);
    else it->second += c;
  }
  linear_.push_back(std::move(row));
}

double LmiProblem::strictness_margin() const {
  if (lmi_margin_ >= 0.0) return lmi_margin_;
  int dim = 1;
  for (const auto& m : matrices_) dim = std::max(dim, m.dim());
  return 1e-7 * dim;
}

void LmiProblem::dump(std::ostream& os) const {
  const auto old_precision = os.precision(17);
  os << "lmi_problem variables " << num_variables() << " matrix_constraints " << matrices_.size()
     << " linear_constraints " << linear_.size() << " eps_lmi " << strictness_margin()
     << " eps_lin " << lin_margin_ << "\n";
  for (int i = 0; i < num_variables(); ++i) os << "var " << i << " " << names_[i] << "\n";
  for (std::size_t c = 0; c < matrices_.size(); ++c) {
    const auto& m = matrices_[c];
    os << "matrix " << c << " " << m.name() << " dim " << m.dim() << " "
       << (m.sense() == MatrixSense::negative_definite ? "strict" : "nonstrict") << "\n";
    auto triplets = [&](const Eigen::MatrixXd& f, const std::string& tag) {
      for (int j = 0; j < f.cols(); ++j)
        for (int i = 0; i <= j; ++i)
          if (f(i, j) != 0.0) os << tag << " " << i << " " << j << " " << f(i, j) << "\n";
    };
    triplets(m.constant(), "F0");
    std::vector<int> vars;
    for (const auto& t : m.terms()) vars.push_back(t.variable);
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    for (int v : vars) triplets(m.coefficient(v), "F " + std::to_string(v));
  }
  for (const auto& row : linear_) {
    os << "linear "
       << (row.sense == LinearSense::equal ? "=" : row.sense == LinearSense::less ? "<" : "<=")
       << " " << row.bound;
    for (const auto& [idx, c] : row.coeffs) os << " " << idx << ":" << c;
    os << "\n";
  }
  os.precision(old_precision);
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::feasible: return "feasible";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::inaccurate: return "inaccurate";
  }
  return "unknown";
}

double max_violation(const LmiProblem& problem, std::span<const double> values) {
  if (static_cast<int>(values.size()) != problem.num_variables())
    throw std::invalid_argument("assignment size does not match the problem");
  double worst = -std::numeric_limits<double>::infinity();
  const double eps = problem.strictness_margin();
  for (const auto& m : problem.matrix_constraints()) {
    const Eigen::MatrixXd f = m.evaluate(values);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(f, Eigen::EigenvaluesOnly);
    const double lmax = es.eigenvalues().maxCoeff();
    worst = std::max(worst, lmax + (m.sense() == MatrixSense::negative_definite ? eps : 0.0));
  }
  for (const auto& row : problem.linear_constraints()) {
    double lhs = 0.0, scale = std::abs(row.bound);
    for (const auto& [idx, c] : row.coeffs) {
      lhs += c * values[idx];
      scale = std::max(scale, std::abs(c * values[idx]));
    }
    switch (row.sense) {
      case LinearSense::less_equal: worst = std::max(worst, lhs - row.bound); break;
      case LinearSense::less: worst = std::max(worst, lhs - row.bound + problem.linear_margin()); break;
      case LinearSense::equal:
        worst = std::max(worst, std::abs(lhs - row.bound) - 1e-9 * (1.0 + scale));
        break;
    }
  }
  return worst;
}

}  // namespace zf::sdp
