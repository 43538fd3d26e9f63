#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace zf::sdp {

/// Affine expression in the scalar decision variables: constant + Σ cᵢ xᵢ.
struct LinearExpr {
  double constant = 0.0;
  std::vector<std::pair<int, double>> terms;

  static LinearExpr variable(int index, double coeff = 1.0) { return {0.0, {{index, coeff}}}; }
  static LinearExpr value(double c) { return {c, {}}; }

  LinearExpr& operator+=(const LinearExpr& other);
  LinearExpr& operator*=(double s);
  friend LinearExpr operator+(LinearExpr a, const LinearExpr& b) { return a += b; }
  friend LinearExpr operator-(LinearExpr a, LinearExpr b) { return a += (b *= -1.0); }
  friend LinearExpr operator*(double s, LinearExpr a) { return a *= s; }
};

/// Index map from matrix entries to scalar decision variables.
struct MatrixVariable {
  int rows = 0;
  int cols = 0;
  bool symmetric = false;
  std::vector<int> index;  // column-major, rows*cols entries

  int operator()(int r, int c) const { return index[static_cast<std::size_t>(c) * rows + r]; }
  /// Reads the variable's value from a full assignment vector.
  Eigen::MatrixXd value(std::span<const double> values) const;
};

enum class MatrixSense { negative_definite, negative_semidefinite };
enum class LinearSense { less_equal, equal, less };

/// coeff · (b_u b_vᵀ + b_v b_uᵀ) contributed by one decision variable.
struct LowRankTerm {
  int variable;
  int u;
  int v;
  double coeff;
};

/**
 * One symmetric matrix inequality F₀ + Σ xᵢ Fᵢ ≺ 0 (or ⪯ 0).
 *
 * Coefficient matrices are stored as sums of symmetric rank-two terms over a
 * per-constraint basis of vectors. Congruences such as NᵀXN with a symmetric
 * matrix variable X reduce to one or two terms per entry of X, which is what
 * keeps the interior-point Schur complement cheap for KYP-type inequalities.
 */
class MatrixConstraint {
 public:
  MatrixConstraint(int dim, MatrixSense sense, std::string name);

  int dim() const { return dim_; }
  MatrixSense sense() const { return sense_; }
  const std::string& name() const { return name_; }

  /// Places scale·(U Y V) into block (row, col) and its transpose into the
  /// mirrored block. On a diagonal block (row == col) the symmetric part
  /// ½(UYV + (UYV)ᵀ) is added instead.
  void add_product(int row, int col, const Eigen::MatrixXd& left, const MatrixVariable& var,
                   const Eigen::MatrixXd& right, double scale = 1.0);

  /// Places expr·block into (row, col) with the same mirroring rule.
  void add_scaled(int row, int col, const LinearExpr& expr, const Eigen::MatrixXd& block);

  void add_constant(int row, int col, const Eigen::MatrixXd& block);

  /// Adds expr·(u vᵀ + v uᵀ) over the full matrix.
  void add_outer(const LinearExpr& expr, const Eigen::VectorXd& u, const Eigen::VectorXd& v);

  /// Adds scale·NᵀXN for a symmetric matrix variable X (N has X.rows rows and dim columns).
  void add_congruence(const MatrixVariable& x, const Eigen::MatrixXd& n, double scale = 1.0);

  /// F₀ + Σ xᵢ Fᵢ at the given assignment.
  Eigen::MatrixXd evaluate(std::span<const double> values) const;
  /// Dense Fᵢ for one variable (F₀ excluded).
  Eigen::MatrixXd coefficient(int variable) const;

  const Eigen::MatrixXd& constant() const { return constant_; }
  const std::vector<Eigen::VectorXd>& basis() const { return basis_; }
  const std::vector<LowRankTerm>& terms() const { return terms_; }

 private:
  int register_basis(const Eigen::VectorXd& v);
  void add_term(const LinearExpr& expr, const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                double scale);
  Eigen::VectorXd embed(const Eigen::VectorXd& v, int offset) const;

  int dim_;
  MatrixSense sense_;
  std::string name_;
  Eigen::MatrixXd constant_;
  std::vector<Eigen::VectorXd> basis_;
  std::unordered_map<std::string, int> basis_lookup_;
  std::vector<LowRankTerm> terms_;
};

/// Σ coeffs·x (sense) bound.
struct LinearConstraint {
  std::vector<std::pair<int, double>> coeffs;
  LinearSense sense;
  double bound;
};

/**
 * Feasibility problem over scalar decision variables: a list of matrix
 * inequalities plus linear (in)equalities.
 *
 * Strict matrix inequalities are realised as F(x) ⪯ −ε_lmi·I and strict
 * linear ones as aᵀx ≤ b − ε_lin.
 */
class LmiProblem {
 public:
  int add_scalar(std::string name);
  MatrixVariable add_symmetric(const std::string& name, int n);
  MatrixVariable add_matrix(const std::string& name, int rows, int cols);

  /// The returned reference stays valid until the next call that adds a constraint.
  MatrixConstraint& add_matrix_constraint(int dim, MatrixSense sense = MatrixSense::negative_definite,
                                          std::string name = {});
  void add_linear(const LinearExpr& lhs, LinearSense sense, double rhs);

  int num_variables() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& variable_names() const { return names_; }
  const std::vector<MatrixConstraint>& matrix_constraints() const { return matrices_; }
  std::vector<MatrixConstraint>& matrix_constraints() { return matrices_; }
  const std::vector<LinearConstraint>& linear_constraints() const { return linear_; }

  /// ε_lmi; defaults to 1e-7 times the largest constraint dimension.
  double strictness_margin() const;
  void set_strictness_margin(double eps) { lmi_margin_ = eps; }
  double linear_margin() const { return lin_margin_; }
  void set_linear_margin(double eps) { lin_margin_ = eps; }
  /// Artificial box |xᵢ| ≤ bound that keeps the solver's optimal set bounded.
  double variable_bound() const { return bound_; }
  void set_variable_bound(double bound) { bound_ = bound; }

  /// Text dump: sparse coordinate triplets at 17 significant digits.
  void dump(std::ostream& os) const;

 private:
  std::vector<std::string> names_;
  std::vector<MatrixConstraint> matrices_;
  std::vector<LinearConstraint> linear_;
  double lmi_margin_ = -1.0;
  double lin_margin_ = 1e-8;
  double bound_ = 1e6;
};

enum class SolveStatus { feasible, infeasible, inaccurate };

const char* to_string(SolveStatus status);

struct LmiSolution {
  SolveStatus status = SolveStatus::inaccurate;
  std::vector<double> values;
  /// Worst violation of the strict constraints at `values` (≤ 0 means satisfied).
  double max_constraint_violation = 0.0;
  /// Common margin t reached by the solver: F(x) ⪯ −t·I, aᵀx ≤ b − t.
  double margin = 0.0;
  int iterations = 0;
  std::string diagnostics;
};

struct SolverOptions {
  int max_iterations = 120;
  double gap_tolerance = 1e-9;
  double feasibility_tolerance = 1e-9;
  /// Stop as soon as an iterate passes the independent re-check.
  bool stop_at_certificate = true;
  /// Replaces the problem's ε_lmi when positive.
  double strictness_margin = 0.0;

  /// Defaults with ZF_SOLVER_MAXITER applied when set.
  static SolverOptions from_environment();
};

/**
 * Decides feasibility with a primal-dual interior-point method (HKM search
 * direction, Mehrotra predictor-corrector). The phase-one form maximises a
 * common margin t subject to F(x) + tI ⪯ 0 and aᵀx + t ≤ b, which always has
 * a strictly feasible point. A reported feasible assignment is re-checked
 * independently by eigenvalue computation; the solver iterate is never
 * trusted on its own.
 */
LmiSolution solve_feasibility(const LmiProblem& problem, const SolverOptions& options = {});

/// Worst violation of all constraints at `values`, measured against the strict
/// margins: max over matrix constraints of λ_max(F(x)) + ε_lmi (0 for ⪯ 0
/// constraints) and over linear rows of aᵀx − b (+ ε_lin for strict rows).
double max_violation(const LmiProblem& problem, std::span<const double> values);

}  // namespace zf::sdp
