#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "zf/fir.hpp"
#include "zf/lti.hpp"
#include "zf/sdp.hpp"

namespace zf {

/**
 * Augmented realization (Ã, B̃) of z^{-n}P(z) together with output maps
 * (C_i, D_i), i = -n_f..n_b, whose transfer functions P_i satisfy
 * P_i = z^{-i}P for i ≥ 0 and P_i + P_i* = z^{-i}P + (z^{-i}P)* for i < 0.
 */
struct AugmentedRealization {
  int n_p = 0;
  int n_f = 0;
  int n_b = 0;
  int n = 0;  // max(n_f, n_b)
  Eigen::MatrixXd a_tilde;
  Eigen::VectorXd b_tilde;
  Eigen::RowVectorXd c_n;
  std::vector<Eigen::RowVectorXd> c_d;  // C_{d,j}, j = 1..n_f
  std::vector<Eigen::RowVectorXd> c;    // C_i, index i + n_f
  std::vector<double> d;                // D_i, index i + n_f

  int states() const { return n_p + n; }
  const Eigen::RowVectorXd& c_at(int i) const { return c[i + n_f]; }
  double d_at(int i) const { return d[i + n_f]; }
  /// C_i(zI − Ã)^{-1}B̃ + D_i.
  Complex response(int i, Complex z) const;
  /// Rows [C_i D_i] for i = -n_f..n_b followed by [0 … 0 1].
  Eigen::MatrixXd m_f() const;
};

/// Throws std::invalid_argument for an unstable P or n = 0.
AugmentedRealization build_augmentation(const StateSpaceModel& p, int n_f, int n_b);

/// Tap decision variables with the class constraints already imposed.
struct TapVariables {
  int n_f = 0;
  int n_b = 0;
  bool odd = false;
  /// Variable index of m_i (non-odd) or of m⁺_i / m⁻_i (odd), slot i + n_f; -1 at i = 0.
  std::vector<int> m;
  std::vector<int> m_plus;
  std::vector<int> m_minus;
  /// m_i as an affine expression (constant 1 at i = 0).
  std::vector<sdp::LinearExpr> expr;

  const sdp::LinearExpr& at(int i) const { return expr[i + n_f]; }
  FirMultiplier value(std::span<const double> values) const;
};

/// Non-odd: m_i ≤ 0 and −Σ_{i≠0} m_i < 1. Odd: m_i = m⁺_i − m⁻_i with
/// m⁺, m⁻ ≥ 0 and Σ_{i≠0} (m⁺_i + m⁻_i) < 1.
TapVariables add_tap_variables(sdp::LmiProblem& problem, int n_f, int n_b, bool odd);

/// LMI of the hard factorization plus the class constraints on the taps.
struct HardLmi {
  sdp::LmiProblem problem;
  sdp::MatrixVariable x;
  TapVariables taps;
};

HardLmi assemble_hard_lmi(const AugmentedRealization& aug, bool odd);

struct FirSearchResult {
  sdp::SolveStatus status = sdp::SolveStatus::infeasible;
  std::optional<FirMultiplier> multiplier;
  Eigen::MatrixXd x;
  double solver_margin = 0.0;
  double fdi_margin = 0.0;
  std::string diagnostics;

  bool feasible() const { return multiplier.has_value(); }
};

/**
 * Searches for an FIR multiplier certifying slope k for plant G.
 *
 * A solver answer is accepted only when the recovered taps pass
 * check_zf_class and the frequency-domain inequality holds on a verification
 * grid; otherwise the status is downgraded to inaccurate.
 */
FirSearchResult solve_hard(const RationalTransferFunction& g, double k, int n_f, int n_b, bool odd,
                           const sdp::SolverOptions& options = sdp::SolverOptions::from_environment());

/// Realization of 1 + kG reusing the (A, B) of G.
StateSpaceModel loop_transform(const RationalTransferFunction& g, double k);

}  // namespace zf
