#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "zf/lti.hpp"
#include "zf/sdp.hpp"

namespace zf {

enum class IirDirection { causal, anticausal };

struct IirSearchConfig {
  /// Candidate decay rates λ in (0, 1), tried in order.
  std::vector<double> lambda_grid = default_lambda_grid();
  sdp::SolverOptions solver = sdp::SolverOptions::from_environment();
  /// Frequency points used to verify a recovered multiplier.
  int verify_grid = 2048;

  /// 30 log-spaced points in [0.01, 0.99].
  static std::vector<double> default_lambda_grid(int count = 30);
};

/**
 * M(z) = 1 + C_u(zI − A_u)^{-1}B_u (causal) or
 * M(z) = 1 + C_u(z^{-1}I − A_u)^{-1}B_u (anticausal).
 */
struct IirMultiplier {
  IirDirection direction = IirDirection::causal;
  Eigen::MatrixXd a_u;
  Eigen::VectorXd b_u;
  Eigen::RowVectorXd c_u;
  /// Certified bound on the ℓ₁ norm of M − 1.
  double l1_bound = 0.0;
  double lambda = 0.0;

  Complex evaluate(double omega) const;
  /// Causal realization of the anticausal multiplier when A_u is invertible.
  std::optional<StateSpaceModel> forward_realization() const;
};

struct IirSearchResult {
  std::optional<IirMultiplier> multiplier;
  double lambda = 0.0;
  double fdi_margin = 0.0;
  std::string diagnostics;

  bool feasible() const { return multiplier.has_value(); }
};

/// Proposition-style search over causal multipliers with the multiplier order
/// equal to the plant order. `first_lambda` (if in range) is tried first.
IirSearchResult causal_search(const RationalTransferFunction& g, double k, const IirSearchConfig& cfg,
                              int first_lambda = -1);

/// Anticausal counterpart, run on the realization of (1 + kG)^{-1}.
IirSearchResult anticausal_search(const RationalTransferFunction& g, double k,
                                  const IirSearchConfig& cfg, int first_lambda = -1);

struct RecoveredMatrices {
  Eigen::MatrixXd a_u;
  Eigen::VectorXd b_u;
  Eigen::RowVectorXd c_u;
};

/// A_u = −(P₁₁ − S₁₁)^{-1}Â, B_u = −(P₁₁ − S₁₁)^{-1}B̂, C_u = Ĉ. Throws
/// std::runtime_error when P₁₁ − S₁₁ has condition number ≥ 1e12.
RecoveredMatrices recover_multiplier(const Eigen::MatrixXd& s11, const Eigen::MatrixXd& p11,
                                     const Eigen::MatrixXd& a_hat, const Eigen::VectorXd& b_hat,
                                     const Eigen::RowVectorXd& c_hat);

/// Σ_{j≥1} |C A^{j-1} B| truncated after at least 200 terms, plus the tail
/// bound ‖C‖‖B‖ρ^N/(1 − ρ). Returns +inf when ρ ≥ 1.
double l1_norm_bound(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::RowVectorXd& c);

void to_json(nlohmann::json& j, const IirMultiplier& m);

}  // namespace zf
