#pragma once

#include <Eigen/Dense>

#include "zf/fir.hpp"
#include "zf/hard_factorization.hpp"
#include "zf/lti.hpp"

namespace zf {

/**
 * Realization of Ψ(z)[−G(z); 1] with one delay chain on the plant output and
 * one on the input. State order: plant states, y(t−1..t−n), u(t−1..t−n).
 * Output rows 0..n carry −z^{-i}G and rows n+1..2n+1 carry z^{-i}.
 */
struct LiftedRealization {
  int n = 0;
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::MatrixXd c;
  Eigen::VectorXd d;

  int states() const { return static_cast<int>(a.rows()); }
  /// Output vector at the complex point z.
  Eigen::VectorXcd response(Complex z) const;
};

/// Throws std::invalid_argument for an unstable G or n < 1.
LiftedRealization build_lifted(const StateSpaceModel& g, int n);

/// The 2(n+1)×2(n+1) coupling matrix κ(k, m) for m with n_f = n_b = n.
Eigen::MatrixXd build_kappa(double k, const FirMultiplier& m);

/**
 * FIR search with the lifting factorization (X unsigned).
 *
 * The quadratic form of κ(k, m) along Ψ[−G; 1] equals −2·Re{M̃(1 + kG)}
 * where M̃ has the taps of m reversed (m_i ↔ m_{-i}). The returned
 * multiplier is therefore the reversal of the LMI variable, which is the
 * one satisfying Re{M(1 + kG)} > 0.
 */
FirSearchResult solve_lifted(const RationalTransferFunction& g, double k, int n, bool odd,
                             const sdp::SolverOptions& options = sdp::SolverOptions::from_environment());

/// m_i ↔ m_{-i}.
FirMultiplier reversed(const FirMultiplier& m);

}  // namespace zf
