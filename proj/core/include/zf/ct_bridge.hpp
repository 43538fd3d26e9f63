#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "zf/analysis.hpp"
#include "zf/fir.hpp"
#include "zf/lti.hpp"

namespace zf {

/// Delay-form multiplier M(s) = Σ m_i e^{-i·Ts·s}; negative i are anticausal.
struct DelayMultiplier {
  double ts = 0.0;
  /// (i, m_i) sorted by i; always contains (0, 1).
  std::vector<std::pair<int, double>> terms;

  Complex evaluate(double omega) const;
  /// Σ_{i≠0} |m_i|.
  double off_centre_l1() const;
};

/// Keeps the taps of m with |m_i| ≥ eps (the centre tap always survives).
DelayMultiplier prune(const FirMultiplier& m, double ts, double eps = 1e-3);

struct CtBridgeOptions {
  double ts = 0.05;
  int n_f = 1;
  int n_b = 1;
  bool odd = false;
  double eps_prune = 1e-3;
  /// Settings of the discrete slope search (method and orders are overwritten).
  SlopeOptions search;
};

struct CtBridgeResult {
  RationalTransferFunction discrete_plant{{0.0}, {1.0}};
  SlopeResult discrete;
  DelayMultiplier multiplier;
};

/**
 * Discretises G_s by zero-order hold, finds the FIR multiplier with the
 * largest discrete slope, and converts its taps to delays of i·Ts after
 * dropping taps below eps_prune.
 *
 * Throws std::domain_error when the discretised plant is not stable.
 */
CtBridgeResult derive_ct_multiplier(const RationalTransferFunction& g_s, const CtBridgeOptions& options);

struct CtSlope {
  double k = 0.0;
  bool unbounded = false;
  /// Frequency at which Re{M(1+kG)} reaches zero.
  double omega = 0.0;
  int grid_points = 0;
};

/**
 * Largest K with Re{M(jω)(1 + K·G(jω))} > 0 for all ω ≥ 0.
 *
 * The inequality is affine in K at each frequency, so the answer is
 * min Re M / (−Re MG) over frequencies where Re MG < 0. The sweep combines a
 * log grid, a uniform grid resolving the largest delay, dense points around
 * lightly damped poles and Brent refinement of the best candidates. When
 * Re MG never goes negative the continuous Nyquist value is returned.
 */
CtSlope ct_max_slope(const DelayMultiplier& m, const RationalTransferFunction& g_s);

/// Writes "omega,phase_degrees" rows of M(jω)(1 + kG(jω)) on a log grid.
void phase_sweep_csv(std::ostream& os, const DelayMultiplier& m, const RationalTransferFunction& g_s,
                     double k, double omega_lo, double omega_hi, int points);

/// Phase in degrees of M(jω)(1 + kG(jω)).
double phase_degrees(const DelayMultiplier& m, const RationalTransferFunction& g_s, double k,
                     double omega);

void to_json(nlohmann::json& j, const DelayMultiplier& m);
void from_json(const nlohmann::json& j, DelayMultiplier& m);

}  // namespace zf
