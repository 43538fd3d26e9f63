#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace zf {

using Complex = std::complex<double>;

enum class TimeDomain { discrete, continuous };

/// Tolerance used when deciding whether a pole sits on the stability boundary.
inline constexpr double kBoundaryTolerance = 1e-9;

/// Cap used to represent an unbounded gain.
inline constexpr double kUnboundedGain = 1e6;

/**
 * SISO rational transfer function in z or s.
 *
 * Coefficients are stored in descending powers. Leading zeros are trimmed on
 * construction and the denominator is normalised to be monic.
 */
class RationalTransferFunction {
 public:
  RationalTransferFunction(std::vector<double> numerator,
                           std::vector<double> denominator,
                           TimeDomain domain = TimeDomain::discrete);

  static RationalTransferFunction constant(double gain,
                                           TimeDomain domain = TimeDomain::discrete);

  const std::vector<double>& numerator() const { return num_; }
  const std::vector<double>& denominator() const { return den_; }
  TimeDomain domain() const { return domain_; }

  int order() const { return static_cast<int>(den_.size()) - 1; }
  int numerator_degree() const { return static_cast<int>(num_.size()) - 1; }
  bool is_proper() const { return numerator_degree() <= order(); }

  /// Evaluates the rational function at an arbitrary complex point.
  Complex evaluate(Complex x) const;

  /// Evaluates on the stability boundary: e^{jω} (discrete) or jω (continuous).
  Complex at_frequency(double omega) const;

  std::vector<Complex> poles() const;
  std::vector<Complex> zeros() const;

  /// True when every pole is strictly inside the unit disk (discrete) or the
  /// open left half plane (continuous), with kBoundaryTolerance slack.
  bool is_stable() const;

  RationalTransferFunction scaled(double factor) const;
  RationalTransferFunction negated() const { return scaled(-1.0); }

 private:
  std::vector<double> num_;
  std::vector<double> den_;
  TimeDomain domain_;
};

/// Single-input single-output realization (A, B, C, D).
struct StateSpaceModel {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::RowVectorXd c;
  double d = 0.0;

  int order() const { return static_cast<int>(a.rows()); }

  /// C (xI - A)^{-1} B + D.
  Complex evaluate(Complex x) const;

  double spectral_radius() const;
  /// Largest real part of the eigenvalues of A (-inf for a static gain).
  double spectral_abscissa() const;
};

/// Controllable canonical realization. Throws std::invalid_argument when the
/// transfer function is improper.
StateSpaceModel tf_to_ss(const RationalTransferFunction& g);

/// Balanced realization of a stable discrete-time G: controllability and
/// observability Gramians equal and diagonal. Falls back to tf_to_ss when G
/// is continuous, unstable or not minimal. The solvers use it because the
/// companion form is badly scaled when poles cluster near z = 1.
StateSpaceModel balanced_realization(const RationalTransferFunction& g);

/// Expands C (xI - A)^{-1} B + D into numerator and denominator polynomials.
RationalTransferFunction ss_to_tf(const StateSpaceModel& sys, TimeDomain domain);

/// Frequency response on the stability boundary. Throws std::domain_error
/// naming the frequency when a grid point sits on a pole.
std::vector<Complex> freq_response(const RationalTransferFunction& g,
                                   std::span<const double> omegas);
Complex freq_response(const RationalTransferFunction& g, double omega);

/// n equally spaced frequencies covering [0, π].
std::vector<double> unit_circle_grid(int n);

/// n log-spaced frequencies in [lo, hi].
std::vector<double> log_grid(double lo, double hi, int n);

struct NyquistValue {
  double value = 0.0;
  bool unbounded = false;
};

/**
 * Supremum gain K such that the negative feedback loop of τK and G is stable
 * for all τ in [0, 1].
 *
 * Computed by bisection on K. The inner predicate checks closed-loop
 * eigenvalues on a 101-point τ grid and also rejects K whenever a Nyquist
 * crossing gain −1/G(e^{jω}) lies in (0, K], which guards against narrow
 * instability windows that a τ grid could miss. Returns kUnboundedGain with
 * the unbounded flag when no instability is found up to that cap.
 *
 * Throws std::domain_error when G itself is unstable.
 */
NyquistValue nyquist_value(const RationalTransferFunction& g);

/// Zero-order-hold discretization via the matrix exponential of [[A, B], [0, 0]].
RationalTransferFunction c2d_zoh(const RationalTransferFunction& g, double ts);

/// Monic real polynomial (descending powers) with the given roots.
std::vector<double> poly_from_roots(std::span<const Complex> roots);

/// Characteristic polynomial det(xI - A), descending powers.
std::vector<double> characteristic_polynomial(const Eigen::MatrixXd& a);

}  // namespace zf
