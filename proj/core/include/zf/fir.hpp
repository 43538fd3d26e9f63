#pragma once

#include <complex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace zf {

/// FIR Zames–Falb multiplier M(z) = Σ_{i=-n_f}^{n_b} m_i z^{-i} with m_0 = 1.
class FirMultiplier {
 public:
  FirMultiplier() : FirMultiplier(0, 0) {}
  /// Identity taps (m_0 = 1, all others 0).
  FirMultiplier(int n_f, int n_b);
  /// coeffs ordered m_{-n_f} .. m_{n_b}; the centre entry is forced to 1.
  FirMultiplier(int n_f, int n_b, std::vector<double> coeffs);

  int n_f() const { return n_f_; }
  int n_b() const { return n_b_; }
  const std::vector<double>& coeffs() const { return coeffs_; }

  /// Tap m_i for i in [-n_f, n_b]; zero outside.
  double operator[](int i) const;
  void set(int i, double value);

  /// Σ m_i e^{-jiω}.
  std::complex<double> evaluate(double omega) const;

 private:
  int n_f_;
  int n_b_;
  std::vector<double> coeffs_;
};

double l1_norm(const FirMultiplier& m);

struct ClassCheck {
  bool pass = false;
  std::string reason;
};

/// Margin used for the strict inequalities Σm_i > 0 and ℓ₁ < 2.
inline constexpr double kClassMargin = 1e-9;

/// Non-odd class: every off-centre tap ≤ 0 and Σ m_i > 0.
/// Odd class: Σ |m_i| < 2.
ClassCheck check_zf_class(const FirMultiplier& m, bool odd_nonlinearity);

struct JordanSplit {
  std::vector<double> plus;
  std::vector<double> minus;
};

/// m = m⁺ − m⁻ with disjoint nonnegative parts, ordered like coeffs().
JordanSplit jordan_decompose(const FirMultiplier& m);

void to_json(nlohmann::json& j, const FirMultiplier& m);
void from_json(const nlohmann::json& j, FirMultiplier& m);

}  // namespace zf
