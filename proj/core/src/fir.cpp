#include "zf/fir.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace zf {

FirMultiplier::FirMultiplier(int n_f, int n_b)
    : n_f_(n_f), n_b_(n_b), coeffs_(static_cast<std::size_t>(std::max(n_f + n_b + 1, 1)), 0.0) {
  if (n_f < 0 || n_b < 0) throw std::invalid_argument("tap counts must be nonnegative");
  coeffs_[n_f_] = 1.0;
}

FirMultiplier::FirMultiplier(int n_f, int n_b, std::vector<double> coeffs)
    : n_f_(n_f), n_b_(n_b), coeffs_(std::move(coeffs)) {
  if (n_f < 0 || n_b < 0) throw std::invalid_argument("tap counts must be nonnegative");
  if (static_cast<int>(coeffs_.size()) != n_f + n_b + 1)
    throw std::invalid_argument("expected " + std::to_string(n_f + n_b + 1) + " coefficients, got " +
                                std::to_string(coeffs_.size()));
  coeffs_[n_f_] = 1.0;
}

double FirMultiplier::operator[](int i) const {
  if (i < -n_f_ || i > n_b_) return 0.0;
  return coeffs_[i + n_f_];
}

void FirMultiplier::set(int i, double value) {
  if (i < -n_f_ || i > n_b_) throw std::out_of_range("tap index outside multiplier support");
  if (i == 0) throw std::invalid_argument("m_0 is fixed to 1");
  coeffs_[i + n_f_] = value;
}

std::complex<double> FirMultiplier::evaluate(double omega) const {
  std::complex<double> acc = 0.0;
  for (int i = -n_f_; i <= n_b_; ++i) acc += (*this)[i] * std::polar(1.0, -i * omega);
  return acc;
}

double l1_norm(const FirMultiplier& m) {
  double s = 0.0;
  for (double c : m.coeffs()) s += std::abs(c);
  return s;
}

ClassCheck check_zf_class(const FirMultiplier& m, bool odd_nonlinearity) {
  std::ostringstream why;
  if (odd_nonlinearity) {
    const double l1 = l1_norm(m);
    if (!(l1 < 2.0 - kClassMargin)) {
      why << "l1 norm " << l1 << " is not below 2";
      return {false, why.str()};
    }
    return {true, {}};
  }
  for (int i = -m.n_f(); i <= m.n_b(); ++i) {
    if (i != 0 && m[i] > 0.0) {
      why << "positive off-centre tap m_" << i << " = " << m[i];
      return {false, why.str()};
    }
  }
  const double sum = std::accumulate(m.coeffs().begin(), m.coeffs().end(), 0.0);
  if (!(sum > kClassMargin)) {
    why << "tap sum " << sum << " is not positive";
    return {false, why.str()};
  }
  return {true, {}};
}

JordanSplit jordan_decompose(const FirMultiplier& m) {
  JordanSplit out;
  for (double c : m.coeffs()) {
    out.plus.push_back(std::max(c, 0.0));
    out.minus.push_back(std::max(-c, 0.0));
  }
  return out;
}

void to_json(nlohmann::json& j, const FirMultiplier& m) {
  j = nlohmann::json{{"n_f", m.n_f()}, {"n_b", m.n_b()}, {"coeffs", m.coeffs()}};
}

void from_json(const nlohmann::json& j, FirMultiplier& m) {
  m = FirMultiplier(j.at("n_f").get<int>(), j.at("n_b").get<int>(),
                    j.at("coeffs").get<std::vector<double>>());
}

}  // namespace zf
