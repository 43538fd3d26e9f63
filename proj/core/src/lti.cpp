#include "zf/lti.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <boost/math/tools/roots.hpp>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace zf {
namespace {

std::vector<double> trim_leading_zeros(std::vector<double> p) {
  auto first = std::find_if(p.begin(), p.end(), [](double c) { return c != 0.0; });
  p.erase(p.begin(), first);
  if (p.empty()) p.push_back(0.0);
  return p;
}

Complex horner(const std::vector<double>& p, Complex x) {
  Complex acc{0.0, 0.0};
  for (double c : p) acc = acc * x + c;
  return acc;
}

std::vector<Complex> polynomial_roots(const std::vector<double>& p) {
  const int n = static_cast<int>(p.size()) - 1;
  if (n <= 0) return {};
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) companion(0, j) = -p[j + 1] / p[0];
  for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
  std::vector<Complex> roots(n);
  for (int i = 0; i < n; ++i) roots[i] = es.eigenvalues()(i);
  return roots;
}

Complex boundary_point(TimeDomain domain, double omega) {
  if (domain == TimeDomain::discrete) return std::polar(1.0, omega);
  return {0.0, omega};
}

bool closed_loop_stable(const StateSpaceModel& sys, double gain, TimeDomain domain) {
  const double loop = 1.0 + gain * sys.d;
  if (std::abs(loop) < 1e-12) return false;
  if (sys.order() == 0) return loop > 0.0;
  Eigen::MatrixXd acl = sys.a - sys.b * (gain / loop) * sys.c;
  Eigen::EigenSolver<Eigen::MatrixXd> es(acl, false);
  const auto& ev = es.eigenvalues();
  for (int i = 0; i < ev.size(); ++i) {
    if (domain == TimeDomain::discrete ? std::abs(ev(i)) >= 1.0 : ev(i).real() >= 0.0)
      return false;
  }
  // A static path that changes sign makes the loop ill posed somewhere in τ.
  return loop > 0.0;
}

// Gains K > 0 at which 1 + K G touches zero on the stability boundary.
std::vector<double> crossing_gains(const RationalTransferFunction& g) {
  std::vector<double> omegas;
  if (g.domain() == TimeDomain::discrete) {
    omegas = unit_circle_grid(20001);
  } else {
    double scale = 1.0;
    for (const auto& p : g.poles()) scale = std::max(scale, std::abs(p));
    for (const auto& z : g.zeros()) scale = std::max(scale, std::abs(z));
    omegas = log_grid(1e-6, 1e4 * scale, 40001);
    omegas.insert(omegas.begin(), 0.0);
  }

  std::vector<double> gains;
  auto consider = [&](Complex value) {
    if (value.real() < 0.0) gains.push_back(-1.0 / value.real());
  };
  auto imag_at = [&](double w) { return g.at_frequency(w).imag(); };

  std::vector<double> im(omegas.size());
  for (std::size_t i = 0; i < omegas.size(); ++i) im[i] = imag_at(omegas[i]);

  for (std::size_t i = 0; i < omegas.size(); ++i) {
    if (im[i] == 0.0) consider(g.at_frequency(omegas[i]));
    if (i + 1 < omegas.size() && im[i] * im[i + 1] < 0.0) {
      boost::math::tools::eps_tolerance<double> tol(50);
      std::uintmax_t iters = 100;
      auto [lo, hi] = boost::math::tools::toms748_solve(imag_at, omegas[i], omegas[i + 1],
                                                         im[i], im[i + 1], tol, iters);
      const double w = 0.5 * (lo + hi);
      consider(g.at_frequency(w));
    }
  }
  if (g.domain() == TimeDomain::discrete) {
    consider(g.at_frequency(0.0));
    consider(g.at_frequency(std::numbers::pi));
  } else {
    // ω → ∞ leaves the direct feedthrough.
    const double d = g.is_proper() && g.numerator_degree() == g.order() ? g.numerator()[0] : 0.0;
    if (d < 0.0) gains.push_back(-1.0 / d);
  }
  std::sort(gains.begin(), gains.end());
  return gains;
}

}  // namespace

RationalTransferFunction::RationalTransferFunction(std::vector<double> numerator,
                                                   std::vector<double> denominator,
                                                   TimeDomain domain)
    : num_(trim_leading_zeros(std::move(numerator))),
      den_(trim_leading_zeros(std::move(denominator))),
      domain_(domain) {
  if (den_.size() == 1 && den_[0] == 0.0)
    throw std::invalid_argument("transfer function denominator is identically zero");
  const double lead = den_.front();
  for (double& c : den_) c /= lead;
  for (double& c : num_) c /= lead;
}

RationalTransferFunction RationalTransferFunction::constant(double gain, TimeDomain domain) {
  return RationalTransferFunction({gain}, {1.0}, domain);
}

Complex RationalTransferFunction::evaluate(Complex x) const {
  return horner(num_, x) / horner(den_, x);
}

Complex RationalTransferFunction::at_frequency(double omega) const {
  return evaluate(boundary_point(domain_, omega));
}

std::vector<Complex> RationalTransferFunction::poles() const { return polynomial_roots(den_); }

std::vector<Complex> RationalTransferFunction::zeros() const {
  if (num_.size() == 1) return {};
  return polynomial_roots(num_);
}

bool RationalTransferFunction::is_stable() const {
  for (const auto& p : poles()) {
    if (domain_ == TimeDomain::discrete) {
      if (std::abs(p) >= 1.0 - kBoundaryTolerance) return false;
    } else if (p.real() >= -kBoundaryTolerance) {
      return false;
    }
  }
  return true;
}

RationalTransferFunction RationalTransferFunction::scaled(double factor) const {
  auto num = num_;
  for (double& c : num) c *= factor;
  return RationalTransferFunction(std::move(num), den_, domain_);
}

Complex StateSpaceModel::evaluate(Complex x) const {
  if (order() == 0) return {d, 0.0};
  Eigen::MatrixXcd m = -a.cast<Complex>();
  m.diagonal().array() += x;
  Eigen::VectorXcd sol = m.partialPivLu().solve(b.cast<Complex>());
  return (c.cast<Complex>() * sol)(0) + d;
}

double StateSpaceModel::spectral_radius() const {
  if (order() == 0) return 0.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double StateSpaceModel::spectral_abscissa() const {
  if (order() == 0) return -std::numeric_limits<double>::infinity();
  Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
  return es.eigenvalues().real().maxCoeff();
}

StateSpaceModel tf_to_ss(const RationalTransferFunction& g) {
  if (!g.is_proper()) {
    std::ostringstream msg;
    msg << "cannot realize improper transfer function (numerator degree "
        << g.numerator_degree() << " > denominator degree " << g.order() << ")";
    throw std::invalid_argument(msg.str());
  }
  const int n = g.order();
  const auto& den = g.denominator();
  std::vector<double> num(n + 1, 0.0);
  std::copy(g.numerator().begin(), g.numerator().end(),
            num.begin() + (n + 1 - static_cast<int>(g.numerator().size())));

  StateSpaceModel sys;
  sys.d = num[0];
  sys.a = Eigen::MatrixXd::Zero(n, n);
  sys.b = Eigen::VectorXd::Zero(n);
  sys.c = Eigen::RowVectorXd::Zero(n);
  if (n == 0) return sys;
  for (int j = 0; j < n; ++j) {
    sys.a(0, j) = -den[j + 1];
    sys.c(j) = num[j + 1] - num[0] * den[j + 1];
  }
  for (int i = 1; i < n; ++i) sys.a(i, i - 1) = 1.0;
  sys.b(0) = 1.0;
  return sys;
}

std::vector<double> poly_from_roots(std::span<const Complex> roots) {
  std::vector<Complex> p{Complex{1.0, 0.0}};
  for (const auto& r : roots) {
    std::vector<Complex> next(p.size() + 1, Complex{0.0, 0.0});
    for (std::size_t i = 0; i < p.size(); ++i) {
      next[i] += p[i];
      next[i + 1] -= p[i] * r;
    }
    p = std::move(next);
  }
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i].real();
  return out;
}

std::vector<double> characteristic_polynomial(const Eigen::MatrixXd& a) {
  if (a.rows() == 0) return {1.0};
  Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
  std::vector<Complex> roots(a.rows());
  for (int i = 0; i < a.rows(); ++i) roots[i] = es.eigenvalues()(i);
  return poly_from_roots(roots);
}

namespace {

// Solves W = A W Aᵀ + Q.
Eigen::MatrixXd discrete_lyapunov(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q) {
  const int n = static_cast<int>(a.rows());
  const Eigen::MatrixXd lhs =
      Eigen::MatrixXd::Identity(n * n, n * n) - Eigen::kroneckerProduct(a, a).eval();
  const Eigen::VectorXd w = lhs.partialPivLu().solve(q.reshaped());
  Eigen::MatrixXd out = w.reshaped(n, n);
  return (0.5 * (out + out.transpose())).eval();
}

// Real block-diagonal realization from poles and residues: 1×1 blocks for
// real poles, [[a, b], [−b, a]] for pairs a ± jb. Empty when poles are
// repeated or nearly so.
std::optional<StateSpaceModel> modal_realization(const RationalTransferFunction& g) {
  const int n = g.order();
  const auto& den = g.denominator();
  std::vector<double> num(n + 1, 0.0);
  const int off = n - g.numerator_degree();
  for (std::size_t i = 0; i < g.numerator().size(); ++i) num[off + i] = g.numerator()[i];
  const double d = num[0];
  std::vector<double> strict(n);
  for (int i = 1; i <= n; ++i) strict[i - 1] = num[i] - d * den[i];
  std::vector<double> dden(n);
  for (int i = 0; i < n; ++i) dden[i] = den[i] * (n - i);

  std::vector<Complex> poles = g.poles();
  double scale = 1.0;
  for (const auto& p : poles) scale = std::max(scale, std::abs(p));
  for (std::size_t i = 0; i < poles.size(); ++i)
    for (std::size_t j = i + 1; j < poles.size(); ++j)
      if (std::abs(poles[i] - poles[j]) < 1e-6 * scale) return std::nullopt;

  StateSpaceModel sys;
  sys.a = Eigen::MatrixXd::Zero(n, n);
  sys.b = Eigen::VectorXd::Zero(n);
  sys.c = Eigen::RowVectorXd::Zero(n);
  sys.d = d;
  int k = 0;
  for (const auto& p : poles) {
    if (p.imag() < 0.0) continue;
    const Complex r = horner(strict, p) / horner(dden, p);
    if (p.imag() == 0.0 || std::abs(p.imag()) <= 1e-12 * scale) {
      sys.a(k, k) = p.real();
      sys.b(k) = 1.0;
      sys.c(k) = r.real();
      k += 1;
    } else {
      sys.a(k, k) = sys.a(k + 1, k + 1) = p.real();
      sys.a(k, k + 1) = p.imag();
      sys.a(k + 1, k) = -p.imag();
      sys.b(k) = 1.0;
      sys.c(k) = 2.0 * r.real();
      sys.c(k + 1) = 2.0 * r.imag();
      k += 2;
    }
  }
  if (k != n) return std::nullopt;
  return sys;
}

}  // namespace

StateSpaceModel balanced_realization(const RationalTransferFunction& g) {
  StateSpaceModel sys = tf_to_ss(g);
  if (g.domain() != TimeDomain::discrete || sys.order() == 0 || !g.is_stable()) return sys;
  // The companion form is badly scaled when poles crowd the unit circle, so
  // the Gramians are computed in modal coordinates when the poles are simple.
  if (auto modal = modal_realization(g)) {
    double err = 0.0;
    for (double w : {0.1, 0.7, 1.9, 3.0}) {
      const Complex z = std::polar(1.0, w);
      const Complex ref = g.evaluate(z);
      err = std::max(err, std::abs(modal->evaluate(z) - ref) / std::max(std::abs(ref), 1e-300));
    }
    if (err < 1e-5) sys = *modal;
  }
  const Eigen::MatrixXd wc = discrete_lyapunov(sys.a, sys.b * sys.b.transpose());
  const Eigen::MatrixXd wo = discrete_lyapunov(sys.a.transpose(), sys.c.transpose() * sys.c);
  const Eigen::LLT<Eigen::MatrixXd> lc(wc), lo(wo);
  if (lc.info() != Eigen::Success || lo.info() != Eigen::Success) return sys;
  const Eigen::MatrixXd rc = lc.matrixL();
  const Eigen::MatrixXd ro = lo.matrixL();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(ro.transpose() * rc, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd sv = svd.singularValues();
  if (sv.minCoeff() <= 1e-14 * sv.maxCoeff()) return sys;
  const Eigen::VectorXd root = sv.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd t = rc * svd.matrixV() * root.asDiagonal();
  const Eigen::MatrixXd t_inv = root.asDiagonal() * svd.matrixU().transpose() * ro.transpose();
  StateSpaceModel out;
  out.a = t_inv * sys.a * t;
  out.b = t_inv * sys.b;
  out.c = sys.c * t;
  out.d = sys.d;
  return out;
}

RationalTransferFunction ss_to_tf(const StateSpaceModel& sys, TimeDomain domain) {
  const int n = sys.order();
  if (n == 0) return RationalTransferFunction({sys.d}, {1.0}, domain);
  // det(xI - A + BC) = det(xI - A) (1 + C (xI - A)^{-1} B)
  const auto den = characteristic_polynomial(sys.a);
  const auto shifted = characteristic_polynomial(sys.a - sys.b * sys.c);
  std::vector<double> num(n + 1);
  double scale = 0.0;
  for (int i = 0; i <= n; ++i) {
    num[i] = shifted[i] - den[i] + sys.d * den[i];
    scale = std::max(scale, std::abs(num[i]));
  }
  for (int i = 0; i <= n; ++i) {
    if (std::abs(num[i]) > 1e-13 * scale) break;
    num[i] = 0.0;
  }
  return RationalTransferFunction(std::move(num), den, domain);
}

std::vector<Complex> freq_response(const RationalTransferFunction& g,
                                   std::span<const double> omegas) {
  if (omegas.empty()) throw std::invalid_argument("frequency grid is empty");
  std::vector<Complex> out;
  out.reserve(omegas.size());
  for (double w : omegas) out.push_back(freq_response(g, w));
  return out;
}

Complex freq_response(const RationalTransferFunction& g, double omega) {
  const Complex x = boundary_point(g.domain(), omega);
  const Complex den = horner(g.denominator(), x);
  if (std::abs(den) < 1e-12) {
    std::ostringstream msg;
    msg << "frequency response evaluated at a pole (omega = " << omega << ")";
    throw std::domain_error(msg.str());
  }
  return horner(g.numerator(), x) / den;
}

std::vector<double> unit_circle_grid(int n) {
  if (n < 2) throw std::invalid_argument("unit circle grid needs at least two points");
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = std::numbers::pi * i / (n - 1);
  return w;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  if (n < 2 || lo <= 0.0 || hi <= lo) throw std::invalid_argument("invalid log grid");
  std::vector<double> w(n);
  const double a = std::log10(lo), b = std::log10(hi);
  for (int i = 0; i < n; ++i) w[i] = std::pow(10.0, a + (b - a) * i / (n - 1));
  return w;
}

NyquistValue nyquist_value(const RationalTransferFunction& g) {
  if (!g.is_stable()) throw std::domain_error("nyquist value requires a stable plant");
  const StateSpaceModel sys = tf_to_ss(g);
  const auto crossings = crossing_gains(g);

  auto stable_up_to = [&](double k) {
    if (!crossings.empty() && crossings.front() <= k) return false;
    for (int i = 0; i <= 100; ++i) {
      if (!closed_loop_stable(sys, k * i / 100.0, g.domain())) return false;
    }
    return true;
  };

  double lo = 0.0, hi = 1.0;
  while (stable_up_to(hi)) {
    lo = hi;
    hi *= 2.0;
    if (lo >= kUnboundedGain) return {kUnboundedGain, true};
  }
  while (hi - lo > 1e-6 * std::max(1.0, lo)) {
    const double mid = 0.5 * (lo + hi);
    (stable_up_to(mid) ? lo : hi) = mid;
  }
  return {lo, false};
}

RationalTransferFunction c2d_zoh(const RationalTransferFunction& g, double ts) {
  if (!(ts > 0.0)) throw std::invalid_argument("sampling time must be positive");
  if (g.domain() != TimeDomain::continuous)
    throw std::invalid_argument("c2d_zoh expects a continuous-time transfer function");
  const StateSpaceModel cont = tf_to_ss(g);
  const int n = cont.order();
  if (n == 0) return RationalTransferFunction({cont.d}, {1.0}, TimeDomain::discrete);

  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n + 1, n + 1);
  m.topLeftCorner(n, n) = cont.a * ts;
  m.topRightCorner(n, 1) = cont.b * ts;
  const Eigen::MatrixXd phi = m.exp();

  StateSpaceModel disc;
  disc.a = phi.topLeftCorner(n, n);
  disc.b = phi.topRightCorner(n, 1);
  disc.c = cont.c;
  disc.d = cont.d;
  return ss_to_tf(disc, TimeDomain::discrete);
}

}  // namespace zf
