#pragma once

// Reference computations shared by the property tests and the acceptance run.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "zf/fir.hpp"
#include "zf/hard_factorization.hpp"
#include "zf/lti.hpp"

namespace zf::oracle {

// Random stable plant of the given order with poles of modulus ≤ 0.9.
inline RationalTransferFunction random_plant(std::mt19937& rng, int order) {
  std::uniform_real_distribution<double> radius(0.05, 0.9), angle(0.0, std::numbers::pi), coef(-1.0, 1.0);
  std::vector<Complex> poles;
  while (static_cast<int>(poles.size()) < order) {
    if (order - static_cast<int>(poles.size()) >= 2 && coef(rng) > 0.0) {
      const Complex p = std::polar(radius(rng), angle(rng));
      poles.push_back(p);
      poles.push_back(std::conj(p));
    } else {
      poles.emplace_back(coef(rng) * 0.9, 0.0);
    }
  }
  std::vector<double> num(order + 1);
  for (double& v : num) v = coef(rng);
  return RationalTransferFunction(num, poly_from_roots(poles));
}

// Impulse response h_0..h_{count-1}.
inline std::vector<double> markov(const StateSpaceModel& p, int count) {
  std::vector<double> h{p.d};
  Eigen::VectorXd x = p.b;
  for (int k = 1; k < count; ++k) {
    h.push_back(p.order() ? p.c.dot(x) : 0.0);
    if (p.order()) x = p.a * x;
  }
  return h;
}

// Largest K with Re{M(1 + KG)} > 0 at every grid point for a fixed multiplier;
// 0 when Re M is not positive somewhere.
inline double fixed_multiplier_slope(const FirMultiplier& m, const std::vector<Complex>& g_resp,
                                     const std::vector<double>& omegas) {
  double k = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    const Complex mv = m.evaluate(omegas[i]);
    if (mv.real() <= 0.0) return 0.0;
    const double re_mg = (mv * g_resp[i]).real();
    if (re_mg < 0.0) k = std::min(k, mv.real() / -re_mg);
  }
  return k;
}

// Best slope over a square tap grid centred on (m₋₁, m₁) = (centre_a, centre_b)
// with the given half width, clipped to [−1, 0]².
inline double tap_window_slope(const RationalTransferFunction& g, double centre_a, double centre_b,
                               double half, double step, int grid = 2048) {
  const std::vector<double> omegas = unit_circle_grid(grid);
  const auto g_resp = freq_response(g, omegas);
  const int count = static_cast<int>(std::lround(2.0 * half / step));
  double best = 0.0;
  for (int a = 0; a <= count; ++a)
    for (int b = 0; b <= count; ++b) {
      double ma = centre_a - half + step * a, mb = centre_b - half + step * b;
      if (ma < -1.0 - 1e-12 || ma > 1e-12 || mb < -1.0 - 1e-12 || mb > 1e-12) continue;
      ma = std::clamp(ma, -1.0, 0.0);
      mb = std::clamp(mb, -1.0, 0.0);
      const FirMultiplier m(1, 1, {ma, 1.0, mb});
      if (!check_zf_class(m, false).pass) continue;
      best = std::max(best, fixed_multiplier_slope(m, g_resp, omegas));
    }
  return best;
}

// Best slope over (m₋₁, m₁) ∈ [−1, 0]² with the given step.
inline double tap_grid_slope(const RationalTransferFunction& g, double step = 0.01, int grid = 2048) {
  return tap_window_slope(g, -0.5, -0.5, 0.5, step, grid);
}

// Largest deviation from the augmentation identities over a 64-point grid:
// Pᵢ = z^{-i}P for i ≥ 0; for i < 0, Pᵢ + Pᵢ* = z^{-i}P + (z^{-i}P)* and the
// impulse response of Pᵢ is the causal part of z^{-i}P plus the reflected
// anticausal part.
inline double augmentation_error(const RationalTransferFunction& g, int n_f, int n_b) {
  const StateSpaceModel p = tf_to_ss(g);
  const auto aug = build_augmentation(p, n_f, n_b);
  const auto h = markov(p, 400);
  double err = 0.0;
  for (double w : unit_circle_grid(64)) {
    const Complex z = std::polar(1.0, w);
    const Complex pz = g.evaluate(z);
    for (int i = -n_f; i <= n_b; ++i) {
      const Complex pi = aug.response(i, z);
      const Complex target = std::pow(z, -i) * pz;
      if (i >= 0) {
        err = std::max(err, std::abs(pi - target));
        continue;
      }
      err = std::max(err, std::abs(pi + std::conj(pi) - target - std::conj(target)));
      Complex series = 0.0;
      for (int j = 0; j - i < static_cast<int>(h.size()); ++j) {
        double coeff = h[j - i];
        if (j >= 1 && j <= -i) coeff += h[-i - j];
        series += coeff * std::pow(z, -j);
      }
      err = std::max(err, std::abs(pi - series));
    }
  }
  return err;
}

}  // namespace zf::oracle
