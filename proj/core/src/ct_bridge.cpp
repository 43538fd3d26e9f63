#include "zf/ct_bridge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <boost/math/tools/minima.hpp>

#include "zf/serialization.hpp"

namespace zf {

Complex DelayMultiplier::evaluate(double omega) const {
  Complex acc = 0.0;
  for (const auto& [i, m] : terms) acc += m * std::polar(1.0, -i * ts * omega);
  return acc;
}

double DelayMultiplier::off_centre_l1() const {
  double s = 0.0;
  for (const auto& [i, m] : terms)
    if (i != 0) s += std::abs(m);
  return s;
}

DelayMultiplier prune(const FirMultiplier& m, double ts, double eps) {
  DelayMultiplier out;
  out.ts = ts;
  for (int i = -m.n_f(); i <= m.n_b(); ++i) {
    if (i == 0 || std::abs(m[i]) >= eps) out.terms.emplace_back(i, m[i]);
  }
  return out;
}

CtBridgeResult derive_ct_multiplier(const RationalTransferFunction& g_s, const CtBridgeOptions& options) {
  if (g_s.domain() != TimeDomain::continuous)
    throw std::invalid_argument("derive_ct_multiplier expects a continuous-time plant");
  CtBridgeResult out;
  out.discrete_plant = c2d_zoh(g_s, options.ts);
  if (!out.discrete_plant.is_stable())
    throw std::domain_error("discretised plant is unstable; reduce the sampling time");

  SlopeOptions s = options.search;
  s.method = Method::fir_hard;
  s.n_f = options.n_f;
  s.n_b = options.n_b;
  s.odd = options.odd;
  out.discrete = max_slope(out.discrete_plant, s);
  if (out.discrete.fir) {
    out.multiplier = prune(*out.discrete.fir, options.ts, options.eps_prune);
  } else {
    out.multiplier = {options.ts, {{0, 1.0}}};
  }
  return out;
}

namespace {

constexpr double kDegenerate = 1e-12;

struct Sample {
  double omega;
  double ratio;  // Re M / (−Re MG), +inf where Re MG ≥ 0
};

}  // namespace

CtSlope ct_max_slope(const DelayMultiplier& m, const RationalTransferFunction& g_s) {
  if (g_s.domain() != TimeDomain::continuous)
    throw std::invalid_argument("ct_max_slope expects a continuous-time plant");
  constexpr double inf = std::numeric_limits<double>::infinity();

  double scale = 1.0;
  double smallest = 1.0;
  const auto poles = g_s.poles();
  for (const auto& p : poles) {
    scale = std::max(scale, std::abs(p));
    if (std::abs(p) > 0.0) smallest = std::min(smallest, std::abs(p));
  }
  for (const auto& z : g_s.zeros()) scale = std::max(scale, std::abs(z));
  int tau_max = 0;
  for (const auto& [i, c] : m.terms) tau_max = std::max(tau_max, std::abs(i));
  if (m.ts > 0.0) scale = std::max(scale, 1.0 / m.ts);
  const double omega_max = 100.0 * scale;

  std::vector<double> omegas = log_grid(1e-4 * smallest, omega_max, 8192);
  omegas.push_back(0.0);
  if (tau_max > 0 && m.ts > 0.0) {
    double step = 2.0 * std::numbers::pi / (20.0 * tau_max * m.ts);
    step = std::max(step, omega_max / 200000.0);
    for (double w = step; w < omega_max; w += step) omegas.push_back(w);
  }
  for (const auto& p : poles) {
    if (p.imag() <= 0.0) continue;
    const double half = std::max(20.0 * std::abs(p.real()), 1e-3 * std::abs(p));
    for (int i = -400; i <= 400; ++i) {
      const double w = p.imag() + half * i / 400.0;
      if (w > 0.0) omegas.push_back(w);
    }
  }
  std::sort(omegas.begin(), omegas.end());
  omegas.erase(std::unique(omegas.begin(), omegas.end()), omegas.end());

  bool negative_m = false;
  auto ratio = [&](double w) {
    const Complex mv = m.evaluate(w);
    const double re_mg = (mv * g_s.at_frequency(w)).real();
    if (mv.real() <= 0.0) {
      // Re M and Re MG vanishing together (zero-sum taps against a plant zero at
      // the same frequency) leaves the inequality at zero for every K.
      if (mv.real() > -kDegenerate && std::abs(re_mg) <= kDegenerate) return inf;
      negative_m = true;
    }
    return re_mg < 0.0 ? mv.real() / -re_mg : inf;
  };

  std::vector<Sample> samples;
  samples.reserve(omegas.size());
  for (double w : omegas) samples.push_back({w, ratio(w)});

  CtSlope out;
  out.grid_points = static_cast<int>(samples.size());
  if (negative_m) return out;

  std::vector<std::size_t> minima;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!std::isfinite(samples[i].ratio)) continue;
    const bool left = i == 0 || samples[i].ratio <= samples[i - 1].ratio;
    const bool right = i + 1 == samples.size() || samples[i].ratio <= samples[i + 1].ratio;
    if (left && right) minima.push_back(i);
  }
  if (minima.empty()) {
    const NyquistValue nv = nyquist_value(g_s);
    out.k = nv.value;
    out.unbounded = nv.unbounded;
    return out;
  }
  std::sort(minima.begin(), minima.end(),
            [&](std::size_t a, std::size_t b) { return samples[a].ratio < samples[b].ratio; });
  if (minima.size() > 8) minima.resize(8);

  out.k = inf;
  for (std::size_t idx : minima) {
    double best_w = samples[idx].omega;
    double best = samples[idx].ratio;
    const double lo = samples[idx == 0 ? 0 : idx - 1].omega;
    const double hi = samples[std::min(idx + 1, samples.size() - 1)].omega;
    if (hi > lo) {
      auto f = [&](double w) {
        const double r = ratio(w);
        return std::isfinite(r) ? r : 1e300;
      };
      const auto [w, r] = boost::math::tools::brent_find_minima(f, lo, hi, 50);
      if (r < best) {
        best = r;
        best_w = w;
      }
    }
    if (best < out.k) {
      out.k = best;
      out.omega = best_w;
    }
  }
  return out;
}

double phase_degrees(const DelayMultiplier& m, const RationalTransferFunction& g_s, double k,
                     double omega) {
  const Complex v = m.evaluate(omega) * (1.0 + k * g_s.at_frequency(omega));
  return std::arg(v) * 180.0 / std::numbers::pi;
}

void phase_sweep_csv(std::ostream& os, const DelayMultiplier& m, const RationalTransferFunction& g_s,
                     double k, double omega_lo, double omega_hi, int points) {
  CsvWriter csv(os, {"omega", "phase_degrees"});
  for (double w : log_grid(omega_lo, omega_hi, points)) csv.row({w, phase_degrees(m, g_s, k, w)});
}

void to_json(nlohmann::json& j, const DelayMultiplier& m) {
  j = nlohmann::json{{"Ts", m.ts}, {"terms", nlohmann::json::array()}};
  for (const auto& [i, c] : m.terms) j["terms"].push_back({{"i", i}, {"coeff", c}});
}

void from_json(const nlohmann::json& j, DelayMultiplier& m) {
  m.ts = j.at("Ts").get<double>();
  m.terms.clear();
  bool centre = false;
  for (const auto& t : j.at("terms")) {
    const int i = t.at("i").get<int>();
    const double c = t.at("coeff").get<double>();
    if (i == 0) {
      if (c != 1.0) throw std::invalid_argument("centre tap must be 1");
      centre = true;
    }
    m.terms.emplace_back(i, c);
  }
  if (!centre) m.terms.emplace_back(0, 1.0);
  std::sort(m.terms.begin(), m.terms.end());
}

}  // namespace zf
