#include "zf/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <boost/math/tools/minima.hpp>

namespace zf {

const char* to_string(Method m) {
  switch (m) {
    case Method::fir_hard: return "fir-hard";
    case Method::fir_lifting: return "fir-lift";
    case Method::iir_causal: return "iir-causal";
    case Method::iir_anticausal: return "iir-anticausal";
    case Method::circle: return "circle";
    case Method::nyquist: return "nyquist";
  }
  return "unknown";
}

std::optional<Method> parse_method(const std::string& name) {
  for (Method m : {Method::fir_hard, Method::fir_lifting, Method::iir_causal, Method::iir_anticausal,
                   Method::circle, Method::nyquist})
    if (name == to_string(m)) return m;
  return std::nullopt;
}

namespace {

// Minimum of f over [0, π]: coarse grid then three rounds of local refinement
// around the few lowest local minima.
double grid_minimum(const std::function<double(double)>& f, int n, double* argmin = nullptr) {
  const double pi = std::numbers::pi;
  std::vector<double> w(n), v(n);
  for (int i = 0; i < n; ++i) {
    w[i] = pi * i / (n - 1);
    v[i] = f(w[i]);
  }
  std::vector<int> minima;
  for (int i = 0; i < n; ++i) {
    const bool left = i == 0 || v[i] <= v[i - 1];
    const bool right = i == n - 1 || v[i] <= v[i + 1];
    if (left && right) minima.push_back(i);
  }
  std::sort(minima.begin(), minima.end(), [&](int a, int b) { return v[a] < v[b]; });
  if (minima.size() > 4) minima.resize(4);

  double best = *std::min_element(v.begin(), v.end());
  double best_w = w[std::min_element(v.begin(), v.end()) - v.begin()];
  const double h = pi / (n - 1);
  for (int idx : minima) {
    double centre = w[idx];
    double half = h;
    for (int level = 0; level < 3; ++level) {
      const int m = 33;
      double local_best = std::numeric_limits<double>::infinity();
      double local_w = centre;
      for (int j = 0; j < m; ++j) {
        const double x = std::clamp(centre - half + 2.0 * half * j / (m - 1), 0.0, pi);
        const double fx = f(x);
        if (fx < local_best) {
          local_best = fx;
          local_w = x;
        }
      }
      centre = local_w;
      half = 2.0 * half / (m - 1);
      if (local_best < best) {
        best = local_best;
        best_w = local_w;
      }
    }
  }
  if (argmin) *argmin = best_w;
  return best;
}

}  // namespace

double verify_fdi(const FrequencyFunction& m, const RationalTransferFunction& g, double k,
                  int grid_size) {
  if (g.domain() != TimeDomain::discrete)
    throw std::invalid_argument("verify_fdi expects a discrete plant");
  if (grid_size < 2) throw std::invalid_argument("grid too small");
  return grid_minimum(
      [&](double w) { return std::real(m(w) * (1.0 + k * freq_response(g, w))); }, grid_size);
}

double verify_fdi(const FirMultiplier& m, const RationalTransferFunction& g, double k, int grid_size) {
  return verify_fdi([&](double w) { return m.evaluate(w); }, g, k, grid_size);
}

CircleResult circle_criterion(const RationalTransferFunction& g) {
  CircleResult out;
  double argmin = 0.0;
  out.min_real = grid_minimum([&](double w) { return std::real(freq_response(g, w)); }, 8192, &argmin);
  // Polish the minimiser.
  const double h = std::numbers::pi / 8191.0 / 256.0;
  const auto r = boost::math::tools::brent_find_minima(
      [&](double w) { return std::real(freq_response(g, w)); }, std::max(0.0, argmin - h),
      std::min(std::numbers::pi, argmin + h), 52);
  out.min_real = std::min(out.min_real, r.second);
  if (out.min_real < 0.0) {
    out.k = -1.0 / out.min_real;
  } else {
    const NyquistValue nv = nyquist_value(g);
    out.k = nv.value;
    out.unbounded = nv.unbounded;
  }
  return out;
}

nlohmann::json SlopeResult::multiplier_json() const {
  if (fir) return *fir;
  if (iir) return *iir;
  return FirMultiplier(0, 0);
}

SlopeResult max_slope(const RationalTransferFunction& g, const SlopeOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  SlopeResult res;
  res.method = opts.method;
  res.odd = opts.odd;
  res.n_f = opts.n_f;
  res.n_b = opts.n_b;
  const NyquistValue nv = nyquist_value(g);
  res.nyquist_value = nv.value;
  res.nyquist_unbounded = nv.unbounded;
  auto finish = [&] {
    res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
  };

  if (opts.method == Method::nyquist) {
    res.k_max = nv.value;
    res.k_infeasible = nv.value;
    return finish();
  }
  if (opts.method == Method::circle) {
    const CircleResult c = circle_criterion(g);
    res.k_max = c.k;
    res.k_infeasible = c.k;
    res.fir = FirMultiplier(0, 0);
    res.verification_margin = verify_fdi(*res.fir, g, c.k * (1.0 - 1e-9), opts.grid);
    return finish();
  }

  int lambda_hint = -1;
  auto feasible = [&](double k) {
    ++res.evaluations;
    switch (opts.method) {
      case Method::fir_hard:
      case Method::fir_lifting: {
        const FirSearchResult r = opts.method == Method::fir_hard
                                      ? solve_hard(g, k, opts.n_f, opts.n_b, opts.odd, opts.solver)
                                      : solve_lifted(g, k, opts.n_b, opts.odd, opts.solver);
        if (!r.feasible()) {
          if (r.status == sdp::SolveStatus::inaccurate)
            res.diagnostics += "k=" + std::to_string(k) + " inaccurate (" + r.diagnostics + "); ";
          return false;
        }
        if (k > res.k_max) {
          res.k_max = k;
          res.fir = r.multiplier;
          res.verification_margin = r.fdi_margin;
        }
        return true;
      }
      case Method::iir_causal:
      case Method::iir_anticausal: {
        IirSearchConfig cfg = opts.iir;
        cfg.verify_grid = opts.grid;
        const IirSearchResult r = opts.method == Method::iir_causal
                                      ? causal_search(g, k, cfg, lambda_hint)
                                      : anticausal_search(g, k, cfg, lambda_hint);
        if (!r.feasible()) return false;
        const auto& grid = cfg.lambda_grid;
        lambda_hint = static_cast<int>(std::find(grid.begin(), grid.end(), r.lambda) - grid.begin());
        if (k > res.k_max) {
          res.k_max = k;
          res.iir = r.multiplier;
          res.verification_margin = r.fdi_margin;
        }
        return true;
      }
      default:
        return false;
    }
  };

  if (opts.method == Method::fir_lifting && opts.n_f != opts.n_b)
    throw std::invalid_argument("lifting needs n_f == n_b");
  double lo = 0.0;
  double hi = opts.upper > 0.0 ? opts.upper : 1.1 * nv.value;
  while (hi - lo > std::max(opts.tol, opts.rel_tol * lo)) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid)) lo = mid;
    else hi = mid;
  }
  res.k_infeasible = hi;
  if (res.k_max <= 0.0) res.diagnostics += "no certificate found for any k > 0";
  return finish();
}

void to_json(nlohmann::json& j, const SlopeResult& r) {
  j = nlohmann::json{{"method", to_string(r.method)},
                     {"odd", r.odd},
                     {"n_f", r.n_f},
                     {"n_b", r.n_b},
                     {"k_max", r.k_max},
                     {"k_infeasible", r.k_infeasible},
                     {"multiplier", r.multiplier_json()},
                     {"verification_margin", r.verification_margin},
                     {"nyquist_value", r.nyquist_value},
                     {"nyquist_unbounded", r.nyquist_unbounded},
                     {"wall_time", r.wall_time},
                     {"evaluations", r.evaluations},
                     {"diagnostics", r.diagnostics}};
}

}  // namespace zf
