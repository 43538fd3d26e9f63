// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "zf/analysis.hpp"
#include "zf/ct_bridge.hpp"
#include "zf/plants.hpp"

using namespace zf;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

RationalTransferFunction plant(const std::string& id) { return find_plant(id)->g; }

struct Report {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail << "    " << (ok ? "ok   " : "MISS ") << what << '\n';
  }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// Outputs collected for the property criterion.
struct Output {
  std::string label;
  RationalTransferFunction g;
  double k;
  std::optional<FirMultiplier> fir;
  std::optional<IirMultiplier> iir;
  bool odd;
  bool hard_first_order = false;
};
std::vector<Output> outputs;

SlopeResult fir_search(const std::string& id, int n_f, int n_b, bool odd, Method method = Method::fir_hard,
                       double rel_tol = 1e-3) {
  SlopeOptions o;
  o.method = method;
  o.n_f = n_f;
  o.n_b = n_b;
  o.odd = odd;
  o.rel_tol = rel_tol;
  SlopeResult r = max_slope(plant(id), o);
  outputs.push_back({id + " " + to_string(method) + " n=" + std::to_string(n_f) + (odd ? " odd" : ""),
                     plant(id), r.k_max, r.fir, std::nullopt, odd,
                     method == Method::fir_hard && n_f == 1 && n_b == 1});
  return r;
}

bool within_rel(double got, double want, double rel) { return std::abs(got - want) <= rel * std::abs(want); }

void nyquist_values(Report& rep) {
  const std::vector<std::pair<std::string, double>> cases{
      {"ex1", 36.1000}, {"ex3", 0.3126}, {"ex5", 2.4475}, {"ex6", 1.0870}};
  for (const auto& [id, want] : cases) {
    const auto t0 = Clock::now();
    const double got = nyquist_value(plant(id)).value;
    const double t = seconds_since(t0);
    rep.check(std::abs(got - want) <= 1e-3 && t < 5.0,
              id + fmt(": %.6f (reference %.4f, |diff| ≤ 1e-3) in %.2f s (< 5 s)", got, want, t));
  }
}

void circle_values(Report& rep) {
  const std::vector<std::pair<std::string, double>> cases{{"ex1", 0.7934}, {"ex2", 0.1984}, {"ex4", 1.5312}};
  for (const auto& [id, want] : cases) {
    const auto t0 = Clock::now();
    const double got = circle_criterion(plant(id)).k;
    const double t = seconds_since(t0);
    rep.check(std::abs(got - want) <= 1e-3 && t < 1.0,
              id + fmt(": %.6f (reference %.4f, |diff| ≤ 1e-3) in %.3f s (< 1 s)", got, want, t));
  }
}

void fir_first_order(Report& rep) {
  struct Case {
    std::string id;
    bool odd;
    double want;
  };
  const std::vector<Case> cases{{"ex1", false, 12.9957}, {"ex2", false, 0.7397}, {"ex3", false, 0.3054},
                                {"ex4", false, 2.5904},  {"ex5", false, 2.4475}, {"ex6", false, 0.9108},
                                {"ex2", true, 0.7783},   {"ex4", true, 3.1350},  {"ex6", true, 1.0869}};
  const auto t0 = Clock::now();
  for (const auto& c : cases) {
    const auto r = fir_search(c.id, 1, 1, c.odd);
    rep.check(within_rel(r.k_max, c.want, 1e-2),
              c.id + (c.odd ? " odd" : "") + fmt(": %.5f (reference %.4f, rel 1e-2) in %.1f s", r.k_max, c.want,
                                                 r.wall_time));
  }
  const double t = seconds_since(t0);
  rep.check(t < 60.0, fmt("total %.1f s (< 60 s)", t));
}

void fir_moderate_order(Report& rep) {
  struct Case {
    std::string id;
    int n;
    bool odd;
    double want;
    double rel;
  };
  const std::vector<Case> cases{{"ex1", 28, true, 13.5251, 5e-2},
                                {"ex2", 7, true, 1.1073, 2e-2},
                                {"ex4", 24, false, 3.8240, 2e-2}};
  const auto t0 = Clock::now();
  for (const auto& c : cases) {
    const auto r = fir_search(c.id, c.n, c.n, c.odd);
    rep.check(within_rel(r.k_max, c.want, c.rel),
              c.id + " n=" + std::to_string(c.n) + (c.odd ? " odd" : "") +
                  fmt(": %.5f (reference %.4f, rel %.0e) in %.1f s", r.k_max, c.want, c.rel, r.wall_time));
  }
  const double t = seconds_since(t0);
  rep.check(t < 900.0, fmt("total %.1f s (< 900 s)", t));
}

void lifting_cross_check(Report& rep) {
  for (const char* id : {"ex1", "ex2", "ex3", "ex4", "ex5", "ex6"}) {
    for (int n : {1, 2}) {
      const auto hard = fir_search(id, n, n, false, Method::fir_hard, 1e-4);
      const auto lift = fir_search(id, n, n, false, Method::fir_lifting, 1e-4);
      const double diff = std::abs(lift.k_max - hard.k_max);
      rep.check(diff <= 5e-3 * hard.k_max,
                std::string(id) + " n=" + std::to_string(n) +
                    fmt(": lifting %.5f, hard %.5f, |diff| %.2e (≤ %.2e)", lift.k_max, hard.k_max, diff,
                        5e-3 * hard.k_max));
    }
  }
}

void iir_searches(Report& rep) {
  struct Case {
    std::string id;
    Method method;
    double want;
    double rel;
  };
  const std::vector<Case> cases{{"ex1", Method::iir_causal, 12.4355, 5e-2},
                                {"ex5", Method::iir_anticausal, 2.4474, 2e-2},
                                {"ex6", Method::iir_anticausal, 1.0869, 2e-2}};
  const auto t0 = Clock::now();
  for (const auto& c : cases) {
    SlopeOptions o;
    o.method = c.method;
    o.rel_tol = 1e-3;
    const auto r = max_slope(plant(c.id), o);
    outputs.push_back({c.id + " " + to_string(c.method), plant(c.id), r.k_max, std::nullopt, r.iir, false});
    rep.check(within_rel(r.k_max, c.want, c.rel),
              c.id + " " + to_string(c.method) +
                  fmt(": %.5f (reference %.4f, rel %.0e) in %.1f s", r.k_max, c.want, c.rel, r.wall_time));
  }
  const double t = seconds_since(t0);
  rep.check(t < 600.0, fmt("total %.1f s (< 600 s)", t));
}

void ct_bridge(Report& rep) {
  struct Case {
    std::string id;
    double bound;
    bool two_sided;
  };
  const std::vector<Case> cases{{"ex1-ct", 4.55, false},
                                {"ex2-ct", 1.0894, true},
                                {"ex3-ct", 1.90, false},
                                {"ex5-ct", 0.0050, false},
                                {"ex9-ct", 91.0858, false}};
  for (const auto& c : cases) {
    const auto ex = *find_ct_example(c.id);
    CtBridgeOptions o;
    o.ts = ex.ts;
    o.n_f = ex.n_f;
    o.n_b = ex.n_b;
    o.odd = ex.odd;
    o.search.rel_tol = 1e-3;
    o.search.solver.strictness_margin = ex.lmi_eps;
    const auto t0 = Clock::now();
    std::string what;
    bool ok = false;
    try {
      const auto r = derive_ct_multiplier(plant(c.id), o);
      const double k = ct_max_slope(r.multiplier, plant(c.id)).k;
      ok = c.two_sided ? std::abs(k - c.bound) <= 1e-2 : k >= c.bound;
      what = fmt(c.two_sided ? ": K = %.5f (reference %.4f ± 1e-2), discrete %.5f, %.0f taps"
                             : ": K = %.5f (≥ %.4f), discrete %.5f, %.0f taps",
                 k, c.bound, r.discrete.k_max, static_cast<double>(r.multiplier.terms.size()));
      if (r.discrete.fir)
        what += fmt(", unpruned K = %.5f", ct_max_slope(prune(*r.discrete.fir, ex.ts, 0.0), plant(c.id)).k);
      if (ex.lmi_eps > 0.0) what += fmt(", LMI strictness %.0e", ex.lmi_eps);
    } catch (const std::exception& e) {
      what = std::string(": error ") + e.what();
    }
    rep.check(ok, c.id + what + fmt(" in %.1f s", seconds_since(t0)));
  }
}

void property_suite(Report& rep) {
  int fdi_bad = 0, class_bad = 0, checked = 0;
  for (const auto& o : outputs) {
    if (o.k <= 0.0) continue;
    ++checked;
    double margin = 0.0;
    bool in_class = false;
    if (o.fir) {
      margin = verify_fdi(*o.fir, o.g, o.k, 2048);
      in_class = check_zf_class(*o.fir, o.odd).pass;
    } else if (o.iir) {
      margin = verify_fdi([&](double w) { return o.iir->evaluate(w); }, o.g, o.k, 2048);
      in_class = o.iir->l1_bound < 1.0;
    }
    if (!(margin > 0.0)) {
      ++fdi_bad;
      rep.detail << "    (a) fails for " << o.label << '\n';
    }
    if (!in_class) {
      ++class_bad;
      rep.detail << "    (b) fails for " << o.label << '\n';
    }
  }
  rep.check(fdi_bad == 0, fmt("(a) frequency margin > 0 on %.0f search outputs", checked));
  rep.check(class_bad == 0, fmt("(b) class membership on %.0f search outputs", checked));

  double worst_x = std::numeric_limits<double>::infinity();
  int x_runs = 0;
  for (const auto& o : outputs) {
    if (!o.hard_first_order || o.k <= 0.0) continue;
    const auto h = solve_hard(o.g, o.k, 1, 1, o.odd);
    if (!h.feasible()) continue;
    ++x_runs;
    worst_x = std::min(worst_x, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h.x).eigenvalues().minCoeff());
  }
  rep.check(x_runs > 0 && worst_x > 0.0, fmt("(c) smallest λ_min(X) %.3e over %.0f feasible solves", worst_x, x_runs));

  for (const char* id : {"ex1", "ex6"}) {
    const auto g = plant(id);
    const double brute = oracle::tap_grid_slope(g);
    SlopeOptions o;
    o.rel_tol = 1e-4;
    const auto lmi = max_slope(g, o);
    const bool lmi_at_grid = solve_hard(g, brute * (1.0 - 1e-4), 1, 1, false).feasible();
    const double local =
        lmi.fir ? oracle::tap_window_slope(g, (*lmi.fir)[-1], (*lmi.fir)[1], 0.02, 0.001) : 0.0;
    const bool grid_below_lmi = std::max(brute, local) <= lmi.k_infeasible * (1.0 + 1e-4);
    const bool lmi_reached = std::max(brute, local) >= lmi.k_max * (1.0 - 1e-3);
    rep.check(lmi_at_grid && grid_below_lmi && lmi_reached,
              std::string("(d) ") + id +
                  fmt(": tap grid %.5f, local 0.001 grid %.5f, LMI bracket [%.5f, %.5f]", brute, local, lmi.k_max,
                      lmi.k_infeasible));
  }

  std::mt19937 rng(20240611);
  std::uniform_int_distribution<int> order(1, 4), taps(1, 3);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = oracle::random_plant(rng, order(rng));
    const int n_f = taps(rng), n_b = taps(rng);
    worst = std::max(worst, oracle::augmentation_error(g, n_f, n_b));
  }
  rep.check(worst <= 1e-8, fmt("(e) augmentation identities, worst error %.2e on 20 random plants (≤ 1e-8)", worst));
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Report&)>>> criteria{
      {"1 Nyquist values", nyquist_values},
      {"2 circle criterion", circle_values},
      {"3 FIR n_f = n_b = 1", fir_first_order},
      {"4 FIR moderate n", fir_moderate_order},
      {"5 lifting vs hard", lifting_cross_check},
      {"6 IIR searches", iir_searches},
      {"7 continuous-time bridge", ct_bridge},
      {"8 property suite", property_suite}};

  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Report rep;
    const auto t0 = Clock::now();
    try {
      run(rep);
    } catch (const std::exception& e) {
      rep.check(false, std::string("exception: ") + e.what());
    }
    if (!rep.pass) ++failed;
    std::cout << (rep.pass ? "PASS " : "FAIL ") << name << fmt(" (%.1f s)", seconds_since(t0)) << '\n'
              << rep.detail.str() << std::flush;
  }
  std::cout << (failed ? "FAILED " : "ALL PASSED ") << failed << " of " << criteria.size() << " criteria failed\n";
  return failed ? 1 : 0;
}
