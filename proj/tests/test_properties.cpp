#include <gtest/gtest.h>

#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>

#include "zf/analysis.hpp"
#include "zf/hard_factorization.hpp"
#include "zf/plants.hpp"
#include "oracles.hpp"

using namespace zf;

namespace {

RationalTransferFunction plant(const std::string& id) { return find_plant(id)->g; }

double lambda_min(const Eigen::MatrixXd& x) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(x).eigenvalues().minCoeff();
}

SlopeOptions fir_options(Method method, int n, bool odd) {
  SlopeOptions o;
  o.method = method;
  o.n_f = o.n_b = n;
  o.odd = odd;
  o.rel_tol = 1e-3;
  return o;
}

}  // namespace

// (a) frequency margin, (b) class membership, (c) positive definite X.
TEST(Properties, SearchOutputsAreCertified) {
  for (const char* id : {"ex1", "ex2", "ex3", "ex4", "ex5", "ex6"}) {
    const auto g = plant(id);
    for (bool odd : {false, true}) {
      for (Method method : {Method::fir_hard, Method::fir_lifting}) {
        const SlopeResult r = max_slope(g, fir_options(method, 1, odd));
        if (r.k_max <= 0.0) continue;
        ASSERT_TRUE(r.fir.has_value()) << id;
        EXPECT_GT(verify_fdi(*r.fir, g, r.k_max, 2048), 0.0) << id << ' ' << to_string(method) << odd;
        EXPECT_TRUE(check_zf_class(*r.fir, odd).pass) << id << ' ' << to_string(method) << odd;
      }
      const double k = 0.98 * max_slope(g, fir_options(Method::fir_hard, 2, odd)).k_max;
      const auto h = solve_hard(g, k, 2, 2, odd);
      ASSERT_TRUE(h.feasible()) << id;
      EXPECT_GT(lambda_min(h.x), 0.0) << id;
      EXPECT_GT(verify_fdi(*h.multiplier, g, k, 2048), 0.0) << id;
    }
  }
}

TEST(Properties, IirOutputsAreCertified) {
  SlopeOptions o;
  o.method = Method::iir_causal;
  o.rel_tol = 1e-3;
  const auto g = plant("ex5");
  const SlopeResult r = max_slope(g, o);
  ASSERT_TRUE(r.iir.has_value());
  EXPECT_LT(r.iir->l1_bound, 1.0);
  EXPECT_GT(verify_fdi([&](double w) { return r.iir->evaluate(w); }, g, r.k_max, 2048), 0.0);
}

// (d) LMI feasibility against a dense tap grid with a frequency sweep.
TEST(Properties, SmallInstanceOracle) {
  for (const char* id : {"ex1", "ex6"}) {
    const auto g = plant(id);
    ASSERT_LE(g.order(), 2);
    const double brute = oracle::tap_grid_slope(g);
    const SlopeResult lmi = max_slope(g, fir_options(Method::fir_hard, 1, false));
    std::cout << id << ": grid " << brute << ", LMI " << lmi.k_max << '\n';
    // A grid point feasible at k implies the LMI is feasible at k.
    EXPECT_TRUE(solve_hard(g, brute * (1.0 - 1e-4), 1, 1, false).feasible()) << id;
    // The LMI optimum may sit between grid points (the class constraint is
    // nearly active for ex1); a 0.001 grid around its taps recovers it.
    ASSERT_TRUE(lmi.fir.has_value());
    const double local = oracle::tap_window_slope(g, (*lmi.fir)[-1], (*lmi.fir)[1], 0.02, 0.001);
    std::cout << id << ": local grid " << local << '\n';
    EXPECT_GE(std::max(brute, local), lmi.k_max * (1.0 - 1e-3)) << id;
    EXPECT_LE(std::max(brute, local), lmi.k_infeasible * (1.0 + 1e-4)) << id;
  }
}

// (e) augmentation identities on random stable plants.
TEST(Properties, AugmentationIdentities) {
  std::mt19937 rng(20240611);
  std::uniform_int_distribution<int> order(1, 4), taps(1, 3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = oracle::random_plant(rng, order(rng));
    const int n_f = taps(rng), n_b = taps(rng);
    EXPECT_LT(oracle::augmentation_error(g, n_f, n_b), 1e-8) << trial;
  }
}

TEST(Properties, MethodOrdering) {
  for (const char* id : {"ex2", "ex4", "ex6"}) {
    const auto g = plant(id);
    SlopeOptions c;
    c.method = Method::circle;
    const double circle = max_slope(g, c).k_max;
    const double fir = max_slope(g, fir_options(Method::fir_hard, 1, false)).k_max;
    const double fir_odd = max_slope(g, fir_options(Method::fir_hard, 1, true)).k_max;
    const double nyq = nyquist_value(g).value;
    EXPECT_LE(circle, fir * (1 + 1e-3)) << id;
    EXPECT_LE(fir, fir_odd * (1 + 1e-3)) << id;
    EXPECT_LE(fir_odd, nyq * (1 + 1e-4)) << id;
  }
}

// Feasibility should carry over from n to n+1; solver failures are logged only.
TEST(Properties, MonotoneInOrder) {
  const auto g = plant("ex4");
  const double k = 2.7;
  bool before = false;
  int regressions = 0;
  for (int n = 1; n <= 4; ++n) {
    const bool now = solve_hard(g, k, n, n, false).feasible();
    if (before && !now) {
      ++regressions;
      std::cout << "feasibility lost at n=" << n << " for k=" << k << '\n';
    }
    before = before || now;
  }
  EXPECT_TRUE(before);
  RecordProperty("regressions", regressions);
}
