#include <gtest/gtest.h>

#include <numbers>

#include "zf/analysis.hpp"
#include "zf/lifting.hpp"
#include "zf/plants.hpp"

using namespace zf;

namespace {

RationalTransferFunction plant(const char* id) { return find_plant(id)->g; }

StateSpaceModel zero_plant() {
  StateSpaceModel g;
  g.a = Eigen::MatrixXd::Zero(1, 1);
  g.b = Eigen::VectorXd::Ones(1);
  g.c = Eigen::RowVectorXd::Zero(1);
  g.d = 0.0;
  return g;
}

}  // namespace

TEST(Lifted, ZeroPlant) {
  const int n = 3;
  const auto l = build_lifted(zero_plant(), n);
  for (double w : {0.0, 0.5, 2.0}) {
    const Complex z = std::polar(1.0, w);
    const Eigen::VectorXcd r = l.response(z);
    ASSERT_EQ(r.size(), 2 * (n + 1));
    for (int i = 0; i <= n; ++i) {
      EXPECT_LT(std::abs(r(i)), 1e-14);
      EXPECT_LT(std::abs(r(n + 1 + i) - std::pow(z, -i)), 1e-12);
    }
  }
}

TEST(Lifted, RowsMatchDelayedPlant) {
  const auto g = plant("ex4");
  const int n = 4;
  const auto l = build_lifted(tf_to_ss(g), n);
  for (int k = 0; k < 64; ++k) {
    const double w = std::numbers::pi * k / 63.0;
    const Complex z = std::polar(1.0, w);
    const Eigen::VectorXcd r = l.response(z);
    for (int i = 0; i <= n; ++i) {
      EXPECT_LT(std::abs(r(i) + std::pow(z, -i) * g.at_frequency(w)), 1e-8);
      EXPECT_LT(std::abs(r(n + 1 + i) - std::pow(z, -i)), 1e-8);
    }
  }
}

TEST(Lifted, FirstPlantAtDc) {
  const auto l = build_lifted(tf_to_ss(plant("ex1")), 1);
  EXPECT_NEAR(l.response(1.0)(0).real(), -10.0, 1e-9);
  EXPECT_LT(std::abs(l.response(1.0)(1) + 10.0), 1e-9);
}

TEST(Lifted, StateDimension) {
  EXPECT_EQ(build_lifted(tf_to_ss(plant("ex2")), 5).states(), 4 + 2 * 5);
}

TEST(Kappa, OneTapEachSide) {
  const double m_1 = -0.3, m1 = -0.2;
  const Eigen::MatrixXd k = build_kappa(1.0, FirMultiplier(1, 1, {m_1, 1.0, m1}));
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(4, 4);
  e(0, 2) = 1.0;
  e(0, 3) = m1;
  e(1, 2) = m_1;
  e(2, 2) = -2.0;
  e(2, 3) = -m1 - m_1;
  const Eigen::MatrixXd full = e + e.transpose() - Eigen::MatrixXd(e.diagonal().asDiagonal());
  EXPECT_LT((k - full).norm(), 1e-15);
}

TEST(Kappa, CentreTapOnly) {
  const int n = 3;
  const double gain = 2.5;
  const Eigen::MatrixXd k = build_kappa(gain, FirMultiplier(n, n));
  for (int r = 0; r < k.rows(); ++r)
    for (int c = 0; c < k.cols(); ++c) {
      double expect = 0.0;
      if ((r == 0 && c == n + 1) || (r == n + 1 && c == 0)) expect = gain;
      if (r == n + 1 && c == n + 1) expect = -2.0;
      EXPECT_DOUBLE_EQ(k(r, c), expect) << r << ',' << c;
    }
}

TEST(Kappa, AffineInTaps) {
  const FirMultiplier a(2, 2, {-0.1, 0.2, 1.0, -0.3, 0.05});
  const FirMultiplier b(2, 2, {0.3, -0.1, 1.0, 0.2, -0.2});
  std::vector<double> mid(5);
  for (int i = 0; i < 5; ++i) mid[i] = 0.5 * (a.coeffs()[i] + b.coeffs()[i]);
  const Eigen::MatrixXd lhs = build_kappa(1.7, FirMultiplier(2, 2, mid));
  const Eigen::MatrixXd rhs = 0.5 * (build_kappa(1.7, a) + build_kappa(1.7, b));
  EXPECT_LT((lhs - rhs).norm(), 1e-14);
  EXPECT_LT((lhs - lhs.transpose()).norm(), 0.0 + 1e-15);
}

TEST(Kappa, SizeMismatch) {
  EXPECT_THROW(build_kappa(1.0, FirMultiplier(1, 2)), std::invalid_argument);
}

TEST(Kappa, QuadraticFormIdentity) {
  // ψ*κψ = −2·Re{M̃(1 + kG)} with M̃ the tap reversal of m; at m = {1}, G = 0 it is −2.
  const auto g = plant("ex2");
  const int n = 2;
  const double k = 0.6;
  const FirMultiplier m(n, n, {-0.1, 0.25, 1.0, -0.3, 0.1});
  const auto l = build_lifted(tf_to_ss(g), n);
  const Eigen::MatrixXd kap = build_kappa(k, m);
  const FirMultiplier rev = reversed(m);
  for (int i = 0; i < 256; ++i) {
    const double w = std::numbers::pi * i / 255.0;
    const Eigen::VectorXcd psi = l.response(std::polar(1.0, w));
    const double form = (psi.adjoint() * kap.cast<Complex>() * psi)(0).real();
    const double expect = -2.0 * (rev.evaluate(w) * (1.0 + k * g.at_frequency(w))).real();
    EXPECT_NEAR(form, expect, 1e-8);
  }
  const auto l0 = build_lifted(zero_plant(), 1);
  const Eigen::VectorXcd psi0 = l0.response(std::polar(1.0, 0.9));
  EXPECT_NEAR((psi0.adjoint() * build_kappa(k, FirMultiplier(1, 1)).cast<Complex>() * psi0)(0).real(), -2.0,
              1e-12);
}

TEST(SolveLifted, FirstPlant) {
  const auto g = plant("ex1");
  const auto r = solve_lifted(g, 12.9, 1, false);
  ASSERT_TRUE(r.feasible()) << r.diagnostics;
  EXPECT_TRUE(check_zf_class(*r.multiplier, false).pass);
  EXPECT_GT(verify_fdi(*r.multiplier, g, 12.9), 0.0);
}

TEST(SolveLifted, AboveNyquistInfeasible) {
  for (int n : {1, 4, 12}) EXPECT_FALSE(solve_lifted(plant("ex3"), 0.32, n, true).feasible()) << n;
}

TEST(SolveLifted, ReversalInvolution) {
  const FirMultiplier m(2, 1, {-0.1, -0.2, 1.0, -0.3});
  const auto r = reversed(m);
  EXPECT_EQ(r.n_f(), 1);
  EXPECT_EQ(r.n_b(), 2);
  EXPECT_DOUBLE_EQ(r[1], -0.2);
  EXPECT_EQ(reversed(r).coeffs(), m.coeffs());
}
