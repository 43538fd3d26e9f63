#include <gtest/gtest.h>

#include <cmath>

#include "zf/analysis.hpp"
#include "zf/plants.hpp"

using namespace zf;

namespace {

RationalTransferFunction plant(const char* id) { return find_plant(id)->g; }

SlopeResult fir_slope(const char* id, int n, bool odd, double rel_tol = 1e-4) {
  SlopeOptions o;
  o.n_f = o.n_b = n;
  o.odd = odd;
  o.rel_tol = rel_tol;
  return max_slope(plant(id), o);
}

}  // namespace

TEST(MethodNames, RoundTrip) {
  for (Method m : {Method::fir_hard, Method::fir_lifting, Method::iir_causal, Method::iir_anticausal,
                   Method::circle, Method::nyquist})
    EXPECT_EQ(parse_method(to_string(m)), m);
  EXPECT_FALSE(parse_method("fir").has_value());
}

TEST(VerifyFdi, IdentityOnZeroPlant) {
  const auto zero = RationalTransferFunction::constant(0.0);
  EXPECT_NEAR(verify_fdi(FirMultiplier(0, 0), zero, 3.0), 1.0, 1e-15);
}

TEST(VerifyFdi, IdentityAtCircleValue) {
  EXPECT_NEAR(verify_fdi(FirMultiplier(0, 0), plant("ex1"), 0.7934), 0.0, 1e-4);
}

TEST(VerifyFdi, RejectsContinuous) {
  const RationalTransferFunction g({1.0}, {1.0, 1.0}, TimeDomain::continuous);
  EXPECT_THROW(verify_fdi(FirMultiplier(0, 0), g, 1.0), std::invalid_argument);
}

TEST(Circle, Values) {
  EXPECT_NEAR(circle_criterion(plant("ex1")).k, 0.7934, 1e-4);
  EXPECT_NEAR(circle_criterion(plant("ex4")).k, 1.5312, 1e-4);
  const auto c = circle_criterion(RationalTransferFunction::constant(0.0));
  EXPECT_TRUE(c.unbounded);
}

TEST(MaxSlope, FifthPlantFirstOrder) {
  const auto r = fir_slope("ex5", 1, false, 0.0);
  EXPECT_NEAR(r.k_max, 2.4475, 2e-4);
  ASSERT_TRUE(r.fir.has_value());
  EXPECT_TRUE(check_zf_class(*r.fir, false).pass);
  EXPECT_GT(r.verification_margin, 0.0);
  EXPECT_GE(r.k_infeasible, r.k_max);
  EXPECT_LE(r.k_max, r.nyquist_value * (1 + 1e-4));
}

TEST(MaxSlope, SecondPlantOdd) {
  const auto r = fir_slope("ex2", 7, true, 1e-3);
  EXPECT_NEAR(r.k_max, 1.1073, 1e-2);
  ASSERT_TRUE(r.fir.has_value());
  EXPECT_TRUE(check_zf_class(*r.fir, true).pass);
}

TEST(MaxSlope, FourthPlantLongMultiplier) {
  const auto r = fir_slope("ex4", 24, false, 1e-3);
  EXPECT_NEAR(r.k_max, 3.8240, 1e-2);
}

TEST(MaxSlope, LiftingNeedsSymmetricOrders) {
  SlopeOptions o;
  o.method = Method::fir_lifting;
  o.n_f = 1;
  o.n_b = 2;
  EXPECT_THROW(max_slope(plant("ex1"), o), std::invalid_argument);
}

TEST(MaxSlope, NyquistAndCircleMethods) {
  SlopeOptions o;
  o.method = Method::nyquist;
  const auto n = max_slope(plant("ex1"), o);
  EXPECT_NEAR(n.k_max, nyquist_value(plant("ex1")).value, 1e-9);
  o.method = Method::circle;
  EXPECT_NEAR(max_slope(plant("ex1"), o).k_max, 0.7934, 1e-4);
}

TEST(MaxSlope, Ordering) {
  for (const char* id : {"ex1", "ex5"}) {
    SlopeOptions o;
    o.method = Method::circle;
    const double circle = max_slope(plant(id), o).k_max;
    const double fir1 = fir_slope(id, 1, false, 1e-4).k_max;
    const double fir2 = fir_slope(id, 2, false, 1e-4).k_max;
    const double nyq = nyquist_value(plant(id)).value;
    EXPECT_LE(circle, fir1 * (1 + 1e-3)) << id;
    EXPECT_LE(fir1, fir2 * (1 + 1e-3)) << id;
    EXPECT_LE(fir2, nyq * (1 + 1e-4)) << id;
  }
}

TEST(MaxSlope, JsonFields) {
  const auto r = fir_slope("ex5", 1, false, 1e-3);
  const nlohmann::json j = r;
  EXPECT_EQ(j.at("method"), "fir-hard");
  EXPECT_EQ(j.at("multiplier").at("coeffs").size(), 3u);
  EXPECT_DOUBLE_EQ(j.at("k_max").get<double>(), r.k_max);
}
