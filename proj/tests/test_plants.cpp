#include <gtest/gtest.h>

#include <filesystem>

#include "zf/plants.hpp"
#include "zf/serialization.hpp"

using namespace zf;

TEST(Registry, Ids) {
  const auto& p = builtin_plants();
  ASSERT_EQ(p.size(), 15u);
  for (int i = 1; i <= 6; ++i) {
    const auto d = find_plant("ex" + std::to_string(i));
    ASSERT_TRUE(d.has_value());
    EXPECT_EQ(d->g.domain(), TimeDomain::discrete);
    EXPECT_TRUE(d->g.is_stable());
  }
  for (int i = 1; i <= 9; ++i) {
    const auto c = find_plant("ex" + std::to_string(i) + "-ct");
    ASSERT_TRUE(c.has_value());
    EXPECT_EQ(c->g.domain(), TimeDomain::continuous);
    EXPECT_TRUE(c->g.is_stable()) << c->id;
  }
  EXPECT_FALSE(find_plant("ex10").has_value());
}

TEST(Registry, ThirdIsNegatedSecond) {
  const auto g2 = find_plant("ex2")->g;
  const auto g3 = find_plant("ex3")->g;
  for (double w : {0.0, 0.7, 2.2}) EXPECT_LT(std::abs(g2.at_frequency(w) + g3.at_frequency(w)), 1e-12);
}

TEST(Registry, EighthExpandedFromFactors) {
  const auto g = find_plant("ex8-ct")->g;
  EXPECT_EQ(g.order(), 7);
  EXPECT_EQ(g.numerator_degree(), 6);
  EXPECT_NEAR(g.numerator().front(), 9.432, 1e-12);
  const Complex s(0.0, 1.3);
  const Complex expect = 9.432 * (s * s + 15.6 * s + 147.8) * (s * s + 2.356 * s + 56.21) *
                         (s * s - 0.332 * s + 26.15) /
                         ((s * s + 2.588 * s + 90.9) * (s * s + 11.79 * s + 113.7) *
                          (s * s + 14.84 * s + 84.05) * (s + 8.83));
  EXPECT_LT(std::abs(g.at_frequency(1.3) - expect), 1e-10 * std::abs(expect));
}

TEST(Registry, JsonRoundTrip) {
  const auto j = plants_to_json(builtin_plants());
  const auto back = plants_from_json(j);
  ASSERT_EQ(back.size(), builtin_plants().size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].id, builtin_plants()[i].id);
    EXPECT_EQ(back[i].g.numerator(), builtin_plants()[i].g.numerator());
    EXPECT_EQ(back[i].g.denominator(), builtin_plants()[i].g.denominator());
    EXPECT_EQ(back[i].g.domain(), builtin_plants()[i].g.domain());
  }
}

TEST(Registry, ShippedFileMatchesBuiltins) {
  const auto file = load_plant_file(std::filesystem::path(ZF_DATA_DIR) / "plants.json");
  ASSERT_EQ(file.size(), builtin_plants().size());
  for (const auto& p : builtin_plants()) {
    const auto f = find_plant(file, p.id);
    ASSERT_TRUE(f.has_value()) << p.id;
    EXPECT_EQ(f->g.numerator(), p.g.numerator());
    EXPECT_EQ(f->g.denominator(), p.g.denominator());
  }
}

TEST(Registry, MalformedJson) {
  EXPECT_THROW(plants_from_json(nlohmann::json::object()), std::exception);
  const nlohmann::json bad = nlohmann::json::parse(R"([{"id":"x","domain":"q","num":[1],"den":[1,0.5]}])");
  EXPECT_THROW(plants_from_json(bad), std::invalid_argument);
  EXPECT_THROW(load_plant_file("/nonexistent/plants.json"), std::runtime_error);
}

TEST(CtExamples, Settings) {
  EXPECT_EQ(ct_examples().size(), 9u);
  const auto e1 = find_ct_example("ex1-ct");
  ASSERT_TRUE(e1.has_value());
  EXPECT_DOUBLE_EQ(e1->ts, 0.05);
  EXPECT_EQ(e1->n_f, 1);
  EXPECT_EQ(e1->n_b, 1);
  EXPECT_FALSE(find_ct_example("ex7-ct")->reference_k.has_value());
  EXPECT_EQ(find_ct_example("ex9-ct")->n_f, 70);
  EXPECT_FALSE(find_ct_example("ex1").has_value());
}
