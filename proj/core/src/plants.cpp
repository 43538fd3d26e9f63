#include "zf/plants.hpp"

#include <algorithm>
#include <stdexcept>

#include "zf/serialization.hpp"

namespace zf {

namespace {

std::vector<double> multiply(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

std::vector<double> product(std::initializer_list<std::vector<double>> factors) {
  std::vector<double> out{1.0};
  for (const auto& f : factors) out = multiply(out, f);
  return out;
}

std::vector<double> negate(std::vector<double> p) {
  for (double& c : p) c = -c;
  return p;
}

std::vector<Plant> make_registry() {
  const auto z = TimeDomain::discrete;
  const auto s = TimeDomain::continuous;
  std::vector<Plant> r;
  auto add = [&](std::string id, std::vector<double> num, std::vector<double> den, TimeDomain d) {
    r.push_back({std::move(id), RationalTransferFunction(std::move(num), std::move(den), d)});
  };

  const std::vector<double> g2n{1, -1.95, 0.9, 0.05}, g2d{1, -2.8, 3.5, -2.412, 0.7209};
  add("ex1", {0.1, 0}, {1, -1.8, 0.81}, z);
  add("ex2", g2n, g2d, z);
  add("ex3", negate(g2n), g2d, z);
  add("ex4", {1, -1.5, 0.5, -0.5, 0.5}, {4.4, -8.957, 9.893, -5.671, 2.207, -0.5}, z);
  add("ex5", {-0.5, 0.1}, {1, -0.9, 0.79, 0.089}, z);
  add("ex6", {2, 0.92}, {1, -0.5, 0}, z);

  const std::vector<double> c1n{1, -0.2, -0.1}, c1d{1, 2, 1, 1};
  const std::vector<double> c3d{1, 0.2, 6, 0.1, 1}, c5d{1, 0.0003, 10, 0.0021, 9};
  add("ex1-ct", c1n, c1d, s);
  add("ex2-ct", negate(c1n), c1d, s);
  add("ex3-ct", {1, 0, 0}, c3d, s);
  add("ex4-ct", {-1, 0, 0}, c3d, s);
  add("ex5-ct", {1, 0, 0}, c5d, s);
  add("ex6-ct", {-1, 0, 0}, c5d, s);
  add("ex7-ct", {1, 0, 0}, {1, 2, 2, 1}, s);
  add("ex8-ct", product({{9.432}, {1, 15.6, 147.8}, {1, 2.356, 56.21}, {1, -0.332, 26.15}}),
      product({{1, 2.588, 90.9}, {1, 11.79, 113.7}, {1, 14.84, 84.05}, {1, 8.83}}), s);
  add("ex9-ct", {1, 0, 0}, {1, 5.001, 7.005, 5.006, 6}, s);
  return r;
}

}  // namespace

const std::vector<Plant>& builtin_plants() {
  static const std::vector<Plant> registry = make_registry();
  return registry;
}

std::optional<Plant> find_plant(const std::vector<Plant>& plants, const std::string& id) {
  const auto it = std::find_if(plants.begin(), plants.end(), [&](const Plant& p) { return p.id == id; });
  if (it == plants.end()) return std::nullopt;
  return *it;
}

std::optional<Plant> find_plant(const std::string& id) { return find_plant(builtin_plants(), id); }

std::vector<Plant> plants_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw std::invalid_argument("plant registry must be a JSON array");
  std::vector<Plant> out;
  for (const auto& e : j) {
    const std::string domain = e.at("domain").get<std::string>();
    if (domain != "z" && domain != "s") throw std::invalid_argument("plant domain must be \"z\" or \"s\"");
    out.push_back({e.at("id").get<std::string>(),
                   RationalTransferFunction(e.at("num").get<std::vector<double>>(),
                                            e.at("den").get<std::vector<double>>(),
                                            domain == "z" ? TimeDomain::discrete : TimeDomain::continuous)});
  }
  return out;
}

nlohmann::json plants_to_json(const std::vector<Plant>& plants) {
  auto j = nlohmann::json::array();
  for (const auto& p : plants) {
    j.push_back({{"id", p.id},
                 {"domain", p.g.domain() == TimeDomain::discrete ? "z" : "s"},
                 {"num", p.g.numerator()},
                 {"den", p.g.denominator()}});
  }
  return j;
}

std::vector<Plant> load_plant_file(const std::filesystem::path& path) {
  return plants_from_json(read_json_file(path));
}

const std::vector<CtExample>& ct_examples() {
  static const std::vector<CtExample> examples{
      {"ex1-ct", 0.05, 1, 1, false, 4.5949},   {"ex2-ct", 0.05, 0, 1, false, 1.0894},
      {"ex3-ct", 0.1, 20, 0, false, 1.945},    {"ex4-ct", 0.02, 1, 80, false, 1.29},
      {"ex5-ct", 0.02, 0, 50, true, 0.0055, 1e-12},   {"ex6-ct", 0.02, 50, 0, true, 0.0039},
      {"ex7-ct", 0.001, 50, 50, false, std::nullopt},
      {"ex8-ct", 0.001, 40, 40, false, std::nullopt},
      {"ex9-ct", 0.01, 70, 1, false, 360.0, 1e-9},
  };
  return examples;
}

std::optional<CtExample> find_ct_example(const std::string& plant_id) {
  for (const auto& e : ct_examples())
    if (e.plant_id == plant_id) return e;
  return std::nullopt;
}

}  // namespace zf
