#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "zf/lti.hpp"

namespace zf {

struct Plant {
  std::string id;
  RationalTransferFunction g;
};

/// The six discrete benchmark plants (ex1..ex6) and nine continuous ones (ex1-ct..ex9-ct).
const std::vector<Plant>& builtin_plants();

/// Looks an id up in the given list (the built-in registry by default).
std::optional<Plant> find_plant(const std::string& id);
std::optional<Plant> find_plant(const std::vector<Plant>& plants, const std::string& id);

/// Registry file: JSON array of {id, domain: "z"|"s", num, den}.
std::vector<Plant> plants_from_json(const nlohmann::json& j);
nlohmann::json plants_to_json(const std::vector<Plant>& plants);
std::vector<Plant> load_plant_file(const std::filesystem::path& path);

/// Default settings of the continuous-time examples.
struct CtExample {
  std::string plant_id;
  double ts;
  int n_f;
  int n_b;
  bool odd;
  /// Slope printed for the delay multiplier; empty where the method is poor.
  std::optional<double> reference_k;
  /// LMI strictness margin override (0 keeps the solver default). Needed where
  /// the discretised plant has poles within ~1e-5 of the unit circle.
  double lmi_eps = 0.0;
};

const std::vector<CtExample>& ct_examples();
std::optional<CtExample> find_ct_example(const std::string& plant_id);

}  // namespace zf
