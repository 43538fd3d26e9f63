// zf: command line front-end for the slope searches.
#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "zf/analysis.hpp"
#include "zf/ct_bridge.hpp"
#include "zf/plants.hpp"
#include "zf/serialization.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitUsage = 64;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PlantArgs {
  std::string plant;
  std::string plant_file;
};

void add_plant_flags(CLI::App& app, PlantArgs& a) {
  app.add_option("--plant", a.plant, "Registry id (ex1..ex6, ex1-ct..ex9-ct) or id inside --plant-file");
  app.add_option("--plant-file", a.plant_file, "JSON plant registry file")->check(CLI::ExistingFile);
}

zf::Plant resolve_plant(const PlantArgs& a) {
  if (!a.plant_file.empty()) {
    const auto plants = zf::load_plant_file(a.plant_file);
    if (plants.empty()) throw UsageError("plant file holds no plants");
    if (a.plant.empty()) return plants.front();
    if (auto p = zf::find_plant(plants, a.plant)) return *p;
    throw UsageError("plant '" + a.plant + "' not found in " + a.plant_file);
  }
  if (a.plant.empty()) throw UsageError("one of --plant or --plant-file is required");
  if (auto p = zf::find_plant(a.plant)) return *p;
  throw UsageError("unknown plant '" + a.plant + "'");
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw UsageError("not a number: '" + item + "'");
    out.push_back(v);
  }
  return out;
}

struct SearchArgs {
  std::string method = "fir-hard";
  int n = -1;
  int n_f = -1;
  int n_b = -1;
  bool odd = false;
  double tol = 1e-5;
  int grid = 2048;
  std::string lambda_grid;
  double lmi_eps = 0.0;
};

void add_search_flags(CLI::App& app, SearchArgs& a, bool with_method) {
  if (with_method)
    app.add_option("--method", a.method, "fir-hard | fir-lift | iir-causal | iir-anticausal | circle | nyquist");
  app.add_option("--n", a.n, "Taps on each side (sets --nf and --nb)")->check(CLI::NonNegativeNumber);
  app.add_option("--nf", a.n_f, "Anticausal taps")->check(CLI::NonNegativeNumber);
  app.add_option("--nb", a.n_b, "Causal taps")->check(CLI::NonNegativeNumber);
  app.add_flag("--odd", a.odd, "Odd nonlinearity (wider multiplier class)");
  app.add_option("--tol", a.tol, "Bisection tolerance on k")->check(CLI::PositiveNumber);
  app.add_option("--grid", a.grid, "Verification grid size")->check(CLI::Range(16, 1 << 24));
  app.add_option("--lambda-grid", a.lambda_grid, "Comma separated λ values for the IIR searches");
  app.add_option("--lmi-eps", a.lmi_eps, "Strictness margin of the matrix inequalities")
      ->check(CLI::PositiveNumber);
}

zf::SlopeOptions slope_options(const SearchArgs& a) {
  zf::SlopeOptions o;
  const auto method = zf::parse_method(a.method);
  if (!method) throw UsageError("unknown method '" + a.method + "'");
  o.method = *method;
  const int n = a.n >= 0 ? a.n : 1;
  o.n_f = a.n_f >= 0 ? a.n_f : n;
  o.n_b = a.n_b >= 0 ? a.n_b : n;
  if (o.method == zf::Method::fir_lifting && o.n_f != o.n_b)
    throw UsageError("fir-lift needs --nf equal to --nb");
  o.odd = a.odd;
  o.tol = a.tol;
  o.grid = a.grid;
  o.iir.verify_grid = a.grid;
  if (!a.lambda_grid.empty()) {
    o.iir.lambda_grid = parse_list(a.lambda_grid);
    for (double l : o.iir.lambda_grid)
      if (!(l > 0.0 && l < 1.0)) throw UsageError("λ values must lie in (0, 1)");
  }
  o.solver.strictness_margin = a.lmi_eps;
  o.iir.solver.strictness_margin = a.lmi_eps;
  return o;
}

void ensure_dir(const std::string& out) {
  if (!out.empty()) fs::create_directories(out);
}

// ---------------------------------------------------------------- analyze

int cmd_analyze(const PlantArgs& pa, const SearchArgs& sa, const std::string& out) {
  const zf::Plant plant = resolve_plant(pa);
  if (plant.g.domain() != zf::TimeDomain::discrete)
    throw UsageError("analyze expects a discrete plant; use 'zf ct' for continuous ones");
  const zf::SlopeOptions opts = slope_options(sa);
  const zf::SlopeResult r = zf::max_slope(plant.g, opts);

  nlohmann::json j = r;
  j["plant"] = plant.id;
  std::cout << plant.id << ' ' << zf::to_string(r.method) << (r.odd ? " odd" : "") << " k_max="
            << zf::format_number(r.k_max) << " margin=" << zf::format_number(r.verification_margin)
            << " nyquist=" << zf::format_number(r.nyquist_value) << " time=" << zf::format_number(r.wall_time)
            << "s\n";
  if (!r.diagnostics.empty()) std::cerr << "diagnostics: " << r.diagnostics << '\n';
  if (!out.empty()) {
    ensure_dir(out);
    zf::write_json_file(fs::path(out) / "result.json", j);
    zf::write_json_file(fs::path(out) / "multiplier.json", r.multiplier_json());
  }
  return r.k_max > 0.0 ? kExitOk : kExitInfeasible;
}

// ---------------------------------------------------------------- table2

struct Cell {
  std::string plant;
  zf::Method method;
  bool odd;
  int n;
};

struct CellResult {
  Cell cell;
  zf::SlopeResult result;
  std::string error;
};

std::vector<CellResult> run_cells(const std::vector<Cell>& cells, const std::vector<zf::Plant>& plants,
                                  const SearchArgs& sa, int jobs) {
  std::vector<CellResult> results(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const Cell& c = cells[i];
      CellResult& cr = results[i];
      cr.cell = c;
      try {
        SearchArgs local = sa;
        local.method = zf::to_string(c.method);
        local.n = c.n;
        local.n_f = local.n_b = -1;
        local.odd = c.odd;
        zf::SlopeOptions opts = slope_options(local);
        cr.result = zf::max_slope(zf::find_plant(plants, c.plant)->g, opts);
      } catch (const std::exception& e) {
        cr.error = e.what();
      }
      std::lock_guard lock(log_mutex);
      std::cerr << c.plant << ' ' << zf::to_string(c.method) << (c.odd ? " odd" : "") << " n=" << c.n
                << " -> " << (cr.error.empty() ? zf::format_number(cr.result.k_max) : "error: " + cr.error)
                << '\n';
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < std::max(1, jobs); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return results;
}

void write_rows(zf::CsvWriter& csv, const std::vector<CellResult>& rows) {
  for (const auto& r : rows) {
    const bool ok = r.error.empty() && r.result.k_max > 0.0 && r.result.verification_margin > 0.0;
    const bool static_method = r.cell.method == zf::Method::nyquist;
    csv.row({r.cell.plant, std::string(zf::to_string(r.cell.method)), r.cell.odd, r.result.n_f, r.result.n_b,
             r.result.k_max, r.result.verification_margin, r.result.nyquist_value, r.result.wall_time,
             r.error.empty() ? std::string(ok || static_method ? "ok" : "infeasible") : "error: " + r.error});
  }
}

const std::vector<std::string> kTableHeader{"plant",       "method",  "odd",           "n_f",
                                            "n_b",         "k_max",   "verification_margin",
                                            "nyquist_value", "wall_time", "status"};

int cmd_table2(const std::vector<std::string>& plant_ids, const std::vector<std::string>& methods,
               const std::vector<int>& n_list, bool odd_both, bool sweep, int n_max, int jobs,
               const SearchArgs& sa, const std::string& out) {
  const auto& plants = zf::builtin_plants();
  for (const auto& id : plant_ids)
    if (!zf::find_plant(plants, id)) throw UsageError("unknown plant '" + id + "'");
  std::vector<zf::Method> parsed;
  for (const auto& m : methods) {
    auto p = zf::parse_method(m);
    if (!p) throw UsageError("unknown method '" + m + "'");
    parsed.push_back(*p);
  }
  std::vector<bool> odds = odd_both ? std::vector<bool>{false, true} : std::vector<bool>{sa.odd};

  std::vector<Cell> cells;
  for (const auto& id : plant_ids) {
    for (auto m : parsed) {
      const bool fir = m == zf::Method::fir_hard || m == zf::Method::fir_lifting;
      const bool iir = m == zf::Method::iir_causal || m == zf::Method::iir_anticausal;
      if (fir) {
        for (bool odd : odds)
          for (int n : n_list) cells.push_back({id, m, odd, n});
      } else {
        // IIR multipliers only exist for odd nonlinearities.
        cells.push_back({id, m, iir, 1});
      }
    }
  }
  ensure_dir(out);
  const fs::path dir = out.empty() ? fs::path(".") : fs::path(out);
  const auto results = run_cells(cells, plants, sa, jobs);
  {
    std::ofstream f(dir / "table2.csv", std::ios::binary);
    zf::CsvWriter csv(f, kTableHeader);
    write_rows(csv, results);
  }
  bool any_error = false;
  for (const auto& r : results) any_error |= !r.error.empty();

  if (sweep) {
    std::vector<Cell> sweep_cells;
    for (const auto& id : plant_ids)
      for (bool odd : odds)
        for (int n = 1; n <= n_max; ++n) sweep_cells.push_back({id, zf::Method::fir_hard, odd, n});
    const auto sres = run_cells(sweep_cells, plants, sa, jobs);

    std::ofstream fs_n(dir / "slope_vs_n.csv", std::ios::binary);
    zf::CsvWriter by_n(fs_n, kTableHeader);
    write_rows(by_n, sres);

    std::ofstream fsp(dir / "sparsity.csv", std::ios::binary);
    zf::CsvWriter sparse(fsp, {"plant", "odd", "n", "i", "coeff"});
    std::map<std::pair<std::string, bool>, const CellResult*> best;
    for (const auto& r : sres) {
      any_error |= !r.error.empty();
      if (!r.error.empty()) continue;
      if (r.result.fir) {
        for (int i = -r.result.fir->n_f(); i <= r.result.fir->n_b(); ++i) {
          const double c = (*r.result.fir)[i];
          if (std::abs(c) > 1e-5) sparse.row({r.cell.plant, r.cell.odd, r.cell.n, i, c});
        }
      }
      auto& slot = best[{r.cell.plant, r.cell.odd}];
      if (!slot || r.result.k_max > slot->result.k_max) slot = &r;
    }

    std::ofstream fstar(dir / "nstar.csv", std::ios::binary);
    zf::CsvWriter star(fstar, {"plant", "odd", "n_star", "k_max", "verification_margin"});
    for (const auto& [key, r] : best)
      star.row({key.first, key.second, r->cell.n, r->result.k_max, r->result.verification_margin});
  }
  std::cout << "wrote " << (dir / "table2.csv").string() << (sweep ? " and sweep files" : "") << '\n';
  return any_error ? kExitError : kExitOk;
}

// ---------------------------------------------------------------- ct

int cmd_ct(const PlantArgs& pa, double ts, const SearchArgs& sa, double eps_prune, double k_phase,
           const std::string& out) {
  const zf::Plant plant = resolve_plant(pa);
  if (plant.g.domain() != zf::TimeDomain::continuous) throw UsageError("ct expects a continuous plant");
  zf::CtBridgeOptions o;
  if (auto ex = zf::find_ct_example(plant.id)) {
    o.ts = ex->ts;
    o.n_f = ex->n_f;
    o.n_b = ex->n_b;
    o.odd = ex->odd;
  }
  if (ts > 0.0) o.ts = ts;
  if (sa.n >= 0) o.n_f = o.n_b = sa.n;
  if (sa.n_f >= 0) o.n_f = sa.n_f;
  if (sa.n_b >= 0) o.n_b = sa.n_b;
  if (sa.odd) o.odd = true;
  o.eps_prune = eps_prune;
  SearchArgs local = sa;
  local.method = "fir-hard";
  if (local.lmi_eps <= 0.0)
    if (auto ex = zf::find_ct_example(plant.id)) local.lmi_eps = ex->lmi_eps;
  o.search = slope_options(local);

  const zf::CtBridgeResult r = zf::derive_ct_multiplier(plant.g, o);
  const zf::CtSlope k = zf::ct_max_slope(r.multiplier, plant.g);

  std::cout << plant.id << " Ts=" << zf::format_number(o.ts) << " n_f=" << o.n_f << " n_b=" << o.n_b
            << (o.odd ? " odd" : "") << " discrete_k=" << zf::format_number(r.discrete.k_max)
            << " k=" << zf::format_number(k.k) << (k.unbounded ? " (unbounded)" : "") << "\nM(s) =";
  for (const auto& [i, c] : r.multiplier.terms)
    std::cout << ' ' << (c < 0 ? "- " : "+ ") << zf::format_number(std::abs(c)) << "·e^{"
              << zf::format_number(-i * o.ts) << "s}";
  std::cout << '\n';

  if (!out.empty()) {
    ensure_dir(out);
    nlohmann::json m = r.multiplier;
    zf::write_json_file(fs::path(out) / "multiplier.json", m);
    nlohmann::json summary{{"plant", plant.id},     {"Ts", o.ts},
                           {"n_f", o.n_f},          {"n_b", o.n_b},
                           {"odd", o.odd},          {"eps_prune", o.eps_prune},
                           {"discrete", r.discrete}, {"k_max", k.k},
                           {"unbounded", k.unbounded}, {"omega_critical", k.omega},
                           {"multiplier", m}};
    zf::write_json_file(fs::path(out) / "result.json", summary);
    std::ofstream f(fs::path(out) / "phase.csv", std::ios::binary);
    const double kp = k_phase > 0.0 ? k_phase : k.k;
    zf::phase_sweep_csv(f, r.multiplier, plant.g, kp, 1e-2, 1e3, 4000);
  }
  return k.k > 0.0 ? kExitOk : kExitInfeasible;
}

// ---------------------------------------------------------------- plants

int cmd_plants(bool as_json) {
  if (as_json) {
    std::cout << zf::plants_to_json(zf::builtin_plants()).dump(2) << '\n';
    return kExitOk;
  }
  for (const auto& p : zf::builtin_plants()) {
    std::cout << p.id << (p.g.domain() == zf::TimeDomain::discrete ? "  z  " : "  s  ") << "order "
              << p.g.order() << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zames-Falb multiplier searches for slope-restricted feedback systems", "zf"};
  app.require_subcommand(1);

  PlantArgs pa;
  SearchArgs sa;
  std::string out;

  auto* analyze = app.add_subcommand("analyze", "Largest certified slope for one plant and method");
  add_plant_flags(*analyze, pa);
  add_search_flags(*analyze, sa, true);
  analyze->add_option("--out", out, "Directory for result.json and multiplier.json");

  std::vector<std::string> t_plants{"ex1", "ex2", "ex3", "ex4", "ex5", "ex6"};
  std::vector<std::string> t_methods{"circle", "fir-hard", "nyquist"};
  std::vector<int> t_n{1};
  bool t_odd_both = false, t_sweep = false;
  int t_nmax = 30;
  int t_jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  auto* table2 = app.add_subcommand("table2", "Cross product of plants, methods and orders as CSV");
  table2->add_option("--plants", t_plants, "Plant ids")->delimiter(',');
  table2->add_option("--methods", t_methods, "Methods")->delimiter(',');
  table2->add_option("--n-list", t_n, "FIR orders")->delimiter(',');
  table2->add_flag("--odd-both", t_odd_both, "Run FIR cells for both classes");
  table2->add_flag("--sweep", t_sweep, "Also sweep n = 1..N_max with fir-hard");
  table2->add_option("--nmax", t_nmax, "Largest n of the sweep")->check(CLI::Range(1, 1000));
  table2->add_option("--jobs", t_jobs, "Worker threads")->check(CLI::Range(1, 256));
  add_search_flags(*table2, sa, false);
  table2->add_option("--out", out, "Output directory");

  double ts = 0.0, eps_prune = 1e-3, k_phase = 0.0;
  auto* ct = app.add_subcommand("ct", "Delay multiplier for a continuous plant via a discrete search");
  add_plant_flags(*ct, pa);
  add_search_flags(*ct, sa, false);
  ct->add_option("--ts", ts, "Sampling time")->check(CLI::PositiveNumber);
  ct->add_option("--eps-prune", eps_prune, "Drop taps below this magnitude")->check(CLI::NonNegativeNumber);
  ct->add_option("--phase-k", k_phase, "Gain used for phase.csv (default: certified k)");
  ct->add_option("--out", out, "Directory for multiplier.json, result.json and phase.csv");

  bool as_json = false;
  auto* plants = app.add_subcommand("plants", "List the built-in plants");
  plants->add_flag("--json", as_json, "Print the registry file format");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*analyze) return cmd_analyze(pa, sa, out);
    if (*table2) return cmd_table2(t_plants, t_methods, t_n, t_odd_both, t_sweep, t_nmax, t_jobs, sa, out);
    if (*ct) return cmd_ct(pa, ts, sa, eps_prune, k_phase, out);
    if (*plants) return cmd_plants(as_json);
  } catch (const UsageError& e) {
    std::cerr << "zf: " << e.what() << "\n" << app.help();
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "zf: error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitUsage;
}
