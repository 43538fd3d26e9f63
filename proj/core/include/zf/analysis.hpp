#pragma once

#include <functional>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "zf/fir.hpp"
#include "zf/hard_factorization.hpp"
#include "zf/iir.hpp"
#include "zf/lifting.hpp"
#include "zf/lti.hpp"

namespace zf {

enum class Method { fir_hard, fir_lifting, iir_causal, iir_anticausal, circle, nyquist };

/// CLI spelling: fir-hard, fir-lift, iir-causal, iir-anticausal, circle, nyquist.
const char* to_string(Method m);
std::optional<Method> parse_method(const std::string& name);

using FrequencyFunction = std::function<Complex(double)>;

/**
 * min over ω ∈ [0, π] of Re{M(e^{jω})(1 + kG(e^{jω}))} for a discrete plant.
 *
 * Evaluated on `grid_size` equally spaced points, then refined three times on
 * a finer local grid around the smallest local minima.
 */
double verify_fdi(const FrequencyFunction& m, const RationalTransferFunction& g, double k,
                  int grid_size = 2048);
double verify_fdi(const FirMultiplier& m, const RationalTransferFunction& g, double k,
                  int grid_size = 2048);

struct CircleResult {
  double k = 0.0;
  bool unbounded = false;
  double min_real = 0.0;
};

/// −1/min_ω Re G on 8192 points with local refinement; Nyquist value when
/// Re G never goes negative.
CircleResult circle_criterion(const RationalTransferFunction& g);

struct SlopeOptions {
  Method method = Method::fir_hard;
  int n_f = 1;
  int n_b = 1;
  bool odd = false;
  /// Bisection stops when hi − lo ≤ max(tol, rel_tol·lo).
  double tol = 1e-5;
  double rel_tol = 0.0;
  /// Upper end of the initial bracket; 0 selects 1.1 times the Nyquist value.
  double upper = 0.0;
  int grid = 2048;
  IirSearchConfig iir;
  sdp::SolverOptions solver = sdp::SolverOptions::from_environment();
};

struct SlopeResult {
  Method method = Method::fir_hard;
  bool odd = false;
  int n_f = 0;
  int n_b = 0;
  double k_max = 0.0;
  /// Smallest k found infeasible (upper end of the final bracket).
  double k_infeasible = 0.0;
  std::optional<FirMultiplier> fir;
  std::optional<IirMultiplier> iir;
  double verification_margin = 0.0;
  double nyquist_value = 0.0;
  bool nyquist_unbounded = false;
  double wall_time = 0.0;
  int evaluations = 0;
  std::string diagnostics;

  nlohmann::json multiplier_json() const;
};

/**
 * Largest slope certified by the chosen method, found by bisection on
 * [0, 1.1·k_N]. The largest feasible k seen is kept, so a non-monotone
 * predicate never lowers the answer below a certified value.
 */
SlopeResult max_slope(const RationalTransferFunction& g, const SlopeOptions& options);

void to_json(nlohmann::json& j, const SlopeResult& r);

}  // namespace zf
