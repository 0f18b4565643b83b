#pragma once

#include <map>

#include "imela/baselines.hpp"

namespace imela {

enum class Method { IMELa, IPPP, SPLM, SSG };

Method parse_method(const std::string& name);  // "imela" | "ippp" | "splm" | "ssg"
std::string method_name(Method method);

using ParamMap = std::map<std::string, double>;
using GridMap = std::map<std::string, std::vector<double>>;

/// Runs one parameter bundle. For imela and ippp `budget` caps the cumulative
/// inner gradient steps (the loop stops after the iteration that crosses it);
/// for splm and ssg it is the outer iteration count. Recognized keys:
///   imela: p, tau, theta, c, eta, T
///   ippp:  p, rho, eta, T
///   splm:  p, tau, theta, eta, T
///   ssg:   eps, eta, diminishing (0 or 1), T
/// p defaults to 2 L; imela's tau to its step rule. An explicit T replaces
/// the budget. Unknown keys raise ConfigError.
RunResult run_method(const ProblemInstance& prob, Method method, const ParamMap& params, long long budget,
                     OracleCounter& counter);

struct TuneCandidate {
  ParamMap params;
  double score = 0.0;
  bool failed = false;
  std::string failure;
  long long oracle_used = 0;
  std::optional<std::size_t> best_row;
};

struct TuneOptions {
  long long budget = 1000;
  double ssg_feasibility_slack = 1e-5;  // qualifying infeasibility for subgradient scoring
};

struct TuneResult {
  Method method = Method::IMELa;
  std::vector<TuneCandidate> candidates;
  std::size_t winner = 0;  // index into candidates
};

/// Every candidate in the cartesian products of `grids` runs under the
/// tuning budget and is scored on its trace: multiplier methods by the
/// smallest stationarity + infeasibility + complementarity over the run,
/// the subgradient method by the best objective among iterates within the
/// feasibility slack. Candidates that throw or produce no qualifying iterate
/// are kept with their failure reason. Throws ConfigError when every
/// candidate fails.
TuneResult tune(const ProblemInstance& prob, Method method, const std::vector<GridMap>& grids,
                const TuneOptions& opts);

/// Benchmark grids. ssg returns two grids (static and diminishing
/// schedules); the step axes of the gradient based methods can be rescaled
/// for differently scaled data.
std::vector<GridMap> default_grids(Method method, double eta_scale = 1.0);

}  // namespace imela
