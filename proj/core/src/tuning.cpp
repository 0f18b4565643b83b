#include "imela/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace imela {
namespace {

double take(ParamMap& params, const std::string& key, double fallback) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  double v = it->second;
  params.erase(it);
  return v;
}

std::optional<double> take_opt(ParamMap& params, const std::string& key) {
  auto it = params.find(key);
  if (it == params.end()) return std::nullopt;
  double v = it->second;
  params.erase(it);
  return v;
}

void reject_leftovers(const ParamMap& params, const std::string& method) {
  if (params.empty()) return;
  std::string keys;
  for (const auto& [k, v] : params) {
    (void)v;
    if (!keys.empty()) keys += ", ";
    keys += k;
  }
  throw ConfigError("unknown " + method + " parameter(s): " + keys);
}

long long take_T(ParamMap& params, long long fallback) {
  auto t = take_opt(params, "T");
  if (!t) return fallback;
  if (*t < 1.0 || *t != std::floor(*t)) throw ConfigError("T must be a positive integer");
  return static_cast<long long>(*t);
}

}  // namespace

Method parse_method(const std::string& name) {
  if (name == "imela") return Method::IMELa;
  if (name == "ippp") return Method::IPPP;
  if (name == "splm") return Method::SPLM;
  if (name == "ssg") return Method::SSG;
  throw ConfigError("unknown method '" + name + "' (expected imela, ippp, splm, or ssg)");
}

std::string method_name(Method method) {
  switch (method) {
    case Method::IMELa: return "imela";
    case Method::IPPP: return "ippp";
    case Method::SPLM: return "splm";
    case Method::SSG: return "ssg";
  }
  throw ConfigError("invalid method value");
}

RunResult run_method(const ProblemInstance& prob, Method method, const ParamMap& params, long long budget,
                     OracleCounter& counter) {
  if (budget < 1) throw ConfigError("budget must be positive");
  ParamMap rest = params;
  const double p_default = 2.0 * prob.constants.L;

  switch (method) {
    case Method::IMELa: {
      double p = take(rest, "p", p_default);
      IMELaParams mp = default_params(prob.constants, p);
      mp.tau = take(rest, "tau", mp.tau);
      mp.theta = take(rest, "theta", mp.theta);
      mp.c = take(rest, "c", mp.c);
      mp.eta = take_opt(rest, "eta");
      // Every outer iteration consumes at least one inner step, so the
      // budget also caps the row count.
      mp.T = take_T(rest, budget);
      mp.inner_step_budget = budget;
      reject_leftovers(rest, "imela");
      return imela_run(prob, mp, counter);
    }
    case Method::IPPP: {
      IPPPParams bp;
      bp.p = take(rest, "p", p_default);
      bp.rho = take(rest, "rho", bp.rho);
      bp.eta = take_opt(rest, "eta");
      bp.T = take_T(rest, budget);
      bp.inner_step_budget = budget;
      reject_leftovers(rest, "ippp");
      return ippp_run(prob, bp, counter);
    }
    case Method::SPLM: {
      SPLMParams bp;
      bp.p = take(rest, "p", p_default);
      IMELaParams defaults = default_params(prob.constants, bp.p);
      bp.tau = take(rest, "tau", defaults.tau);
      bp.theta = take(rest, "theta", defaults.theta);
      auto eta = take_opt(rest, "eta");
      if (!eta) throw ConfigError("splm requires an eta parameter");
      bp.eta = *eta;
      bp.T = take_T(rest, budget);
      reject_leftovers(rest, "splm");
      return splm_run(prob, bp, counter);
    }
    case Method::SSG: {
      SSGParams bp;
      double dim = take(rest, "diminishing", 0.0);
      if (dim != 0.0 && dim != 1.0) throw ConfigError("diminishing must be 0 or 1");
      bp.schedule = dim == 1.0 ? SSGParams::Schedule::Diminishing : SSGParams::Schedule::Static;
      bp.eps = take(rest, "eps", bp.eps);
      bp.eta = take(rest, "eta", bp.eta);
      bp.T = take_T(rest, budget);
      reject_leftovers(rest, "ssg");
      return ssg_run(prob, bp, counter);
    }
  }
  throw ConfigError("invalid method value");
}

namespace {

std::vector<ParamMap> expand_grid(const GridMap& grid) {
  std::vector<ParamMap> out{ParamMap{}};
  for (const auto& [key, values] : grid) {
    if (values.empty()) throw ConfigError("grid axis '" + key + "' is empty");
    std::vector<ParamMap> next;
    next.reserve(out.size() * values.size());
    for (const auto& base : out) {
      for (double v : values) {
        ParamMap extended = base;
        extended[key] = v;
        next.push_back(std::move(extended));
      }
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace

TuneResult tune(const ProblemInstance& prob, Method method, const std::vector<GridMap>& grids,
                const TuneOptions& opts) {
  if (grids.empty()) throw ConfigError("tune needs at least one grid");
  TuneResult result;
  result.method = method;
  for (const auto& grid : grids) {
    for (auto& params : expand_grid(grid)) {
      TuneCandidate cand;
      cand.params = std::move(params);
      try {
        OracleCounter counter;
        RunResult run = run_method(prob, method, cand.params, opts.budget, counter);
        if (run.trace.rows.empty()) throw DataError("run produced no iterations");
        cand.oracle_used = run.trace.rows.back().cum_oracle;
        auto rows = metric_rows(run.trace);
        auto best = method == Method::SSG
                        ? best_iterate(rows, BestIterateMode::FeasibleObjective, opts.ssg_feasibility_slack)
                        : best_iterate(rows, BestIterateMode::PrimalDual);
        if (!best) {
          cand.failed = true;
          cand.failure = "no qualifying iterate";
        } else if (!std::isfinite(best->score)) {
          cand.failed = true;
          cand.failure = "non-finite score";
        } else {
          cand.score = best->score;
          cand.best_row = best->row;
        }
      } catch (const std::exception& err) {
        cand.failed = true;
        cand.failure = err.what();
      }
      result.candidates.push_back(std::move(cand));
    }
  }

  bool found = false;
  double best_score = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < result.candidates.size(); ++i) {
    const auto& cand = result.candidates[i];
    if (cand.failed) continue;
    if (!found || cand.score < best_score) {
      found = true;
      best_score = cand.score;
      result.winner = i;
    }
  }
  if (!found) throw ConfigError("every tuning candidate failed");
  return result;
}

std::vector<GridMap> default_grids(Method method, double eta_scale) {
  if (eta_scale <= 0.0) throw ConfigError("eta_scale must be positive");
  auto scaled = [eta_scale](std::initializer_list<double> values) {
    std::vector<double> out;
    for (double v : values) out.push_back(v * eta_scale);
    return out;
  };
  switch (method) {
    case Method::IMELa:
      return {GridMap{{"tau", {5, 10, 20, 50}}, {"theta", {0.5, 0.75, 1.0}}, {"c", {1, 2, 5, 10}}}};
    case Method::IPPP:
      return {GridMap{{"rho", {200, 500, 1000, 1500}}}};
    case Method::SPLM:
      return {GridMap{{"tau", {5, 10, 20, 50}},
                      {"theta", {0.5, 0.75, 1.0}},
                      {"eta", scaled({0.005, 0.01, 0.02, 0.05})}}};
    case Method::SSG:
      return {GridMap{{"diminishing", {0}},
                      {"eps", {1e-6, 2e-6, 5e-6, 1e-5}},
                      {"eta", scaled({2e-4, 5e-4, 1e-3, 2e-3})}},
              GridMap{{"diminishing", {1}},
                      {"eps", {5e-5, 1e-4, 2e-4, 5e-4}},
                      {"eta", scaled({0.02, 0.05, 0.1, 0.2})}}};
  }
  throw ConfigError("invalid method value");
}

}  // namespace imela
