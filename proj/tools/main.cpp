// imela command line front end: run a solver on a problem, grid-tune
// parameters, merge traces for external plotting.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "imela/fairness.hpp"
#include "imela/test_problems.hpp"
#include "imela/tuning.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace imela;

struct ProblemArgs {
  std::string name = "counterexample";
  std::uint64_t seed = 1;
  std::string data_path;
  std::string group;        // csv column name or 1-based libsvm feature id
  double radius = 100.0;
};

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

Dataset load_dataset(const ProblemArgs& args) {
  if (args.data_path.empty()) throw ConfigError("--data is required for the fairness problem");
  if (ends_with(args.data_path, ".csv")) {
    Dataset d = load_csv(args.data_path);
    if (!args.group.empty()) {
      // resolve the column name against the stored header order is not kept;
      // csv loader already consumed "group" when present, so a name here is
      // a 0-based feature column index.
      assign_group_column(d, static_cast<Index>(std::stoll(args.group)));
    }
    if (!d.has_group) throw ConfigError("csv has no group column; pass --group <feature index>");
    return d;
  }
  Dataset d = load_libsvm(args.data_path);
  if (args.group.empty()) throw ConfigError("libsvm input needs --group <1-based feature id>");
  long long id = std::stoll(args.group);
  if (id < 1 || id > d.features.cols()) throw ConfigError("--group feature id out of range");
  assign_group_column(d, static_cast<Index>(id - 1));
  return d;
}

ProblemInstance build_problem(const ProblemArgs& args) {
  if (args.name == "counterexample") return counterexample().problem;
  if (args.name == "convex-interior") return convex_interior().problem;
  if (args.name == "convex-active") return convex_active().problem;
  if (args.name == "l1-quadratic") return l1_quadratic().problem;
  if (args.name == "polytope-rand") return random_polytope(args.seed, 2).problem;
  FairnessOptions opts;
  opts.radius = args.radius;
  if (args.name == "synthetic-fairness") {
    Dataset d = make_synthetic_fairness(args.seed);
    return build_fairness_problem(split_fairness(d, args.seed), opts).instance;
  }
  if (args.name == "fairness") {
    Dataset d = load_dataset(args);
    return build_fairness_problem(split_fairness(d, args.seed), opts).instance;
  }
  throw ConfigError("unknown problem '" + args.name +
                    "' (builtins: counterexample, convex-interior, convex-active, l1-quadratic, "
                    "polytope-rand, synthetic-fairness, fairness)");
}

ParamMap parse_params(const std::vector<std::string>& items) {
  ParamMap out;
  for (const auto& item : items) {
    auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--params expects key=value, got '" + item + "'");
    std::string key = item.substr(0, eq);
    try {
      out[key] = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw ConfigError("--params value for '" + key + "' is not a number");
    }
  }
  return out;
}

GridMap parse_grid(const std::vector<std::string>& items) {
  GridMap out;
  for (const auto& item : items) {
    auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--grid expects key=v1,v2,..., got '" + item + "'");
    std::string key = item.substr(0, eq);
    std::vector<double> values;
    std::stringstream ss(item.substr(eq + 1));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        values.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw ConfigError("--grid value '" + tok + "' for '" + key + "' is not a number");
      }
    }
    if (values.empty()) throw ConfigError("--grid axis '" + key + "' has no values");
    out[key] = std::move(values);
  }
  return out;
}

json params_json(const ParamMap& params) {
  json j = json::object();
  for (const auto& [k, v] : params) j[k] = v;
  return j;
}

json row_json(const TraceRow& row) {
  json j;
  j["t"] = row.t;
  j["obj"] = row.obj;
  j["infeas"] = row.infeas;
  j["stat"] = row.stat ? json(*row.stat) : json(nullptr);
  j["comp_slack"] = row.comp_slack ? json(*row.comp_slack) : json(nullptr);
  j["lambda_norm"] = row.lambda_norm;
  j["cum_oracle"] = row.cum_oracle;
  return j;
}

/// A-priori audit constants when the parameter bundle carries a dual step.
json audit_json(const ProblemInstance& prob, Method method, const ParamMap& params) {
  json j = json::object();
  const auto& c = prob.constants;
  double p = params.count("p") ? params.at("p") : 2.0 * c.L;
  double tau = 0.0;
  if (params.count("tau")) {
    tau = params.at("tau");
  } else if ((method == Method::IMELa || method == Method::SPLM) && c.B_g > 0.0) {
    tau = (p - c.L) / (4.0 * c.B_g * c.B_g);
  }
  if ((method == Method::IMELa || method == Method::SPLM) && tau > 0.0 && c.min_slack > 0.0) {
    double m_lambda = m_lambda_bound(c, tau, tau, p);
    j["m_lambda"] = m_lambda;
    j["K_apriori"] = c.L + c.L * std::sqrt(static_cast<double>(prob.num_constraints())) * m_lambda + p;
  } else {
    j["m_lambda"] = nullptr;
    j["K_apriori"] = nullptr;
  }
  return j;
}

void write_file(const std::string& path, const std::string& what, const std::function<void(std::ostream&)>& fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + what + " file '" + path + "'");
  fn(out);
  if (!out) throw DataError("failed writing " + what + " file '" + path + "'");
}

int cmd_run(const ProblemArgs& pargs, const std::string& method_name, const std::vector<std::string>& param_items,
            long long budget, const std::string& out_path, bool timing) {
  Method method = parse_method(method_name);
  ParamMap params = parse_params(param_items);
  ProblemInstance prob = build_problem(pargs);

  OracleCounter counter;
  RunResult run = run_method(prob, method, params, budget, counter);
  write_file(out_path, "trace", [&](std::ostream& os) { write_trace_csv(os, run.trace, timing); });

  auto rows = metric_rows(run.trace);
  auto best = method == Method::SSG ? best_iterate(rows, BestIterateMode::FeasibleObjective, 1e-5)
                                    : best_iterate(rows, BestIterateMode::PrimalDual);

  json summary;
  summary["problem"] = pargs.name;
  summary["method"] = method_name;
  summary["params"] = params_json(params);
  summary["budget"] = budget;
  summary["seed"] = pargs.seed;
  summary["iterations"] = run.trace.rows.size();
  summary["oracle"] = {{"objective_gradients", counter.objective_gradients},
                       {"constraint_gradients", counter.constraint_gradients},
                       {"projections", counter.projections}};
  summary["final"] = run.trace.rows.empty() ? json(nullptr) : row_json(run.trace.rows.back());
  summary["best"] = best ? row_json(run.trace.rows[best->row]) : json(nullptr);
  if (best) summary["best"]["score"] = best->score;
  summary["max_lambda_norm"] = run.max_lambda_norm;
  summary["constants"] = {{"L", prob.constants.L},       {"B_f", prob.constants.B_f},
                          {"B_g", prob.constants.B_g},   {"D_X", prob.constants.D_X},
                          {"min_slack", prob.constants.min_slack}};
  summary["audit"] = audit_json(prob, method, params);
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int cmd_tune(const ProblemArgs& pargs, const std::string& method_name, const std::vector<std::string>& grid_items,
             long long budget, double final_mult, const std::string& out_path, const std::string& final_out,
             bool timing) {
  Method method = parse_method(method_name);
  std::vector<GridMap> grids;
  if (grid_items.empty()) {
    grids = default_grids(method);
  } else {
    grids.push_back(parse_grid(grid_items));
  }
  ProblemInstance prob = build_problem(pargs);

  TuneOptions opts;
  opts.budget = budget;
  TuneResult result = tune(prob, method, grids, opts);

  write_file(out_path, "score table", [&](std::ostream& os) {
    os << "candidate,params,score,failed,oracle_used,failure\n";
    char buf[64];
    for (std::size_t i = 0; i < result.candidates.size(); ++i) {
      const auto& cand = result.candidates[i];
      std::string flat;
      for (const auto& [k, v] : cand.params) {
        if (!flat.empty()) flat += ';';
        std::snprintf(buf, sizeof buf, "%s=%.17g", k.c_str(), v);
        flat += buf;
      }
      std::snprintf(buf, sizeof buf, "%.17g", cand.score);
      os << i << ',' << flat << ',' << (cand.failed ? "" : buf) << ',' << (cand.failed ? 1 : 0) << ','
         << cand.oracle_used << ',' << cand.failure << '\n';
    }
  });

  const auto& winner = result.candidates[result.winner];
  long long final_budget = static_cast<long long>(final_mult * static_cast<double>(budget));
  json summary;
  summary["problem"] = pargs.name;
  summary["method"] = method_name;
  summary["budget"] = budget;
  summary["candidates"] = result.candidates.size();
  summary["winner"] = {{"index", result.winner},
                       {"params", params_json(winner.params)},
                       {"score", winner.score},
                       {"oracle_used", winner.oracle_used}};
  summary["final_budget"] = final_budget;

  if (!final_out.empty()) {
    OracleCounter counter;
    RunResult run = run_method(prob, method, winner.params, final_budget, counter);
    write_file(final_out, "final trace", [&](std::ostream& os) { write_trace_csv(os, run.trace, timing); });
    auto rows = metric_rows(run.trace);
    auto best = method == Method::SSG ? best_iterate(rows, BestIterateMode::FeasibleObjective, 1e-5)
                                      : best_iterate(rows, BestIterateMode::PrimalDual);
    summary["final_run"] = {{"iterations", run.trace.rows.size()},
                            {"best", best ? row_json(run.trace.rows[best->row]) : json(nullptr)}};
  }
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int cmd_report(const std::vector<std::string>& trace_paths, const std::string& out_path) {
  std::vector<SolverTrace> traces;
  std::vector<std::string> names;
  for (const auto& path : trace_paths) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open trace '" + path + "'");
    try {
      traces.push_back(read_trace_csv(in));
    } catch (const std::exception& err) {
      throw DataError("trace '" + path + "': " + err.what());
    }
    if (traces.back().rows.empty()) throw DataError("trace '" + path + "' has no rows");
    names.push_back(std::filesystem::path(path).stem().string());
  }
  write_file(out_path, "report", [&](std::ostream& os) { write_merged_csv(os, traces, names); });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"constrained nonconvex first-order solvers: proximal Lagrangian methods and baselines"};
  app.require_subcommand(1);

  ProblemArgs pargs;
  std::string method = "imela";
  std::vector<std::string> param_items, grid_items;
  long long budget = 1000;
  double final_mult = 4.0;
  std::string out_path, final_out;
  bool timing = false;

  auto add_problem_flags = [&](CLI::App* cmd) {
    cmd->add_option("--problem", pargs.name, "builtin name, or fairness/synthetic-fairness");
    cmd->add_option("--seed", pargs.seed, "rng seed for data splits and random instances");
    cmd->add_option("--data", pargs.data_path, "dataset path (.csv or libsvm) for --problem fairness");
    cmd->add_option("--group", pargs.group, "protected group column (csv: 0-based column; libsvm: 1-based feature id)");
    cmd->add_option("--radius", pargs.radius, "l1 ball radius for the fairness problems");
  };

  auto* run = app.add_subcommand("run", "run one solver and write its trace");
  add_problem_flags(run);
  run->add_option("--method", method, "imela | ippp | splm | ssg");
  run->add_option("--params", param_items, "key=value (repeatable)");
  run->add_option("--budget", budget, "inner gradient steps (imela, ippp) or outer iterations (splm, ssg)");
  run->add_option("--out", out_path, "trace csv path")->capture_default_str();
  run->add_flag("--timing", timing, "record wall clock in the trace (breaks byte reproducibility)");

  auto* tune_cmd = app.add_subcommand("tune", "grid search parameters under a tuning budget");
  add_problem_flags(tune_cmd);
  tune_cmd->add_option("--method", method, "imela | ippp | splm | ssg");
  tune_cmd->add_option("--grid", grid_items, "key=v1,v2,... (repeatable); default: built-in benchmark grids");
  tune_cmd->add_option("--budget", budget, "tuning budget per candidate");
  tune_cmd->add_option("--final-mult", final_mult, "final run budget = mult * tuning budget");
  tune_cmd->add_option("--out", out_path, "per-candidate score table csv");
  tune_cmd->add_option("--final-out", final_out, "run the winner at the final budget, write its trace here");
  tune_cmd->add_flag("--timing", timing, "record wall clock in traces");

  std::vector<std::string> trace_paths;
  auto* report = app.add_subcommand("report", "merge traces onto a shared oracle-count axis");
  report->add_option("traces", trace_paths, "trace csv files")->required()->expected(-1);
  report->add_option("--out", out_path, "merged csv path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      if (out_path.empty()) out_path = "trace.csv";
      return cmd_run(pargs, method, param_items, budget, out_path, timing);
    }
    if (tune_cmd->parsed()) {
      if (out_path.empty()) out_path = "tune.csv";
      return cmd_tune(pargs, method, grid_items, budget, final_mult, out_path, final_out, timing);
    }
    if (report->parsed()) {
      if (out_path.empty()) out_path = "merged.csv";
      return cmd_report(trace_paths, out_path);
    }
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
