#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "imela/kkt.hpp"
#include "imela/types.hpp"

namespace imela {

/// One outer iteration record. stat and comp_slack are absent for methods
/// that do not maintain multipliers (subgradient runs); branch is set only by
/// the switching subgradient method ("obj" or "con").
struct TraceRow {
  long long t = 0;
  long long inner_steps = 0;
  long long cum_oracle = 0;  // cumulative gradient steps across all iterations
  double obj = 0.0;
  double infeas = 0.0;
  std::optional<double> stat;
  std::optional<double> comp_slack;
  double lambda_norm = 0.0;
  std::string branch;
  double wall_ms = 0.0;

  // In-memory diagnostics, not serialized.
  bool budget_exhausted = false;
  double eps_t = 0.0;   // per-iteration tolerance or switching threshold
  double g_max = 0.0;   // max_i g_i at the decision point (switching audit)
};

struct SolverTrace {
  std::string method;
  std::string problem;
  std::vector<TraceRow> rows;
};

inline constexpr const char* kTraceSchema = "# imela trace v1";

/// Writes the versioned CSV. Field order:
/// t,inner_steps,cum_oracle,obj,infeas,stat,comp_slack,lambda_norm,branch,wall_ms
/// Doubles are printed with %.17g so equal runs yield equal bytes. With
/// include_wall = false the wall column is written as 0 (reproducible bytes).
void write_trace_csv(std::ostream& os, const SolverTrace& trace, bool include_wall = false);
void write_trace_csv_file(const std::string& path, const SolverTrace& trace, bool include_wall = false);

/// Parses a trace CSV; rejects unknown schema lines.
SolverTrace read_trace_csv(std::istream& is);
SolverTrace read_trace_csv_file(const std::string& path);

/// Rows of the selection metrics in trace order for best_iterate().
std::vector<MetricRow> metric_rows(const SolverTrace& trace);

/// Aligns traces onto the union of their cum_oracle values with carry
/// forward fill and writes one merged CSV:
/// cum_oracle,<name>_obj,<name>_infeas,<name>_stat,<name>_comp_slack,...
/// Cells before a trace's first record stay empty.
void write_merged_csv(std::ostream& os, const std::vector<SolverTrace>& traces,
                      const std::vector<std::string>& names);

}  // namespace imela
