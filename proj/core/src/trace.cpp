#include "imela/trace.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace imela {
namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt_double(*v) : std::string(); }

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::optional<double> parse_opt(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::stod(s);
}

}  // namespace

void write_trace_csv(std::ostream& os, const SolverTrace& trace, bool include_wall) {
  os << kTraceSchema << "\n";
  os << "t,inner_steps,cum_oracle,obj,infeas,stat,comp_slack,lambda_norm,branch,wall_ms\n";
  for (const TraceRow& r : trace.rows) {
    os << r.t << ',' << r.inner_steps << ',' << r.cum_oracle << ',' << fmt_double(r.obj) << ','
       << fmt_double(r.infeas) << ',' << fmt_opt(r.stat) << ',' << fmt_opt(r.comp_slack) << ','
       << fmt_double(r.lambda_norm) << ',' << r.branch << ','
       << (include_wall ? fmt_double(r.wall_ms) : std::string("0")) << "\n";
  }
}

void write_trace_csv_file(const std::string& path, const SolverTrace& trace, bool include_wall) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open trace file for writing: " + path);
  write_trace_csv(f, trace, include_wall);
}

SolverTrace read_trace_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw DataError("trace: empty stream");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTraceSchema) throw DataError("trace: unknown schema line '" + line + "'");
  if (!std::getline(is, line)) throw DataError("trace: missing header");

  SolverTrace trace;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> f = split_csv(line);
    if (f.size() != 10) throw DataError("trace: malformed row '" + line + "'");
    TraceRow r;
    r.t = std::stoll(f[0]);
    r.inner_steps = std::stoll(f[1]);
    r.cum_oracle = std::stoll(f[2]);
    r.obj = std::stod(f[3]);
    r.infeas = std::stod(f[4]);
    r.stat = parse_opt(f[5]);
    r.comp_slack = parse_opt(f[6]);
    r.lambda_norm = std::stod(f[7]);
    r.branch = f[8];
    r.wall_ms = std::stod(f[9]);
    trace.rows.push_back(std::move(r));
  }
  return trace;
}

SolverTrace read_trace_csv_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open trace file: " + path);
  return read_trace_csv(f);
}

std::vector<MetricRow> metric_rows(const SolverTrace& trace) {
  std::vector<MetricRow> out;
  out.reserve(trace.rows.size());
  for (const TraceRow& r : trace.rows) {
    MetricRow m;
    m.objective = r.obj;
    m.infeasibility = r.infeas;
    m.stationarity = r.stat;
    m.comp_slackness = r.comp_slack;
    out.push_back(m);
  }
  return out;
}

void write_merged_csv(std::ostream& os, const std::vector<SolverTrace>& traces,
                      const std::vector<std::string>& names) {
  if (traces.size() != names.size()) throw InputError("write_merged_csv: names/traces size mismatch");
  std::vector<long long> grid;
  for (const SolverTrace& tr : traces)
    for (const TraceRow& r : tr.rows) grid.push_back(r.cum_oracle);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  os << "cum_oracle";
  for (const std::string& n : names)
    os << ',' << n << "_obj," << n << "_infeas," << n << "_stat," << n << "_comp_slack";
  os << "\n";

  std::vector<std::size_t> pos(traces.size(), 0);
  for (long long g : grid) {
    os << g;
    for (std::size_t i = 0; i < traces.size(); ++i) {
      const auto& rows = traces[i].rows;
      std::size_t& p = pos[i];
      while (p < rows.size() && rows[p].cum_oracle <= g) ++p;
      if (p == 0) {
        os << ",,,,";
        continue;
      }
      const TraceRow& r = rows[p - 1];
      os << ',' << fmt_double(r.obj) << ',' << fmt_double(r.infeas) << ',' << fmt_opt(r.stat) << ','
         << fmt_opt(r.comp_slack);
    }
    os << "\n";
  }
}

}  // namespace imela
