#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "imela/set.hpp"
#include "imela/types.hpp"

namespace imela {

struct OracleEval {
  double value = 0.0;
  Vector gradient;
};

/// First order oracle fn(x, grad) -> value for an L-smooth function on R^n.
class SmoothOracle {
 public:
  using Fn = std::function<double(const Vector&, Vector&)>;

  SmoothOracle() = default;
  SmoothOracle(Index dim, Fn fn) : dim_(dim), fn_(std::move(fn)) {}

  Index dimension() const { return dim_; }
  bool valid() const { return static_cast<bool>(fn_); }

  OracleEval eval(const Vector& x) const {
    if (x.size() != dim_) throw InputError("SmoothOracle: dimension mismatch");
    OracleEval out;
    out.gradient.setZero(dim_);
    out.value = fn_(x, out.gradient);
    return out;
  }

  double value(const Vector& x) const { return eval(x).value; }

 private:
  Index dim_ = 0;
  Fn fn_;
};

/// Constants the step size and dual bound formulas depend on. They must be
/// valid bounds for the instance or the certified quantities are off.
struct ProblemConstants {
  double L = 0.0;         // smoothness constant of f and of every g_i
  double B_f = 0.0;       // sup over X of ||grad f||
  double B_g = 0.0;       // sup over X of max(||g(x)||, ||Jg(x)||)
  double D_X = 0.0;       // diameter of X
  Vector x_feas;          // strictly feasible point, g(x_feas) < 0 when m > 0
  double min_slack = 0.0; // min_i -g_i(x_feas)
  std::optional<double> f_lower;  // known lower bound of f over X, diagnostics only
};

/// min f(x) s.t. g_i(x) <= 0 (i = 1..m), x in X. f may be non-convex; the
/// g_i are assumed convex and smooth; X is a FeasibleSet.
struct ProblemInstance {
  std::string name;
  SmoothOracle objective;
  std::vector<SmoothOracle> constraints;
  FeasibleSet set;
  ProblemConstants constants;

  Index dimension() const { return set.dimension(); }
  Index num_constraints() const { return static_cast<Index>(constraints.size()); }

  /// Throws ConfigError on inconsistent dimensions or unusable constants
  /// (non-positive L or D_X, B_g = 0 with m > 0, x_feas not strictly
  /// feasible).
  void validate() const;
};

/// Gradient evaluation counts. One constraint unit is one evaluation of the
/// whole constraint vector and its Jacobian.
struct OracleCounter {
  long long objective_gradients = 0;
  long long constraint_gradients = 0;
  long long projections = 0;
};

struct Evaluation {
  double f_value = 0.0;
  Vector f_gradient;
  Vector g_values;    // size m
  Matrix g_jacobian;  // m x n, row i = grad g_i
};

/// Evaluates objective and all constraints at x. Increments the counter by
/// exactly one objective unit and one constraint unit (if m > 0).
Evaluation evaluate(const ProblemInstance& prob, const Vector& x, OracleCounter* counter = nullptr);

/// Midpoint convexity violation max(f((x+y)/2) - (f(x)+f(y))/2, 0). Positive
/// values certify non-convexity; used by tests and input sanity checks.
double convexity_probe(const SmoothOracle& fn, const Vector& x, const Vector& y);

struct GradientMapping {
  Vector mapped;  // project(u - eta grad F(u))
  double norm;    // ||u - mapped|| / eta
};

/// Projected gradient mapping of F on the set at u with step eta > 0.
GradientMapping gradient_mapping(const SmoothOracle& F, const FeasibleSet& set, const Vector& u, double eta);

}  // namespace imela
