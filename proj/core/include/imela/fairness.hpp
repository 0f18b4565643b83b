#pragma once

#include <Eigen/SparseCore>

#include "imela/problem.hpp"

namespace imela {

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct Dataset {
  SparseRowMatrix features;  // n x d
  Vector labels;             // +1 / -1
  Vector group;              // 0 / 1 per row once assigned
  bool has_group = false;

  Index rows() const { return features.rows(); }
  Index cols() const { return features.cols(); }
};

/// LIBSVM sparse format, 1-based feature indices. Labels are coerced to
/// +-1 (0 maps to -1); any other label raises DataError.
Dataset load_libsvm(const std::string& path);

/// Dense CSV with a header row. The column named "label" supplies labels and
/// a column named "group" (if present) the group indicator.
Dataset load_csv(const std::string& path);

/// Marks rows with column value > 0.5 as the protected group. The column is
/// removed from the features unless keep_feature is set.
void assign_group_column(Dataset& d, Index column, bool keep_feature = false);

/// Seeded shuffle; the first two thirds become the training (constraint)
/// rows, the rest is split by group for the gap objective.
struct FairnessSplit {
  SparseRowMatrix train_features;
  Vector train_labels;
  SparseRowMatrix heldout_protected;
  SparseRowMatrix heldout_unprotected;
};

FairnessSplit split_fairness(const Dataset& d, std::uint64_t seed);

double sigmoid(double z);

/// (1/n) sum_i log(1 + exp(-b_i a_i^T x)), numerically stable.
OracleEval logistic_loss(const SparseRowMatrix& A, const Vector& b, const Vector& x);

/// Mean sigmoid score gap between the two held-out groups.
double dp_gap(const SparseRowMatrix& Ap, const SparseRowMatrix& Au, const Vector& x);

/// 1/2 dp_gap(x)^2 with gradient.
OracleEval dp_objective(const SparseRowMatrix& Ap, const SparseRowMatrix& Au, const Vector& x);

struct FairnessConstants {
  double alpha = 0.0;        // Lipschitz constant of the gap objective
  double beta = 0.0;         // smoothness building block of the gap
  double gamma = 0.0;        // Lipschitz constant of the loss
  double gamma_prime = 0.0;  // smoothness constant of the loss
  double L = 0.0;            // max(beta + alpha^2, gamma_prime) unless overridden
  double lstar = 0.0;        // near-optimal loss value
  double kappa = 0.0;        // allowed loss excess
  double B_g = 0.0;          // certified bound for the loss constraint
};

/// alpha, beta from the held-out groups; gamma, gamma_prime from the
/// training rows.
FairnessConstants estimate_constants(const FairnessSplit& split);

struct LstarResult {
  double value = 0.0;
  Vector x;
  long long steps = 0;
  double residual = 0.0;  // stationarity at the returned point
};

/// Projected gradient descent on the loss with constant step 0.1 until the
/// stationarity residual over the set drops to tol. Throws ConfigError when
/// the step budget runs out first.
LstarResult solve_lstar(const SparseRowMatrix& A, const Vector& b, const FeasibleSet& set,
                        double tol = 1e-3, long long max_steps = 1000000);

struct FairnessOptions {
  double radius = 100.0;      // l1 ball radius
  double kappa_mult = 0.001;  // kappa = kappa_mult * lstar
  double lstar_tol = 1e-3;
  std::optional<double> L_override;
  std::optional<double> B_g_override;
};

struct FairnessProblem {
  ProblemInstance instance;  // min 1/2 gap^2 s.t. loss <= lstar + kappa, ||x||_1 <= r
  FairnessConstants constants;
};

/// Assembles the constrained instance. g(x_feas) = -kappa holds exactly
/// because lstar is defined as the loss at the returned near-optimal point.
FairnessProblem build_fairness_problem(const FairnessSplit& split, const FairnessOptions& opts = {});

/// Two-group synthetic sample with a group-dependent feature shift, so the
/// unconstrained loss minimizer carries a visible score gap.
Dataset make_synthetic_fairness(std::uint64_t seed, Index n = 2000, Index d = 20);

}  // namespace imela
