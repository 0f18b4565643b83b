#pragma once

#include "imela/types.hpp"

namespace imela {

struct NnlsResult {
  Vector w;              // argmin, w >= 0
  double residual_norm;  // ||C w - y||
  bool converged;        // false only if the iteration cap was hit
};

/// Solves min_{w >= 0} ||C w - y||^2 with a Lawson-Hanson active set method.
/// Exact (finite) for well-posed inputs; `tol` bounds the dual feasibility
/// max_j (C^T (y - C w))_j at the solution.
NnlsResult nnls(const Matrix& C, const Vector& y, double tol = 1e-12);

struct BoundQpResult {
  Vector mu;      // argmin, mu >= 0
  bool converged;
};

/// Solves min_{mu >= 0} 1/2 mu^T Q mu - mu^T c for symmetric PSD Q with the
/// same active set strategy. Degenerate principal blocks fall back to a
/// minimum-norm least squares subsolve.
BoundQpResult nonneg_quadratic(const Matrix& Q, const Vector& c, double tol = 1e-12);

}  // namespace imela
