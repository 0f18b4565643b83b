#pragma once

// Independent reference implementations used to cross-check the library:
// central finite differences, bisection based l1 projection, sign-enumeration
// normal cone distance, and exhaustive grid minimization. Deliberately naive.

#include <cmath>
#include <vector>

#include "imela/nnls.hpp"
#include "imela/problem.hpp"

namespace testsupport {

inline imela::Vector fd_gradient(const imela::SmoothOracle& F, const imela::Vector& x, double h = 1e-6) {
  imela::Vector g(x.size());
  imela::Vector e = x;
  for (imela::Index i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    e[i] = xi + h;
    const double up = F.value(e);
    e[i] = xi - h;
    const double dn = F.value(e);
    e[i] = xi;
    g[i] = (up - dn) / (2.0 * h);
  }
  return g;
}

inline double rel_err(const imela::Vector& got, const imela::Vector& ref) {
  return (got - ref).norm() / std::max(1.0, ref.norm());
}

/// Projection onto {||x||_1 <= r} via bisection on the soft threshold.
inline imela::Vector l1_project_bisect(const imela::Vector& v, double r) {
  if (v.cwiseAbs().sum() <= r) return v;
  double lo = 0.0, hi = v.cwiseAbs().maxCoeff();
  auto shrunk_norm = [&](double theta) {
    double s = 0.0;
    for (imela::Index i = 0; i < v.size(); ++i) s += std::max(std::abs(v[i]) - theta, 0.0);
    return s;
  };
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (shrunk_norm(mid) > r ? lo : hi) = mid;
  }
  const double theta = 0.5 * (lo + hi);
  imela::Vector out(v.size());
  for (imela::Index i = 0; i < v.size(); ++i) {
    const double mag = std::max(std::abs(v[i]) - theta, 0.0);
    out[i] = v[i] < 0.0 ? -mag : mag;
  }
  return out;
}

/// dist(v, N_X(x)) for X = {||x||_1 <= r} by non-negative least squares over
/// every active sign row sigma in {-1,1}^d with sigma^T x = ||x||_1 = r.
/// Exponential in d; fine for d <= 12.
inline double l1_nc_bruteforce(const imela::Vector& x, const imela::Vector& v, double r, double tol = 1e-9) {
  const imela::Index d = x.size();
  if (x.cwiseAbs().sum() < r - tol) return v.norm();  // interior: N = {0}
  std::vector<imela::Vector> cols;
  for (std::uint64_t mask = 0; mask < (1ull << d); ++mask) {
    imela::Vector sigma(d);
    for (imela::Index i = 0; i < d; ++i) sigma[i] = (mask >> i) & 1 ? 1.0 : -1.0;
    if (sigma.dot(x) >= r - tol) cols.push_back(sigma);
  }
  imela::Matrix C(d, static_cast<imela::Index>(cols.size()));
  for (imela::Index j = 0; j < C.cols(); ++j) C.col(j) = cols[static_cast<std::size_t>(j)];
  return imela::nnls(C, v).residual_norm;
}

/// Exhaustive minimizer of F over a box grid with the given resolution.
/// Only for dimension 2.
inline imela::Vector grid_argmin(const imela::SmoothOracle& F, const imela::Vector& lower,
                                 const imela::Vector& upper, double res) {
  imela::Vector best(2), pt(2);
  double best_val = std::numeric_limits<double>::infinity();
  const auto steps0 = static_cast<long long>(std::round((upper[0] - lower[0]) / res));
  const auto steps1 = static_cast<long long>(std::round((upper[1] - lower[1]) / res));
  for (long long i = 0; i <= steps0; ++i) {
    pt[0] = lower[0] + res * static_cast<double>(i);
    for (long long j = 0; j <= steps1; ++j) {
      pt[1] = lower[1] + res * static_cast<double>(j);
      const double val = F.value(pt);
      if (val < best_val) {
        best_val = val;
        best = pt;
      }
    }
  }
  return best;
}

/// Separable quadratic 1/2 sum d_i x_i^2 - c^T x with known curvature range.
inline imela::SmoothOracle diag_quadratic(imela::Vector diag, imela::Vector c) {
  const imela::Index n = diag.size();
  return imela::SmoothOracle(n, [diag = std::move(diag), c = std::move(c)](const imela::Vector& x,
                                                                           imela::Vector& grad) {
    grad = diag.cwiseProduct(x) - c;
    return 0.5 * x.dot(diag.cwiseProduct(x)) - c.dot(x);
  });
}

}  // namespace testsupport
