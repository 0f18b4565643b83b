#include "imela/nnls.hpp"

#include <Eigen/Dense>
#include <functional>
#include <limits>
#include <vector>

namespace imela {
namespace {

// Shared active set loop. Evaluates the gradient of
//   q(w) = 1/2 w^T Q w - w^T c
// through the callbacks so the NNLS case can keep the numerically nicer
// residual form. `solve_passive` must return the unconstrained minimizer of q
// restricted to the passive coordinates.
struct ActiveSetDriver {
  Index n;
  double tol;
  std::function<Vector(const Vector&)> gradient;       // grad q at w
  std::function<Vector(const std::vector<Index>&)> solve_passive;

  Vector run(bool* converged) {
    Vector w = Vector::Zero(n);
    std::vector<bool> passive(static_cast<size_t>(n), false);
    std::vector<Index> pidx;
    *converged = true;

    // Outer additions are bounded by n in exact arithmetic; the cap guards
    // against cycling caused by degenerate subproblems.
    const int max_outer = 3 * static_cast<int>(n) + 30;
    for (int outer = 0; outer < max_outer; ++outer) {
      const Vector g = gradient(w);
      Index best = -1;
      double best_val = -tol;
      for (Index j = 0; j < n; ++j) {
        if (!passive[static_cast<size_t>(j)] && g[j] < best_val) {
          best_val = g[j];
          best = j;
        }
      }
      if (best < 0) return w;  // KKT: w >= 0, g >= -tol off support, g ~ 0 on it

      passive[static_cast<size_t>(best)] = true;
      pidx.push_back(best);

      for (int inner = 0; inner < max_outer; ++inner) {
        const Vector s = solve_passive(pidx);
        bool all_pos = true;
        for (Index k = 0; k < static_cast<Index>(pidx.size()); ++k) {
          if (s[k] <= 0.0) { all_pos = false; break; }
        }
        if (all_pos) {
          w.setZero();
          for (Index k = 0; k < static_cast<Index>(pidx.size()); ++k) w[pidx[static_cast<size_t>(k)]] = s[k];
          break;
        }
        // Step toward s until the first passive coordinate hits zero.
        double alpha = std::numeric_limits<double>::infinity();
        for (Index k = 0; k < static_cast<Index>(pidx.size()); ++k) {
          const Index j = pidx[static_cast<size_t>(k)];
          if (s[k] <= 0.0) {
            const double denom = w[j] - s[k];
            if (denom > 0.0) alpha = std::min(alpha, w[j] / denom);
          }
        }
        if (!std::isfinite(alpha)) alpha = 0.0;
        Vector w_new = w;
        for (Index k = 0; k < static_cast<Index>(pidx.size()); ++k) {
          const Index j = pidx[static_cast<size_t>(k)];
          w_new[j] = w[j] + alpha * (s[k] - w[j]);
        }
        w = w_new;
        // Drop coordinates that reached the bound.
        std::vector<Index> kept;
        for (Index j : pidx) {
          if (w[j] > 1e-14) {
            kept.push_back(j);
          } else {
            w[j] = 0.0;
            passive[static_cast<size_t>(j)] = false;
          }
        }
        if (kept.size() == pidx.size()) {
          // No coordinate left the passive set; avoid spinning forever on a
          // degenerate face.
          break;
        }
        pidx = std::move(kept);
        if (pidx.empty()) break;
      }
    }
    *converged = false;
    return w;
  }
};

}  // namespace

NnlsResult nnls(const Matrix& C, const Vector& y, double tol) {
  if (C.rows() != y.size()) throw InputError("nnls: dimension mismatch");
  NnlsResult out;
  if (C.cols() == 0) {
    out.w = Vector(0);
    out.residual_norm = y.norm();
    out.converged = true;
    return out;
  }
  // Scale the dual tolerance by the data magnitude.
  const double scale = std::max(1.0, C.cwiseAbs().maxCoeff() * std::max(1.0, y.cwiseAbs().maxCoeff()));

  ActiveSetDriver drv;
  drv.n = C.cols();
  drv.tol = tol * scale;
  drv.gradient = [&](const Vector& w) -> Vector { return C.transpose() * (C * w - y); };
  drv.solve_passive = [&](const std::vector<Index>& p) -> Vector {
    Matrix Cp(C.rows(), static_cast<Index>(p.size()));
    for (Index k = 0; k < static_cast<Index>(p.size()); ++k) Cp.col(k) = C.col(p[static_cast<size_t>(k)]);
    return Cp.completeOrthogonalDecomposition().solve(y);
  };

  out.w = drv.run(&out.converged);
  out.residual_norm = (C * out.w - y).norm();
  return out;
}

BoundQpResult nonneg_quadratic(const Matrix& Q, const Vector& c, double tol) {
  if (Q.rows() != Q.cols() || Q.rows() != c.size()) throw InputError("nonneg_quadratic: dimension mismatch");
  BoundQpResult out;
  if (c.size() == 0) {
    out.mu = Vector(0);
    out.converged = true;
    return out;
  }
  const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());

  ActiveSetDriver drv;
  drv.n = c.size();
  drv.tol = tol * scale;
  drv.gradient = [&](const Vector& w) -> Vector { return Q * w - c; };
  drv.solve_passive = [&](const std::vector<Index>& p) -> Vector {
    const Index k = static_cast<Index>(p.size());
    Matrix Qp(k, k);
    Vector cp(k);
    for (Index a = 0; a < k; ++a) {
      cp[a] = c[p[static_cast<size_t>(a)]];
      for (Index b = 0; b < k; ++b) Qp(a, b) = Q(p[static_cast<size_t>(a)], p[static_cast<size_t>(b)]);
    }
    // Minimum-norm solution tolerates duplicated constraint rows.
    return Qp.completeOrthogonalDecomposition().solve(cp);
  };

  out.mu = drv.run(&out.converged);
  return out;
}

}  // namespace imela
