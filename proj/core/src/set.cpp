#include "imela/set.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "imela/nnls.hpp"

namespace imela {
namespace {

Vector clamp_to_box(const Vector& v, const Vector& lo, const Vector& hi) {
  return v.cwiseMax(lo).cwiseMin(hi);
}

// Feasibility by minimizing h(x) = 1/2 ||[Ax-b]_+||^2 with FISTA. h is convex
// with h* = 0 iff the polytope is non-empty; coercive once boundedness of the
// polytope is established.
struct FeasibilityProbe {
  Vector point;
  double residual;  // sqrt(2 h) at the returned point
};

FeasibilityProbe find_feasible_point(const Matrix& A, const Vector& b) {
  const double lip = std::max(1e-12, A.squaredNorm());  // ||A||_2^2 <= ||A||_F^2
  Vector x = A.completeOrthogonalDecomposition().solve(b);
  Vector y = x;
  Vector x_prev = x;
  double tk = 1.0;
  double h = 0.0;
  for (int k = 0; k < 200000; ++k) {
    const Vector slack = (A * y - b).cwiseMax(0.0);
    h = 0.5 * slack.squaredNorm();
    if (h <= 1e-24) { x = y; break; }
    const Vector grad = A.transpose() * slack;
    x_prev = x;
    x = y - grad / lip;
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
    y = x + ((tk - 1.0) / t_next) * (x - x_prev);
    tk = t_next;
  }
  const Vector slack = (A * x - b).cwiseMax(0.0);
  return {x, slack.norm()};
}

// Bounded iff cone{rows of A} = R^n, i.e. every +/- coordinate direction is a
// non-negative combination of rows.
bool conic_hull_spans(const Matrix& A) {
  const Matrix At = A.transpose();  // columns are the rows of A
  for (Index i = 0; i < A.cols(); ++i) {
    for (double sgn : {1.0, -1.0}) {
      Vector e = Vector::Zero(A.cols());
      e[i] = sgn;
      if (nnls(At, e).residual_norm > 1e-8) return false;
    }
  }
  return true;
}

// All vertices of {Ax <= b}: feasible solutions of n active rows. Exact
// bounding boxes for small systems; callers cap the combinatorics.
std::vector<Vector> enumerate_vertices(const Matrix& A, const Vector& b) {
  const Index l = A.rows(), n = A.cols();
  std::vector<Vector> verts;
  std::vector<Index> comb(static_cast<size_t>(n));
  std::iota(comb.begin(), comb.end(), Index{0});
  const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  while (true) {
    Matrix As(n, n);
    Vector bs(n);
    for (Index k = 0; k < n; ++k) {
      As.row(k) = A.row(comb[static_cast<size_t>(k)]);
      bs[k] = b[comb[static_cast<size_t>(k)]];
    }
    Eigen::FullPivLU<Matrix> lu(As);
    if (lu.isInvertible()) {
      const Vector x = lu.solve(bs);
      if (((A * x - b).array() <= 1e-9 * scale).all()) verts.push_back(x);
    }
    // next combination
    Index j = n - 1;
    while (j >= 0 && comb[static_cast<size_t>(j)] == l - n + j) --j;
    if (j < 0) break;
    ++comb[static_cast<size_t>(j)];
    for (Index k = j + 1; k < n; ++k) comb[static_cast<size_t>(k)] = comb[static_cast<size_t>(k - 1)] + 1;
  }
  return verts;
}

double binomial_cap(Index l, Index n, double cap) {
  double v = 1.0;
  for (Index k = 0; k < n; ++k) {
    v *= static_cast<double>(l - k) / static_cast<double>(k + 1);
    if (v > cap) return cap + 1.0;
  }
  return v;
}

// Dykstra's alternating projections onto the halfspaces; exact projection in
// the limit, used only to polish degenerate dual QP results.
Vector dykstra_polish(const Matrix& A, const Vector& b, const Vector& v, int sweeps) {
  const Index l = A.rows();
  Matrix inc = Matrix::Zero(l, A.cols());
  Vector x = v;
  for (int s = 0; s < sweeps; ++s) {
    double moved = 0.0;
    for (Index j = 0; j < l; ++j) {
      const Vector y = x + inc.row(j).transpose();
      const double a2 = A.row(j).squaredNorm();
      const double viol = A.row(j).dot(y) - b[j];
      Vector xn = y;
      if (viol > 0.0 && a2 > 0.0) xn -= (viol / a2) * A.row(j).transpose();
      inc.row(j) = (y - xn).transpose();
      moved += (xn - x).squaredNorm();
      x = xn;
    }
    if (moved < 1e-32) break;
  }
  return x;
}

}  // namespace

FeasibleSet FeasibleSet::box(Vector lower, Vector upper) {
  if (lower.size() != upper.size() || lower.size() == 0) throw InputError("box: bad bounds");
  if ((lower.array() > upper.array()).any()) throw InputError("box: lower > upper");
  FeasibleSet s;
  s.kind_ = Kind::Box;
  s.dim_ = lower.size();
  s.lower_ = std::move(lower);
  s.upper_ = std::move(upper);
  s.bbox_ = {s.lower_, s.upper_};
  s.inner_point_ = 0.5 * (s.lower_ + s.upper_);
  s.build_box_rows();
  return s;
}

FeasibleSet FeasibleSet::l1_ball(Index dim, double radius) {
  if (dim <= 0) throw InputError("l1_ball: dimension must be positive");
  if (!(radius > 0.0)) throw InputError("l1_ball: radius must be positive");
  FeasibleSet s;
  s.kind_ = Kind::L1Ball;
  s.dim_ = dim;
  s.radius_ = radius;
  s.bbox_ = {Vector::Constant(dim, -radius), Vector::Constant(dim, radius)};
  s.inner_point_ = Vector::Zero(dim);
  return s;
}

FeasibleSet FeasibleSet::polytope(Matrix A, Vector b) {
  if (A.rows() == 0 || A.cols() == 0 || A.rows() != b.size()) throw InputError("polytope: bad A, b");
  if (!conic_hull_spans(A)) throw InputError("polytope: set is unbounded");
  const FeasibilityProbe probe = find_feasible_point(A, b);
  if (probe.residual > 1e-7 * std::max(1.0, b.cwiseAbs().maxCoeff()))
    throw InputError("polytope: set is empty");

  FeasibleSet s;
  s.kind_ = Kind::Polytope;
  s.dim_ = A.cols();
  s.A_ = std::move(A);
  s.b_ = std::move(b);

  if (binomial_cap(s.A_.rows(), s.dim_, 2e5) <= 2e5) {
    auto verts = enumerate_vertices(s.A_, s.b_);
    if (!verts.empty()) {
      Vector lo = verts.front(), hi = verts.front();
      for (const Vector& v : verts) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
      }
      s.bbox_ = {lo, hi};
      s.vertices_ = std::move(verts);
    }
  }
  if (!s.vertices_) {
    // Probe estimate: project far points along +/- e_i, inflate.
    const double reach = 10.0 * (1.0 + probe.point.norm() + s.b_.cwiseAbs().maxCoeff());
    Vector lo = probe.point, hi = probe.point;
    for (Index i = 0; i < s.dim_; ++i) {
      for (double sgn : {1.0, -1.0}) {
        Vector far = probe.point;
        far[i] += sgn * reach;
        const Vector p = s.project(far);
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
      }
    }
    const Vector pad = 0.1 * (hi - lo).cwiseAbs() + Vector::Constant(s.dim_, 1e-6);
    s.bbox_ = {lo - pad, hi + pad};
  }
  s.inner_point_ = s.project(probe.point);
  return s;
}

void FeasibleSet::build_box_rows() {
  A_.setZero(2 * dim_, dim_);
  b_.resize(2 * dim_);
  for (Index i = 0; i < dim_; ++i) {
    A_(i, i) = 1.0;
    b_[i] = upper_[i];
    A_(dim_ + i, i) = -1.0;
    b_[dim_ + i] = -lower_[i];
  }
}

Vector project_l1_ball(const Vector& v, double r) {
  if (v.lpNorm<1>() <= r) return v;
  // Find the threshold t with sum max(|v_i| - t, 0) = r over sorted |v|.
  Vector a = v.cwiseAbs();
  std::sort(a.data(), a.data() + a.size(), std::greater<double>());
  double csum = 0.0;
  double t = 0.0;
  for (Index k = 0; k < a.size(); ++k) {
    csum += a[k];
    const double cand = (csum - r) / static_cast<double>(k + 1);
    if (k + 1 == a.size() || a[k + 1] <= cand) {
      t = cand;
      break;
    }
  }
  Vector out(v.size());
  for (Index i = 0; i < v.size(); ++i) {
    const double m = std::abs(v[i]) - t;
    out[i] = m > 0.0 ? (v[i] > 0.0 ? m : -m) : 0.0;
  }
  return out;
}

Vector FeasibleSet::project(const Vector& v) const {
  if (v.size() != dim_) throw InputError("project: dimension mismatch");
  switch (kind_) {
    case Kind::Box:
      return clamp_to_box(v, lower_, upper_);
    case Kind::L1Ball:
      return project_l1_ball(v, radius_);
    case Kind::Polytope: {
      // proj(v) = v - A^T mu with mu >= 0 minimizing the dual quadratic.
      const Vector c = A_ * v - b_;
      if ((c.array() <= 0.0).all()) return v;
      const Matrix Q = A_ * A_.transpose();
      const BoundQpResult dual = nonneg_quadratic(Q, c, 1e-14);
      Vector x = v - A_.transpose() * dual.mu;
      const double scale = std::max(1.0, b_.cwiseAbs().maxCoeff());
      if (!dual.converged || (A_ * x - b_).maxCoeff() > 1e-10 * scale) {
        x = dykstra_polish(A_, b_, v, 20000);
      }
      return x;
    }
  }
  throw std::logic_error("unreachable");
}

double FeasibleSet::violation(const Vector& x) const {
  if (x.size() != dim_) throw InputError("violation: dimension mismatch");
  switch (kind_) {
    case Kind::Box:
      return std::max((x - upper_).maxCoeff(), (lower_ - x).maxCoeff());
    case Kind::L1Ball:
      return x.lpNorm<1>() - radius_;
    case Kind::Polytope:
      return (A_ * x - b_).maxCoeff();
  }
  throw std::logic_error("unreachable");
}

double FeasibleSet::normal_cone_distance(const Vector& x, const Vector& v, double active_tol) const {
  if (x.size() != dim_ || v.size() != dim_) throw InputError("normal_cone_distance: dimension mismatch");
  if (violation(x) > active_tol) throw InputError("normal_cone_distance: x is not in the set");
  switch (kind_) {
    case Kind::Box: {
      // Componentwise cones: full line where both bounds meet, half line at a
      // single active bound, {0} in the interior.
      double d2 = 0.0;
      for (Index i = 0; i < dim_; ++i) {
        const bool at_up = x[i] >= upper_[i] - active_tol;
        const bool at_lo = x[i] <= lower_[i] + active_tol;
        if (at_up && at_lo) continue;
        if (at_up) {
          const double r = std::min(v[i], 0.0);
          d2 += r * r;
        } else if (at_lo) {
          const double r = std::max(v[i], 0.0);
          d2 += r * r;
        } else {
          d2 += v[i] * v[i];
        }
      }
      return std::sqrt(d2);
    }
    case Kind::L1Ball: {
      if (x.lpNorm<1>() < radius_ - active_tol) return v.norm();  // interior
      // N = {s : s_i = c sign(x_i) on the support, |s_i| <= c off it, c >= 0}.
      // The squared distance is piecewise quadratic in c with breakpoints at
      // |v_i| over the zero pattern; scan the segments.
      std::vector<double> zero_abs;
      double sum_u = 0.0;  // sum over support of sign(x_i) v_i
      double sum_u2 = 0.0;
      Index n_supp = 0;
      for (Index i = 0; i < dim_; ++i) {
        if (std::abs(x[i]) > active_tol) {
          const double u = (x[i] > 0.0 ? v[i] : -v[i]);
          sum_u += u;
          sum_u2 += u * u;
          ++n_supp;
        } else {
          zero_abs.push_back(std::abs(v[i]));
        }
      }
      if (n_supp == 0) return 0.0;  // degenerate pattern: cone is all of R^n
      std::sort(zero_abs.begin(), zero_abs.end());
      const Index k = static_cast<Index>(zero_abs.size());
      // suffix sums over the zero pattern magnitudes
      std::vector<double> suf1(static_cast<size_t>(k) + 1, 0.0), suf2(static_cast<size_t>(k) + 1, 0.0);
      for (Index j = k - 1; j >= 0; --j) {
        suf1[static_cast<size_t>(j)] = suf1[static_cast<size_t>(j) + 1] + zero_abs[static_cast<size_t>(j)];
        suf2[static_cast<size_t>(j)] = suf2[static_cast<size_t>(j) + 1] +
                                       zero_abs[static_cast<size_t>(j)] * zero_abs[static_cast<size_t>(j)];
      }
      double best = std::numeric_limits<double>::infinity();
      for (Index j = 0; j <= k; ++j) {
        // segment: c in [z_j, z_{j+1}] (z_0 = 0, z_{k+1} = inf); zeros with
        // |v_i| > c are the suffix starting at j
        const double lo = (j == 0) ? 0.0 : zero_abs[static_cast<size_t>(j - 1)];
        const double hi = (j == k) ? std::numeric_limits<double>::infinity() : zero_abs[static_cast<size_t>(j)];
        const double cnt = static_cast<double>(n_supp + (k - j));
        const double lin = sum_u + suf1[static_cast<size_t>(j)];
        double c = lin / cnt;
        c = std::min(std::max(c, lo), hi);
        if (!std::isfinite(c)) c = lo;
        const double val = cnt * c * c - 2.0 * c * lin + sum_u2 + suf2[static_cast<size_t>(j)];
        best = std::min(best, val);
      }
      return std::sqrt(std::max(0.0, best));
    }
    case Kind::Polytope: {
      const std::vector<Index> act = active_rows(x, active_tol);
      if (act.empty()) return v.norm();
      Matrix C(dim_, static_cast<Index>(act.size()));
      for (Index k2 = 0; k2 < static_cast<Index>(act.size()); ++k2)
        C.col(k2) = A_.row(act[static_cast<size_t>(k2)]).transpose();
      return nnls(C, v, 1e-14).residual_norm;
    }
  }
  throw std::logic_error("unreachable");
}

double FeasibleSet::bounding_box_diameter() const {
  return (bbox_.upper - bbox_.lower).norm();
}

const Matrix& FeasibleSet::rows_A() const {
  if (!has_rows()) throw InputError("rows_A: no row description for this set");
  return A_;
}

const Vector& FeasibleSet::rows_b() const {
  if (!has_rows()) throw InputError("rows_b: no row description for this set");
  return b_;
}

std::vector<Index> FeasibleSet::active_rows(const Vector& x, double tol) const {
  if (!has_rows()) throw InputError("active_rows: no row description for this set");
  if (x.size() != dim_) throw InputError("active_rows: dimension mismatch");
  std::vector<Index> out;
  const Vector slack = A_ * x - b_;
  for (Index j = 0; j < A_.rows(); ++j)
    if (std::abs(slack[j]) <= tol) out.push_back(j);
  return out;
}

double FeasibleSet::l1_radius() const {
  if (kind_ != Kind::L1Ball) throw InputError("l1_radius: not an l1 ball");
  return radius_;
}

const Vector& FeasibleSet::box_lower() const {
  if (kind_ != Kind::Box) throw InputError("box_lower: not a box");
  return lower_;
}

const Vector& FeasibleSet::box_upper() const {
  if (kind_ != Kind::Box) throw InputError("box_upper: not a box");
  return upper_;
}

}  // namespace imela
