#pragma once

#include <optional>
#include <vector>

#include "imela/types.hpp"

namespace imela {

/// Default tolerance deciding which constraints count as active in normal
/// cone and active set queries.
inline constexpr double kActiveTol = 1e-9;

struct BoxBounds {
  Vector lower;
  Vector upper;
};

/// Closed convex feasible set X with exact projection. Three shapes are
/// supported:
///   Box        {l <= x <= u}
///   L1Ball     {||x||_1 <= r}
///   Polytope   {A x <= b}, required bounded and non-empty
class FeasibleSet {
 public:
  enum class Kind { Box, L1Ball, Polytope };

  /// Dimension zero placeholder; fill in via the factories before use.
  FeasibleSet() = default;

  static FeasibleSet box(Vector lower, Vector upper);
  static FeasibleSet l1_ball(Index dim, double radius);
  /// Checks boundedness (conic hull of the rows must span R^n) and
  /// non-emptiness at construction; throws InputError otherwise.
  static FeasibleSet polytope(Matrix A, Vector b);

  Kind kind() const { return kind_; }
  Index dimension() const { return dim_; }

  /// Euclidean projection onto the set.
  ///   Box:      componentwise clamp
  ///   L1Ball:   sort based exact thresholding
  ///   Polytope: dual active set QP, Dykstra polish as fallback
  Vector project(const Vector& v) const;

  /// max constraint violation; <= 0 means member (exact arithmetic).
  double violation(const Vector& x) const;
  bool contains(const Vector& x, double tol = kActiveTol) const { return violation(x) <= tol; }

  /// Distance from v to the normal cone N_X(x). x must lie in the set up to
  /// active_tol; points within active_tol of the boundary are treated as
  /// boundary points.
  double normal_cone_distance(const Vector& x, const Vector& v, double active_tol = kActiveTol) const;

  /// Axis-aligned box containing the set. Exact for Box and L1Ball; for
  /// polytopes exact when vertex enumeration is tractable, otherwise an
  /// inflated probe estimate.
  const BoxBounds& bounding_box() const { return bbox_; }

  /// sqrt(sum (u_i - l_i)^2) of the bounding box; upper bound on the set
  /// diameter for Box, exact-ish reference elsewhere.
  double bounding_box_diameter() const;

  /// Explicit inequality description A x <= b. Available for Box (rows
  /// 0..n-1: x_i <= u_i, rows n..2n-1: -x_i <= -l_i) and Polytope.
  bool has_rows() const { return kind_ != Kind::L1Ball; }
  const Matrix& rows_A() const;
  const Vector& rows_b() const;

  /// Indices of rows active at x within tol (Box and Polytope only).
  std::vector<Index> active_rows(const Vector& x, double tol = kActiveTol) const;

  double l1_radius() const;
  const Vector& box_lower() const;
  const Vector& box_upper() const;

  /// A point in the set (interior-ish for polytopes).
  const Vector& some_point() const { return inner_point_; }

  /// Polytope vertices when enumeration was tractable at construction.
  const std::optional<std::vector<Vector>>& vertices() const { return vertices_; }

 private:
  Kind kind_ = Kind::Box;
  Index dim_ = 0;
  Vector lower_, upper_;   // Box
  double radius_ = 0.0;    // L1Ball
  Matrix A_;               // Polytope rows (also caches Box rows)
  Vector b_;
  BoxBounds bbox_;
  Vector inner_point_;
  std::optional<std::vector<Vector>> vertices_;

  void build_box_rows();
};

/// Exact projection onto {||x||_1 <= r} by sorting |v| and thresholding.
Vector project_l1_ball(const Vector& v, double r);

}  // namespace imela
