#pragma once

#include "pgas/types.hpp"

#include <string_view>

namespace pgas {

/// Subdifferential of a scalar convex g_i at a point.
///
/// At a smooth point `singleton` is set and lower == upper == g_i'(x). At a
/// nonsmooth point (a kink or an active bound) the pair (lower, upper) is the
/// OPEN interior of the interval; either end may be infinite.
struct SubdiffInterval {
  double lower = 0.0;
  double upper = 0.0;
  bool singleton = true;

  static SubdiffInterval point(double v) { return {v, v, true}; }
  static SubdiffInterval open(double lo, double hi) { return {lo, hi, false}; }

  bool interior_contains(double v) const;
  bool closure_contains(double v, double tol = 0.0) const;
};

/// Separable g(x) = sum_i g_i(x_i) with closed-form coordinate proxes.
///
/// Values are immutable after construction.
class Regularizer {
 public:
  enum class Kind { Zero, L1, NonNegative, Box };

  static Regularizer zero(std::size_t n);
  static Regularizer l1(std::size_t n, double lambda);
  static Regularizer nonnegative(std::size_t n);
  /// Requires lo_i < hi_i for every i; bounds may be infinite.
  static Regularizer box(Vector lo, Vector hi);

  Kind kind() const { return kind_; }
  std::string_view kind_name() const;
  std::size_t dimension() const { return n_; }
  double lambda() const { return lambda_; }
  const Vector& lower_bounds() const { return lo_; }
  const Vector& upper_bounds() const { return hi_; }

  bool in_domain(std::size_t i, double x) const;

  /// argmin_y 1/2 (y - z)^2 + alpha g_i(y). Kinks and bounds are returned
  /// bit-exactly when they are the minimizer.
  double prox_coord(std::size_t i, double z, double alpha) const;
  Vector prox(const Vector& z, double alpha) const;

  /// Throws DomainError when x is outside dom(g_i).
  SubdiffInterval subdiff_interval(std::size_t i, double x) const;

  /// Distance from x to the closest point where g_i is nonsmooth (kinks and
  /// finite bounds); +inf if g_i is smooth everywhere.
  double nearest_nonsmooth_distance(std::size_t i, double x) const;

  /// Points of dom(g_i) where g_i is not differentiable, ascending.
  std::vector<double> nonsmooth_points(std::size_t i) const;

  /// Sum of g_i(x_i); +inf when x is infeasible for an indicator.
  double eval(const Vector& x) const;

 private:
  Regularizer(Kind kind, std::size_t n, double lambda, Vector lo, Vector hi);
  void check_index(std::size_t i) const;

  Kind kind_;
  std::size_t n_;
  double lambda_;
  Vector lo_;
  Vector hi_;
};

}  // namespace pgas
