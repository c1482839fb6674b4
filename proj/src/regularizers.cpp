#include "pgas/regularizers.hpp"

#include "pgas/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace pgas {

bool SubdiffInterval::interior_contains(double v) const {
  if (singleton) return v == lower;
  return lower < v && v < upper;
}

bool SubdiffInterval::closure_contains(double v, double tol) const {
  return lower - tol <= v && v <= upper + tol;
}

Regularizer::Regularizer(Kind kind, std::size_t n, double lambda, Vector lo,
                         Vector hi)
    : kind_(kind), n_(n), lambda_(lambda), lo_(std::move(lo)),
      hi_(std::move(hi)) {
  if (n_ == 0) throw ConfigError("regularizer dimension must be positive");
}

Regularizer Regularizer::zero(std::size_t n) {
  return Regularizer(Kind::Zero, n, 0.0, Vector(), Vector());
}

Regularizer Regularizer::l1(std::size_t n, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw ConfigError("l1 regularizer requires a finite lambda > 0");
  return Regularizer(Kind::L1, n, lambda, Vector(), Vector());
}

Regularizer Regularizer::nonnegative(std::size_t n) {
  return Regularizer(Kind::NonNegative, n, 0.0, Vector(), Vector());
}

Regularizer Regularizer::box(Vector lo, Vector hi) {
  if (lo.size() != hi.size())
    throw DimensionError("box bounds have different lengths");
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (std::isnan(lo[i]) || std::isnan(hi[i]) || !(lo[i] < hi[i]))
      throw ConfigError("box requires lo < hi at coordinate " +
                        std::to_string(i));
    if (lo[i] == kInf || hi[i] == -kInf)
      throw ConfigError("box bound at coordinate " + std::to_string(i) +
                        " leaves an empty domain");
  }
  const auto n = static_cast<std::size_t>(lo.size());
  return Regularizer(Kind::Box, n, 0.0, std::move(lo), std::move(hi));
}

std::string_view Regularizer::kind_name() const {
  switch (kind_) {
    case Kind::Zero: return "zero";
    case Kind::L1: return "l1";
    case Kind::NonNegative: return "nonneg";
    case Kind::Box: return "box";
  }
  return "unknown";
}

void Regularizer::check_index(std::size_t i) const {
  if (i >= n_)
    throw IndexError("coordinate " + std::to_string(i) +
                     " out of range for dimension " + std::to_string(n_));
}

bool Regularizer::in_domain(std::size_t i, double x) const {
  check_index(i);
  if (std::isnan(x)) return false;
  switch (kind_) {
    case Kind::Zero:
    case Kind::L1: return std::isfinite(x);
    case Kind::NonNegative: return std::isfinite(x) && x >= 0.0;
    case Kind::Box: return std::isfinite(x) && lo_[i] <= x && x <= hi_[i];
  }
  return false;
}

double Regularizer::prox_coord(std::size_t i, double z, double alpha) const {
  check_index(i);
  if (!(alpha > 0.0)) throw ConfigError("prox step alpha must be positive");
  switch (kind_) {
    case Kind::Zero: return z;
    case Kind::L1: {
      const double t = alpha * lambda_;
      if (std::abs(z) <= t) return 0.0;
      return z > 0.0 ? z - t : z + t;
    }
    case Kind::NonNegative: return z > 0.0 ? z : 0.0;
    case Kind::Box: return std::clamp(z, lo_[i], hi_[i]);
  }
  return z;
}

Vector Regularizer::prox(const Vector& z, double alpha) const {
  if (static_cast<std::size_t>(z.size()) != n_)
    throw DimensionError("prox: expected length " + std::to_string(n_) +
                         ", got " + std::to_string(z.size()));
  Vector out(z.size());
  for (std::size_t i = 0; i < n_; ++i)
    out[static_cast<Eigen::Index>(i)] =
        prox_coord(i, z[static_cast<Eigen::Index>(i)], alpha);
  return out;
}

SubdiffInterval Regularizer::subdiff_interval(std::size_t i, double x) const {
  if (!in_domain(i, x))
    throw DomainError("subdifferential requested outside dom(g_" +
                      std::to_string(i) + ")");
  switch (kind_) {
    case Kind::Zero: return SubdiffInterval::point(0.0);
    case Kind::L1:
      if (x == 0.0) return SubdiffInterval::open(-lambda_, lambda_);
      return SubdiffInterval::point(x > 0.0 ? lambda_ : -lambda_);
    case Kind::NonNegative:
      if (x == 0.0) return SubdiffInterval::open(-kInf, 0.0);
      return SubdiffInterval::point(0.0);
    case Kind::Box:
      if (x == lo_[i]) return SubdiffInterval::open(-kInf, 0.0);
      if (x == hi_[i]) return SubdiffInterval::open(0.0, kInf);
      return SubdiffInterval::point(0.0);
  }
  return SubdiffInterval::point(0.0);
}

std::vector<double> Regularizer::nonsmooth_points(std::size_t i) const {
  check_index(i);
  switch (kind_) {
    case Kind::Zero: return {};
    case Kind::L1:
    case Kind::NonNegative: return {0.0};
    case Kind::Box: {
      std::vector<double> pts;
      if (std::isfinite(lo_[i])) pts.push_back(lo_[i]);
      if (std::isfinite(hi_[i])) pts.push_back(hi_[i]);
      return pts;
    }
  }
  return {};
}

double Regularizer::nearest_nonsmooth_distance(std::size_t i, double x) const {
  if (!in_domain(i, x))
    throw DomainError("distance requested outside dom(g_" + std::to_string(i) +
                      ")");
  double best = kInf;
  for (double p : nonsmooth_points(i)) best = std::min(best, std::abs(x - p));
  return best;
}

double Regularizer::eval(const Vector& x) const {
  if (static_cast<std::size_t>(x.size()) != n_)
    throw DimensionError("eval_g: expected length " + std::to_string(n_));
  switch (kind_) {
    case Kind::Zero: return 0.0;
    case Kind::L1: return lambda_ * x.lpNorm<1>();
    case Kind::NonNegative:
    case Kind::Box:
      for (std::size_t i = 0; i < n_; ++i)
        if (!in_domain(i, x[static_cast<Eigen::Index>(i)])) return kInf;
      return 0.0;
  }
  return 0.0;
}

}  // namespace pgas
