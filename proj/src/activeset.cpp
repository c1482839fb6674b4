#include "pgas/activeset.hpp"

#include "pgas/errors.hpp"
#include "pgas/format.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pgas {

namespace {

Eigen::Index at(std::size_t i) { return static_cast<Eigen::Index>(i); }

void check_spectrum(double L, double mu) {
  if (!(mu > 0.0) || !(L >= mu) || !std::isfinite(L))
    throw ConfigError("require 0 < mu <= L (got L=" + format_double(L) +
                      ", mu=" + format_double(mu) + ")");
}

double clamped_log(double arg) { return arg > 1.0 ? std::log(arg) : 0.0; }

}  // namespace

IndexSet detect_active_set(const Regularizer& reg, const Vector& x_star) {
  if (static_cast<std::size_t>(x_star.size()) != reg.dimension())
    throw DimensionError("detect_active_set: dimension mismatch");
  IndexSet z;
  for (std::size_t i = 0; i < reg.dimension(); ++i)
    if (!reg.subdiff_interval(i, x_star[at(i)]).singleton) z.push_back(i);
  return z;
}

DeltaResult compute_delta(const SmoothObjective& obj, const Regularizer& reg,
                          const Vector& x_star, const IndexSet& active) {
  const Vector g = obj.grad(x_star);
  DeltaResult out;
  out.margins.reserve(active.size());
  for (std::size_t i : active) {
    const SubdiffInterval sd = reg.subdiff_interval(i, x_star[at(i)]);
    if (sd.singleton)
      throw ConfigError("coordinate " + std::to_string(i) +
                        " is not active at x*");
    const double gi = g[at(i)];
    // gi is finite, so neither difference can be inf - inf.
    const double from_lower = -gi - sd.lower;
    const double to_upper = sd.upper + gi;
    const double margin = std::min(from_lower, to_upper);
    out.margins.push_back(margin);
    out.delta = std::min(out.delta, margin);
  }
  return out;
}

ActiveSetReport check_nondegeneracy(const SmoothObjective& obj,
                                    const Regularizer& reg,
                                    const Vector& x_star,
                                    double stationarity_tol) {
  if (obj.dimension() != reg.dimension())
    throw DimensionError("objective and regularizer dimensions differ");
  ActiveSetReport r;
  r.active = detect_active_set(reg, x_star);
  const DeltaResult d = compute_delta(obj, reg, x_star, r.active);
  r.delta = d.delta;
  r.margins = d.margins;

  const Vector g = obj.grad(x_star);
  std::vector<char> in_z(reg.dimension(), 0);
  for (std::size_t i : r.active) in_z[i] = 1;
  for (std::size_t i = 0; i < reg.dimension(); ++i) {
    if (in_z[i]) continue;
    const double xi = x_star[at(i)];
    const SubdiffInterval sd = reg.subdiff_interval(i, xi);
    r.smooth_residual = std::max(r.smooth_residual, std::abs(g[at(i)] + sd.lower));
    r.delta_cap = std::min(r.delta_cap, reg.nearest_nonsmooth_distance(i, xi));
  }
  r.nondegenerate = r.delta > 0.0 && r.smooth_residual <= stationarity_tol;
  return r;
}

double q_factor(double alpha, double L, double mu) {
  check_spectrum(L, mu);
  if (!(alpha > 0.0)) throw ConfigError("q_factor: alpha must be positive");
  return std::max(std::abs(1.0 - alpha * L), std::abs(1.0 - alpha * mu));
}

double bound_cor1(double L, double mu, double dist0, double delta) {
  check_spectrum(L, mu);
  if (!(delta > 0.0))
    throw DegenerateError("bound_cor1: delta must be positive (degenerate)");
  if (!(dist0 >= 0.0)) throw ConfigError("bound_cor1: dist0 must be >= 0");
  return (L / mu) * clamped_log(2.0 * L * dist0 / delta);
}

double bound_cor2(double L, double mu, double alpha, double dist0,
                  double delta) {
  check_spectrum(L, mu);
  if (!(alpha > 0.0 && alpha < 2.0 / L))
    throw ConfigError("bound_cor2: alpha must lie in (0, 2/L)");
  if (!(delta > 0.0))
    throw DegenerateError("bound_cor2: delta must be positive (degenerate)");
  if (!(dist0 >= 0.0)) throw ConfigError("bound_cor2: dist0 must be >= 0");
  const double num = clamped_log(3.0 * dist0 / (delta * alpha));
  if (num == 0.0) return 0.0;
  const double q = q_factor(alpha, L, mu);
  // Q = 0 means one step lands on x*.
  if (q == 0.0) return 0.0;
  return num / std::log(1.0 / q);
}

double bound_delta_cap(double L, double mu, double dist0, double delta_cap) {
  check_spectrum(L, mu);
  if (!(delta_cap > 0.0))
    throw DegenerateError(
        "bound_delta_cap: a free coordinate sits on a nonsmooth value at x*");
  if (!(dist0 >= 0.0)) throw ConfigError("bound_delta_cap: dist0 must be >= 0");
  return (L / mu) * clamped_log(dist0 / delta_cap);
}

double identification_radius_inv_l(double L, double delta) {
  return delta / (2.0 * L);
}

double identification_radius(double alpha, double delta) {
  return delta * alpha / 3.0;
}

Identification detect_identification(const SolveTrace& trace, double radius) {
  if (!trace.has_reference)
    throw ConfigError("detect_identification: trace has no reference x*");
  Identification id;
  const auto& rows = trace.rows;
  if (rows.empty()) return id;
  std::size_t start = rows.size();
  while (start > 0 && rows[start - 1].active_match) --start;
  if (start < rows.size()) id.first_match = rows[start].k;
  for (const TraceRow& r : rows)
    if (r.dist_to_ref <= radius) {
      id.threshold_cross = r.k;
      break;
    }
  return id;
}

BoundReport make_bound_report(const ActiveSetReport& report,
                              const SpectralBounds& bounds, double alpha,
                              double dist0) {
  BoundReport b;
  b.alpha = alpha;
  b.q = q_factor(alpha, bounds.L, bounds.mu);
  b.delta = report.delta;
  b.delta_cap = report.delta_cap;
  b.dist0 = dist0;
  if (report.delta > 0.0) {
    b.bound_cor1 = bound_cor1(bounds.L, bounds.mu, dist0, report.delta);
    b.bound_cor2 = alpha < 2.0 / bounds.L
                       ? bound_cor2(bounds.L, bounds.mu, alpha, dist0,
                                    report.delta)
                       : kInf;
  } else {
    b.bound_cor1 = kInf;
    b.bound_cor2 = kInf;
  }
  b.bound_delta = report.delta_cap > 0.0
                      ? bound_delta_cap(bounds.L, bounds.mu, dist0,
                                        report.delta_cap)
                      : kInf;
  return b;
}

}  // namespace pgas
