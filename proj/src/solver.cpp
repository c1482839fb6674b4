#include "pgas/solver.hpp"

#include "pgas/errors.hpp"
#include "pgas/format.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace pgas {

namespace {

Eigen::Index at(std::size_t i) { return static_cast<Eigen::Index>(i); }

bool on_nonsmooth_point(const Regularizer& reg, std::size_t i, double x) {
  const auto pts = reg.nonsmooth_points(i);
  return std::find(pts.begin(), pts.end(), x) != pts.end();
}

}  // namespace

AlphaRule AlphaRule::parse(const std::string& text) {
  if (text == "inv-l" || text == "inv-L" || text == "1/L") return inverse_l();
  if (text == "optimal") return optimal();
  if (text.size() > 2 && (text.ends_with("/L") || text.ends_with("/l"))) {
    const double c = parse_double(text.substr(0, text.size() - 2));
    if (!(c > 0.0) || !std::isfinite(c))
      throw ConfigError("alpha multiplier must be positive: " + text);
    return scaled(c);
  }
  double a = 0.0;
  try {
    a = parse_double(text);
  } catch (const SchemaError&) {
    throw ConfigError("unrecognised alpha rule '" + text +
                      "' (expected inv-l, optimal, <c>/L or a number)");
  }
  if (!(a > 0.0) || !std::isfinite(a))
    throw ConfigError("alpha must be positive: " + text);
  return explicit_value(a);
}

double AlphaRule::resolve(const SpectralBounds& bounds) const {
  switch (kind_) {
    case Kind::InverseL: return 1.0 / bounds.L;
    case Kind::Optimal: return 2.0 / (bounds.L + bounds.mu);
    case Kind::ScaledInverseL: return value_ / bounds.L;
    case Kind::Explicit: return value_;
  }
  return 0.0;
}

std::string AlphaRule::label() const {
  switch (kind_) {
    case Kind::InverseL: return "inv-l";
    case Kind::Optimal: return "optimal";
    case Kind::ScaledInverseL: return format_double(value_) + "/L";
    case Kind::Explicit: return format_double(value_);
  }
  return "";
}

Vector pg_step(const SmoothObjective& obj, const Regularizer& reg,
               const Vector& x, double alpha) {
  if (!(alpha > 0.0)) throw ConfigError("pg_step: alpha must be positive");
  if (obj.dimension() != reg.dimension())
    throw DimensionError("objective and regularizer dimensions differ");
  return reg.prox(x - alpha * obj.grad(x), alpha);
}

SolveTrace solve(const SmoothObjective& obj, const Regularizer& reg,
                 const Vector& x0, const SolverConfig& config,
                 const SpectralBounds& bounds,
                 const std::optional<Reference>& reference) {
  const std::size_t n = obj.dimension();
  if (reg.dimension() != n)
    throw DimensionError("objective and regularizer dimensions differ");
  if (static_cast<std::size_t>(x0.size()) != n)
    throw DimensionError("x0 length does not match the problem dimension");
  if (config.max_iter == 0) throw ConfigError("max_iter must be positive");
  if (!(config.fixed_point_tol > 0.0))
    throw ConfigError("fixed_point_tol must be positive");

  const double alpha = config.alpha.resolve(bounds);
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw ConfigError("resolved step size is not positive");
  if (alpha >= 2.0 / bounds.L && !config.allow_large_step)
    throw ConfigError("step size " + format_double(alpha) +
                      " >= 2/L: no contraction guarantee (override required)");

  std::vector<char> in_z(n, 0);
  if (reference) {
    if (static_cast<std::size_t>(reference->x_star.size()) != n)
      throw DimensionError("reference x* has the wrong length");
    for (std::size_t i : reference->active) {
      if (i >= n) throw IndexError("reference active index out of range");
      in_z[i] = 1;
    }
  }

  SolveTrace trace;
  trace.alpha = alpha;
  trace.has_reference = reference.has_value();

  auto record = [&](std::size_t k, const Vector& x) {
    if (!config.record_trace) return;
    TraceRow row;
    row.k = k;
    row.objective = obj.eval(x) + reg.eval(x);
    if (reference) {
      row.dist_to_ref = (x - reference->x_star).norm();
      row.active_match = true;
      for (std::size_t i : reference->active)
        if (x[at(i)] != reference->x_star[at(i)]) {
          row.active_match = false;
          break;
        }
      for (std::size_t i = 0; i < n; ++i)
        if (!in_z[i] && on_nonsmooth_point(reg, i, x[at(i)])) {
          row.free_on_kink = true;
          break;
        }
    } else {
      row.dist_to_ref = std::numeric_limits<double>::quiet_NaN();
    }
    trace.rows.push_back(row);
    if (config.keep_iterates) trace.iterates.push_back(x);
  };

  Vector x = x0;
  record(0, x);
  trace.termination = Termination::MaxIter;
  trace.iterations_run = config.max_iter;
  for (std::size_t k = 0; k < config.max_iter; ++k) {
    Vector next = pg_step(obj, reg, x, alpha);
    const double residual = (next - x).lpNorm<Eigen::Infinity>();
    x = std::move(next);
    record(k + 1, x);
    if (residual <= config.fixed_point_tol) {
      trace.termination = Termination::FixedPoint;
      trace.iterations_run = k + 1;
      break;
    }
  }
  trace.final_x = std::move(x);
  return trace;
}

Vector polish_solution(const SmoothObjective& obj, const Regularizer& reg,
                       const Vector& x_approx, double stationarity_tol) {
  const std::size_t n = obj.dimension();
  if (reg.dimension() != n || static_cast<std::size_t>(x_approx.size()) != n)
    throw DimensionError("polish: dimension mismatch");

  std::vector<Eigen::Index> free_idx;
  std::vector<Eigen::Index> pinned_idx;
  Vector smooth_slope = Vector::Zero(at(n));
  for (std::size_t i = 0; i < n; ++i) {
    const SubdiffInterval sd = reg.subdiff_interval(i, x_approx[at(i)]);
    if (sd.singleton) {
      free_idx.push_back(at(i));
      smooth_slope[at(i)] = sd.lower;
    } else {
      pinned_idx.push_back(at(i));
    }
  }

  const Matrix H = obj.hessian();
  const Vector h = obj.linear_term();
  Vector x = x_approx;
  if (!free_idx.empty()) {
    const auto m = static_cast<Eigen::Index>(free_idx.size());
    Matrix h_ss(m, m);
    Vector rhs(m);
    for (Eigen::Index a = 0; a < m; ++a) {
      const Eigen::Index i = free_idx[static_cast<std::size_t>(a)];
      double r = h[i] - smooth_slope[i];
      for (Eigen::Index p : pinned_idx) r -= H(i, p) * x_approx[p];
      rhs[a] = r;
      for (Eigen::Index b = 0; b < m; ++b)
        h_ss(a, b) = H(i, free_idx[static_cast<std::size_t>(b)]);
    }
    Eigen::LLT<Matrix> llt(h_ss);
    if (llt.info() != Eigen::Success)
      throw OptimalityError("polish: reduced Hessian is not positive definite");
    const Vector xs = llt.solve(rhs);
    for (Eigen::Index a = 0; a < m; ++a)
      x[free_idx[static_cast<std::size_t>(a)]] = xs[a];
  }

  // First-order check with nonstrict inequalities.
  const Vector g = obj.grad(x);
  const double scale =
      std::max({1.0, h.lpNorm<Eigen::Infinity>(),
                (H * x).lpNorm<Eigen::Infinity>()});
  const double tol = stationarity_tol * scale;
  for (Eigen::Index i : free_idx) {
    const auto ui = static_cast<std::size_t>(i);
    if (!reg.in_domain(ui, x[i]))
      throw OptimalityError("polish: free coordinate " + std::to_string(i) +
                            " left the domain");
    const SubdiffInterval sd = reg.subdiff_interval(ui, x[i]);
    if (!sd.singleton || sd.lower != smooth_slope[i])
      throw OptimalityError("polish: free coordinate " + std::to_string(i) +
                            " changed its smooth piece");
    if (!(std::abs(g[i] + smooth_slope[i]) <= tol))
      throw OptimalityError("polish: stationarity residual too large at " +
                            std::to_string(i));
  }
  for (Eigen::Index i : pinned_idx) {
    const SubdiffInterval sd =
        reg.subdiff_interval(static_cast<std::size_t>(i), x[i]);
    if (!sd.closure_contains(-g[i], tol))
      throw OptimalityError("polish: -grad_" + std::to_string(i) +
                            " f lies outside the subdifferential");
  }
  return x;
}

void write_trace_csv(const SolveTrace& trace, std::ostream& os) {
  os << "k,dist_to_ref,active_match,objective\n";
  for (const TraceRow& r : trace.rows) {
    os << r.k << ',';
    if (trace.has_reference) os << format_double(r.dist_to_ref);
    os << ',';
    if (trace.has_reference) os << (r.active_match ? 1 : 0);
    os << ',' << format_double(r.objective) << '\n';
  }
}

}  // namespace pgas
