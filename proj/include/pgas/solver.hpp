#pragma once

#include "pgas/regularizers.hpp"
#include "pgas/smooth.hpp"
#include "pgas/types.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pgas {

/// How the constant step-size is chosen once (L, mu) are known.
class AlphaRule {
 public:
  enum class Kind { InverseL, Optimal, ScaledInverseL, Explicit };

  static AlphaRule inverse_l() { return {Kind::InverseL, 1.0}; }
  /// 2 / (L + mu), which minimizes the contraction factor.
  static AlphaRule optimal() { return {Kind::Optimal, 0.0}; }
  /// c / L.
  static AlphaRule scaled(double c) { return {Kind::ScaledInverseL, c}; }
  static AlphaRule explicit_value(double alpha) { return {Kind::Explicit, alpha}; }

  /// Accepts "inv-l", "optimal", "<c>/L" and plain decimals.
  static AlphaRule parse(const std::string& text);

  Kind kind() const { return kind_; }
  double value() const { return value_; }
  double resolve(const SpectralBounds& bounds) const;
  /// Canonical text accepted by parse().
  std::string label() const;

 private:
  AlphaRule(Kind kind, double value) : kind_(kind), value_(value) {}
  Kind kind_;
  double value_;
};

struct SolverConfig {
  AlphaRule alpha = AlphaRule::inverse_l();
  std::size_t max_iter = 100000;
  double fixed_point_tol = 1e-12;  // on ||x - pg_step(x)||_inf
  bool record_trace = true;
  bool keep_iterates = false;
  /// Permit alpha >= 2/L, where no contraction is guaranteed.
  bool allow_large_step = false;
};

/// Known solution and its active set, used to annotate the trace.
struct Reference {
  Vector x_star;
  IndexSet active;
};

struct TraceRow {
  std::size_t k = 0;
  double dist_to_ref = 0.0;   // NaN without a reference
  bool active_match = false;  // x_i^k == x_i^* bit-exactly for every i in Z
  bool free_on_kink = false;  // some i outside Z sits on a nonsmooth value
  double objective = 0.0;     // f + g, +inf when infeasible
};

enum class Termination { FixedPoint, MaxIter };

struct SolveTrace {
  std::vector<TraceRow> rows;
  std::vector<Vector> iterates;  // only with keep_iterates
  Vector final_x;
  std::size_t iterations_run = 0;
  Termination termination = Termination::MaxIter;
  double alpha = 0.0;
  bool has_reference = false;
};

/// prox_{alpha g}(x - alpha grad f(x)).
Vector pg_step(const SmoothObjective& obj, const Regularizer& reg,
               const Vector& x, double alpha);

/// Constant-step proximal gradient from x0. Stops when the fixed-point
/// residual drops to config.fixed_point_tol or after config.max_iter steps.
SolveTrace solve(const SmoothObjective& obj, const Regularizer& reg,
                 const Vector& x0, const SolverConfig& config,
                 const SpectralBounds& bounds,
                 const std::optional<Reference>& reference = std::nullopt);

/// Pins coordinates that sit on a kink or bound in x_approx and solves the
/// reduced linear optimality system for the rest. Throws OptimalityError when
/// the resulting point fails the first-order check, which means x_approx did
/// not carry the optimal pattern yet.
Vector polish_solution(const SmoothObjective& obj, const Regularizer& reg,
                       const Vector& x_approx, double stationarity_tol = 1e-8);

/// Header "k,dist_to_ref,active_match,objective"; reals in shortest
/// round-trip form.
void write_trace_csv(const SolveTrace& trace, std::ostream& os);

}  // namespace pgas
