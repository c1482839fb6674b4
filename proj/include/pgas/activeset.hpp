#pragma once

#include "pgas/regularizers.hpp"
#include "pgas/smooth.hpp"
#include "pgas/solver.hpp"
#include "pgas/types.hpp"

#include <optional>
#include <vector>

namespace pgas {

/// Indices i whose subdifferential at x*_i is not a singleton.
IndexSet detect_active_set(const Regularizer& reg, const Vector& x_star);

struct DeltaResult {
  double delta = kInf;          // +inf when Z is empty
  std::vector<double> margins;  // aligned with Z
};

/// delta = min over Z of min(-grad_i f(x*) - l_i, u_i + grad_i f(x*)), using
/// the open-interval endpoints. Infinite endpoints contribute +inf.
DeltaResult compute_delta(const SmoothObjective& obj, const Regularizer& reg,
                          const Vector& x_star, const IndexSet& active);

struct ActiveSetReport {
  IndexSet active;
  bool nondegenerate = false;
  std::vector<double> margins;
  double delta = kInf;
  /// min over i outside Z of the distance from x*_i to its nearest nonsmooth
  /// value; +inf when there is none.
  double delta_cap = kInf;
  /// max over i outside Z of |grad_i f(x*) + g_i'(x*_i)|.
  double smooth_residual = 0.0;
};

inline constexpr double kDefaultStationarityTol = 1e-8;

ActiveSetReport check_nondegeneracy(
    const SmoothObjective& obj, const Regularizer& reg, const Vector& x_star,
    double stationarity_tol = kDefaultStationarityTol);

/// max(|1 - alpha L|, |1 - alpha mu|).
double q_factor(double alpha, double L, double mu);

/// (L/mu) ln(2 L dist0 / delta), clamped at 0. Step size 1/L.
double bound_cor1(double L, double mu, double dist0, double delta);

/// ln(3 dist0 / (delta alpha)) / ln(1 / Q(alpha)), clamped at 0.
double bound_cor2(double L, double mu, double alpha, double dist0,
                  double delta);

/// (L/mu) ln(dist0 / Delta), clamped at 0: after this many 1/L steps no
/// coordinate outside Z can sit on a nonsmooth value.
double bound_delta_cap(double L, double mu, double dist0, double delta_cap);

/// Distance to x* below which the next 1/L step matches x* on Z: delta/(2L).
double identification_radius_inv_l(double L, double delta);
/// Same for a general step 0 < alpha < 2/L: delta alpha / 3.
double identification_radius(double alpha, double delta);

struct Identification {
  /// Smallest recorded k from which active_match holds on every later row.
  std::optional<std::size_t> first_match;
  /// Smallest recorded k with dist_to_ref <= radius.
  std::optional<std::size_t> threshold_cross;
};

/// Throws ConfigError when the trace has no reference annotations.
Identification detect_identification(const SolveTrace& trace, double radius);

struct BoundReport {
  double alpha = 0.0;
  double q = 0.0;
  double delta = kInf;
  double delta_cap = kInf;
  double dist0 = 0.0;
  double bound_cor1 = 0.0;   // +inf when delta <= 0
  double bound_cor2 = 0.0;   // +inf when delta <= 0
  double bound_delta = 0.0;  // +inf when delta_cap <= 0
  std::optional<std::size_t> k_identified;
  std::optional<std::size_t> k_threshold;
};

/// Evaluates every bound for one (instance, alpha) without throwing on
/// degenerate margins.
BoundReport make_bound_report(const ActiveSetReport& report,
                              const SpectralBounds& bounds, double alpha,
                              double dist0);

}  // namespace pgas
