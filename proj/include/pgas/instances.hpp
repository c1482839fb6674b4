#pragma once

#include "pgas/regularizers.hpp"
#include "pgas/smooth.hpp"
#include "pgas/types.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace pgas {

struct GroundTruth {
  Vector x_star;
  IndexSet active;
  double delta = kInf;
};

struct ProblemInstance {
  SmoothObjective objective;
  Regularizer regularizer;
  Vector x0;
  std::uint64_t seed = 0;
  std::optional<GroundTruth> ground_truth;
};

struct GeneratorOptions {
  /// Smallest Hessian eigenvalue; the largest is mu0 * cond_target.
  double mu0 = 1.0;
  /// x0 is drawn uniformly on the sphere of radius factor * ||x*|| around x*
  /// (factor * 1 when x* = 0).
  double x0_radius_factor = 10.0;
};

/// LASSO-type instance f(x) = 1/2 x'Qx - b'x, g = lambda ||x||_1 with a
/// planted solution of exactly nnz nonzeros. Every zero coordinate satisfies
/// |grad_i f(x*)| <= lambda - delta_target with equality on at least one, so
/// the margin is delta_target. delta_target = 0 yields a degenerate instance.
ProblemInstance generate_l1(std::size_t n, std::size_t nnz, double lambda,
                            double delta_target, double cond_target,
                            std::uint64_t seed,
                            const GeneratorOptions& options = {});

/// Non-negativity constrained instance: the first-order multipliers
/// grad_i f(x*) on the n_active_at_zero zero coordinates lie in
/// [delta_target, delta_target + 1] with one attaining delta_target.
ProblemInstance generate_nonneg(std::size_t n, std::size_t n_active_at_zero,
                                double delta_target, double cond_target,
                                std::uint64_t seed,
                                const GeneratorOptions& options = {});

/// Instance JSON, schema version 1.
std::string instance_to_json(const ProblemInstance& inst);
ProblemInstance instance_from_json(const std::string& text);

void save_instance(const ProblemInstance& inst,
                   const std::filesystem::path& path);
ProblemInstance load_instance(const std::filesystem::path& path);

}  // namespace pgas
