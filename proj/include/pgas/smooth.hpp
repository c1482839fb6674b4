#pragma once

#include "pgas/types.hpp"

#include <cstdint>
#include <string_view>

namespace pgas {

/// Strongly convex quadratic f, in one of two storage forms:
///   quadratic:  f(x) = 1/2 x'Qx - b'x + c
///   ridge_ls:   f(x) = 1/2 ||Ax - y||^2 + mu0/2 ||x||^2
class SmoothObjective {
 public:
  enum class Form { Quadratic, RidgeLeastSquares };

  /// Q must be symmetric to 1e-12 (relative to max|Q_ij|); it is stored
  /// exactly symmetrized.
  static SmoothObjective quadratic(Matrix Q, Vector b, double c = 0.0);
  static SmoothObjective ridge_least_squares(Matrix A, Vector y, double mu0);

  Form form() const { return form_; }
  std::string_view form_name() const;
  std::size_t dimension() const { return static_cast<std::size_t>(n_); }

  double eval(const Vector& x) const;
  Vector grad(const Vector& x) const;
  Vector hess_matvec(const Vector& v) const;

  /// Dense Hessian (Q, or A'A + mu0 I).
  Matrix hessian() const;
  /// The vector h with grad(x) = Hx - h (b, or A'y).
  Vector linear_term() const;

  const Matrix& Q() const { return mat_; }
  const Vector& b() const { return vec_; }
  double c() const { return c_; }
  const Matrix& A() const { return mat_; }
  const Vector& y() const { return vec_; }
  double mu0() const { return mu0_; }

 private:
  SmoothObjective(Form form, Matrix mat, Vector vec, double c, double mu0);
  void check_dim(const Vector& x, const char* what) const;

  Form form_;
  Matrix mat_;  // Q or A
  Vector vec_;  // b or y
  double c_ = 0.0;
  double mu0_ = 0.0;
  Eigen::Index n_ = 0;
};

enum class SpectralMode { Automatic, Estimated, Exact };

struct SpectralOptions {
  double rel_tol = 1e-6;   // power-iteration residual tolerance, in (0, 1e-3]
  double safety = 1e-6;    // L *= 1 + safety; mu *= 1 - safety
  SpectralMode mode = SpectralMode::Automatic;
  std::size_t exact_max_dim = 200;
  std::uint64_t seed = 0;  // start vector for power iteration
};

struct SpectralBounds {
  double L = 0.0;
  double mu = 0.0;
  double kappa = 0.0;
  SpectralMode mode = SpectralMode::Estimated;
};

/// Certified (L, mu) for the Hessian. Exact mode runs cyclic Jacobi; estimated
/// mode runs power iteration for lambda_max and on (L I - H) for lambda_min,
/// except for ridge_ls where mu = mu0.
SpectralBounds spectral_bounds(const SmoothObjective& obj,
                               const SpectralOptions& options = {});

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
/// Sweeps until the off-diagonal Frobenius norm is <= off_tol * max(1, ||A||_F).
Vector jacobi_eigenvalues(Matrix A, double off_tol = 1e-12,
                          int max_sweeps = 100);

struct PowerIterationResult {
  double eigenvalue = 0.0;
  double residual = 0.0;
  std::size_t iterations = 0;
};

/// Dominant eigenvalue of a symmetric PSD operator given as a matvec.
/// Converged when ||Mv - theta v|| <= rel_tol * max(|theta|, scale_floor);
/// throws ConvergenceError after max_iter iterations.
template <class MatVec>
PowerIterationResult power_iteration(MatVec&& matvec, Vector v, double rel_tol,
                                     double scale_floor, std::size_t max_iter);

}  // namespace pgas

#include "pgas/detail/power_iteration.hpp"
