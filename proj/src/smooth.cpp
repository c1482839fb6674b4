#include "pgas/smooth.hpp"

#include "pgas/errors.hpp"
#include "pgas/random.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace pgas {

SmoothObjective::SmoothObjective(Form form, Matrix mat, Vector vec, double c,
                                 double mu0)
    : form_(form), mat_(std::move(mat)), vec_(std::move(vec)), c_(c),
      mu0_(mu0), n_(mat_.cols()) {
  if (n_ == 0) throw DimensionError("objective dimension must be positive");
}

SmoothObjective SmoothObjective::quadratic(Matrix Q, Vector b, double c) {
  if (Q.rows() != Q.cols()) throw DimensionError("Q must be square");
  if (b.size() != Q.rows()) throw DimensionError("b length must match Q");
  const double scale = std::max(1.0, Q.cwiseAbs().maxCoeff());
  const double asym = (Q - Q.transpose()).cwiseAbs().maxCoeff();
  if (!(asym <= 1e-12 * scale))
    throw ConfigError("Q is not symmetric (max |Q_ij - Q_ji| = " +
                      std::to_string(asym) + ")");
  Matrix sym = 0.5 * (Q + Q.transpose());
  return SmoothObjective(Form::Quadratic, std::move(sym), std::move(b), c, 0.0);
}

SmoothObjective SmoothObjective::ridge_least_squares(Matrix A, Vector y,
                                                     double mu0) {
  if (y.size() != A.rows()) throw DimensionError("y length must match rows(A)");
  if (!(mu0 > 0.0) || !std::isfinite(mu0))
    throw ConfigError("ridge_ls requires a finite mu0 > 0");
  return SmoothObjective(Form::RidgeLeastSquares, std::move(A), std::move(y),
                         0.0, mu0);
}

std::string_view SmoothObjective::form_name() const {
  return form_ == Form::Quadratic ? "quadratic" : "ridge_ls";
}

void SmoothObjective::check_dim(const Vector& x, const char* what) const {
  if (x.size() != n_)
    throw DimensionError(std::string(what) + ": expected length " +
                         std::to_string(n_) + ", got " +
                         std::to_string(x.size()));
}

double SmoothObjective::eval(const Vector& x) const {
  check_dim(x, "eval_f");
  if (form_ == Form::Quadratic) return 0.5 * x.dot(mat_ * x) - vec_.dot(x) + c_;
  return 0.5 * (mat_ * x - vec_).squaredNorm() + 0.5 * mu0_ * x.squaredNorm();
}

Vector SmoothObjective::grad(const Vector& x) const {
  check_dim(x, "grad");
  if (form_ == Form::Quadratic) return mat_ * x - vec_;
  return mat_.transpose() * (mat_ * x - vec_) + mu0_ * x;
}

Vector SmoothObjective::hess_matvec(const Vector& v) const {
  check_dim(v, "hess_matvec");
  if (form_ == Form::Quadratic) return mat_ * v;
  return mat_.transpose() * (mat_ * v) + mu0_ * v;
}

Matrix SmoothObjective::hessian() const {
  if (form_ == Form::Quadratic) return mat_;
  Matrix h = mat_.transpose() * mat_;
  h.diagonal().array() += mu0_;
  return h;
}

Vector SmoothObjective::linear_term() const {
  if (form_ == Form::Quadratic) return vec_;
  return mat_.transpose() * vec_;
}

Vector jacobi_eigenvalues(Matrix a, double off_tol, int max_sweeps) {
  if (a.rows() != a.cols()) throw DimensionError("jacobi: matrix not square");
  const Eigen::Index n = a.rows();
  const double target = off_tol * std::max(1.0, a.norm());
  auto off_norm = [&] {
    double s = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i)
        if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  int sweep = 0;
  for (; sweep < max_sweeps && off_norm() > target; ++sweep) {
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
      }
    }
  }
  if (off_norm() > target)
    throw ConvergenceError("jacobi: off-diagonal norm above tolerance after " +
                           std::to_string(max_sweeps) + " sweeps");
  Vector eig = a.diagonal();
  std::sort(eig.begin(), eig.end());
  return eig;
}

SpectralBounds spectral_bounds(const SmoothObjective& obj,
                               const SpectralOptions& options) {
  if (!(options.rel_tol > 0.0 && options.rel_tol <= 1e-3))
    throw ConfigError("spectral_bounds: rel_tol must lie in (0, 1e-3]");
  if (!(options.safety >= 0.0 && options.safety < 1.0))
    throw ConfigError("spectral_bounds: safety must lie in [0, 1)");

  const std::size_t n = obj.dimension();
  const bool exact =
      options.mode == SpectralMode::Exact ||
      (options.mode == SpectralMode::Automatic && n <= options.exact_max_dim);

  SpectralBounds out;
  if (exact) {
    const Vector eig = jacobi_eigenvalues(obj.hessian());
    out.mode = SpectralMode::Exact;
    out.L = eig[eig.size() - 1] * (1.0 + options.safety);
    out.mu = eig[0] * (1.0 - options.safety);
  } else {
    out.mode = SpectralMode::Estimated;
    const std::size_t cap = 50 * n + 1000;
    Xorshift64Star rng(options.seed);
    const Vector start = rng.unit_vector(n);
    const auto top = power_iteration(
        [&](const Vector& v) { return obj.hess_matvec(v); }, start,
        options.rel_tol, 0.0, cap);
    const double l_raw = top.eigenvalue;
    out.L = l_raw * (1.0 + options.safety);
    if (obj.form() == SmoothObjective::Form::RidgeLeastSquares) {
      out.mu = obj.mu0();
    } else {
      const auto shifted = power_iteration(
          [&](const Vector& v) { return Vector(l_raw * v - obj.hess_matvec(v)); },
          start, options.rel_tol, l_raw, cap);
      out.mu = l_raw - shifted.eigenvalue * (1.0 + options.safety);
    }
  }
  if (obj.form() == SmoothObjective::Form::RidgeLeastSquares)
    out.mu = std::max(out.mu, obj.mu0());
  if (!(out.mu > 0.0))
    throw ConfigError("objective is not certifiably strongly convex (mu = " +
                      std::to_string(out.mu) + ")");
  if (!(out.L >= out.mu))
    throw ConvergenceError("spectral bounds inconsistent: mu > L");
  out.kappa = out.L / out.mu;
  return out;
}

}  // namespace pgas
