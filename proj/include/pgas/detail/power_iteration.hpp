#pragma once

#include "pgas/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pgas {

template <class MatVec>
PowerIterationResult power_iteration(MatVec&& matvec, Vector v, double rel_tol,
                                     double scale_floor,
                                     std::size_t max_iter) {
  v.normalize();
  PowerIterationResult out;
  for (std::size_t k = 1; k <= max_iter; ++k) {
    Vector w = matvec(v);
    const double theta = v.dot(w);
    out.eigenvalue = theta;
    out.residual = (w - theta * v).norm();
    out.iterations = k;
    if (out.residual <= rel_tol * std::max(std::abs(theta), scale_floor))
      return out;
    const double wn = w.norm();
    // Mv = 0: v lies in the null space and theta = 0 is exact.
    if (wn == 0.0) return out;
    v = w / wn;
  }
  throw ConvergenceError("power iteration hit cap of " +
                         std::to_string(max_iter) +
                         " iterations; last residual " +
                         std::to_string(out.residual));
}

}  // namespace pgas
