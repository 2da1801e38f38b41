// Matrix-free restarted GMRES for complex systems (I - S) x = b where only
// the action of the operator is available. Modified Gram-Schmidt Arnoldi with
// Givens rotations; deterministic (no randomness, fixed reduction order).
#pragma once

#include <cmath>
#include <functional>

#include "dnls/common.hpp"

namespace dnls {

struct GmresResult {
  cvec x;
  double rel_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

// apply: y = A x. Solves A x = b to ||b - A x|| <= tol * ||b||.
GmresResult gmres(const std::function<void(const cvec&, cvec&)>& apply,
                  const cvec& b, double tol, int restart = 50,
                  int max_iters = 400);

}  // namespace dnls
