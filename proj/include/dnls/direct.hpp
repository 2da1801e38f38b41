// Direct scattering map: Jost solutions of the reduced spectral problem and
// the scattering coefficients alpha, beta, rho = beta/alpha on the dual grid.
//
// The first Jost column is propagated in the regularized variables
// (n11, m = n21/lambda), which satisfy
//   n11' = lambda q m + p1 n11,      p1 = -(i/2)|q|^2
//   m'   = 2 i lambda m + conj(q) n11 + p2 m,   p2 = +(i/2)|q|^2
// with n11 -> 1, m -> 0 as x -> +-infinity. Integrating from +L gives the
// right-normalized solution, from -L the left one; both are reported at x=0.
// There the transition matrix is n^-(0)^{-1} n^+(0), which the unit
// determinant and the symmetry n22 = conj(n11), n12 = conj(n21)/lambda
// reduce to
//   alpha = n11p conj(n11m) - lambda mp conj(mm)
//   beta  = conj(n11m mp - mm n11p)
// (p/m suffix = right/left normalization), satisfying |alpha|^2-lambda|beta|^2=1.
#pragma once

#include "dnls/grid.hpp"
#include "dnls/spectral.hpp"

namespace dnls {

struct JostTrace {
  double lambda = 0.0;
  cxd n11_plus{1.0, 0.0}, n11_minus{1.0, 0.0};
  cxd m_plus{0.0, 0.0}, m_minus{0.0, 0.0};
};

struct DirectResult {
  ScatteringData data;
  std::vector<JostTrace> jost;
};

struct SpectralCertificate {
  double margin_c = 1.0;     // min_k (1 - lambda_k |rho_k|^2)
  double min_alpha = -1.0;   // min_k |alpha_k|, -1 when alpha absent
  double offending_lambda = 0.0;
  bool ok = true;
};

struct DirectOptions {
  int substeps = 4;          // RK4 steps per grid cell
  double alpha_floor = 1e-6;
  double margin_floor = 1e-6;
  // Edge-decay bound demanded of the input. Fields coming out of the inverse
  // map carry a reconstruction floor at the truncation boundary, so re-running
  // the direct map on them needs a looser bound than fresh analytic data.
  double admissible_tol = 1e-10;
  Exec exec = Exec::OpenMP;
};

// Band-limited upsample of q onto the refinement lattice the RK4 stages land
// on (spacing dx / (2*substeps)); shared across all lambda.
struct StagePotential {
  SpatialGrid grid;
  int factor = 8;   // fine points per grid cell = 2*substeps
  cvec q_fine;      // values on x = -L + j*dx/factor, j = 0..factor*N-1
  cvec qbar_fine;
  rvec absq2_fine;
};
StagePotential make_stage_potential(const SpectralOps& ops, const Potential& q,
                                    int substeps,
                                    double admissible_tol = 1e-10);

// Single-lambda integration; used directly by tests, and per-node by the
// full-grid driver below.
JostTrace jost_pair(const StagePotential& sp, double lambda, int substeps);
JostTrace jost_pair(const SpectralOps& ops, const Potential& q, double lambda,
                    int substeps = 4);

// Full direct map on the dual grid. Throws DataError("AlphaVanishes...") if
// |alpha| dips below the floor (input outside the admissible class).
DirectResult scattering_coefficients(const SpectralOps& ops, const Potential& q,
                                     const DirectOptions& opt = {});

SpectralCertificate spectral_check(const ScatteringData& d,
                                   double margin_floor = 1e-6,
                                   double alpha_floor = 1e-6);
// Throws DataError("SpectralConditionViolated...") when the certificate fails.
void require_spectral(const ScatteringData& d, double margin_floor = 1e-6,
                      double alpha_floor = 1e-6);

// Transmission factor rebuilt from rho alone via the trace formula
//   alpha_trace = exp( C-[ log(1 - lambda |rho|^2) ] ),
// which satisfies |alpha_trace|^2 (1 - lambda|rho|^2) = 1 pointwise.
cvec alpha_from_rho(const SpectralOps& ops, const ScatteringData& d);

// Large-lambda diagnostic: the Jost remainders eta11 = n11 - 1 and
// eta21 = lambda m + (1/(2i)) conj(q(0)) both decay as |lambda| grows.
inline cxd eta11_diag(const JostTrace& t, bool right) {
  return (right ? t.n11_plus : t.n11_minus) - 1.0;
}
inline cxd eta21_diag(const JostTrace& t, cxd q_at_0, bool right) {
  return t.lambda * (right ? t.m_plus : t.m_minus) +
         std::conj(q_at_0) / (2.0 * I);
}

}  // namespace dnls
