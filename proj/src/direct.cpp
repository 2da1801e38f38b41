#include "dnls/direct.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace dnls {

StagePotential make_stage_potential(const SpectralOps& ops, const Potential& q,
                                    int substeps, double admissible_tol) {
  require_admissible(q, admissible_tol);
  if (q.grid != ops.xgrid()) throw DataError("stage potential: grid mismatch");
  if (substeps < 1) throw DataError("stage potential: substeps must be >= 1");
  StagePotential sp;
  sp.grid = q.grid;
  sp.factor = 2 * substeps;  // RK4 midpoints land halfway between substeps
  const std::size_t fine = q.grid.N * static_cast<std::size_t>(sp.factor);
  sp.q_fine = upsample_periodic(ops, q.q, sp.factor);
  // close the interval: q(+L) by periodic extension (admissibility makes the
  // wrap-around value negligible)
  sp.q_fine.push_back(sp.q_fine.front());
  sp.qbar_fine.resize(fine + 1);
  sp.absq2_fine.resize(fine + 1);
  for (std::size_t i = 0; i <= fine; ++i) {
    sp.qbar_fine[i] = std::conj(sp.q_fine[i]);
    sp.absq2_fine[i] = std::norm(sp.q_fine[i]);
  }
  return sp;
}

namespace {

struct State {
  cxd n11, m;
};

// Right-hand side of the regularized first-column system at one stage point.
inline State rhs(const StagePotential& sp, std::size_t i, double lambda,
                 const State& y) {
  const cxd q = sp.q_fine[i];
  const cxd qb = sp.qbar_fine[i];
  const cxd p = cxd(0.0, 0.5 * sp.absq2_fine[i]);  // +i/2 |q|^2
  State d;
  d.n11 = lambda * q * y.m - p * y.n11;
  d.m = 2.0 * I * lambda * y.m + qb * y.n11 + p * y.m;
  return d;
}

inline State axpy(const State& y, double c, const State& d) {
  return {y.n11 + c * d.n11, y.m + c * d.m};
}

// One RK4 step of signed size h starting at fine index i0; the three stage
// abscissae are i0, i0 + dir, i0 + 2*dir on the refinement lattice.
inline State rk4_step(const StagePotential& sp, std::size_t i0, int dir,
                      double h, double lambda, const State& y) {
  const std::size_t im = static_cast<std::size_t>(static_cast<long>(i0) + dir);
  const std::size_t ie = static_cast<std::size_t>(static_cast<long>(i0) + 2 * dir);
  const State k1 = rhs(sp, i0, lambda, y);
  const State k2 = rhs(sp, im, lambda, axpy(y, 0.5 * h, k1));
  const State k3 = rhs(sp, im, lambda, axpy(y, 0.5 * h, k2));
  const State k4 = rhs(sp, ie, lambda, axpy(y, h, k3));
  State out = y;
  const double c = h / 6.0;
  out.n11 += c * (k1.n11 + 2.0 * k2.n11 + 2.0 * k3.n11 + k4.n11);
  out.m += c * (k1.m + 2.0 * k2.m + 2.0 * k3.m + k4.m);
  return out;
}

}  // namespace

JostTrace jost_pair(const StagePotential& sp, double lambda, int substeps) {
  if (sp.factor != 2 * substeps)
    throw DataError("jost_pair: stage potential built for different substeps");
  const std::size_t N = sp.grid.N;
  const std::size_t steps = (N / 2) * static_cast<std::size_t>(substeps);
  const double h = sp.grid.dx() / static_cast<double>(substeps);
  const std::size_t fineN = N * static_cast<std::size_t>(sp.factor);

  // Left-normalized: forward from x = -L (fine index 0) to x = 0.
  State yl{1.0, 0.0};
  for (std::size_t s = 0; s < steps; ++s)
    yl = rk4_step(sp, 2 * s, +1, h, lambda, yl);
  // Right-normalized: backward from x = +L (fine index factor*N) to x = 0.
  State yr{1.0, 0.0};
  for (std::size_t s = 0; s < steps; ++s)
    yr = rk4_step(sp, fineN - 2 * s, -1, -h, lambda, yr);

  JostTrace t;
  t.lambda = lambda;
  t.n11_minus = yl.n11;
  t.m_minus = yl.m;
  t.n11_plus = yr.n11;
  t.m_plus = yr.m;
  if (!std::isfinite(std::abs(t.n11_plus)) || !std::isfinite(std::abs(t.m_plus)) ||
      !std::isfinite(std::abs(t.n11_minus)) || !std::isfinite(std::abs(t.m_minus)))
    throw ConvergenceError("NonFinite: Jost integration diverged at lambda = " +
                           std::to_string(lambda));
  return t;
}

JostTrace jost_pair(const SpectralOps& ops, const Potential& q, double lambda,
                    int substeps) {
  return jost_pair(make_stage_potential(ops, q, substeps), lambda, substeps);
}

DirectResult scattering_coefficients(const SpectralOps& ops, const Potential& q,
                                     const DirectOptions& opt) {
  const StagePotential sp =
      make_stage_potential(ops, q, opt.substeps, opt.admissible_tol);
  const SpectralGrid lam = ops.kgrid();
  DirectResult r;
  r.data.grid = lam;
  r.data.rho.resize(lam.M);
  r.data.alpha.resize(lam.M);
  r.data.beta.resize(lam.M);
  r.jost.resize(lam.M);

  const long M = static_cast<long>(lam.M);
  // Each lambda is an independent ODE integration; the gather is indexed, so
  // results are bitwise identical in either mode.
  if (opt.exec == Exec::OpenMP) {
#pragma omp parallel for schedule(static)
    for (long k = 0; k < M; ++k)
      r.jost[static_cast<std::size_t>(k)] =
          jost_pair(sp, lam.lambda(static_cast<std::size_t>(k)), opt.substeps);
  } else {
    for (long k = 0; k < M; ++k)
      r.jost[static_cast<std::size_t>(k)] =
          jost_pair(sp, lam.lambda(static_cast<std::size_t>(k)), opt.substeps);
  }

  double min_alpha = std::numeric_limits<double>::max();
  double bad_lambda = 0.0;
  for (std::size_t k = 0; k < lam.M; ++k) {
    const JostTrace& t = r.jost[k];
    const double l = t.lambda;
    // T(0) = n^-(0)^{-1} n^+(0) via the adjugate (det n = 1 and the row
    // symmetry n22 = conj(n11), n12 = conj(n21)/lambda).
    const cxd a = t.n11_plus * std::conj(t.n11_minus) -
                  l * t.m_plus * std::conj(t.m_minus);
    const cxd b = std::conj(t.n11_minus * t.m_plus -
                            t.m_minus * t.n11_plus);
    r.data.alpha[k] = a;
    r.data.beta[k] = b;
    r.data.rho[k] = b / a;
    if (std::abs(a) < min_alpha) {
      min_alpha = std::abs(a);
      bad_lambda = l;
    }
  }
  if (min_alpha < opt.alpha_floor) {
    char msg[128];
    std::snprintf(msg, sizeof(msg),
                  "AlphaVanishes: |alpha| = %.6g at lambda = %.6g "
                  "(below floor %.6g)",
                  min_alpha, bad_lambda, opt.alpha_floor);
    throw DataError(msg);
  }
  return r;
}

SpectralCertificate spectral_check(const ScatteringData& d, double margin_floor,
                                   double alpha_floor) {
  SpectralCertificate c;
  c.margin_c = 1.0;
  for (std::size_t k = 0; k < d.grid.M; ++k) {
    const double g = 1.0 - d.grid.lambda(k) * std::norm(d.rho[k]);
    if (g < c.margin_c) {
      c.margin_c = g;
      c.offending_lambda = d.grid.lambda(k);
    }
  }
  c.ok = c.margin_c > margin_floor;
  if (!d.alpha.empty()) {
    c.min_alpha = std::numeric_limits<double>::max();
    for (std::size_t k = 0; k < d.grid.M; ++k) {
      if (std::abs(d.alpha[k]) < c.min_alpha) {
        c.min_alpha = std::abs(d.alpha[k]);
        if (c.min_alpha < alpha_floor) c.offending_lambda = d.grid.lambda(k);
      }
    }
    c.ok = c.ok && c.min_alpha > alpha_floor;
  }
  return c;
}

void require_spectral(const ScatteringData& d, double margin_floor,
                      double alpha_floor) {
  const SpectralCertificate c = spectral_check(d, margin_floor, alpha_floor);
  if (!c.ok) {
    char msg[128];
    std::snprintf(msg, sizeof(msg),
                  "SpectralConditionViolated: margin c = %.6g, min|alpha| = "
                  "%.6g at lambda = %.6g",
                  c.margin_c, c.min_alpha, c.offending_lambda);
    throw DataError(msg);
  }
}

cvec alpha_from_rho(const SpectralOps& ops, const ScatteringData& d) {
  require_spectral(d, 0.0, -1.0);  // only needs g > 0 for the logarithm
  const std::size_t M = d.grid.M;
  cvec h(M);
  for (std::size_t k = 0; k < M; ++k)
    h[k] = std::log(1.0 - d.grid.lambda(k) * std::norm(d.rho[k]));
  cvec cm = ops.cauchy_minus(h);
  cvec alpha(M);
  for (std::size_t k = 0; k < M; ++k) alpha[k] = std::exp(cm[k]);
  return alpha;
}

}  // namespace dnls
