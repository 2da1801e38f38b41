// Inverse scattering map: scalar Fredholm (Beals-Coifman) solves for the
// right- and left-normalized Riemann-Hilbert problems and the glued
// reconstruction of the potential.
//
// Right problem at spatial point x: with e_x(lambda) = e^{-2 i x lambda},
//   (S h)(lambda) = -C-[ C+( rho h e_x )(.) * (.) conj(rho(.)) conj(e_x)(.) ]
//   solve (I - S) nu# = S[1],   q(x) = -(1/pi) \int e_x rho (1 + nu#) dlambda.
// The operator norm of S decays as x -> +infinity, so this path is used for
// the right half line.
//
// Left problem: the left jump factorization mirrors the projector order,
//   (S` h)(lambda) = -C+[ C-( rho` h e_x )(.) * (.) conj(rho`(.)) conj(e_x)(.) ]
// with rho` = rho / Delta and Delta = delta+ delta- built from the scalar
// factor h = log(1 - lambda|rho|^2). Conjugating that equation maps it
// exactly onto a right-type solve at -x with data conj(rho`), which is the
// primary implementation; the literal mirrored operator is kept as a
// cross-check (bc_apply_left / reconstruct_left_literal).
#pragma once

#include "dnls/direct.hpp"
#include "dnls/grid.hpp"
#include "dnls/spectral.hpp"

namespace dnls {

struct BCState {
  double x = 0.0;
  cvec nu_sharp;          // nu# = nu - 1 on the spectral grid
  double residual = 0.0;  // ||(I-S)nu# - S[1]||_2 / ||S[1]||_2
  int iterations = 0;
  bool dense_path = false;
};

struct DeltaFactors {
  SpectralGrid grid;
  cvec delta_plus, delta_minus;  // boundary values exp(-+ h/2 + (Hh)/2)
  cvec Delta;                    // delta+ * delta-, unimodular
  cvec rho_breve;                // rho / Delta
};

struct SolveOptions {
  double tol = 1e-10;
  int restart = 50;
  int max_iters = 400;
  std::size_t dense_limit = 2048;  // Nystrom fallback allowed up to this M
  Exec exec = Exec::OpenMP;
};

// One application of S (resp. the mirrored left operator) to h at point x.
cvec bc_apply(const SpectralOps& ops, const cvec& rho, double x, const cvec& h);
cvec bc_apply_left(const SpectralOps& ops, const cvec& rho_breve, double x,
                   const cvec& h);
// S[1]: the inhomogeneous term (h identically 1).
cvec bc_rhs(const SpectralOps& ops, const cvec& rho, double x);

// Solve (I-S) nu# = S[1] by restarted GMRES, falling back to a dense solve
// (operator matrix assembled column-by-column, LU) when the iteration stalls
// and the grid is small enough. Throws ConvergenceError otherwise.
BCState bc_solve(const SpectralOps& ops, const cvec& rho, double x,
                 const SolveOptions& opt = {});
// Dense solve only (used by tests and as the fallback).
BCState bc_solve_dense(const SpectralOps& ops, const cvec& rho, double x);

struct ReconPoint {
  double x = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

// Reconstruction of q on the requested points via right-normalized solves;
// diagnostics per point appended to `diag` when non-null.
cvec reconstruct_right(const SpectralOps& ops, const ScatteringData& d,
                       const rvec& xs, const SolveOptions& opt = {},
                       std::vector<ReconPoint>* diag = nullptr);

DeltaFactors delta_factor(const SpectralOps& ops, const ScatteringData& d);

// Left reconstruction, primary path (conjugate-reflected right solve).
cvec reconstruct_left(const SpectralOps& ops, const ScatteringData& d,
                      const rvec& xs, const SolveOptions& opt = {},
                      std::vector<ReconPoint>* diag = nullptr);
// Cross-check path running the literal mirrored operator.
cvec reconstruct_left_literal(const SpectralOps& ops, const ScatteringData& d,
                              const rvec& xs, const SolveOptions& opt = {});

// Smooth partition: 1 for x >= 1, 0 for x <= -1, C-infinity in between
// (built from the exp(-1/t) mollifier).
double chi_blend(double x);
// q_right and q_left sampled on xs; returns chi q_right + (1-chi) q_left.
cvec glue(const cvec& q_right, const cvec& q_left, const rvec& xs);

// Full pipeline: right solve on x > -1, left solve on x < 1, glued on the
// spatial grid dual to d's spectral grid.
Potential inverse_map(const SpectralOps& ops, const ScatteringData& d,
                      const SolveOptions& opt = {},
                      std::vector<ReconPoint>* diag = nullptr);

}  // namespace dnls
