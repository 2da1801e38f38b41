// Independent pseudospectral time integrator for both equation forms, used
// as the brute-force cross-check of the scattering-side evolution, plus the
// conserved-functional evaluators.
//
// Scheme: integrating-factor RK4. The stiff linear part i d_xx is removed
// exactly by e^{-i k^2 t} multipliers in Fourier space; the nonlinearity
//   form 2 (Gerjikov-Ivanov):  -q^2 conj(q_x) + (i/2) |q|^4 q
//   form 1 (standard):         +(|u|^2 u)_x
// is evaluated pseudospectrally with a 2/3-rule dealiasing mask on the
// products. No operator splitting, so the derivative nonlinearity sees no
// splitting error.
#pragma once

#include "dnls/grid.hpp"
#include "dnls/spectral.hpp"

namespace dnls {

struct StepperConfig {
  double dt = 1e-4;
  double t_final = 0.0;
  double blowup_cap = 1e6;  // sup|q| beyond which BlowupDetected is thrown
};

Potential step_dnls2(const SpectralOps& ops, const Potential& q0,
                     const StepperConfig& cfg);
Potential step_dnls1(const SpectralOps& ops, const Potential& u0,
                     const StepperConfig& cfg);

struct Conserved {
  double M = 0.0;  // ||v||_2^2
  double E = 0.0;  // ||v_x||_2^2 - (1/16) ||v||_6^6
  double P = 0.0;  // \int Im(conj(v) v_x) + (1/4)|v|^4
};

// Plain functional evaluation on the given field (spectral derivative +
// trapezoid quadrature). Which gauge of a trajectory actually conserves
// these is the caller's business; see phase_gauge in evolution.hpp.
Conserved conserved(const SpectralOps& ops, const Potential& v);

// L2 norm of the central-difference residual of the form-2 equation on
// three aligned snapshots at t - delta, t, t + delta.
double pde_residual(const SpectralOps& ops, const Potential& qm,
                    const Potential& q0, const Potential& qp, double delta);

}  // namespace dnls
