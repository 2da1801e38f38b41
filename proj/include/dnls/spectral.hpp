// Fast transforms and the Cauchy/Hilbert operators on the spectral line.
//
// Transform pair (x- and lambda-grids both contain 0):
//   fhat(lambda) = \int e^{-2 i lambda x} f(x) dx
//   f(x)         = (1/pi) \int e^{+2 i lambda x} fhat(lambda) dlambda
// realized as phase-conjugated FFTs with uniform weights, so the pair inverts
// to machine precision.
//
// The Cauchy projectors C+/C- (boundary values of the Cauchy integral from
// the upper/lower half plane) act on lambda-grid functions by masking the
// positive/negative half of an auxiliary transform to a *half-bin offset*
// dual grid zeta_a = (a - M/2 + 1/2) dzeta. The offset grid has no zero node
// and is symmetric under zeta -> -zeta, which makes the discrete operators
// exactly complementary (C+ - C- = I), exactly idempotent, Parseval-exact,
// and conjugation-equivariant (conj C- conj = -C+). None of that holds
// simultaneously for any mask choice on a grid containing zeta = 0.
//
// Plans are created once per instance with FFTW_ESTIMATE (deterministic
// planning) and FFTW_UNALIGNED, and executed via the new-array interface, so
// a const SpectralOps is safe to share across OpenMP threads.
#pragma once

#include "dnls/grid.hpp"

struct fftw_plan_s;  // avoid leaking <fftw3.h> into every consumer

namespace dnls {

class SpectralOps {
 public:
  explicit SpectralOps(const SpatialGrid& g);
  ~SpectralOps();
  SpectralOps(const SpectralOps&) = delete;
  SpectralOps& operator=(const SpectralOps&) = delete;

  const SpatialGrid& xgrid() const { return x_; }
  const SpectralGrid& kgrid() const { return k_; }
  // Nodes of the projector-internal half-offset dual grid (same spacing dx).
  rvec zeta_nodes() const;

  // x-grid samples -> lambda-grid samples of fhat, and back.
  cvec fourier_forward(const cvec& fx) const;
  cvec fourier_inverse(const cvec& fl) const;

  // lambda-grid -> half-offset zeta-grid (kernel e^{-2 i zeta lambda}), back.
  cvec to_zeta(const cvec& fl) const;
  cvec from_zeta(const cvec& fz) const;

  // Projectors and the Hilbert transform on lambda-grid functions:
  //   C+ keeps zeta > 0, C- is minus the zeta < 0 part, H = -(C+ + C-).
  // Plemelj: C+- = +-1/2 - 1/2 H; real input => H output purely imaginary.
  cvec cauchy_plus(const cvec& f) const;
  cvec cauchy_minus(const cvec& f) const;
  cvec hilbert(const cvec& f) const;

  // Spectral derivative on the (periodized) x-grid; order >= 1.
  cvec deriv_x(const cvec& fx, int order = 1) const;

  // Raw unnormalized length-N DFT (standard FFT index order); the time
  // stepper builds its integrating-factor multipliers on top of this.
  cvec dft(const cvec& f, bool forward) const;

  friend cvec upsample_periodic(const SpectralOps& ops, const cvec& fx,
                                int factor);

 private:
  enum class Half { Plus, Minus, Sign };
  cvec masked(const cvec& f, Half which) const;
  void run_fft(const cvec& in, cvec& out, bool forward) const;

  SpatialGrid x_;
  SpectralGrid k_;
  fftw_plan_s* fwd_ = nullptr;
  fftw_plan_s* bwd_ = nullptr;
  // Precomputed modulation vectors for the two transform pairs.
  cvec pre_fwd_xk_, post_fwd_xk_, pre_bwd_xk_, post_bwd_xk_;
  cvec pre_fwd_kz_, post_fwd_kz_, pre_bwd_kz_, post_bwd_kz_;
};

// Band-limited (zero-padded FFT) refinement of an x-grid sample vector onto
// the lattice x_i = -L + i dx/factor, i = 0 .. factor*N - 1.
cvec upsample_periodic(const SpectralOps& ops, const cvec& fx, int factor);

}  // namespace dnls
