#include "dnls/stepper.hpp"

#include <cmath>

namespace dnls {

namespace {

struct StepWork {
  const SpectralOps& ops;
  std::size_t N;
  rvec k;          // signed wavenumbers (pi/L) * m, FFT order
  rvec mask23;     // 2/3-rule dealiasing mask
  cvec Eh, Ef;     // e^{-i k^2 dt/2}, e^{-i k^2 dt}
  double cap;

  StepWork(const SpectralOps& o, double dt, double cap_)
      : ops(o), N(o.xgrid().N), k(N), mask23(N), Eh(N), Ef(N), cap(cap_) {
    const double L = o.xgrid().L;
    for (std::size_t m = 0; m < N; ++m) {
      const double s = (m < N / 2) ? static_cast<double>(m)
                                   : static_cast<double>(m) - static_cast<double>(N);
      k[m] = pi / L * s;
      mask23[m] = (std::abs(s) <= static_cast<double>(N) / 3.0) ? 1.0 : 0.0;
      const cxd mul = std::exp(cxd(0.0, -k[m] * k[m] * dt * 0.5));
      Eh[m] = mul;
      Ef[m] = mul * mul;
    }
    // Nyquist has no well-defined sign; keep it out of first derivatives.
    k[N / 2] = 0.0;
  }

  cvec to_phys(const cvec& vhat) const {
    cvec q = ops.dft(vhat, false);
    const double s = 1.0 / static_cast<double>(N);
    for (auto& z : q) z *= s;
    return q;
  }
};

// Transform the physical-space nonlinearity and dealias the product terms.
cvec dealiased_hat(const StepWork& w, const cvec& n_phys) {
  cvec nhat = w.ops.dft(n_phys, true);
  for (std::size_t m = 0; m < w.N; ++m) nhat[m] *= w.mask23[m];
  return nhat;
}

// Form 2: N(q) = -q^2 conj(q_x) + (i/2) |q|^4 q.
cvec nonlin2(const StepWork& w, const cvec& vhat, bool check_cap) {
  const cvec q = w.to_phys(vhat);
  if (check_cap) {
    for (const cxd& z : q)
      if (!(std::abs(z) < w.cap))
        throw ConvergenceError("BlowupDetected: sup|q| exceeded cap");
  }
  cvec dxhat(w.N);
  for (std::size_t m = 0; m < w.N; ++m) dxhat[m] = cxd(0.0, w.k[m]) * vhat[m];
  const cvec qx = w.to_phys(dxhat);
  cvec n(w.N);
  for (std::size_t j = 0; j < w.N; ++j) {
    const double a2 = std::norm(q[j]);
    n[j] = -q[j] * q[j] * std::conj(qx[j]) + cxd(0.0, 0.5) * a2 * a2 * q[j];
  }
  return dealiased_hat(w, n);
}

// Form 1: N(u) = (|u|^2 u)_x, derivative applied after the cubic product.
cvec nonlin1(const StepWork& w, const cvec& vhat, bool check_cap) {
  const cvec u = w.to_phys(vhat);
  if (check_cap) {
    for (const cxd& z : u)
      if (!(std::abs(z) < w.cap))
        throw ConvergenceError("BlowupDetected: sup|u| exceeded cap");
  }
  cvec cub(w.N);
  for (std::size_t j = 0; j < w.N; ++j) cub[j] = std::norm(u[j]) * u[j];
  cvec chat = w.ops.dft(cub, true);
  for (std::size_t m = 0; m < w.N; ++m)
    chat[m] *= cxd(0.0, w.k[m]) * w.mask23[m];
  return chat;
}

using NonlinFn = cvec (*)(const StepWork&, const cvec&, bool);

Potential run_steps(const SpectralOps& ops, const Potential& v0,
                    const StepperConfig& cfg, NonlinFn nl) {
  require_admissible(v0);
  if (!(v0.grid == ops.xgrid())) throw DataError("stepper: grid mismatch");
  if (cfg.t_final == 0.0) return v0;
  if (cfg.t_final < 0.0 || cfg.dt <= 0.0)
    throw DataError("stepper: need t_final >= 0 and dt > 0");

  const long nsteps =
      std::max(1L, std::lround(cfg.t_final / cfg.dt));
  const double dt = cfg.t_final / static_cast<double>(nsteps);
  StepWork w(ops, dt, cfg.blowup_cap);
  const std::size_t N = w.N;

  cvec v = ops.dft(v0.q, true);
  cvec a(N), b(N), c(N);
  for (long s = 0; s < nsteps; ++s) {
    // Classical RK4 on the integrating-factor variable w(t)=e^{-Lt} v(t).
    const cvec N1 = nl(w, v, true);
    for (std::size_t m = 0; m < N; ++m)
      a[m] = w.Eh[m] * (v[m] + 0.5 * dt * N1[m]);
    const cvec N2 = nl(w, a, false);
    for (std::size_t m = 0; m < N; ++m)
      b[m] = w.Eh[m] * v[m] + 0.5 * dt * N2[m];
    const cvec N3 = nl(w, b, false);
    for (std::size_t m = 0; m < N; ++m)
      c[m] = w.Ef[m] * v[m] + dt * w.Eh[m] * N3[m];
    const cvec N4 = nl(w, c, false);
    for (std::size_t m = 0; m < N; ++m)
      v[m] = w.Ef[m] * v[m] +
             dt / 6.0 *
                 (w.Ef[m] * N1[m] + 2.0 * w.Eh[m] * (N2[m] + N3[m]) + N4[m]);
  }

  Potential out;
  out.grid = v0.grid;
  out.q = w.to_phys(v);
  return out;
}

}  // namespace

Potential step_dnls2(const SpectralOps& ops, const Potential& q0,
                     const StepperConfig& cfg) {
  return run_steps(ops, q0, cfg, &nonlin2);
}

Potential step_dnls1(const SpectralOps& ops, const Potential& u0,
                     const StepperConfig& cfg) {
  return run_steps(ops, u0, cfg, &nonlin1);
}

Conserved conserved(const SpectralOps& ops, const Potential& v) {
  if (!(v.grid == ops.xgrid())) throw DataError("conserved: grid mismatch");
  const cvec vx = ops.deriv_x(v.q, 1);
  const std::size_t N = v.grid.N;
  rvec m(N), e(N), p(N);
  for (std::size_t j = 0; j < N; ++j) {
    const double a2 = std::norm(v.q[j]);
    m[j] = a2;
    e[j] = std::norm(vx[j]) - a2 * a2 * a2 / 16.0;
    p[j] = std::imag(std::conj(v.q[j]) * vx[j]) + 0.25 * a2 * a2;
  }
  auto trap = [&](const rvec& f) {
    double s = 0.5 * (f.front() + f.back());
    for (std::size_t j = 1; j + 1 < N; ++j) s += f[j];
    return s * v.grid.dx();
  };
  return {trap(m), trap(e), trap(p)};
}

double pde_residual(const SpectralOps& ops, const Potential& qm,
                    const Potential& q0, const Potential& qp, double delta) {
  if (!(qm.grid == q0.grid) || !(qp.grid == q0.grid))
    throw DataError("pde_residual: grid mismatch");
  const std::size_t N = q0.grid.N;
  const cvec qxx = ops.deriv_x(q0.q, 2);
  const cvec qx = ops.deriv_x(q0.q, 1);
  cvec r(N);
  for (std::size_t j = 0; j < N; ++j) {
    const cxd qt = (qp.q[j] - qm.q[j]) / (2.0 * delta);
    const double a2 = std::norm(q0.q[j]);
    r[j] = I * qt + qxx[j] + I * q0.q[j] * q0.q[j] * std::conj(qx[j]) +
           0.5 * a2 * a2 * q0.q[j];
  }
  return l2_norm(r, q0.grid.dx());
}

}  // namespace dnls
