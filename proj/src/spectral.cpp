#include "dnls/spectral.hpp"

#include <fftw3.h>

#include <mutex>

namespace dnls {

namespace {
// FFTW plan creation/destruction is not thread-safe even across independent
// plans; executions via the new-array interface are.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

SpectralOps::SpectralOps(const SpatialGrid& g)
    : x_(g), k_(make_dual_spectral_grid(g)) {
  const std::size_t N = x_.N;
  cvec dummy_in(N), dummy_out(N);
  auto* in = reinterpret_cast<fftw_complex*>(dummy_in.data());
  auto* out = reinterpret_cast<fftw_complex*>(dummy_out.data());
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    // ESTIMATE keeps planning deterministic run-to-run; UNALIGNED lets the
    // same plan execute on arbitrary caller buffers.
    fwd_ = fftw_plan_dft_1d(static_cast<int>(N), in, out, FFTW_FORWARD,
                            FFTW_ESTIMATE | FFTW_UNALIGNED);
    bwd_ = fftw_plan_dft_1d(static_cast<int>(N), in, out, FFTW_BACKWARD,
                            FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  if (!fwd_ || !bwd_) throw std::runtime_error("FFTW planning failed");

  const double dx = x_.dx(), dl = k_.dl;
  const double Nd = static_cast<double>(N);
  auto sgn = [](std::size_t j) { return (j % 2 == 0) ? 1.0 : -1.0; };
  // Global phases from recentering the grids: e^{-i pi N/2} for the integer
  // pair, i e^{-i pi M/2} for the half-offset pair. N is a power of two, so
  // e^{-i pi N/2} is exactly +-1.
  const cxd cN = ((N / 2) % 2 == 0) ? 1.0 : -1.0;
  const cxd cH = I * cN;

  pre_fwd_xk_.resize(N), post_fwd_xk_.resize(N);
  pre_bwd_xk_.resize(N), post_bwd_xk_.resize(N);
  pre_fwd_kz_.resize(N), post_fwd_kz_.resize(N);
  pre_bwd_kz_.resize(N), post_bwd_kz_.resize(N);
  for (std::size_t j = 0; j < N; ++j) {
    const double jd = static_cast<double>(j);
    pre_fwd_xk_[j] = dx * sgn(j);
    post_fwd_xk_[j] = cN * sgn(j);
    pre_bwd_xk_[j] = (dl / pi) * sgn(j);
    post_bwd_xk_[j] = std::conj(cN) * sgn(j);
    // lambda -> zeta with zeta shifted half a bin: extra e^{-i pi k / M}.
    pre_fwd_kz_[j] = dl * sgn(j) * std::exp(cxd(0.0, -pi * jd / Nd));
    post_fwd_kz_[j] = cH * sgn(j);
    pre_bwd_kz_[j] = (dx / pi) * sgn(j);
    post_bwd_kz_[j] = std::conj(cH) * sgn(j) * std::exp(cxd(0.0, pi * jd / Nd));
  }
}

SpectralOps::~SpectralOps() {
  std::lock_guard<std::mutex> lock(plan_mutex());
  if (fwd_) fftw_destroy_plan(fwd_);
  if (bwd_) fftw_destroy_plan(bwd_);
}

rvec SpectralOps::zeta_nodes() const {
  const std::size_t N = x_.N;
  rvec z(N);
  for (std::size_t a = 0; a < N; ++a)
    z[a] = (static_cast<double>(a) - static_cast<double>(N) / 2.0 + 0.5) * x_.dx();
  return z;
}

void SpectralOps::run_fft(const cvec& in, cvec& out, bool forward) const {
  out.resize(in.size());
  fftw_execute_dft(forward ? fwd_ : bwd_,
                   reinterpret_cast<fftw_complex*>(const_cast<cxd*>(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

namespace {
// out = post .* FFT(pre .* f)
cvec phased(const SpectralOps& self,
            void (SpectralOps::*run)(const cvec&, cvec&, bool) const,
            const cvec& f, const cvec& pre, const cvec& post, bool forward) {
  if (f.size() != pre.size()) throw DataError("transform: length mismatch");
  cvec tmp(f.size()), out;
  for (std::size_t j = 0; j < f.size(); ++j) tmp[j] = pre[j] * f[j];
  (self.*run)(tmp, out, forward);
  for (std::size_t j = 0; j < f.size(); ++j) out[j] *= post[j];
  return out;
}
}  // namespace

cvec SpectralOps::fourier_forward(const cvec& fx) const {
  return phased(*this, &SpectralOps::run_fft, fx, pre_fwd_xk_, post_fwd_xk_, true);
}

cvec SpectralOps::fourier_inverse(const cvec& fl) const {
  return phased(*this, &SpectralOps::run_fft, fl, pre_bwd_xk_, post_bwd_xk_, false);
}

cvec SpectralOps::to_zeta(const cvec& fl) const {
  return phased(*this, &SpectralOps::run_fft, fl, pre_fwd_kz_, post_fwd_kz_, true);
}

cvec SpectralOps::from_zeta(const cvec& fz) const {
  return phased(*this, &SpectralOps::run_fft, fz, pre_bwd_kz_, post_bwd_kz_, false);
}

cvec SpectralOps::masked(const cvec& f, Half which) const {
  const std::size_t N = x_.N;
  cvec z = to_zeta(f);
  // zeta_a > 0 exactly when a >= N/2 on the half-offset grid.
  for (std::size_t a = 0; a < N; ++a) {
    const bool pos = a >= N / 2;
    double m = 0.0;
    switch (which) {
      case Half::Plus: m = pos ? 1.0 : 0.0; break;
      case Half::Minus: m = pos ? 0.0 : -1.0; break;
      case Half::Sign: m = pos ? -1.0 : 1.0; break;  // -(C+ + C-)
    }
    z[a] *= m;
  }
  return from_zeta(z);
}

cvec SpectralOps::cauchy_plus(const cvec& f) const { return masked(f, Half::Plus); }
cvec SpectralOps::cauchy_minus(const cvec& f) const { return masked(f, Half::Minus); }
cvec SpectralOps::hilbert(const cvec& f) const { return masked(f, Half::Sign); }

cvec SpectralOps::dft(const cvec& f, bool forward) const {
  if (f.size() != x_.N) throw DataError("dft: length mismatch");
  cvec out;
  run_fft(f, out, forward);
  return out;
}

cvec upsample_periodic(const SpectralOps& ops, const cvec& fx, int factor) {
  const std::size_t N = ops.xgrid().N;
  if (fx.size() != N) throw DataError("upsample: length mismatch");
  if (factor < 1) throw DataError("upsample: factor must be >= 1");
  if (factor == 1) return fx;

  cvec F;
  ops.run_fft(fx, F, true);  // unnormalized forward DFT
  const std::size_t NF = N * static_cast<std::size_t>(factor);
  cvec G(NF, cxd(0.0));
  for (std::size_t m = 0; m < N / 2; ++m) G[m] = F[m];
  for (std::size_t m = N / 2 + 1; m < N; ++m) G[m + NF - N] = F[m];
  // Split the Nyquist bin symmetrically so real input stays real.
  G[N / 2] = 0.5 * F[N / 2];
  G[NF - N / 2] = 0.5 * F[N / 2];

  cvec out(NF);
  fftw_plan p;
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    p = fftw_plan_dft_1d(static_cast<int>(NF),
                         reinterpret_cast<fftw_complex*>(G.data()),
                         reinterpret_cast<fftw_complex*>(out.data()),
                         FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  if (!p) throw std::runtime_error("FFTW planning failed");
  fftw_execute(p);
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(p);
  }
  const double scale = 1.0 / static_cast<double>(N);
  for (auto& v : out) v *= scale;
  return out;
}

cvec SpectralOps::deriv_x(const cvec& fx, int order) const {
  const std::size_t N = x_.N;
  if (fx.size() != N) throw DataError("deriv_x: length mismatch");
  cvec F, out;
  run_fft(fx, F, true);
  for (std::size_t m = 0; m < N; ++m) {
    double s = (m < N / 2) ? static_cast<double>(m)
                           : static_cast<double>(m) - static_cast<double>(N);
    if (m == N / 2 && order % 2 == 1) s = 0.0;  // odd derivative: drop Nyquist
    const double k = pi / x_.L * s;
    cxd mult = 1.0;
    for (int p = 0; p < order; ++p) mult *= cxd(0.0, k);
    F[m] *= mult / static_cast<double>(N);
  }
  run_fft(F, out, false);
  return out;
}

}  // namespace dnls
