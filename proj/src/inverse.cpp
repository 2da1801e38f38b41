#define EIGEN_DONT_PARALLELIZE  // keep the dense fallback bitwise reproducible
#include "dnls/inverse.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "dnls/gmres.hpp"

namespace dnls {

// ---------------------------------------------------------------------------
// Restarted GMRES (declared in gmres.hpp).

namespace {

double nrm2(const cvec& v) {
  double s = 0.0;
  for (const cxd& z : v) s += std::norm(z);
  return std::sqrt(s);
}

cxd dotc(const cvec& a, const cvec& b) {
  cxd s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

}  // namespace

GmresResult gmres(const std::function<void(const cvec&, cvec&)>& apply,
                  const cvec& b, double tol, int restart, int max_iters) {
  const std::size_t n = b.size();
  GmresResult res;
  res.x.assign(n, cxd(0.0));
  const double normb = nrm2(b);
  if (normb == 0.0) {
    res.converged = true;
    return res;
  }

  cvec r = b, Ax(n), w(n);
  int total = 0;
  double relres = 1.0;
  while (total < max_iters) {
    // r = b - A x
    apply(res.x, Ax);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - Ax[i];
    const double beta = nrm2(r);
    relres = beta / normb;
    if (relres <= tol) {
      res.converged = true;
      break;
    }

    const int m = std::min(restart, max_iters - total);
    std::vector<cvec> V;
    V.reserve(static_cast<std::size_t>(m) + 1);
    V.emplace_back(n);
    for (std::size_t i = 0; i < n; ++i) V[0][i] = r[i] / beta;
    // Column-major Hessenberg, Givens cosines (real) / sines, rotated rhs.
    std::vector<cvec> H;
    rvec cs(static_cast<std::size_t>(m));
    cvec sn(static_cast<std::size_t>(m));
    cvec g(static_cast<std::size_t>(m) + 1, cxd(0.0));
    g[0] = beta;

    int j = 0;
    for (; j < m; ++j) {
      apply(V[static_cast<std::size_t>(j)], w);
      ++total;
      H.emplace_back(static_cast<std::size_t>(j) + 2, cxd(0.0));
      cvec& h = H.back();
      for (int i = 0; i <= j; ++i) {  // modified Gram-Schmidt
        const cvec& vi = V[static_cast<std::size_t>(i)];
        const cxd hij = dotc(vi, w);
        h[static_cast<std::size_t>(i)] = hij;
        for (std::size_t p = 0; p < n; ++p) w[p] -= hij * vi[p];
      }
      const double hlast = nrm2(w);
      h[static_cast<std::size_t>(j) + 1] = hlast;

      // Apply stored rotations, then form the one eliminating h[j+1].
      for (int i = 0; i < j; ++i) {
        const cxd t = cs[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(i)] +
                      sn[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(i) + 1];
        h[static_cast<std::size_t>(i) + 1] =
            -std::conj(sn[static_cast<std::size_t>(i)]) * h[static_cast<std::size_t>(i)] +
            cs[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(i) + 1];
        h[static_cast<std::size_t>(i)] = t;
      }
      const cxd h1 = h[static_cast<std::size_t>(j)];
      const double denom = std::sqrt(std::norm(h1) + hlast * hlast);
      if (std::abs(h1) == 0.0) {
        cs[static_cast<std::size_t>(j)] = 0.0;
        sn[static_cast<std::size_t>(j)] = 1.0;
      } else {
        cs[static_cast<std::size_t>(j)] = std::abs(h1) / denom;
        sn[static_cast<std::size_t>(j)] = (h1 / std::abs(h1)) * (hlast / denom);
      }
      h[static_cast<std::size_t>(j)] =
          cs[static_cast<std::size_t>(j)] * h1 + sn[static_cast<std::size_t>(j)] * hlast;
      h[static_cast<std::size_t>(j) + 1] = 0.0;
      g[static_cast<std::size_t>(j) + 1] =
          -std::conj(sn[static_cast<std::size_t>(j)]) * g[static_cast<std::size_t>(j)];
      g[static_cast<std::size_t>(j)] *= cs[static_cast<std::size_t>(j)];

      relres = std::abs(g[static_cast<std::size_t>(j) + 1]) / normb;
      const bool lucky = hlast <= 1e-14 * normb;
      if (relres <= tol || lucky || total >= max_iters) {
        ++j;
        break;
      }
      V.emplace_back(n);
      for (std::size_t p = 0; p < n; ++p)
        V[static_cast<std::size_t>(j) + 1][p] = w[p] / hlast;
    }

    // Back-substitute H y = g over the j columns actually built.
    cvec y(static_cast<std::size_t>(j), cxd(0.0));
    for (int i = j - 1; i >= 0; --i) {
      cxd s = g[static_cast<std::size_t>(i)];
      for (int p = i + 1; p < j; ++p)
        s -= H[static_cast<std::size_t>(p)][static_cast<std::size_t>(i)] *
             y[static_cast<std::size_t>(p)];
      y[static_cast<std::size_t>(i)] = s / H[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
    }
    for (int i = 0; i < j; ++i)
      for (std::size_t p = 0; p < n; ++p)
        res.x[p] += y[static_cast<std::size_t>(i)] * V[static_cast<std::size_t>(i)][p];

    if (relres <= tol) {
      res.converged = true;
      break;
    }
  }
  res.rel_residual = relres;
  res.iterations = total;
  return res;
}

// ---------------------------------------------------------------------------
// Beals-Coifman operator and solves.

namespace {

cvec phase_vector(const SpectralGrid& g, double x) {
  cvec e(g.M);
  for (std::size_t k = 0; k < g.M; ++k)
    e[k] = std::exp(cxd(0.0, -2.0 * x * g.lambda(k)));
  return e;
}

// Shared core of bc_apply / bc_apply_left: inner projector first, then the
// multiplier lambda * conj(rho e_x), then minus the outer projector.
cvec bc_core(const SpectralOps& ops, const cvec& rho, const cvec& ex,
             const cvec& h, bool left) {
  const SpectralGrid& g = ops.kgrid();
  if (rho.size() != g.M || h.size() != g.M)
    throw DataError("bc_apply: length mismatch");
  cvec t(g.M);
  for (std::size_t k = 0; k < g.M; ++k) t[k] = rho[k] * h[k] * ex[k];
  cvec inner = left ? ops.cauchy_minus(t) : ops.cauchy_plus(t);
  for (std::size_t k = 0; k < g.M; ++k)
    inner[k] *= g.lambda(k) * std::conj(rho[k] * ex[k]);
  cvec outer = left ? ops.cauchy_plus(inner) : ops.cauchy_minus(inner);
  for (auto& v : outer) v = -v;
  return outer;
}

}  // namespace

cvec bc_apply(const SpectralOps& ops, const cvec& rho, double x, const cvec& h) {
  return bc_core(ops, rho, phase_vector(ops.kgrid(), x), h, false);
}

cvec bc_apply_left(const SpectralOps& ops, const cvec& rho_breve, double x,
                   const cvec& h) {
  return bc_core(ops, rho_breve, phase_vector(ops.kgrid(), x), h, true);
}

cvec bc_rhs(const SpectralOps& ops, const cvec& rho, double x) {
  return bc_apply(ops, rho, x, cvec(ops.kgrid().M, cxd(1.0)));
}

namespace {

BCState dense_solve_core(const SpectralOps& ops, const cvec& rho, double x,
                         bool left) {
  const std::size_t M = ops.kgrid().M;
  const cvec ex = phase_vector(ops.kgrid(), x);
  const cvec b = bc_core(ops, rho, ex, cvec(M, cxd(1.0)), left);

  Eigen::MatrixXcd A(M, M);
  const long Ml = static_cast<long>(M);
#pragma omp parallel for schedule(static)
  for (long j = 0; j < Ml; ++j) {
    cvec e(M, cxd(0.0));
    e[static_cast<std::size_t>(j)] = 1.0;
    const cvec col = bc_core(ops, rho, ex, e, left);
    for (std::size_t i = 0; i < M; ++i)
      A(static_cast<long>(i), j) =
          (static_cast<long>(i) == j ? 1.0 : 0.0) - col[i];
  }

  Eigen::Map<const Eigen::VectorXcd> bv(b.data(), Ml);
  Eigen::VectorXcd xv = A.partialPivLu().solve(bv);

  BCState st;
  st.x = x;
  st.dense_path = true;
  st.nu_sharp.assign(xv.data(), xv.data() + M);
  const double normb = nrm2(b);
  if (normb > 0.0) {
    cvec Sx = bc_core(ops, rho, ex, st.nu_sharp, left);
    double s = 0.0;
    for (std::size_t i = 0; i < M; ++i)
      s += std::norm(st.nu_sharp[i] - Sx[i] - b[i]);
    st.residual = std::sqrt(s) / normb;
  }
  return st;
}

BCState solve_core(const SpectralOps& ops, const cvec& rho, double x, bool left,
                   const SolveOptions& opt) {
  const std::size_t M = ops.kgrid().M;
  const cvec ex = phase_vector(ops.kgrid(), x);
  const cvec b = bc_core(ops, rho, ex, cvec(M, cxd(1.0)), left);

  BCState st;
  st.x = x;
  if (nrm2(b) == 0.0) {  // rho == 0: nu# = 0 exactly
    st.nu_sharp.assign(M, cxd(0.0));
    return st;
  }
  auto apply = [&](const cvec& v, cvec& out) {
    out = bc_core(ops, rho, ex, v, left);
    for (std::size_t i = 0; i < M; ++i) out[i] = v[i] - out[i];
  };
  GmresResult g = gmres(apply, b, opt.tol, opt.restart, opt.max_iters);
  if (g.converged) {
    st.nu_sharp = std::move(g.x);
    st.residual = g.rel_residual;
    st.iterations = g.iterations;
    return st;
  }
  if (M <= opt.dense_limit) {
    BCState d = dense_solve_core(ops, rho, x, left);
    d.iterations = g.iterations;
    return d;
  }
  throw ConvergenceError("KrylovStalled: GMRES residual " +
                         std::to_string(g.rel_residual) + " after " +
                         std::to_string(g.iterations) + " iterations at x = " +
                         std::to_string(x));
}

cxd recon_integral(const SpectralGrid& g, const cvec& rho, const cvec& nu_sharp,
                   double x) {
  cxd s = 0.0;
  for (std::size_t k = 0; k < g.M; ++k)
    s += std::exp(cxd(0.0, -2.0 * g.lambda(k) * x)) * rho[k] *
         (1.0 + nu_sharp[k]);
  return -(g.dl / pi) * s;
}

// Per-point driver shared by the right/left reconstructions: solves the
// right-type equation at sign*xs[i] with the supplied data, conjugating the
// result when asked (the left path reflects and conjugates).
cvec recon_points(const SpectralOps& ops, const cvec& rho, const rvec& xs,
                  double sign, bool conj_out, const SolveOptions& opt,
                  std::vector<ReconPoint>* diag) {
  const std::size_t n = xs.size();
  cvec out(n);
  std::vector<ReconPoint> pts(n);
  std::string err;
  bool failed = false;

  auto one = [&](std::size_t i) {
    const double xp = sign * xs[i];
    const BCState st = solve_core(ops, rho, xp, false, opt);
    cxd q = recon_integral(ops.kgrid(), rho, st.nu_sharp, xp);
    out[i] = conj_out ? std::conj(q) : q;
    pts[i] = {xs[i], st.residual, st.iterations};
  };

  if (opt.exec == Exec::OpenMP) {
    const long nl = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < nl; ++i) {
      if (failed) continue;  // exceptions must not cross the parallel region
      try {
        one(static_cast<std::size_t>(i));
      } catch (const std::exception& e) {
#pragma omp critical
        {
          failed = true;
          err = e.what();
        }
      }
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) one(i);
  }
  if (failed) throw ConvergenceError(err);
  if (diag) diag->insert(diag->end(), pts.begin(), pts.end());
  return out;
}

}  // namespace

BCState bc_solve(const SpectralOps& ops, const cvec& rho, double x,
                 const SolveOptions& opt) {
  return solve_core(ops, rho, x, false, opt);
}

BCState bc_solve_dense(const SpectralOps& ops, const cvec& rho, double x) {
  return dense_solve_core(ops, rho, x, false);
}

cvec reconstruct_right(const SpectralOps& ops, const ScatteringData& d,
                       const rvec& xs, const SolveOptions& opt,
                       std::vector<ReconPoint>* diag) {
  return recon_points(ops, d.rho, xs, +1.0, false, opt, diag);
}

DeltaFactors delta_factor(const SpectralOps& ops, const ScatteringData& d) {
  require_spectral(d, 0.0, -1.0);  // need 1 - lambda|rho|^2 > 0 for the log
  const std::size_t M = d.grid.M;
  cvec h(M);
  for (std::size_t k = 0; k < M; ++k)
    h[k] = std::log(1.0 - d.grid.lambda(k) * std::norm(d.rho[k]));
  const cvec Hh = ops.hilbert(h);

  DeltaFactors f;
  f.grid = d.grid;
  f.delta_plus.resize(M);
  f.delta_minus.resize(M);
  f.Delta.resize(M);
  f.rho_breve.resize(M);
  for (std::size_t k = 0; k < M; ++k) {
    f.delta_plus[k] = std::exp(-0.5 * h[k] + 0.5 * Hh[k]);
    f.delta_minus[k] = std::exp(0.5 * h[k] + 0.5 * Hh[k]);
    f.Delta[k] = f.delta_plus[k] * f.delta_minus[k];
    f.rho_breve[k] = d.rho[k] / f.Delta[k];
  }
  return f;
}

cvec reconstruct_left(const SpectralOps& ops, const ScatteringData& d,
                      const rvec& xs, const SolveOptions& opt,
                      std::vector<ReconPoint>* diag) {
  // Conjugating the mirrored-projector equation turns it into a right-type
  // solve at -x with data conj(rho_breve); the potential comes back as
  // q(x) = conj(q'(-x)).
  const DeltaFactors f = delta_factor(ops, d);
  cvec rho_prime(f.rho_breve.size());
  for (std::size_t k = 0; k < rho_prime.size(); ++k)
    rho_prime[k] = std::conj(f.rho_breve[k]);
  return recon_points(ops, rho_prime, xs, -1.0, true, opt, diag);
}

cvec reconstruct_left_literal(const SpectralOps& ops, const ScatteringData& d,
                              const rvec& xs, const SolveOptions& opt) {
  const DeltaFactors f = delta_factor(ops, d);
  cvec out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const BCState st = solve_core(ops, f.rho_breve, xs[i], true, opt);
    out[i] = recon_integral(ops.kgrid(), f.rho_breve, st.nu_sharp, xs[i]);
  }
  return out;
}

double chi_blend(double x) {
  if (x >= 1.0) return 1.0;
  if (x <= -1.0) return 0.0;
  auto psi = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
  const double up = psi((x + 1.0) / 2.0);
  const double dn = psi((1.0 - x) / 2.0);
  return up / (up + dn);
}

cvec glue(const cvec& q_right, const cvec& q_left, const rvec& xs) {
  if (q_right.size() != xs.size() || q_left.size() != xs.size())
    throw DataError("glue: length mismatch");
  cvec out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double c = chi_blend(xs[i]);
    out[i] = c * q_right[i] + (1.0 - c) * q_left[i];
  }
  return out;
}

Potential inverse_map(const SpectralOps& ops, const ScatteringData& d,
                      const SolveOptions& opt, std::vector<ReconPoint>* diag) {
  if (!(d.grid == ops.kgrid()))
    throw DataError("inverse_map: scattering data grid mismatch");
  const SpatialGrid xg = ops.xgrid();
  const rvec xs = xg.nodes();

  rvec xs_r, xs_l;
  std::vector<std::size_t> idx_r, idx_l;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    const double c = chi_blend(xs[j]);
    if (c > 0.0) {
      xs_r.push_back(xs[j]);
      idx_r.push_back(j);
    }
    if (c < 1.0) {
      xs_l.push_back(xs[j]);
      idx_l.push_back(j);
    }
  }

  const cvec qr = reconstruct_right(ops, d, xs_r, opt, diag);
  const cvec ql = reconstruct_left(ops, d, xs_l, opt, diag);

  Potential p;
  p.grid = xg;
  p.q.assign(xg.N, cxd(0.0));
  cvec full_r(xg.N, cxd(0.0)), full_l(xg.N, cxd(0.0));
  for (std::size_t i = 0; i < idx_r.size(); ++i) full_r[idx_r[i]] = qr[i];
  for (std::size_t i = 0; i < idx_l.size(); ++i) full_l[idx_l[i]] = ql[i];
  p.q = glue(full_r, full_l, xs);
  return p;
}

}  // namespace dnls
