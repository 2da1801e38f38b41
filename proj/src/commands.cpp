#include "dnls/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "dnls/csv_io.hpp"
#include "dnls/direct.hpp"
#include "dnls/evolution.hpp"
#include "dnls/inverse.hpp"
#include "dnls/spectral.hpp"
#include "dnls/stepper.hpp"

namespace dnls {

namespace {

constexpr const char* kSchema = "dnls-report/1";

double now_s() {
  using clk = std::chrono::steady_clock;
  return std::chrono::duration<double>(clk::now().time_since_epoch()).count();
}

Exec exec_mode(const CommonOpts& o) {
  return o.serial ? Exec::Serial : Exec::OpenMP;
}

void apply_threads(const CommonOpts& o) {
  if (o.threads > 0) set_max_threads(o.threads);
}

nlohmann::json grid_json(const SpatialGrid& g, double dl) {
  return {{"L", g.L}, {"N", g.N}, {"dlambda", dl}};
}

nlohmann::json base_report(const CommonOpts& o, const SpatialGrid& g,
                           double dl) {
  nlohmann::json j;
  j["schema"] = kSchema;
  j["grid"] = grid_json(g, dl);
  j["preset"] = o.preset.empty() ? nlohmann::json() : nlohmann::json(o.preset);
  j["input"] = o.input.empty() ? nlohmann::json() : nlohmann::json(o.input);
  j["mode"] = o.serial ? "serial" : "openmp";
  return j;
}

nlohmann::json recon_stats(const std::vector<ReconPoint>& pts) {
  nlohmann::json arr = nlohmann::json::array();
  double max_res = 0.0;
  long total_it = 0;
  for (const auto& p : pts) {
    arr.push_back({{"x", p.x}, {"residual", p.residual},
                   {"iterations", p.iterations}});
    max_res = std::max(max_res, p.residual);
    total_it += p.iterations;
  }
  return {{"points", arr}, {"max_residual", max_res},
          {"total_iterations", total_it}};
}

// Run `fn`, mapping the library's exception taxonomy onto process exit codes.
template <typename F>
int guarded(F&& fn) {
  try {
    return fn();
  } catch (const DataError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  } catch (const ConvergenceError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConvergence;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
}

// Scattering input for inverse/check: CSV when --input given, otherwise the
// direct map applied to the named preset potential.
ScatteringData load_input_scattering(const CommonOpts& o) {
  if (!o.input.empty()) return read_scattering_csv(o.input);
  const Potential p = load_input_potential(o);
  SpectralOps ops(p.grid);
  DirectOptions dopt;
  dopt.exec = exec_mode(o);
  return scattering_coefficients(ops, p, dopt).data;
}

}  // namespace

Potential load_input_potential(const CommonOpts& o) {
  if (!o.input.empty() && !o.preset.empty())
    throw DataError("give either --input or --preset, not both");
  if (!o.input.empty()) return read_potential_csv(o.input);
  if (o.preset.empty()) throw DataError("no input: need --input or --preset");

  double amp = 0.0;
  if (o.preset == "gaussian-small") amp = 0.3;
  else if (o.preset == "gaussian-medium") amp = 0.6;
  else if (o.preset == "zero") amp = 0.0;
  else throw DataError("unknown preset '" + o.preset + "'");

  Potential p;
  p.grid = SpatialGrid{16.0, 1024};
  p.q.resize(p.grid.N);
  for (std::size_t j = 0; j < p.grid.N; ++j) {
    const double x = p.grid.x(j);
    p.q[j] = amp * std::exp(-x * x);
  }
  return p;
}

std::string resolve_output(const std::string& path) {
  if (path.empty() || path.front() == '/') return path;
  const char* dir = std::getenv("DNLS_OUTDIR");
  if (!dir || !*dir) return path;
  std::string d(dir);
  if (d.back() != '/') d += '/';
  return d + path;
}

int cmd_direct(const DirectOpts& o) {
  return guarded([&] {
    apply_threads(o);
    const double t0 = now_s();
    const Potential p = load_input_potential(o);
    SpectralOps ops(p.grid);
    DirectOptions dopt;
    dopt.exec = exec_mode(o);
    const DirectResult r = scattering_coefficients(ops, p, dopt);
    const SpectralCertificate cert =
        spectral_check(r.data, dopt.margin_floor, dopt.alpha_floor);
    if (o.check && !cert.ok) {
      char msg[128];
      std::snprintf(msg, sizeof(msg),
                    "SpectralConditionViolated: margin c = %.6g at lambda = "
                    "%.6g",
                    cert.margin_c, cert.offending_lambda);
      throw DataError(msg);
    }

    double max_det = 0.0;  // determinant relation residual, reported always
    for (std::size_t k = 0; k < r.data.grid.M; ++k) {
      const double det = std::norm(r.data.alpha[k]) -
                         r.data.grid.lambda(k) * std::norm(r.data.beta[k]);
      max_det = std::max(max_det, std::abs(det - 1.0));
    }

    const std::string out = resolve_output(o.output);
    if (!out.empty()) {
      write_scattering_csv(out, r.data);
      nlohmann::json j = base_report(o, p.grid, r.data.grid.dl);
      j["command"] = "direct";
      j["certificate"] = {{"margin_c", cert.margin_c},
                          {"min_alpha", cert.min_alpha},
                          {"ok", cert.ok}};
      j["max_determinant_residual"] = max_det;
      j["wall_time_s"] = now_s() - t0;
      write_sidecar(out, j);
    }
    return kExitOk;
  });
}

int cmd_inverse(const InverseOpts& o) {
  return guarded([&] {
    apply_threads(o);
    const double t0 = now_s();
    const ScatteringData d = load_input_scattering(o);
    require_spectral(d, 1e-6, 1e-6);
    const SpatialGrid xg = make_dual_spatial_grid(d.grid);
    SpectralOps ops(xg);

    SolveOptions sopt;
    sopt.tol = o.tol;
    sopt.exec = exec_mode(o);
    std::vector<ReconPoint> diag;

    Potential p;
    if (o.xs.empty()) {
      p = inverse_map(ops, d, sopt, &diag);
    } else {
      const rvec xs = parse_range(o.xs);
      p.grid = xg;  // evaluation points are free-standing; grid is metadata
      rvec xr, xl;
      for (double x : xs) (chi_blend(x) > 0.0 ? xr : xl).push_back(x);
      cvec qr = xr.empty() ? cvec{} : reconstruct_right(ops, d, xr, sopt, &diag);
      cvec ql = xl.empty() ? cvec{} : reconstruct_left(ops, d, xl, sopt, &diag);
      // stitch back in caller order
      std::size_t ir = 0, il = 0;
      p.q.resize(xs.size());
      for (std::size_t i = 0; i < xs.size(); ++i)
        p.q[i] = chi_blend(xs[i]) > 0.0 ? qr[ir++] : ql[il++];
      // write as x,re,im rows with the requested abscissae
      const std::string out = resolve_output(o.output);
      if (!out.empty()) {
        FILE* f = std::fopen(out.c_str(), "w");
        if (!f) throw DataError("cannot open output '" + out + "'");
        std::fprintf(f, "x,re_q,im_q\n");
        for (std::size_t i = 0; i < xs.size(); ++i)
          std::fprintf(f, "%.17g,%.17g,%.17g\n", xs[i], p.q[i].real(),
                       p.q[i].imag());
        std::fclose(f);
        nlohmann::json j = base_report(o, xg, d.grid.dl);
        j["command"] = "inverse";
        j["tol"] = o.tol;
        j["reconstruction"] = recon_stats(diag);
        j["wall_time_s"] = now_s() - t0;
        write_sidecar(out, j);
      }
      return kExitOk;
    }

    const std::string out = resolve_output(o.output);
    if (!out.empty()) {
      write_potential_csv(out, p);
      nlohmann::json j = base_report(o, xg, d.grid.dl);
      j["command"] = "inverse";
      j["tol"] = o.tol;
      j["reconstruction"] = recon_stats(diag);
      j["wall_time_s"] = now_s() - t0;
      write_sidecar(out, j);
    }
    return kExitOk;
  });
}

int cmd_evolve(const EvolveOpts& o) {
  return guarded([&] {
    apply_threads(o);
    if (o.via != "ist" && o.via != "pde" && o.via != "both")
      throw DataError("--via must be ist, pde, or both");
    const double t0 = now_s();
    const Potential q0 = load_input_potential(o);
    SpectralOps ops(q0.grid);

    EvolveOptions eopt;
    eopt.direct.exec = exec_mode(o);
    eopt.solve.exec = exec_mode(o);
    EvolveDiagnostics diag;

    std::optional<Potential> q_ist, q_pde;
    if (o.via != "pde") q_ist = solve_dnls2(ops, q0, o.t, eopt, &diag);
    if (o.via != "ist") {
      StepperConfig cfg;
      cfg.dt = o.dt;
      cfg.t_final = o.t;
      q_pde = step_dnls2(ops, q0, cfg);
    }
    const Potential& qt = q_ist ? *q_ist : *q_pde;

    const std::string out = resolve_output(o.output);
    if (!out.empty()) {
      write_potential_csv(out, qt);
      nlohmann::json j = base_report(o, q0.grid, ops.kgrid().dl);
      j["command"] = "evolve";
      j["t"] = o.t;
      j["via"] = o.via;
      if (q_ist) {
        j["certificate"] = {{"margin_c", diag.cert.margin_c},
                            {"min_alpha", diag.cert.min_alpha},
                            {"ok", diag.cert.ok}};
        j["reconstruction"] = recon_stats(diag.recon);
      }
      if (q_ist && q_pde) {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < q_ist->q.size(); ++i) {
          num += std::norm(q_ist->q[i] - q_pde->q[i]);
          den += std::norm(q_ist->q[i]);
        }
        j["ist_vs_pde_rel_l2"] = den > 0.0 ? std::sqrt(num / den) : 0.0;
      }
      j["wall_time_s"] = now_s() - t0;
      write_sidecar(out, j);
    }
    return kExitOk;
  });
}

int cmd_oracle(const OracleOpts& o) {
  return guarded([&] {
    apply_threads(o);
    if (o.eq != "dnls2" && o.eq != "dnls1")
      throw DataError("--eq must be dnls2 or dnls1");
    const double t0 = now_s();
    const Potential v0 = load_input_potential(o);
    SpectralOps ops(v0.grid);
    StepperConfig cfg;
    cfg.dt = o.dt;
    cfg.t_final = o.t;
    const Potential vt =
        o.eq == "dnls2" ? step_dnls2(ops, v0, cfg) : step_dnls1(ops, v0, cfg);

    const std::string out = resolve_output(o.output);
    if (!out.empty()) {
      write_potential_csv(out, vt);
      nlohmann::json j = base_report(o, v0.grid, ops.kgrid().dl);
      j["command"] = "oracle";
      j["eq"] = o.eq;
      j["t"] = o.t;
      j["dt"] = o.dt;
      const Conserved c0 = conserved(ops, v0), c1 = conserved(ops, vt);
      j["conserved_t0"] = {{"M", c0.M}, {"E", c0.E}, {"P", c0.P}};
      j["conserved_t1"] = {{"M", c1.M}, {"E", c1.E}, {"P", c1.P}};
      j["wall_time_s"] = now_s() - t0;
      write_sidecar(out, j);
    }
    return kExitOk;
  });
}

int cmd_roundtrip(const RoundtripOpts& o) {
  return guarded([&] {
    apply_threads(o);
    const double t0 = now_s();
    const Potential q0 = load_input_potential(o);
    SpectralOps ops(q0.grid);

    DirectOptions dopt;
    dopt.exec = exec_mode(o);
    SolveOptions sopt;
    sopt.exec = exec_mode(o);
    std::vector<ReconPoint> diag;

    const DirectResult r = scattering_coefficients(ops, q0, dopt);
    require_spectral(r.data, dopt.margin_floor, dopt.alpha_floor);
    const Potential q1 = inverse_map(ops, r.data, sopt, &diag);

    double sup_err = 0.0, sup_q = 0.0;
    for (std::size_t j = 0; j < q0.q.size(); ++j) {
      sup_err = std::max(sup_err, std::abs(q1.q[j] - q0.q[j]));
      sup_q = std::max(sup_q, std::abs(q0.q[j]));
    }
    const double rel = sup_q > 0.0 ? sup_err / sup_q : sup_err;

    const std::string out = resolve_output(o.output);
    if (!out.empty()) {
      write_potential_csv(out, q1);
      nlohmann::json j = base_report(o, q0.grid, r.data.grid.dl);
      j["command"] = "roundtrip";
      j["tol"] = o.tol;
      j["sup_error_rel"] = rel;
      j["reconstruction"] = recon_stats(diag);
      j["wall_time_s"] = now_s() - t0;
      write_sidecar(out, j);
    }
    if (rel > o.tol) {
      char msg[128];
      std::snprintf(msg, sizeof(msg),
                    "roundtrip sup-error %.6g exceeds tol %.6g", rel, o.tol);
      throw ConvergenceError(msg);
    }
    return kExitOk;
  });
}

int cmd_check(const CheckOpts& o) {
  return guarded([&] {
    apply_threads(o);
    const double t0 = now_s();
    const ScatteringData d = load_input_scattering(o);
    const SpectralCertificate cert = spectral_check(d, 1e-6, 1e-6);

    nlohmann::json j;
    j["schema"] = kSchema;
    j["command"] = "check";
    j["grid"] = {{"M", d.grid.M}, {"dlambda", d.grid.dl}};
    j["margin_c"] = cert.margin_c;
    j["min_alpha"] = cert.min_alpha;
    j["ok"] = cert.ok;
    if (!d.alpha.empty() && !d.beta.empty()) {
      double max_det = 0.0;
      for (std::size_t k = 0; k < d.grid.M; ++k) {
        const double det = std::norm(d.alpha[k]) -
                           d.grid.lambda(k) * std::norm(d.beta[k]);
        max_det = std::max(max_det, std::abs(det - 1.0));
      }
      j["max_determinant_residual"] = max_det;
    }
    j["wall_time_s"] = now_s() - t0;

    std::printf("margin_c %.6g  min_alpha %.6g  %s\n", cert.margin_c,
                cert.min_alpha, cert.ok ? "ok" : "VIOLATED");
    const std::string out = resolve_output(o.output);
    if (!out.empty()) {
      FILE* f = std::fopen(out.c_str(), "w");
      if (!f) throw DataError("cannot open output '" + out + "'");
      const std::string s = j.dump(2);
      std::fwrite(s.data(), 1, s.size(), f);
      std::fputc('\n', f);
      std::fclose(f);
    }
    if (!cert.ok) {
      char msg[128];
      std::snprintf(msg, sizeof(msg),
                    "SpectralConditionViolated: margin c = %.6g at lambda = "
                    "%.6g",
                    cert.margin_c, cert.offending_lambda);
      throw DataError(msg);
    }
    return kExitOk;
  });
}

}  // namespace dnls
