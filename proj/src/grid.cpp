#include "dnls/grid.hpp"

#include <omp.h>

#include <cstdio>

#include "dnls/spectral.hpp"

namespace dnls {

namespace {
bool power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }
}  // namespace

void set_max_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}

SpatialGrid::SpatialGrid(double half_width, std::size_t count)
    : L(half_width), N(count) {
  if (L <= 0.0) throw DataError("SpatialGrid: half width must be positive");
  if (!power_of_two(N)) throw DataError("SpatialGrid: N must be a power of two");
}

rvec SpatialGrid::nodes() const {
  rvec xs(N);
  for (std::size_t j = 0; j < N; ++j) xs[j] = x(j);
  return xs;
}

SpectralGrid::SpectralGrid(std::size_t count, double spacing)
    : M(count), dl(spacing) {
  if (!power_of_two(M)) throw DataError("SpectralGrid: M must be a power of two");
  if (dl <= 0.0) throw DataError("SpectralGrid: spacing must be positive");
}

rvec SpectralGrid::nodes() const {
  rvec ls(M);
  for (std::size_t k = 0; k < M; ++k) ls[k] = lambda(k);
  return ls;
}

SpectralGrid make_dual_spectral_grid(const SpatialGrid& g) {
  return SpectralGrid(g.N, pi / (static_cast<double>(g.N) * g.dx()));
}

SpatialGrid make_dual_spatial_grid(const SpectralGrid& s) {
  double dx = pi / (static_cast<double>(s.M) * s.dl);
  return SpatialGrid(0.5 * static_cast<double>(s.M) * dx, s.M);
}

void require_admissible(const Potential& p, double tol) {
  if (p.q.size() != p.grid.N)
    throw DataError("Potential: sample count does not match grid");
  if (!p.admissible(tol)) {
    char msg[128];
    std::snprintf(msg, sizeof(msg),
                  "Potential: |q| = %.3e at the truncation boundary exceeds %.3e",
                  p.edge_decay(), tol);
    throw DataError(msg);
  }
}

double ScatteringData::spectral_margin() const {
  double c = 1.0;
  for (std::size_t k = 0; k < grid.M; ++k)
    c = std::min(c, 1.0 - grid.lambda(k) * std::norm(rho[k]));
  return c;
}

namespace {
cxd trapezoid(const cvec& v, std::size_t expect, double spacing) {
  if (v.size() != expect) throw DataError("quadrature: length mismatch");
  cxd acc = 0.0;
  for (std::size_t j = 1; j + 1 < v.size(); ++j) acc += v[j];
  acc += 0.5 * (v.front() + v.back());
  return acc * spacing;
}
}  // namespace

cxd quadrature(const cvec& values, const SpatialGrid& g) {
  return trapezoid(values, g.N, g.dx());
}

cxd quadrature(const cvec& values, const SpectralGrid& g) {
  return trapezoid(values, g.M, g.dl);
}

double l2_norm(const cvec& values, double spacing) {
  double acc = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) {
    double w = (j == 0 || j + 1 == values.size()) ? 0.5 : 1.0;
    acc += w * std::norm(values[j]);
  }
  return std::sqrt(acc * spacing);
}

WeightedNorms h22_norm(const Potential& p) {
  SpectralOps ops(p.grid);
  cvec weighted(p.grid.N);
  for (std::size_t j = 0; j < p.grid.N; ++j) {
    double x = p.grid.x(j);
    weighted[j] = (1.0 + x * x) * p.q[j];
  }
  cvec qxx = ops.deriv_x(p.q, 2);
  WeightedNorms n;
  n.l2 = l2_norm(p.q, p.grid.dx());
  n.h22 = l2_norm(weighted, p.grid.dx()) + l2_norm(qxx, p.grid.dx());
  return n;
}

}  // namespace dnls
