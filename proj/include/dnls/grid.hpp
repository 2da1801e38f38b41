// Uniform truncated grids for the spatial line and its Fourier-dual spectral
// line, plus the basic data carriers (potential samples, scattering data) and
// quadrature/norm helpers shared by every other module.
//
// Conventions fixed here and relied on everywhere:
//   x_j = -L + j*dx,          j = 0..N-1,  dx = 2L/N,  N a power of two
//   lambda_k = (k - M/2)*dl,  k = 0..M-1,  dl = pi/(N*dx)  (dual grid, M = N)
// The transform kernel behind the duality is e^{-2 i lambda x}, hence the
// pi/(2L) spacing rather than the textbook 2pi/(N dx).
#pragma once

#include <cmath>
#include <cstddef>

#include "dnls/common.hpp"

namespace dnls {

struct SpatialGrid {
  double L = 0.0;
  std::size_t N = 0;

  SpatialGrid() = default;
  SpatialGrid(double half_width, std::size_t count);

  double dx() const { return 2.0 * L / static_cast<double>(N); }
  double x(std::size_t j) const { return -L + static_cast<double>(j) * dx(); }
  rvec nodes() const;
  bool operator==(const SpatialGrid&) const = default;
};

struct SpectralGrid {
  std::size_t M = 0;
  double dl = 0.0;  // node spacing

  SpectralGrid() = default;
  SpectralGrid(std::size_t count, double spacing);

  double lambda(std::size_t k) const {
    return (static_cast<double>(k) - static_cast<double>(M) / 2.0) * dl;
  }
  rvec nodes() const;
  bool operator==(const SpectralGrid&) const = default;
};

// Dual grid under the e^{-2 i lambda x} kernel: M = N, dl = pi/(N dx).
SpectralGrid make_dual_spectral_grid(const SpatialGrid& g);
// Involution: the spatial grid whose dual is `s`.
SpatialGrid make_dual_spatial_grid(const SpectralGrid& s);

struct Potential {
  SpatialGrid grid;
  cvec q;

  double edge_decay() const {
    return q.empty() ? 0.0 : std::max(std::abs(q.front()), std::abs(q.back()));
  }
  bool admissible(double tol = 1e-10) const { return edge_decay() < tol; }
};

// Throws DataError if the samples do not vanish at the truncation boundary.
void require_admissible(const Potential& p, double tol = 1e-10);

struct ScatteringData {
  SpectralGrid grid;
  cvec rho;
  cvec alpha;  // optional; empty when not computed
  cvec beta;   // optional

  bool has_transition() const { return !alpha.empty() && !beta.empty(); }
  // min_k (1 - lambda_k |rho_k|^2); must stay strictly positive for the
  // inverse map to make sense.
  double spectral_margin() const;
};

struct WeightedNorms {
  double l2 = 0.0;
  double h22 = 0.0;  // ||(1+x^2) q||_2 + ||q''||_2, second derivative spectral
};

// Composite trapezoid rule on the grid spacing.
cxd quadrature(const cvec& values, const SpatialGrid& g);
cxd quadrature(const cvec& values, const SpectralGrid& g);
double l2_norm(const cvec& values, double spacing);

WeightedNorms h22_norm(const Potential& p);

}  // namespace dnls
