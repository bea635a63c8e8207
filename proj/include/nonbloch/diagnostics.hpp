// Copyright The nonbloch Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef NONBLOCH_DIAGNOSTICS_HPP
#define NONBLOCH_DIAGNOSTICS_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nonbloch/model.hpp"

namespace nonbloch
{

struct WindingQuery
{
  ComplexEnergy energy;
  RVec mu;
  RVec n_hat;   // integration direction; must be parallel to a small integer vector
  RVec k_perp;  // d - 1 transverse coordinates, in order of the non-pivot axes
  int grid = 64;
};

struct WindingOptions
{
  double tol_factor = 1e-8;  // on-spectrum when |f| < tol_factor * scale^n_orb
  int max_grid = 1 << 14;
};

// Primitive integer vector parallel to n_hat, e.g. (1, 1) for (x + y)/sqrt(2).
IVec loop_direction(std::span<const double> n_hat);

// Loop k(tau) = base + tau * m, tau in [-pi, pi). The pivot is the last nonzero entry
// of m; base is zero there and carries k_perp elsewhere.
RVec loop_base(const IVec &m, std::span<const double> k_perp);

// Total phase winding of det[E - H_mu(k)] around the loop, divided by 2 pi.
int winding(const LaurentModel &model, const WindingQuery &q, const WindingOptions &opt = {});

struct EnergyGrid
{
  double re_min = 0.0, re_max = 0.0;
  double im_min = 0.0, im_max = 0.0;
  int n_re = 1, n_im = 1;

  std::size_t size() const { return static_cast<std::size_t>(n_re) * n_im; }
  double d_re() const { return n_re > 1 ? (re_max - re_min) / (n_re - 1) : 0.0; }
  double d_im() const { return n_im > 1 ? (im_max - im_min) / (n_im - 1) : 0.0; }
  // Row-major in Im, Re fastest.
  ComplexEnergy node(std::size_t idx) const;
  ComplexEnergy node(int i_re, int i_im) const;
};

// Point-gap pattern. Nodes on the spectrum, or so close that the loop phase cannot be
// resolved at max_grid, are std::nullopt.
std::vector<std::optional<int>> winding_map(const LaurentModel &model, const EnergyGrid &grid,
                                            const RVec &mu, const RVec &n_hat,
                                            const RVec &k_perp, int loop_grid = 64);

// BZ average of log|det[E - H_mu(k)]| by uniform periodic quadrature with `grid`
// points per axis. Returns -inf when a node hits the spectrum exactly.
double spectral_potential(const LaurentModel &model, ComplexEnergy e, const RVec &mu,
                          int grid = 256);

// Mean of log|E - E_v|; -inf when E coincides with an eigenvalue.
double spectral_potential(std::span<const ComplexEnergy> eigenvalues, ComplexEnergy e);

// Same average, exact along `axis` (Jensen's formula on the characteristic polynomial
// of that axis) and sampled on n_perp midpoints per transverse axis. Exact in 1D.
double spectral_potential_line(const LaurentModel &model, ComplexEnergy e, const RVec &mu,
                               int n_perp = 64, int axis = -1);

struct GradientOptions
{
  int n_perp = 64;
  bool fd_check = false;
  double fd_step = 1e-3;
  double fd_tol = 0.05;
  double on_spectrum_tol = 1e-10;  // in log|beta|
};

struct GradientResult
{
  RVec g;
  RVec g_fd;  // filled when fd_check is set
  bool disagreement = false;
};

// g_m = <w_{e_m}> averaged over n_perp transverse midpoints. Throws OnSpectrum when a
// line passes through a zero of det[E - H_mu].
GradientResult potential_gradient(const LaurentModel &model, ComplexEnergy e, const RVec &mu,
                                  const GradientOptions &opt = {});

struct DensityField
{
  EnergyGrid grid;
  std::vector<double> rho;  // boundary nodes are 0
  double integral = 0.0;
  double negative_mass = 0.0;  // |sum of negative cells| relative to the positive sum
  std::string warning;
};

// rho = lap(phi) / (2 pi n_orb) by the 5-point stencil on a uniform grid.
DensityField nbf_density(const EnergyGrid &grid, std::span<const double> phi, int n_orb = 1,
                         double negative_tol = 0.05);
DensityField nbf_density(const EnergyGrid &grid, std::span<const ComplexEnergy> eigenvalues);

struct NBF
{
  RVec k;
  int sign = 0;  // +1 counterclockwise phase circulation, 0 when degenerate
  double residual = 0.0;
};

struct NbfOptions
{
  double log_modulus_tol = 1e-6;  // 1D: keep roots with ||log beta| - mu| below this
  int grid = 256;                 // 2D marching-squares grid per axis
  int newton_iters = 50;
  double residual_tol = 1e-9;  // relative to scale^n_orb
  double merge_dist = 1e-4;
};

struct NbfResult
{
  std::vector<NBF> points;  // sorted lexicographically by k
  std::vector<std::string> warnings;
};

// Roots of det[E - H_mu(k)] in the real BZ. 1D and 2D only.
NbfResult find_nbfs(const LaurentModel &model, ComplexEnergy e, const RVec &mu,
                    const NbfOptions &opt = {});

struct SelfIntersection
{
  ComplexEnergy energy;
  double k1 = 0.0;
  double k2 = 0.0;
};

// Crossings of the polyline E(k) (ordered by k, closed when `closed`). Points closer
// than `tol` are merged.
std::vector<SelfIntersection> self_intersections(std::span<const double> k,
                                                 std::span<const ComplexEnergy> energies,
                                                 bool closed = true, double tol = 1e-9);

}  // namespace nonbloch

#endif  // NONBLOCH_DIAGNOSTICS_HPP
