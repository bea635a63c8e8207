// Copyright The nonbloch Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef NONBLOCH_OBC_HPP
#define NONBLOCH_OBC_HPP

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "nonbloch/linalg.hpp"
#include "nonbloch/model.hpp"

namespace nonbloch
{

struct Chain
{
  int length = 32;
};

struct Rect
{
  int lx = 1, ly = 1;
};

// Sites {(i, j) : 0 <= i + j < a, 0 <= i - j + offset < b}; edges along x+y and x-y.
// The default holds 80 sites.
struct Parallelogram
{
  int a = 10, b = 16, offset = 0;
};

struct Mask
{
  std::vector<IVec> sites;
};

using Geometry = std::variant<Chain, Rect, Parallelogram, Mask>;

std::vector<IVec> geometry_sites(const Geometry &geometry);

struct FiniteLattice
{
  int dim = 1;
  int n_orb = 1;
  std::vector<IVec> sites;
  CMatrix hamiltonian;
  std::vector<std::string> warnings;
};

// H_{(i,a),(j,b)} = (c_{R_j - R_i})_{ab} for every pair in the site set; no wraps.
FiniteLattice build_finite(const LaurentModel &model, const Geometry &geometry);

EigenDecomposition diagonalize_obc(const FiniteLattice &lattice);

struct StableSpectrum
{
  std::vector<ComplexEnergy> energies;
  std::vector<double> condition;  // eigenvalue condition number at the chosen gauge
  std::vector<RVec> gauge;
};

// Eigenvalues collected over several similarity gauges, keeping each eigenvalue from
// the gauge where its condition number is smallest (and below kappa_max). Large
// skin-effect lattices lose all digits at a single gauge.
StableSpectrum stable_obc_spectrum(const LaurentModel &model, const Geometry &geometry,
                                   const std::vector<RVec> &gauges, double kappa_max = 1e4);

struct GreensMatrix
{
  ComplexEnergy probe;
  CMatrix entries;
  double residual = 0.0;  // ||(E - H) G - I||_F / ||I||_F
  double rcond = 0.0;
};

// Throws OnSpectrum when the reciprocal condition estimate falls below rcond_min.
GreensMatrix greens(const FiniteLattice &lattice, ComplexEnergy probe, double rcond_min = 1e-12);

struct ExtractOptions
{
  double noise = 0.0;  // complex Gaussian, relative to max |G_ij| per probe
  std::uint64_t seed = 0;
  double rcond_min = 1e-10;
};

struct Extraction
{
  std::vector<ComplexEnergy> energies;  // one per eigenvalue of H
  CMatrix vectors;                      // matching eigenvectors, unit columns
  std::vector<ComplexEnergy> probes_used;
  std::vector<std::string> warnings;
};

// Eigenvalues of G(E_p) are 1/(E_p - E_v). Eigenvectors are clustered across probes by
// overlap, and each E_v is averaged from the two probes closest to it.
Extraction extract_from_greens(const FiniteLattice &lattice,
                               const std::vector<ComplexEnergy> &probes,
                               const ExtractOptions &opt = {});

// rho(E) = (1/L) Im sum_v 1/(E - E_v) along Im E = im_line; NaN within `exclusion` Hz
// of an eigenvalue. L defaults to the eigenvalue count.
std::vector<double> dos(const std::vector<ComplexEnergy> &eigenvalues, double im_line,
                        const std::vector<double> &re_grid, double exclusion = 1e-6,
                        int norm_length = 0);

// Interior local maxima of |rho|, largest first.
std::vector<std::size_t> dos_peaks(const std::vector<double> &rho);

struct FltField
{
  int dim = 1;
  std::vector<RVec> s;     // requested s points
  RVec k_axis;             // same grid on every axis
  std::vector<CVector> values;  // per s: tensor grid over k, row-major (last axis fastest)

  std::size_t k_count() const;
  RVec k_at(std::size_t idx) const;
};

// psi~(s, k) = sum_r e^{-s.r} psi(r) e^{-i k.r}. With `normalize`, each s slice is divided
// by ||e^{-s.r} psi||_2 sqrt(N_sites), so |psi~| <= 1 with equality only for a flat
// plane wave.
FltField flt(const std::vector<IVec> &sites, const CVector &state, const std::vector<RVec> &s,
             const RVec &k_axis, bool normalize = true);

// Uniform grid of n points on [-pi, pi).
RVec uniform_k_axis(int n);

struct Hotspot
{
  RVec s;
  RVec k;
  double value = 0.0;
};

// Local maxima of |psi~| over k (periodic) on the s slice holding the global maximum,
// keeping those >= frac of that maximum, largest first.
std::vector<Hotspot> hotspots(const FltField &field, double frac = 0.5);

// Index of the s slice holding the global maximum of |psi~|.
std::size_t argmax_s(const FltField &field);

// sum_v |psi_v(r)|^2 per site over unit-norm right eigenvectors (orbitals summed).
std::vector<double> skin_profile(const FiniteLattice &lattice, const EigenDecomposition &eig);

}  // namespace nonbloch

#endif  // NONBLOCH_OBC_HPP
