// Copyright The nonbloch Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef NONBLOCH_SUPERCELL_HPP
#define NONBLOCH_SUPERCELL_HPP

#include <vector>

#include "nonbloch/linalg.hpp"
#include "nonbloch/model.hpp"

namespace nonbloch
{

// How the imaginary momentum enters a twisted supercell.
//
//   Diluted:  every hopping of offset alpha carries e^{mu.alpha}; wraps across the
//             supercell boundary carry only the twist phase e^{i theta.w}.
//   Boundary: interior hoppings are bare; wraps carry e^{(eta + i theta).w} with
//             eta_m = N_m mu_m.
//
// Both give the same spectrum (they differ by the similarity diag(e^{mu.R})), but
// the diluted form keeps eigenvector envelopes flat for any N.
enum class TwistMode
{
  Diluted,
  Boundary
};

struct SupercellSpec
{
  IVec sizes;  // N_m >= 1
  RVec twist;  // theta_m, reduced into (-pi, pi]
  RVec mu;
  TwistMode mode = TwistMode::Diluted;

  SupercellSpec() = default;
  SupercellSpec(IVec sizes_, RVec twist_, RVec mu_, TwistMode mode_ = TwistMode::Diluted);

  std::size_t dim() const { return sizes.size(); }
  int cell_count() const;
  // Row-major cell coordinates (last axis fastest).
  IVec cell_coords(int index) const;
  int cell_index(const IVec &coords) const;
  // k_n = (theta + 2 pi n) / N per axis, reduced into (-pi, pi].
  RVec bloch_momentum(const IVec &n) const;
};

// Supercell Hamiltonian of size n_orb * prod N_m. Rows/columns are ordered by cell
// (row-major), then orbital. Rejects offsets with |alpha_m| > N_m.
CMatrix build_supercell(const LaurentModel &model, const SupercellSpec &spec);

// Eigenvalues of the supercell Hamiltonian.
CVector supercell_spectrum(const LaurentModel &model, const SupercellSpec &spec);

struct BlochAssignment
{
  IVec n;        // plane-wave index
  RVec k;        // k_n
  double weight; // fraction of |v|^2 carried by that plane wave, in [0, 1]
  CVector amplitude; // per-orbital plane-wave amplitude, unnormalized
};

// Projects a supercell eigenvector onto the prod N_m discrete plane waves and returns
// the dominant one.
BlochAssignment unfold(const CVector &v, const SupercellSpec &spec, int n_orb);

// sum_R e^{-i k_n.R} v_R for one plane-wave index n.
CVector plane_wave_amplitude(const CVector &v, const SupercellSpec &spec, int n_orb,
                             const IVec &n);

// Eigenpairs of the supercell at one twist, unfolded onto one Bloch momentum.
struct SpectralSample
{
  RVec k;
  RVec mu;
  RVec twist;
  std::vector<ComplexEnergy> energies; // sorted by (Re, Im)
  CMatrix right;                       // n_orb x m Bloch eigenvectors, unit columns
  CMatrix left;                        // scaled so that left^H right = I
  RVec bloch_weight;
};

// Uniform theta grid with `per_axis` points per direction, each in (-pi, pi].
std::vector<RVec> uniform_twist_grid(int dim, int per_axis = 16);

// Diagonalizes the diluted supercell for every twist and unfolds each eigenpair.
// Samples are ordered by twist, then by plane-wave index.
std::vector<SpectralSample> sweep_bz(const LaurentModel &model, const IVec &sizes,
                                     const RVec &mu, const std::vector<RVec> &twist_grid);

}  // namespace nonbloch

#endif  // NONBLOCH_SUPERCELL_HPP
