// Copyright The nonbloch Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef NONBLOCH_GBZ_HPP
#define NONBLOCH_GBZ_HPP

#include <string>
#include <utility>
#include <vector>

#include "nonbloch/diagnostics.hpp"
#include "nonbloch/model.hpp"

namespace nonbloch
{

enum class Verdict
{
  CuspObc,
  PlateauExcluded,
  Inconclusive
};

std::string to_string(Verdict v);

enum class Termination
{
  Gradient,  // |g| below tolerance
  Step,      // accepted step or line search shrank below tolerance
  MaxIter,
  Failure    // repeated on-spectrum evaluations
};

std::string to_string(Termination t);

struct MuSearchOptions
{
  int n_perp = 64;
  double g_tol = 1e-3;
  double step_tol = 1e-4;
  int max_iter = 100;
  double max_step = 1.0;
  double armijo = 1e-4;
  // 1D: move mu_min to the centre of the flat set {g = 0} (or onto the kink).
  bool centre_flat_set = true;
  double probe = 0.5;
  // classify_energy
  double ring_radius = 0.05;
  double plateau_g_tol = 0.1;
};

struct TrajectoryPoint
{
  RVec mu;
  double phi = 0.0;
  RVec g;
};

struct MuSearchResult
{
  ComplexEnergy energy;
  RVec mu_min;
  double phi_min = 0.0;
  std::vector<TrajectoryPoint> trajectory;
  Termination termination = Termination::MaxIter;
  bool cusp_flag = false;
  // 1D: [lo, hi] of the set where the winding vanishes (lo == hi at a kink).
  std::vector<std::pair<double, double>> flat_extent;
  Verdict verdict = Verdict::Inconclusive;
  std::vector<RVec> ring_gradients;  // filled by classify_energy
};

// The potential minimised over mu: spectral_potential_line with the search's n_perp.
double search_potential(const LaurentModel &model, ComplexEnergy e, const RVec &mu, int n_perp);

MuSearchResult minimize_potential(const LaurentModel &model, ComplexEnergy e, RVec mu0 = {},
                                  const MuSearchOptions &opt = {});

MuSearchResult classify_energy(const LaurentModel &model, ComplexEnergy e,
                               const MuSearchOptions &opt = {});

struct GBZPoint
{
  ComplexEnergy energy;     // on the arc after 1D snapping
  ComplexEnergy candidate;  // grid energy it came from
  RVec mu;
  std::vector<RVec> k_points;
  bool snapped = false;
};

struct PredictOptions
{
  MuSearchOptions search;
  bool snap = true;            // 1D: Newton onto |beta_p| = |beta_{p+1}|
  double snap_max_move = 1.0;  // Hz
  int nbf_grid = 128;          // 2D
};

// Box around the mu = 0 Bloch spectrum, padded, sampled at `spacing` in Re and Im.
std::vector<ComplexEnergy> candidate_grid(const LaurentModel &model, double spacing = 0.25,
                                          double pad = 1.0);

std::vector<GBZPoint> predict_obc_spectrum(const LaurentModel &model,
                                           const std::vector<ComplexEnergy> &candidates,
                                           const PredictOptions &opt = {});

struct SaddlePoint
{
  ComplexEnergy energy;
  RVec k;
  RVec mu;
  bool endpoint = false;  // the GBZ samples near it lie on one side only
  bool near_gbz = false;  // some GBZ sample lies within `radius`
};

// Critical points of H(beta) lying on the 1D GBZ (a double root occupying the
// p-th and (p+1)-th modulus slots). Single-orbital 1D models only.
std::vector<SaddlePoint> saddle_points(const LaurentModel &model,
                                       const std::vector<GBZPoint> &gbz, double radius = 1.0);

}  // namespace nonbloch

#endif  // NONBLOCH_GBZ_HPP
