// Copyright The nonbloch Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef NONBLOCH_LINALG_HPP
#define NONBLOCH_LINALG_HPP

#include <span>
#include <vector>

#include "nonbloch/types.hpp"

namespace nonbloch
{

// Dense eigendecomposition of a general complex matrix with right and left
// eigenvectors. Columns of `right` have unit norm; columns of `left` are scaled
// so that left^H * right = I whenever the spectrum is non-defective.
struct EigenDecomposition
{
  CVector values;
  CMatrix right;
  CMatrix left;
  // false when the biorthogonality residual exceeded the internal bound, e.g. for
  // defective or numerically near-defective matrices.
  bool biorthogonal = true;
  double biorthogonality_residual = 0.0;
};

EigenDecomposition eig_biorthogonal(const CMatrix &h);

// Eigenvalues only.
CVector eigenvalues(const CMatrix &h);

// Eigenvalue condition numbers |l| |r| / |l^H r| for each column pair.
RVec eigenvalue_conditions(const EigenDecomposition &eig);

// Roots of sum_j coeffs[j] z^j via the companion matrix, polished by Newton.
// Leading zero coefficients are dropped before forming the companion matrix.
std::vector<cplx> polynomial_roots(std::span<const cplx> coeffs);

// A scalar Laurent polynomial sum_{j=lowest}^{lowest+coeffs.size()-1} coeffs[j-lowest] z^j.
struct LaurentPolynomial
{
  int lowest = 0;
  std::vector<cplx> coeffs;

  cplx operator()(cplx z) const;
  // Drop numerically vanishing coefficients at both ends (relative to the largest).
  void trim(double rel_tol = 1e-13);
  int highest() const { return lowest + static_cast<int>(coeffs.size()) - 1; }
  bool is_zero() const { return coeffs.empty(); }

  // Nonzero roots; the order of vanishing at z = 0 is absorbed into `lowest` by trim().
  std::vector<cplx> roots() const;

  // Mean of log|p(rho e^{ik})| over k in [0, 2pi), evaluated exactly via Jensen's formula.
  double mean_log_abs(double log_rho, std::span<const cplx> roots) const;

  // Number of zeros inside |z| < rho minus the pole order at the origin.
  int winding(double log_rho, std::span<const cplx> roots) const;
};

// Recover a Laurent polynomial with exponents in [lowest, highest] from samples of a
// function on the unit circle (exact when the function is such a polynomial).
template <typename F>
LaurentPolynomial interpolate_laurent(F &&f, int lowest, int highest)
{
  const int span = highest - lowest + 1;
  const int m = span;
  std::vector<cplx> samples(m);
  for (int j = 0; j < m; j++)
  {
    samples[j] = f(std::polar(1.0, kTwoPi * j / m));
  }
  LaurentPolynomial p;
  p.lowest = lowest;
  p.coeffs.assign(span, cplx(0.0));
  for (int e = lowest; e <= highest; e++)
  {
    cplx acc = 0.0;
    for (int j = 0; j < m; j++)
    {
      acc += samples[j] * std::polar(1.0, -kTwoPi * static_cast<double>(e) * j / m);
    }
    p.coeffs[e - lowest] = acc / static_cast<double>(m);
  }
  return p;
}

}  // namespace nonbloch

#endif  // NONBLOCH_LINALG_HPP
