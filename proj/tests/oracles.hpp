// Copyright The nonbloch Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Reference computations for the tests. They only read model coefficients and never
// call the library's numerical routines.

#ifndef NONBLOCH_TESTS_ORACLES_HPP
#define NONBLOCH_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "nonbloch/model.hpp"

namespace oracle
{

using nonbloch::cplx;
using nonbloch::CMatrix;
using nonbloch::IVec;
using nonbloch::RVec;
constexpr double pi = 3.14159265358979323846;

// sum_alpha c_alpha exp(sum_m alpha_m (i k_m + mu_m)), term by term.
inline CMatrix symbol(const nonbloch::LaurentModel &m, const RVec &k, const RVec &mu)
{
  CMatrix h = CMatrix::Zero(m.n_orb(), m.n_orb());
  for (const auto &[alpha, c] : m.terms())
  {
    cplx z = 0.0;
    for (std::size_t a = 0; a < alpha.size(); a++)
    {
      z += static_cast<double>(alpha[a]) * cplx(mu[a], k[a]);
    }
    h += std::exp(z) * c;
  }
  return h;
}

inline cplx char_poly(const nonbloch::LaurentModel &m, cplx e, const RVec &k, const RVec &mu)
{
  const CMatrix a = e * CMatrix::Identity(m.n_orb(), m.n_orb()) - symbol(m, k, mu);
  return a.determinant();
}

// Weierstrass / Durand-Kerner iteration for sum_j c[j] z^j.
inline std::vector<cplx> roots(std::vector<cplx> c)
{
  while (!c.empty() && std::abs(c.back()) == 0.0)
  {
    c.pop_back();
  }
  const int n = static_cast<int>(c.size()) - 1;
  if (n < 1)
  {
    return {};
  }
  for (auto &x : c)
  {
    x /= c[n];
  }
  double radius = 0.0;
  for (int j = 0; j < n; j++)
  {
    radius = std::max(radius, std::pow(std::abs(c[j]), 1.0 / (n - j)));
  }
  radius = 2.0 * std::max(radius, 1e-3);
  std::vector<cplx> z(n);
  for (int j = 0; j < n; j++)
  {
    z[j] = std::polar(radius, 2.0 * pi * j / n + 0.4);
  }
  auto p = [&](cplx x)
  {
    cplx acc = 0.0;
    for (int j = n; j >= 0; j--)
    {
      acc = acc * x + c[j];
    }
    return acc;
  };
  for (int it = 0; it < 2000; it++)
  {
    double moved = 0.0;
    for (int i = 0; i < n; i++)
    {
      cplx den = 1.0;
      for (int j = 0; j < n; j++)
      {
        if (j != i)
        {
          den *= z[i] - z[j];
        }
      }
      const cplx dz = p(z[i]) / den;
      z[i] -= dz;
      moved = std::max(moved, std::abs(dz) / std::max(1.0, std::abs(z[i])));
    }
    if (moved < 1e-15)
    {
      break;
    }
  }
  return z;
}

// Phase winding of f over [0, 2 pi), summed on a fixed fine grid.
template <typename F>
double winding(F &&f, int n = 20000)
{
  double total = 0.0;
  cplx prev = f(0.0);
  for (int j = 1; j <= n; j++)
  {
    const cplx cur = f(2.0 * pi * j / n);
    total += std::arg(cur / prev);
    prev = cur;
  }
  return total / (2.0 * pi);
}

// Single-orbital 1D model: coefficients of beta^{-lo} (E - H(beta)) in ascending order.
inline std::vector<cplx> shifted_char_coeffs(const nonbloch::LaurentModel &m, cplx e, int &lo)
{
  int lowest = 0, highest = 0;
  for (const auto &[alpha, c] : m.terms())
  {
    lowest = std::min(lowest, alpha[0]);
    highest = std::max(highest, alpha[0]);
  }
  lo = lowest;
  std::vector<cplx> out(highest - lowest + 1, 0.0);
  for (const auto &[alpha, c] : m.terms())
  {
    out[alpha[0] - lowest] -= c(0, 0);
  }
  out[-lowest] += e;
  return out;
}

struct GbzPoint1d
{
  double log_mod_p = 0.0;   // log|beta_p|
  double log_mod_p1 = 0.0;  // log|beta_{p+1}|
  double k_p = 0.0, k_p1 = 0.0;
};

// Roots ordered by modulus; p = -lowest exponent.
inline GbzPoint1d gbz_condition_1d(const nonbloch::LaurentModel &m, cplx e)
{
  int lo = 0;
  auto z = roots(shifted_char_coeffs(m, e, lo));
  std::sort(z.begin(), z.end(), [](cplx a, cplx b) { return std::abs(a) < std::abs(b); });
  const int p = -lo;
  return {std::log(std::abs(z[p - 1])), std::log(std::abs(z[p])), std::arg(z[p - 1]),
          std::arg(z[p])};
}

// H_{(i,a),(j,b)} = (c_{R_j - R_i})_{ab}, by looping over site pairs.
inline CMatrix obc_matrix(const nonbloch::LaurentModel &m, const std::vector<IVec> &sites)
{
  const int n = m.n_orb();
  const int s = static_cast<int>(sites.size());
  CMatrix h = CMatrix::Zero(s * n, s * n);
  for (int i = 0; i < s; i++)
  {
    for (int j = 0; j < s; j++)
    {
      IVec d(sites[i].size());
      for (std::size_t a = 0; a < d.size(); a++)
      {
        d[a] = sites[j][a] - sites[i][a];
      }
      auto it = m.terms().find(d);
      if (it != m.terms().end())
      {
        h.block(i * n, j * n, n, n) = it->second;
      }
    }
  }
  return h;
}

inline double directed_hausdorff(const std::vector<cplx> &a, const std::vector<cplx> &b)
{
  double h = 0.0;
  for (const auto &x : a)
  {
    double d = std::numeric_limits<double>::infinity();
    for (const auto &y : b)
    {
      d = std::min(d, std::abs(x - y));
    }
    h = std::max(h, d);
  }
  return h;
}

inline double hausdorff(const std::vector<cplx> &a, const std::vector<cplx> &b)
{
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

// Greedy nearest matching; max distance over the pairs.
inline double match_distance(std::vector<cplx> a, std::vector<cplx> b)
{
  if (b.size() < a.size())
  {
    return std::numeric_limits<double>::infinity();
  }
  double worst = 0.0;
  for (const auto &x : a)
  {
    std::size_t best = 0;
    for (std::size_t j = 1; j < b.size(); j++)
    {
      if (std::abs(b[j] - x) < std::abs(b[best] - x))
      {
        best = j;
      }
    }
    worst = std::max(worst, std::abs(b[best] - x));
    b.erase(b.begin() + static_cast<long>(best));
  }
  return worst;
}

// Random model with coefficients of unit size on offsets in [-r, r]^d.
inline nonbloch::LaurentModel random_model(std::mt19937_64 &rng, int dim, int n_orb, int r,
                                           int n_terms)
{
  std::uniform_int_distribution<int> off(-r, r);
  std::normal_distribution<double> g(0.0, 1.0);
  nonbloch::LaurentModel::TermMap t;
  CMatrix onsite(n_orb, n_orb);
  for (int i = 0; i < n_orb; i++)
  {
    for (int j = 0; j < n_orb; j++)
    {
      onsite(i, j) = cplx(g(rng), g(rng));
    }
  }
  t[IVec(dim, 0)] = onsite;
  for (int q = 0; q < n_terms; q++)
  {
    IVec a(dim);
    for (auto &x : a)
    {
      x = off(rng);
    }
    CMatrix c(n_orb, n_orb);
    for (int i = 0; i < n_orb; i++)
    {
      for (int j = 0; j < n_orb; j++)
      {
        c(i, j) = cplx(g(rng), g(rng));
      }
    }
    t[a] = c;
  }
  return nonbloch::LaurentModel(dim, n_orb, t);
}

// Mean of log|det(E - H_mu(k))| by the midpoint rule on n points (1D).
inline double potential_1d(const nonbloch::LaurentModel &m, cplx e, double mu, int n = 4096)
{
  double acc = 0.0;
  for (int j = 0; j < n; j++)
  {
    const double k = -pi + 2.0 * pi * (j + 0.5) / n;
    acc += std::log(std::abs(char_poly(m, e, {k}, {mu})));
  }
  return acc / n;
}

}  // namespace oracle

#endif  // NONBLOCH_TESTS_ORACLES_HPP
