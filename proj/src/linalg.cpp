// Copyright The nonbloch Authors.
// SPDX-License-Identifier: Apache-2.0

#include "nonbloch/linalg.hpp"

#include <algorithm>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <lapacke.h>

namespace nonbloch
{

namespace
{

constexpr double kBiorthTol = 1e-6;

lapack_complex_double *lp(cplx *p)
{
  return reinterpret_cast<lapack_complex_double *>(p);
}

void check_square_finite(const CMatrix &h)
{
  require(h.rows() == h.cols(), ErrorCode::DimensionMismatch,
          "eigendecomposition needs a square matrix");
  for (Eigen::Index j = 0; j < h.cols(); j++)
  {
    for (Eigen::Index i = 0; i < h.rows(); i++)
    {
      require(is_finite(h(i, j)), ErrorCode::InvalidArgument, "matrix has non-finite entries");
    }
  }
}

}  // namespace

EigenDecomposition eig_biorthogonal(const CMatrix &h)
{
  check_square_finite(h);
  EigenDecomposition out;
  const auto n = static_cast<lapack_int>(h.rows());
  if (n == 0)
  {
    return out;
  }
  CMatrix a = h;
  out.values.resize(n);
  out.left.resize(n, n);
  out.right.resize(n, n);
  const lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'V', 'V', n, lp(a.data()), n,
                                        lp(out.values.data()), lp(out.left.data()), n,
                                        lp(out.right.data()), n);
  if (info != 0)
  {
    throw Error(ErrorCode::EigensolverFailure,
                "zgeev failed (info " + std::to_string(info) + ")");
  }
  for (Eigen::Index i = 0; i < n; i++)
  {
    out.right.col(i).normalize();
    const cplx s = out.left.col(i).dot(out.right.col(i));
    if (std::abs(s) > 0.0)
    {
      out.left.col(i) /= std::conj(s);
    }
  }
  const CMatrix m = out.left.adjoint() * out.right;
  out.biorthogonality_residual = (m - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
  out.biorthogonal = out.biorthogonality_residual <= kBiorthTol;
  return out;
}

CVector eigenvalues(const CMatrix &h)
{
  check_square_finite(h);
  const auto n = static_cast<lapack_int>(h.rows());
  if (n == 0)
  {
    return {};
  }
  CMatrix a = h;
  CVector w(n);
  const lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, lp(a.data()), n,
                                        lp(w.data()), nullptr, n, nullptr, n);
  if (info != 0)
  {
    throw Error(ErrorCode::EigensolverFailure,
                "zgeev failed (info " + std::to_string(info) + ")");
  }
  return w;
}

RVec eigenvalue_conditions(const EigenDecomposition &eig)
{
  RVec out(eig.values.size());
  for (Eigen::Index i = 0; i < eig.values.size(); i++)
  {
    const double s = std::abs(eig.left.col(i).dot(eig.right.col(i)));
    out[i] = s > 0.0 ? eig.left.col(i).norm() * eig.right.col(i).norm() / s
                     : std::numeric_limits<double>::infinity();
  }
  return out;
}

std::vector<cplx> polynomial_roots(std::span<const cplx> coeffs)
{
  std::size_t n = coeffs.size();
  while (n > 0 && coeffs[n - 1] == cplx(0.0))
  {
    n--;
  }
  if (n <= 1)
  {
    return {};
  }
  const int degree = static_cast<int>(n) - 1;
  const cplx lead = coeffs[degree];
  std::vector<cplx> roots;
  if (degree == 1)
  {
    roots.push_back(-coeffs[0] / lead);
  }
  else if (degree == 2)
  {
    const cplx a = lead, b = coeffs[1], c = coeffs[0];
    const cplx disc = std::sqrt(b * b - 4.0 * a * c);
    // Pick the sign that avoids cancellation.
    const cplx q = std::real(std::conj(b) * disc) >= 0.0 ? -0.5 * (b + disc) : -0.5 * (b - disc);
    if (q == cplx(0.0))
    {
      roots.assign(2, cplx(0.0));
    }
    else
    {
      roots.push_back(q / a);
      roots.push_back(c / q);
    }
  }
  else
  {
    CMatrix companion = CMatrix::Zero(degree, degree);
    for (int i = 1; i < degree; i++)
    {
      companion(i, i - 1) = 1.0;
    }
    for (int i = 0; i < degree; i++)
    {
      companion(i, degree - 1) = -coeffs[i] / lead;
    }
    Eigen::ComplexEigenSolver<CMatrix> es(companion, false);
    if (es.info() != Eigen::Success)
    {
      throw Error(ErrorCode::EigensolverFailure, "companion eigensolver did not converge");
    }
    roots.assign(es.eigenvalues().data(), es.eigenvalues().data() + degree);
  }

  // Newton polish; keep a step only if it lowers the residual.
  auto eval = [&](cplx z, cplx &dp)
  {
    cplx p = coeffs[degree];
    dp = 0.0;
    for (int j = degree - 1; j >= 0; j--)
    {
      dp = dp * z + p;
      p = p * z + coeffs[j];
    }
    return p;
  };
  for (auto &z : roots)
  {
    for (int it = 0; it < 3; it++)
    {
      cplx dp;
      const cplx p = eval(z, dp);
      if (dp == cplx(0.0))
      {
        break;
      }
      const cplx zn = z - p / dp;
      cplx dpn;
      if (std::abs(eval(zn, dpn)) < std::abs(p))
      {
        z = zn;
      }
      else
      {
        break;
      }
    }
  }
  return roots;
}

cplx LaurentPolynomial::operator()(cplx z) const
{
  cplx acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it)
  {
    acc = acc * z + *it;
  }
  return acc * std::pow(z, lowest);
}

void LaurentPolynomial::trim(double rel_tol)
{
  double big = 0.0;
  for (const auto &c : coeffs)
  {
    big = std::max(big, std::abs(c));
  }
  if (big == 0.0)
  {
    coeffs.clear();
    return;
  }
  const double cut = rel_tol * big;
  std::size_t first = 0;
  while (first < coeffs.size() && std::abs(coeffs[first]) <= cut)
  {
    first++;
  }
  std::size_t last = coeffs.size();
  while (last > first && std::abs(coeffs[last - 1]) <= cut)
  {
    last--;
  }
  lowest += static_cast<int>(first);
  coeffs = std::vector<cplx>(coeffs.begin() + first, coeffs.begin() + last);
}

std::vector<cplx> LaurentPolynomial::roots() const
{
  return polynomial_roots(coeffs);
}

double LaurentPolynomial::mean_log_abs(double log_rho, std::span<const cplx> roots) const
{
  if (coeffs.empty())
  {
    return -std::numeric_limits<double>::infinity();
  }
  double acc = lowest * log_rho + std::log(std::abs(coeffs.back()));
  for (const auto &r : roots)
  {
    acc += std::max(log_rho, std::log(std::abs(r)));
  }
  return acc;
}

int LaurentPolynomial::winding(double log_rho, std::span<const cplx> roots) const
{
  int inside = 0;
  for (const auto &r : roots)
  {
    if (std::log(std::abs(r)) < log_rho)
    {
      inside++;
    }
  }
  return lowest + inside;
}

}  // namespace nonbloch
