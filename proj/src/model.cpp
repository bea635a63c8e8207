// Copyright The nonbloch Authors.
// SPDX-License-Identifier: Apache-2.0

#include "nonbloch/model.hpp"

#include <algorithm>
#include <limits>

#include <Eigen/LU>

namespace nonbloch
{

MomentumPoint::MomentumPoint(RVec k_, RVec mu_) : k(std::move(k_)), mu(std::move(mu_))
{
  require(k.size() == mu.size(), ErrorCode::DimensionMismatch,
          "momentum point: k and mu must have equal length");
  for (auto &km : k)
  {
    require(std::isfinite(km), ErrorCode::InvalidArgument, "momentum point: non-finite k");
    km = wrap_phase(km);
  }
  for (auto mm : mu)
  {
    require(std::isfinite(mm), ErrorCode::InvalidArgument, "momentum point: non-finite mu");
  }
}

LaurentModel::LaurentModel(int dim, int n_orb, TermMap terms)
  : dim_(dim), n_orb_(n_orb), terms_(std::move(terms))
{
  require(dim >= 1, ErrorCode::InvalidArgument, "model: dim must be >= 1");
  require(n_orb >= 1, ErrorCode::InvalidArgument, "model: n_orb must be >= 1");
  const IVec zero(dim, 0);
  if (!terms_.contains(zero))
  {
    terms_.emplace(zero, CMatrix::Zero(n_orb, n_orb));
  }
  min_.assign(dim, 0);
  max_.assign(dim, 0);
  double big = 0.0;
  for (const auto &[alpha, c] : terms_)
  {
    require(static_cast<int>(alpha.size()) == dim, ErrorCode::DimensionMismatch,
            "model: offset length differs from dim");
    require(c.rows() == n_orb && c.cols() == n_orb, ErrorCode::DimensionMismatch,
            "model: coefficient block is not n_orb x n_orb");
    for (int m = 0; m < dim; m++)
    {
      min_[m] = std::min(min_[m], alpha[m]);
      max_[m] = std::max(max_[m], alpha[m]);
    }
    for (Eigen::Index j = 0; j < c.cols(); j++)
    {
      for (Eigen::Index i = 0; i < c.rows(); i++)
      {
        require(is_finite(c(i, j)), ErrorCode::InvalidArgument, "model: non-finite coefficient");
        big = std::max(big, std::abs(c(i, j)));
      }
    }
  }
  scale_ = big * static_cast<double>(terms_.size());
  if (scale_ == 0.0)
  {
    scale_ = 1.0;
  }
}

LaurentModel LaurentModel::scalar(int dim, const std::vector<std::pair<IVec, cplx>> &terms)
{
  TermMap map;
  for (const auto &[alpha, c] : terms)
  {
    auto [it, inserted] = map.try_emplace(alpha, CMatrix::Constant(1, 1, c));
    if (!inserted)
    {
      it->second(0, 0) += c;
    }
  }
  return LaurentModel(dim, 1, std::move(map));
}

CMatrix LaurentModel::coefficient(const IVec &offset) const
{
  auto it = terms_.find(offset);
  return it == terms_.end() ? CMatrix::Zero(n_orb_, n_orb_) : it->second;
}

CMatrix LaurentModel::at_log_beta(std::span<const cplx> log_beta) const
{
  require(static_cast<int>(log_beta.size()) == dim_, ErrorCode::DimensionMismatch,
          "model evaluation: point dimension differs from model dim");
  CMatrix h = CMatrix::Zero(n_orb_, n_orb_);
  for (const auto &[alpha, c] : terms_)
  {
    cplx z = 0.0;
    for (int m = 0; m < dim_; m++)
    {
      z += static_cast<double>(alpha[m]) * log_beta[m];
    }
    h += std::exp(z) * c;
  }
  return h;
}

CMatrix LaurentModel::at_beta(std::span<const cplx> beta) const
{
  require(static_cast<int>(beta.size()) == dim_, ErrorCode::DimensionMismatch,
          "model evaluation: point dimension differs from model dim");
  CMatrix h = CMatrix::Zero(n_orb_, n_orb_);
  for (const auto &[alpha, c] : terms_)
  {
    cplx w = 1.0;
    for (int m = 0; m < dim_; m++)
    {
      w *= std::pow(beta[m], alpha[m]);
    }
    h += w * c;
  }
  return h;
}

namespace
{

std::vector<cplx> log_beta_of(std::span<const double> k, std::span<const double> mu)
{
  require(k.size() == mu.size(), ErrorCode::DimensionMismatch, "k and mu must have equal length");
  std::vector<cplx> z(k.size());
  for (std::size_t m = 0; m < k.size(); m++)
  {
    z[m] = cplx(mu[m], k[m]);
  }
  return z;
}

cplx det_small(const CMatrix &a)
{
  if (a.rows() == 1)
  {
    return a(0, 0);
  }
  if (a.rows() == 2)
  {
    return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  }
  return a.partialPivLu().determinant();
}

}  // namespace

CMatrix eval_bloch(const LaurentModel &model, const MomentumPoint &p)
{
  require(static_cast<int>(p.dim()) == model.dim(), ErrorCode::DimensionMismatch,
          "eval_bloch: momentum dimension " + std::to_string(p.dim()) +
              " differs from model dimension " + std::to_string(model.dim()));
  const auto z = log_beta_of(p.k, p.mu);
  return model.at_log_beta(z);
}

cplx characteristic(const LaurentModel &model, cplx energy, std::span<const double> k,
                    std::span<const double> mu)
{
  const auto z = log_beta_of(k, mu);
  CMatrix a = -model.at_log_beta(z);
  a.diagonal().array() += energy;
  return det_small(a);
}

LaurentModel gauge_transform(const LaurentModel &model, std::span<const double> mu)
{
  require(static_cast<int>(mu.size()) == model.dim(), ErrorCode::DimensionMismatch,
          "gauge_transform: mu dimension differs from model dimension");
  for (auto m : mu)
  {
    require(std::isfinite(m), ErrorCode::InvalidArgument, "gauge_transform: non-finite mu");
  }
  LaurentModel::TermMap out;
  for (const auto &[alpha, c] : model.terms())
  {
    double dot = 0.0;
    for (int m = 0; m < model.dim(); m++)
    {
      dot += mu[m] * alpha[m];
    }
    out.emplace(alpha, c * std::exp(dot));
  }
  return LaurentModel(model.dim(), model.n_orb(), std::move(out));
}

LaurentModel builtin_1d()
{
  const cplx w0(1038.0, -4.0);
  const double kappa = 4.0, kappa_p = 2.0, kappa_m = 0.4;
  return LaurentModel::scalar(1, {{{0}, w0},
                                  {{1}, kappa},
                                  {{-1}, kappa},
                                  {{-2}, kappa_p},
                                  {{2}, kappa_m}});
}

LaurentModel builtin_2d()
{
  const cplx w0(1040.0, -6.0);
  const double kappa_p = 2.72, kappa_m = 0.48, kappa_d = 0.64;
  return LaurentModel::scalar(2, {{{0, 0}, w0},
                                  {{-1, 0}, kappa_p},
                                  {{0, -1}, kappa_p},
                                  {{1, 0}, kappa_m},
                                  {{0, 1}, kappa_m},
                                  {{1, 1}, kappa_d},
                                  {{-1, 1}, kappa_d},
                                  {{1, -1}, kappa_d},
                                  {{-1, -1}, kappa_d}});
}

std::vector<std::string> builtin_model_names()
{
  return {"fig2-1d", "fig3-2d"};
}

LaurentModel builtin_model(std::string_view name)
{
  if (name == "fig2-1d")
  {
    return builtin_1d();
  }
  if (name == "fig3-2d")
  {
    return builtin_2d();
  }
  throw Error(ErrorCode::InvalidArgument, "unknown built-in model '" + std::string(name) + "'");
}

LaurentPolynomial characteristic_along_axis(const LaurentModel &model, cplx energy,
                                            std::span<const cplx> log_beta, int axis)
{
  require(static_cast<int>(log_beta.size()) == model.dim(), ErrorCode::DimensionMismatch,
          "characteristic_along_axis: point dimension differs from model dimension");
  require(axis >= 0 && axis < model.dim(), ErrorCode::InvalidArgument,
          "characteristic_along_axis: axis out of range");
  const int n = model.n_orb();
  const int lo = n * model.min_offset(axis);
  const int hi = n * model.max_offset(axis);

  LaurentPolynomial p;
  if (n == 1)
  {
    // Collect coefficients directly.
    p.lowest = lo;
    p.coeffs.assign(hi - lo + 1, cplx(0.0));
    for (const auto &[alpha, c] : model.terms())
    {
      cplx z = 0.0;
      for (int m = 0; m < model.dim(); m++)
      {
        if (m != axis)
        {
          z += static_cast<double>(alpha[m]) * log_beta[m];
        }
      }
      p.coeffs[alpha[axis] - lo] -= std::exp(z) * c(0, 0);
    }
    p.coeffs[-lo] += energy;
  }
  else
  {
    std::vector<cplx> z(log_beta.begin(), log_beta.end());
    auto f = [&](cplx w)
    {
      z[axis] = std::log(w);
      CMatrix a = -model.at_log_beta(z);
      a.diagonal().array() += energy;
      return det_small(a);
    };
    p = interpolate_laurent(f, lo, hi);
  }
  p.trim();
  return p;
}

}  // namespace nonbloch
