// Copyright The nonbloch Authors.
// SPDX-License-Identifier: Apache-2.0

#include "nonbloch/supercell.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "nonbloch/parallel.hpp"

namespace nonbloch
{

namespace
{

int floor_div(int a, int b)
{
  int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0)))
  {
    q--;
  }
  return q;
}

std::string vec_str(const RVec &v)
{
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); i++)
  {
    s += (i ? ", " : "") + std::to_string(v[i]);
  }
  return s + ")";
}

}  // namespace

SupercellSpec::SupercellSpec(IVec sizes_, RVec twist_, RVec mu_, TwistMode mode_)
  : sizes(std::move(sizes_)), twist(std::move(twist_)), mu(std::move(mu_)), mode(mode_)
{
  require(!sizes.empty(), ErrorCode::InvalidArgument, "supercell: empty size vector");
  require(twist.size() == sizes.size() && mu.size() == sizes.size(),
          ErrorCode::DimensionMismatch, "supercell: sizes, twist and mu lengths differ");
  for (auto n : sizes)
  {
    require(n >= 1, ErrorCode::InvalidArgument, "supercell: sizes must be >= 1");
  }
  for (auto &t : twist)
  {
    require(std::isfinite(t), ErrorCode::InvalidArgument, "supercell: non-finite twist");
    t = wrap_phase(t);
  }
  for (auto m : mu)
  {
    require(std::isfinite(m), ErrorCode::InvalidArgument, "supercell: non-finite mu");
  }
}

int SupercellSpec::cell_count() const
{
  return std::accumulate(sizes.begin(), sizes.end(), 1, std::multiplies<>());
}

IVec SupercellSpec::cell_coords(int index) const
{
  IVec c(sizes.size());
  for (int m = static_cast<int>(sizes.size()) - 1; m >= 0; m--)
  {
    c[m] = index % sizes[m];
    index /= sizes[m];
  }
  return c;
}

int SupercellSpec::cell_index(const IVec &coords) const
{
  int idx = 0;
  for (std::size_t m = 0; m < sizes.size(); m++)
  {
    idx = idx * sizes[m] + coords[m];
  }
  return idx;
}

RVec SupercellSpec::bloch_momentum(const IVec &n) const
{
  RVec k(sizes.size());
  for (std::size_t m = 0; m < sizes.size(); m++)
  {
    k[m] = wrap_phase((twist[m] + kTwoPi * n[m]) / sizes[m]);
  }
  return k;
}

CMatrix build_supercell(const LaurentModel &model, const SupercellSpec &spec)
{
  const int d = model.dim();
  require(static_cast<int>(spec.dim()) == d, ErrorCode::DimensionMismatch,
          "build_supercell: spec dimension differs from model dimension");
  for (const auto &[alpha, c] : model.terms())
  {
    for (int m = 0; m < d; m++)
    {
      if (std::abs(alpha[m]) > spec.sizes[m])
      {
        throw Error(ErrorCode::InvalidArgument,
                    "build_supercell: hopping offset " + std::to_string(alpha[m]) + " along axis " +
                        std::to_string(m) + " exceeds supercell size " +
                        std::to_string(spec.sizes[m]) + " (wrap ambiguity)");
      }
    }
  }
  const int n_orb = model.n_orb();
  const int cells = spec.cell_count();
  CMatrix h = CMatrix::Zero(static_cast<Eigen::Index>(cells) * n_orb,
                            static_cast<Eigen::Index>(cells) * n_orb);
  IVec target(d);
  for (int j = 0; j < cells; j++)
  {
    const IVec src = spec.cell_coords(j);
    for (const auto &[alpha, c] : model.terms())
    {
      cplx exponent = 0.0;
      for (int m = 0; m < d; m++)
      {
        const int t = src[m] + alpha[m];
        const int w = floor_div(t, spec.sizes[m]);
        target[m] = t - w * spec.sizes[m];
        if (spec.mode == TwistMode::Diluted)
        {
          exponent += cplx(spec.mu[m] * alpha[m], spec.twist[m] * w);
        }
        else
        {
          exponent += cplx(spec.sizes[m] * spec.mu[m], spec.twist[m]) * static_cast<double>(w);
        }
      }
      const int col = spec.cell_index(target);
      h.block(static_cast<Eigen::Index>(j) * n_orb, static_cast<Eigen::Index>(col) * n_orb, n_orb,
              n_orb) += std::exp(exponent) * c;
    }
  }
  return h;
}

CVector supercell_spectrum(const LaurentModel &model, const SupercellSpec &spec)
{
  return eigenvalues(build_supercell(model, spec));
}

CVector plane_wave_amplitude(const CVector &v, const SupercellSpec &spec, int n_orb,
                             const IVec &n)
{
  const int cells = spec.cell_count();
  require(v.size() == static_cast<Eigen::Index>(cells) * n_orb, ErrorCode::DimensionMismatch,
          "unfold: eigenvector length does not match the supercell");
  const int d = static_cast<int>(spec.dim());
  RVec k(d);
  for (int m = 0; m < d; m++)
  {
    // Unreduced k_n so that e^{-i k_n R} matches the twisted periodicity.
    k[m] = (spec.twist[m] + kTwoPi * n[m]) / spec.sizes[m];
  }
  CVector amp = CVector::Zero(n_orb);
  for (int j = 0; j < cells; j++)
  {
    const IVec r = spec.cell_coords(j);
    double phase = 0.0;
    for (int m = 0; m < d; m++)
    {
      phase -= k[m] * r[m];
    }
    amp += std::polar(1.0, phase) * v.segment(static_cast<Eigen::Index>(j) * n_orb, n_orb);
  }
  return amp;
}

BlochAssignment unfold(const CVector &v, const SupercellSpec &spec, int n_orb)
{
  const int cells = spec.cell_count();
  const double norm2 = v.squaredNorm();
  BlochAssignment best{IVec(spec.dim(), 0), RVec(spec.dim(), 0.0), -1.0, CVector::Zero(n_orb)};
  for (int n = 0; n < cells; n++)
  {
    const IVec nidx = spec.cell_coords(n);
    CVector amp = plane_wave_amplitude(v, spec, n_orb, nidx);
    const double w = norm2 > 0.0 ? amp.squaredNorm() / (cells * norm2) : 0.0;
    if (w > best.weight + 1e-12)
    {
      best.n = nidx;
      best.k = spec.bloch_momentum(nidx);
      best.weight = w;
      best.amplitude = std::move(amp);
    }
  }
  best.weight = std::clamp(best.weight, 0.0, 1.0);
  return best;
}

std::vector<RVec> uniform_twist_grid(int dim, int per_axis)
{
  require(dim >= 1 && per_axis >= 1, ErrorCode::InvalidArgument,
          "twist grid: dim and per_axis must be >= 1");
  RVec axis(per_axis);
  for (int i = 0; i < per_axis; i++)
  {
    axis[i] = wrap_phase(-kPi + kTwoPi * (i + 1) / per_axis);
  }
  std::vector<RVec> grid;
  int total = 1;
  for (int m = 0; m < dim; m++)
  {
    total *= per_axis;
  }
  for (int idx = 0; idx < total; idx++)
  {
    RVec theta(dim);
    int r = idx;
    for (int m = dim - 1; m >= 0; m--)
    {
      theta[m] = axis[r % per_axis];
      r /= per_axis;
    }
    grid.push_back(theta);
  }
  return grid;
}

std::vector<SpectralSample> sweep_bz(const LaurentModel &model, const IVec &sizes,
                                     const RVec &mu, const std::vector<RVec> &twist_grid)
{
  require(!twist_grid.empty(), ErrorCode::InvalidArgument, "sweep_bz: empty twist grid");
  const int n_orb = model.n_orb();
  std::vector<std::vector<SpectralSample>> per_twist(twist_grid.size());

  parallel_for(twist_grid.size(), [&](std::size_t t)
  {
    const SupercellSpec spec(sizes, twist_grid[t], mu, TwistMode::Diluted);
    EigenDecomposition eig;
    try
    {
      eig = eig_biorthogonal(build_supercell(model, spec));
    }
    catch (const Error &e)
    {
      throw Error(e.code(), std::string(e.what()) + " at twist " + vec_str(twist_grid[t]));
    }

    struct Pair
    {
      ComplexEnergy e;
      CVector r, l;
      double w;
    };
    std::map<int, std::vector<Pair>> groups;
    for (Eigen::Index i = 0; i < eig.values.size(); i++)
    {
      auto a = unfold(eig.right.col(i), spec, n_orb);
      CVector r = a.amplitude;
      const double rn = r.norm();
      if (rn > 0.0)
      {
        r /= rn;
      }
      CVector l = plane_wave_amplitude(eig.left.col(i), spec, n_orb, a.n);
      const cplx overlap = l.dot(r);
      if (std::abs(overlap) > 0.0)
      {
        l /= std::conj(overlap);
      }
      groups[spec.cell_index(a.n)].push_back({eig.values(i), std::move(r), std::move(l), a.weight});
    }
    auto &out = per_twist[t];
    for (auto &[idx, pairs] : groups)
    {
      std::sort(pairs.begin(), pairs.end(), [](const Pair &x, const Pair &y)
      {
        if (x.e.real() != y.e.real())
        {
          return x.e.real() < y.e.real();
        }
        return x.e.imag() < y.e.imag();
      });
      SpectralSample s;
      s.k = spec.bloch_momentum(spec.cell_coords(idx));
      s.mu = mu;
      s.twist = spec.twist;
      s.right.resize(n_orb, static_cast<Eigen::Index>(pairs.size()));
      s.left.resize(n_orb, static_cast<Eigen::Index>(pairs.size()));
      for (std::size_t c = 0; c < pairs.size(); c++)
      {
        s.energies.push_back(pairs[c].e);
        s.right.col(static_cast<Eigen::Index>(c)) = pairs[c].r;
        s.left.col(static_cast<Eigen::Index>(c)) = pairs[c].l;
        s.bloch_weight.push_back(pairs[c].w);
      }
      out.push_back(std::move(s));
    }
  });
  std::vector<SpectralSample> all;
  for (auto &v : per_twist)
  {
    for (auto &s : v)
    {
      all.push_back(std::move(s));
    }
  }
  return all;
}

}  // namespace nonbloch
