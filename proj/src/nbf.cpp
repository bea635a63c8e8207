// Copyright The nonbloch Authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <array>

#include "nonbloch/diagnostics.hpp"
#include "nonbloch/parallel.hpp"

namespace nonbloch
{

namespace
{

double torus_dist(const RVec &a, const RVec &b)
{
  double s = 0.0;
  for (std::size_t m = 0; m < a.size(); m++)
  {
    const double d = wrap_phase(a[m] - b[m]);
    s += d * d;
  }
  return std::sqrt(s);
}

void merge_sorted(std::vector<NBF> &pts, double dist, std::vector<std::string> &warnings)
{
  std::vector<NBF> kept;
  for (auto &p : pts)
  {
    auto it = std::find_if(kept.begin(), kept.end(),
                           [&](const NBF &q) { return torus_dist(p.k, q.k) < dist; });
    if (it == kept.end())
    {
      kept.push_back(std::move(p));
    }
    else if (it->sign != p.sign)
    {
      warnings.push_back("merged roots with opposite signs near k = (" +
                         std::to_string(p.k[0]) + (p.k.size() > 1 ? ", " + std::to_string(p.k[1]) : "") +
                         ")");
    }
  }
  std::sort(kept.begin(), kept.end(), [](const NBF &a, const NBF &b) { return a.k < b.k; });
  pts = std::move(kept);
}

NbfResult nbfs_1d(const LaurentModel &model, ComplexEnergy e, const RVec &mu,
                  const NbfOptions &opt)
{
  NbfResult out;
  const std::array<cplx, 1> z{cplx(mu[0], 0.0)};
  const auto p = characteristic_along_axis(model, e, z, 0);
  if (p.is_zero())
  {
    out.warnings.push_back("characteristic polynomial vanishes identically");
    return out;
  }
  for (const auto &r : p.roots())
  {
    if (std::abs(std::log(std::abs(r)) - mu[0]) <= opt.log_modulus_tol)
    {
      out.points.push_back({{wrap_phase(std::arg(r))}, 1, std::abs(p(r))});
    }
  }
  std::sort(out.points.begin(), out.points.end(), [](const NBF &a, const NBF &b) { return a.k < b.k; });
  const auto before = out.points.size();
  merge_sorted(out.points, opt.merge_dist, out.warnings);
  if (out.points.size() != before)
  {
    out.warnings.push_back("repeated root on the circle |beta| = e^mu");
  }
  return out;
}

struct Seg
{
  std::array<double, 2> a, b;
};

// Zero-level segments of one scalar field inside a unit cell with corner values
// v[0..3] at (0,0), (1,0), (1,1), (0,1).
std::vector<Seg> cell_segments(const std::array<double, 4> &v)
{
  static const std::array<std::array<double, 2>, 4> corner{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
  std::vector<std::array<double, 2>> cross;
  for (int e = 0; e < 4; e++)
  {
    const int a = e, b = (e + 1) % 4;
    if ((v[a] < 0.0) != (v[b] < 0.0))
    {
      const double t = v[a] / (v[a] - v[b]);
      cross.push_back({corner[a][0] + t * (corner[b][0] - corner[a][0]),
                       corner[a][1] + t * (corner[b][1] - corner[a][1])});
    }
  }
  std::vector<Seg> segs;
  if (cross.size() == 2)
  {
    segs.push_back({cross[0], cross[1]});
  }
  else if (cross.size() == 4)
  {
    const double centre = 0.25 * (v[0] + v[1] + v[2] + v[3]);
    if ((centre < 0.0) == (v[0] < 0.0))
    {
      segs.push_back({cross[0], cross[1]});
      segs.push_back({cross[2], cross[3]});
    }
    else
    {
      segs.push_back({cross[3], cross[0]});
      segs.push_back({cross[1], cross[2]});
    }
  }
  return segs;
}

bool intersect(const Seg &s, const Seg &t, std::array<double, 2> &out)
{
  const double rx = s.b[0] - s.a[0], ry = s.b[1] - s.a[1];
  const double sx = t.b[0] - t.a[0], sy = t.b[1] - t.a[1];
  const double denom = rx * sy - ry * sx;
  if (denom == 0.0)
  {
    return false;
  }
  const double qx = t.a[0] - s.a[0], qy = t.a[1] - s.a[1];
  const double u = (qx * sy - qy * sx) / denom;
  const double v = (qx * ry - qy * rx) / denom;
  if (u < 0.0 || u > 1.0 || v < 0.0 || v > 1.0)
  {
    return false;
  }
  out = {s.a[0] + u * rx, s.a[1] + u * ry};
  return true;
}

NbfResult nbfs_2d(const LaurentModel &model, ComplexEnergy e, const RVec &mu,
                  const NbfOptions &opt)
{
  const int n = opt.grid;
  require(n >= 8, ErrorCode::InvalidArgument, "find_nbfs: grid must be >= 8");
  const double h = kTwoPi / n;
  std::vector<cplx> f(static_cast<std::size_t>(n) * n);
  parallel_for(n, [&](std::size_t i)
  {
    RVec k(2);
    k[0] = -kPi + h * static_cast<double>(i);
    for (int j = 0; j < n; j++)
    {
      k[1] = -kPi + h * j;
      f[i * n + j] = characteristic(model, e, k, mu);
    }
  });
  auto val = [&](int i, int j) { return f[static_cast<std::size_t>((i + n) % n) * n + (j + n) % n]; };

  std::vector<RVec> seeds;
  for (int i = 0; i < n; i++)
  {
    for (int j = 0; j < n; j++)
    {
      const std::array<cplx, 4> c{val(i, j), val(i + 1, j), val(i + 1, j + 1), val(i, j + 1)};
      const auto re = cell_segments({c[0].real(), c[1].real(), c[2].real(), c[3].real()});
      if (re.empty())
      {
        continue;
      }
      const auto im = cell_segments({c[0].imag(), c[1].imag(), c[2].imag(), c[3].imag()});
      for (const auto &s : re)
      {
        for (const auto &t : im)
        {
          std::array<double, 2> x;
          if (intersect(s, t, x))
          {
            seeds.push_back({-kPi + h * (i + x[0]), -kPi + h * (j + x[1])});
          }
        }
      }
    }
  }

  const double scale_n = std::pow(model.spectral_scale(), model.n_orb());
  const double accept = opt.residual_tol * scale_n;
  NbfResult out;
  std::vector<std::optional<NBF>> polished(seeds.size());
  std::vector<std::string> notes(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t s)
  {
    RVec k = seeds[s];
    auto jac = [&](const RVec &at, cplx &f0)
    {
      f0 = characteristic(model, e, at, mu);
      Eigen::Matrix2d j;
      const double fd = 1e-7;
      for (int m = 0; m < 2; m++)
      {
        RVec kp = at, km = at;
        kp[m] += fd;
        km[m] -= fd;
        const cplx df = (characteristic(model, e, kp, mu) - characteristic(model, e, km, mu)) / (2 * fd);
        j(0, m) = df.real();
        j(1, m) = df.imag();
      }
      return j;
    };
    cplx f0;
    Eigen::Matrix2d j = jac(k, f0);
    bool converged = false;
    for (int it = 0; it < opt.newton_iters; it++)
    {
      if (std::abs(f0) < 1e-3 * accept)
      {
        converged = true;
        break;
      }
      const Eigen::Vector2d rhs(f0.real(), f0.imag());
      const Eigen::Vector2d step = j.fullPivLu().solve(rhs);
      if (!step.allFinite())
      {
        break;
      }
      k[0] -= step(0);
      k[1] -= step(1);
      j = jac(k, f0);
      if (step.norm() < 1e-14)
      {
        converged = std::abs(f0) <= accept;
        break;
      }
    }
    if (!converged && std::abs(f0) <= accept)
    {
      converged = true;
    }
    if (!converged)
    {
      notes[s] = "Newton did not converge from seed (" + std::to_string(seeds[s][0]) + ", " +
                 std::to_string(seeds[s][1]) + "); candidate dropped";
      return;
    }
    NBF p;
    p.k = {wrap_phase(k[0]), wrap_phase(k[1])};
    p.residual = std::abs(f0);
    const double det = j.determinant();
    if (std::abs(det) < 1e-8 * j.squaredNorm())
    {
      p.sign = 0;
      notes[s] = "degenerate Jacobian at k = (" + std::to_string(p.k[0]) + ", " +
                 std::to_string(p.k[1]) + "); sign reported as 0";
    }
    else
    {
      p.sign = det > 0.0 ? 1 : -1;
    }
    polished[s] = p;
  });
  for (std::size_t s = 0; s < seeds.size(); s++)
  {
    if (!notes[s].empty())
    {
      out.warnings.push_back(notes[s]);
    }
    if (polished[s])
    {
      out.points.push_back(*polished[s]);
    }
  }
  std::sort(out.points.begin(), out.points.end(), [](const NBF &a, const NBF &b) { return a.k < b.k; });
  merge_sorted(out.points, opt.merge_dist, out.warnings);
  return out;
}

}  // namespace

NbfResult find_nbfs(const LaurentModel &model, ComplexEnergy e, const RVec &mu,
                    const NbfOptions &opt)
{
  require(static_cast<int>(mu.size()) == model.dim(), ErrorCode::DimensionMismatch,
          "find_nbfs: mu dimension differs from model dimension");
  require(is_finite(e), ErrorCode::InvalidArgument, "find_nbfs: non-finite energy");
  switch (model.dim())
  {
  case 1:
    return nbfs_1d(model, e, mu, opt);
  case 2:
    return nbfs_2d(model, e, mu, opt);
  default:
    throw Error(ErrorCode::Unsupported, "find_nbfs: only 1D and 2D models are supported");
  }
}

}  // namespace nonbloch
