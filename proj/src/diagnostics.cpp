// Copyright The nonbloch Authors.
// SPDX-License-Identifier: Apache-2.0

#include "nonbloch/diagnostics.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "nonbloch/parallel.hpp"

namespace nonbloch
{

namespace
{

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Midpoints of n uniform cells on [-pi, pi).
double midpoint(int j, int n)
{
  return -kPi + kTwoPi * (j + 0.5) / n;
}

int ipow(int base, int e)
{
  int r = 1;
  while (e-- > 0)
  {
    r *= base;
  }
  return r;
}

// Transverse log Bloch factors for line `line` among n_perp^(d-1), skipping `axis`.
std::vector<cplx> transverse_point(int d, int axis, int line, int n_perp, const RVec &mu)
{
  std::vector<cplx> z(d, cplx(0.0));
  int r = line;
  for (int m = d - 1; m >= 0; m--)
  {
    if (m == axis)
    {
      continue;
    }
    z[m] = cplx(mu[m], midpoint(r % n_perp, n_perp));
    r /= n_perp;
  }
  return z;
}

}  // namespace

IVec loop_direction(std::span<const double> n_hat)
{
  require(!n_hat.empty(), ErrorCode::InvalidArgument, "winding: empty direction");
  double norm = 0.0;
  for (auto v : n_hat)
  {
    require(std::isfinite(v), ErrorCode::InvalidArgument, "winding: non-finite direction");
    norm += v * v;
  }
  norm = std::sqrt(norm);
  require(norm > 0.0, ErrorCode::InvalidArgument, "winding: zero direction");
  double smallest = std::numeric_limits<double>::infinity();
  for (auto v : n_hat)
  {
    if (std::abs(v) / norm > 1e-9)
    {
      smallest = std::min(smallest, std::abs(v));
    }
  }
  for (int q = 1; q <= 16; q++)
  {
    IVec m(n_hat.size());
    bool ok = true;
    for (std::size_t i = 0; i < n_hat.size() && ok; i++)
    {
      const double x = q * n_hat[i] / smallest;
      m[i] = static_cast<int>(std::lround(x));
      ok = std::abs(x - m[i]) < 1e-6 * std::max(1.0, std::abs(x));
    }
    if (ok)
    {
      int g = 0;
      for (auto v : m)
      {
        g = std::gcd(g, std::abs(v));
      }
      for (auto &v : m)
      {
        v /= g;
      }
      return m;
    }
  }
  throw Error(ErrorCode::InvalidArgument,
              "winding: direction is not parallel to a small integer lattice vector");
}

RVec loop_base(const IVec &m, std::span<const double> k_perp)
{
  const int d = static_cast<int>(m.size());
  require(static_cast<int>(k_perp.size()) == d - 1, ErrorCode::DimensionMismatch,
          "winding: k_perp must have d - 1 components");
  int pivot = d - 1;
  while (pivot >= 0 && m[pivot] == 0)
  {
    pivot--;
  }
  require(pivot >= 0, ErrorCode::InvalidArgument, "winding: zero direction");
  RVec base(d, 0.0);
  std::size_t j = 0;
  for (int a = 0; a < d; a++)
  {
    if (a != pivot)
    {
      base[a] = k_perp[j++];
    }
  }
  return base;
}

int winding(const LaurentModel &model, const WindingQuery &q, const WindingOptions &opt)
{
  const int d = model.dim();
  require(static_cast<int>(q.mu.size()) == d && static_cast<int>(q.n_hat.size()) == d,
          ErrorCode::DimensionMismatch, "winding: mu and n_hat must have length d");
  require(q.grid >= 16, ErrorCode::InvalidArgument, "winding: grid must be >= 16");
  require(is_finite(q.energy), ErrorCode::InvalidArgument, "winding: non-finite energy");
  const IVec m = loop_direction(q.n_hat);
  const RVec base = loop_base(m, q.k_perp);
  const double tol = opt.tol_factor * std::pow(model.spectral_scale(), model.n_orb());

  RVec k(d);
  auto eval = [&](double tau)
  {
    for (int a = 0; a < d; a++)
    {
      k[a] = base[a] + tau * m[a];
    }
    return characteristic(model, q.energy, k, q.mu);
  };

  for (int n = q.grid; n <= opt.max_grid; n *= 2)
  {
    std::vector<cplx> f(n);
    for (int j = 0; j < n; j++)
    {
      const double tau = -kPi + kTwoPi * j / n;
      f[j] = eval(tau);
      if (std::abs(f[j]) < tol)
      {
        std::string at = "(";
        for (int a = 0; a < d; a++)
        {
          at += (a ? ", " : "") + std::to_string(k[a]);
        }
        throw Error(ErrorCode::OnSpectrum,
                    "winding: loop passes through the spectrum at node " + std::to_string(j) +
                        ", k = " + at + ")");
      }
    }
    double total = 0.0;
    double worst = 0.0;
    for (int j = 0; j < n; j++)
    {
      const double step = std::arg(f[(j + 1) % n] / f[j]);
      worst = std::max(worst, std::abs(step));
      total += step;
    }
    if (worst <= kPi / 2)
    {
      return static_cast<int>(std::lround(total / kTwoPi));
    }
  }
  throw Error(ErrorCode::NoConvergence,
              "winding: phase unwrapping did not converge at grid " + std::to_string(opt.max_grid));
}

ComplexEnergy EnergyGrid::node(std::size_t idx) const
{
  return node(static_cast<int>(idx % n_re), static_cast<int>(idx / n_re));
}

ComplexEnergy EnergyGrid::node(int i_re, int i_im) const
{
  return {re_min + i_re * d_re(), im_min + i_im * d_im()};
}

std::vector<std::optional<int>> winding_map(const LaurentModel &model, const EnergyGrid &grid,
                                            const RVec &mu, const RVec &n_hat,
                                            const RVec &k_perp, int loop_grid)
{
  require(grid.n_re >= 1 && grid.n_im >= 1, ErrorCode::InvalidArgument,
          "winding_map: empty energy grid");
  std::vector<std::optional<int>> out(grid.size());
  parallel_for(grid.size(), [&](std::size_t i)
  {
    try
    {
      out[i] = winding(model, {grid.node(i), mu, n_hat, k_perp, loop_grid});
    }
    catch (const Error &e)
    {
      if (e.code() != ErrorCode::OnSpectrum && e.code() != ErrorCode::NoConvergence)
      {
        throw;
      }
    }
  });
  return out;
}

double spectral_potential(const LaurentModel &model, ComplexEnergy e, const RVec &mu, int grid)
{
  const int d = model.dim();
  require(static_cast<int>(mu.size()) == d, ErrorCode::DimensionMismatch,
          "spectral_potential: mu dimension differs from model dimension");
  require(grid >= 1, ErrorCode::InvalidArgument, "spectral_potential: grid must be >= 1");
  const int rest = ipow(grid, d - 1);
  std::vector<double> rows(grid, 0.0);
  parallel_for(grid, [&](std::size_t i0)
  {
    RVec k(d);
    k[0] = -kPi + kTwoPi * static_cast<double>(i0) / grid;
    double acc = 0.0;
    for (int r = 0; r < rest; r++)
    {
      int idx = r;
      for (int m = d - 1; m >= 1; m--)
      {
        k[m] = -kPi + kTwoPi * (idx % grid) / grid;
        idx /= grid;
      }
      acc += std::log(std::abs(characteristic(model, e, k, mu)));
    }
    rows[i0] = acc;
  });
  const double total = std::accumulate(rows.begin(), rows.end(), 0.0);
  return total / (static_cast<double>(grid) * rest);
}

double spectral_potential(std::span<const ComplexEnergy> eigenvalues, ComplexEnergy e)
{
  require(!eigenvalues.empty(), ErrorCode::InvalidArgument,
          "spectral_potential: empty eigenvalue list");
  double acc = 0.0;
  for (const auto &ev : eigenvalues)
  {
    const double dist = std::abs(e - ev);
    if (dist == 0.0)
    {
      return kNegInf;
    }
    acc += std::log(dist);
  }
  return acc / static_cast<double>(eigenvalues.size());
}

double spectral_potential_line(const LaurentModel &model, ComplexEnergy e, const RVec &mu,
                               int n_perp, int axis)
{
  const int d = model.dim();
  require(static_cast<int>(mu.size()) == d, ErrorCode::DimensionMismatch,
          "spectral_potential: mu dimension differs from model dimension");
  require(n_perp >= 1, ErrorCode::InvalidArgument, "spectral_potential: n_perp must be >= 1");
  if (axis < 0)
  {
    axis = d - 1;
  }
  const int lines = ipow(n_perp, d - 1);
  double acc = 0.0;
  for (int line = 0; line < lines; line++)
  {
    const auto z = transverse_point(d, axis, line, n_perp, mu);
    const auto p = characteristic_along_axis(model, e, z, axis);
    acc += p.mean_log_abs(mu[axis], p.roots());
  }
  return acc / lines;
}

GradientResult potential_gradient(const LaurentModel &model, ComplexEnergy e, const RVec &mu,
                                  const GradientOptions &opt)
{
  const int d = model.dim();
  require(static_cast<int>(mu.size()) == d, ErrorCode::DimensionMismatch,
          "potential_gradient: mu dimension differs from model dimension");
  require(opt.n_perp >= 1, ErrorCode::InvalidArgument, "potential_gradient: n_perp must be >= 1");
  const int lines = ipow(opt.n_perp, d - 1);
  GradientResult out;
  out.g.assign(d, 0.0);
  for (int axis = 0; axis < d; axis++)
  {
    long total = 0;
    for (int line = 0; line < lines; line++)
    {
      const auto z = transverse_point(d, axis, line, opt.n_perp, mu);
      const auto p = characteristic_along_axis(model, e, z, axis);
      if (p.is_zero())
      {
        throw Error(ErrorCode::OnSpectrum,
                    "potential_gradient: characteristic polynomial vanishes identically");
      }
      const auto roots = p.roots();
      for (const auto &r : roots)
      {
        if (std::abs(std::log(std::abs(r)) - mu[axis]) < opt.on_spectrum_tol)
        {
          throw Error(ErrorCode::OnSpectrum,
                      "potential_gradient: energy lies on the spectrum of H_mu");
        }
      }
      total += p.winding(mu[axis], roots);
    }
    out.g[axis] = static_cast<double>(total) / lines;
  }
  if (opt.fd_check)
  {
    out.g_fd.assign(d, 0.0);
    for (int axis = 0; axis < d; axis++)
    {
      RVec lo = mu, hi = mu;
      lo[axis] -= opt.fd_step;
      hi[axis] += opt.fd_step;
      out.g_fd[axis] = (spectral_potential_line(model, e, hi, opt.n_perp, axis) -
                        spectral_potential_line(model, e, lo, opt.n_perp, axis)) /
                       (2.0 * opt.fd_step);
      if (!(std::abs(out.g_fd[axis] - out.g[axis]) <= opt.fd_tol))
      {
        out.disagreement = true;
      }
    }
  }
  return out;
}

DensityField nbf_density(const EnergyGrid &grid, std::span<const double> phi, int n_orb,
                         double negative_tol)
{
  require(phi.size() == grid.size(), ErrorCode::DimensionMismatch,
          "nbf_density: phi size does not match the energy grid");
  require(grid.n_re >= 3 && grid.n_im >= 3, ErrorCode::InvalidArgument,
          "nbf_density: grid needs at least 3 nodes per axis");
  const double hx = grid.d_re(), hy = grid.d_im();
  require(hx > 0.0 && hy > 0.0, ErrorCode::InvalidArgument, "nbf_density: degenerate grid");
  DensityField out;
  out.grid = grid;
  out.rho.assign(grid.size(), 0.0);
  double pos = 0.0, neg = 0.0;
  bool singular = false;
  auto at = [&](int i, int j) { return phi[static_cast<std::size_t>(j) * grid.n_re + i]; };
  for (int j = 1; j + 1 < grid.n_im; j++)
  {
    for (int i = 1; i + 1 < grid.n_re; i++)
    {
      const double lap = (at(i + 1, j) + at(i - 1, j) - 2.0 * at(i, j)) / (hx * hx) +
                         (at(i, j + 1) + at(i, j - 1) - 2.0 * at(i, j)) / (hy * hy);
      double r = lap / (kTwoPi * n_orb);
      if (!std::isfinite(r))
      {
        singular = true;
        r = std::numeric_limits<double>::quiet_NaN();
      }
      else
      {
        (r >= 0.0 ? pos : neg) += std::abs(r);
        out.integral += r * hx * hy;
      }
      out.rho[static_cast<std::size_t>(j) * grid.n_re + i] = r;
    }
  }
  out.negative_mass = pos > 0.0 ? neg / pos : 0.0;
  if (out.negative_mass > negative_tol)
  {
    out.warning = "negative lobes carry " + std::to_string(out.negative_mass) +
                  " of the positive mass; refine the energy grid (try spacing " +
                  std::to_string(hx / 2) + " x " + std::to_string(hy / 2) + ")";
  }
  if (singular)
  {
    out.warning += std::string(out.warning.empty() ? "" : "; ") +
                   "grid nodes coincide with eigenvalues (density undefined there)";
  }
  return out;
}

DensityField nbf_density(const EnergyGrid &grid, std::span<const ComplexEnergy> eigenvalues)
{
  std::vector<double> phi(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { phi[i] = spectral_potential(eigenvalues, grid.node(i)); });
  return nbf_density(grid, phi, 1);
}

std::vector<SelfIntersection> self_intersections(std::span<const double> k,
                                                 std::span<const ComplexEnergy> energies,
                                                 bool closed, double tol)
{
  require(k.size() == energies.size(), ErrorCode::DimensionMismatch,
          "self_intersections: k and energy lists differ in length");
  const std::size_t n = energies.size();
  std::vector<SelfIntersection> out;
  if (n < 4)
  {
    return out;
  }
  const std::size_t segs = closed ? n : n - 1;
  auto kend = [&](std::size_t i)
  {
    // k at the end of segment i; the closing segment wraps by one period.
    return i + 1 < n ? k[i + 1] : k[0] + kTwoPi;
  };
  for (std::size_t a = 0; a < segs; a++)
  {
    const cplx p = energies[a], r = energies[(a + 1) % n] - p;
    for (std::size_t b = a + 2; b < segs; b++)
    {
      if (closed && a == 0 && b == segs - 1)
      {
        continue;
      }
      const cplx q = energies[b], s = energies[(b + 1) % n] - q;
      const double denom = r.real() * s.imag() - r.imag() * s.real();
      if (denom == 0.0)
      {
        continue;
      }
      const cplx qp = q - p;
      const double t = (qp.real() * s.imag() - qp.imag() * s.real()) / denom;
      const double u = (qp.real() * r.imag() - qp.imag() * r.real()) / denom;
      if (t < 0.0 || t >= 1.0 || u < 0.0 || u >= 1.0)
      {
        continue;
      }
      SelfIntersection x;
      x.energy = p + t * r;
      x.k1 = wrap_phase(k[a] + t * (kend(a) - k[a]));
      x.k2 = wrap_phase(k[b] + u * (kend(b) - k[b]));
      const bool dup = std::any_of(out.begin(), out.end(), [&](const SelfIntersection &y)
                                   { return std::abs(y.energy - x.energy) < tol; });
      if (!dup)
      {
        out.push_back(x);
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const SelfIntersection &x, const SelfIntersection &y)
            { return x.energy.real() < y.energy.real(); });
  return out;
}

}  // namespace nonbloch
