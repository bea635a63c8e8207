// Copyright The nonbloch Authors.
// SPDX-License-Identifier: Apache-2.0

#include "nonbloch/obc.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <random>

#include <Eigen/LU>

#include "nonbloch/parallel.hpp"

namespace nonbloch
{

namespace
{

template <class... Ts>
struct overloaded : Ts...
{
  using Ts::operator()...;
};

}  // namespace

std::vector<IVec> geometry_sites(const Geometry &geometry)
{
  return std::visit(
      overloaded{
          [](const Chain &c)
          {
            require(c.length >= 1, ErrorCode::InvalidArgument, "chain: length must be >= 1");
            std::vector<IVec> s;
            for (int i = 0; i < c.length; i++)
            {
              s.push_back({i});
            }
            return s;
          },
          [](const Rect &r)
          {
            require(r.lx >= 1 && r.ly >= 1, ErrorCode::InvalidArgument,
                    "rect: sides must be >= 1");
            std::vector<IVec> s;
            for (int i = 0; i < r.lx; i++)
            {
              for (int j = 0; j < r.ly; j++)
              {
                s.push_back({i, j});
              }
            }
            return s;
          },
          [](const Parallelogram &p)
          {
            require(p.a >= 1 && p.b >= 1, ErrorCode::InvalidArgument,
                    "parallelogram: a and b must be >= 1");
            std::vector<IVec> s;
            const int span = p.a + p.b + std::abs(p.offset);
            for (int i = -span; i <= span; i++)
            {
              for (int j = -span; j <= span; j++)
              {
                const int u = i + j, v = i - j + p.offset;
                if (u >= 0 && u < p.a && v >= 0 && v < p.b)
                {
                  s.push_back({i, j});
                }
              }
            }
            require(!s.empty(), ErrorCode::InvalidArgument, "parallelogram: no sites");
            return s;
          },
          [](const Mask &m)
          {
            require(!m.sites.empty(), ErrorCode::InvalidArgument, "mask: empty site list");
            return m.sites;
          }},
      geometry);
}

FiniteLattice build_finite(const LaurentModel &model, const Geometry &geometry)
{
  FiniteLattice lat;
  lat.dim = model.dim();
  lat.n_orb = model.n_orb();
  lat.sites = geometry_sites(geometry);
  std::map<IVec, int> index;
  for (std::size_t i = 0; i < lat.sites.size(); i++)
  {
    require(static_cast<int>(lat.sites[i].size()) == lat.dim, ErrorCode::DimensionMismatch,
            "build_finite: site dimension differs from model dimension");
    require(index.emplace(lat.sites[i], static_cast<int>(i)).second, ErrorCode::InvalidArgument,
            "build_finite: duplicate site");
  }
  const int n = lat.n_orb;
  const auto ns = static_cast<Eigen::Index>(lat.sites.size());
  lat.hamiltonian = CMatrix::Zero(ns * n, ns * n);

  std::vector<std::vector<int>> adj(lat.sites.size());
  IVec t(lat.dim);
  for (std::size_t i = 0; i < lat.sites.size(); i++)
  {
    for (const auto &[alpha, c] : model.terms())
    {
      for (int m = 0; m < lat.dim; m++)
      {
        t[m] = lat.sites[i][m] + alpha[m];
      }
      auto it = index.find(t);
      if (it == index.end())
      {
        continue;
      }
      lat.hamiltonian.block(static_cast<Eigen::Index>(i) * n, static_cast<Eigen::Index>(it->second) * n,
                            n, n) += c;
      if (it->second != static_cast<int>(i) && c.cwiseAbs().maxCoeff() > 0.0)
      {
        adj[i].push_back(it->second);
        adj[it->second].push_back(static_cast<int>(i));
      }
    }
  }

  std::vector<char> seen(lat.sites.size(), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty())
  {
    const int v = stack.back();
    stack.pop_back();
    for (int w : adj[v])
    {
      if (!seen[w])
      {
        seen[w] = 1;
        reached++;
        stack.push_back(w);
      }
    }
  }
  if (reached != lat.sites.size())
  {
    lat.warnings.push_back("site set is disconnected under the model's hoppings (" +
                           std::to_string(reached) + " of " + std::to_string(lat.sites.size()) +
                           " sites reachable from the first)");
  }
  return lat;
}

EigenDecomposition diagonalize_obc(const FiniteLattice &lattice)
{
  return eig_biorthogonal(lattice.hamiltonian);
}

StableSpectrum stable_obc_spectrum(const LaurentModel &model, const Geometry &geometry,
                                   const std::vector<RVec> &gauges, double kappa_max)
{
  require(!gauges.empty(), ErrorCode::InvalidArgument, "stable_obc_spectrum: no gauges given");
  struct Cand
  {
    ComplexEnergy e;
    double kappa;
    std::size_t gauge;
  };
  std::vector<std::vector<Cand>> per(gauges.size());
  parallel_for(gauges.size(), [&](std::size_t g)
  {
    const auto lat = build_finite(gauge_transform(model, gauges[g]), geometry);
    const auto eig = eig_biorthogonal(lat.hamiltonian);
    const auto kappa = eigenvalue_conditions(eig);
    for (Eigen::Index i = 0; i < eig.values.size(); i++)
    {
      if (kappa[i] < kappa_max)
      {
        per[g].push_back({eig.values(i), kappa[i], g});
      }
    }
  });
  std::vector<Cand> all;
  for (auto &v : per)
  {
    all.insert(all.end(), v.begin(), v.end());
  }
  std::stable_sort(all.begin(), all.end(), [](const Cand &a, const Cand &b) { return a.kappa < b.kappa; });
  const double radius = 1e-8 * model.spectral_scale();
  StableSpectrum out;
  for (const auto &c : all)
  {
    const bool dup = std::any_of(out.energies.begin(), out.energies.end(),
                                 [&](ComplexEnergy e) { return std::abs(e - c.e) < radius; });
    if (!dup)
    {
      out.energies.push_back(c.e);
      out.condition.push_back(c.kappa);
      out.gauge.push_back(gauges[c.gauge]);
    }
  }
  return out;
}

GreensMatrix greens(const FiniteLattice &lattice, ComplexEnergy probe, double rcond_min)
{
  require(is_finite(probe), ErrorCode::InvalidArgument, "greens: non-finite probe energy");
  const auto n = lattice.hamiltonian.rows();
  CMatrix a = -lattice.hamiltonian;
  a.diagonal().array() += probe;
  Eigen::PartialPivLU<CMatrix> lu(a);
  GreensMatrix g;
  g.probe = probe;
  g.rcond = lu.rcond();
  if (!(g.rcond >= rcond_min))
  {
    throw Error(ErrorCode::OnSpectrum, "greens: probe energy too close to an eigenvalue (rcond " +
                                           std::to_string(g.rcond) + ")");
  }
  g.entries = lu.inverse();
  g.residual = (a * g.entries - CMatrix::Identity(n, n)).norm() / std::sqrt(static_cast<double>(n));
  return g;
}

Extraction extract_from_greens(const FiniteLattice &lattice,
                               const std::vector<ComplexEnergy> &probes,
                               const ExtractOptions &opt)
{
  require(!probes.empty(), ErrorCode::InvalidArgument, "extract_from_greens: no probe energies");
  const auto n = lattice.hamiltonian.rows();

  struct ProbeEig
  {
    ComplexEnergy probe;
    CVector est;      // E_p - 1/lambda
    CMatrix vectors;  // unit columns
    CMatrix left;     // dual to vectors
  };
  std::vector<std::optional<ProbeEig>> slots(probes.size());
  std::vector<std::string> notes(probes.size());
  parallel_for(probes.size(), [&](std::size_t p)
  {
    GreensMatrix g;
    try
    {
      g = greens(lattice, probes[p], opt.rcond_min);
    }
    catch (const Error &e)
    {
      if (e.code() != ErrorCode::OnSpectrum)
      {
        throw;
      }
      notes[p] = "probe " + std::to_string(p) + " skipped: " + e.what();
      return;
    }
    if (opt.noise > 0.0)
    {
      std::mt19937_64 rng(opt.seed + 0x9e3779b97f4a7c15ULL * (p + 1));
      std::normal_distribution<double> nd(0.0, 1.0);
      const double amp = opt.noise * g.entries.cwiseAbs().maxCoeff() / std::sqrt(2.0);
      for (Eigen::Index j = 0; j < n; j++)
      {
        for (Eigen::Index i = 0; i < n; i++)
        {
          const double re = nd(rng);
          const double im = nd(rng);
          g.entries(i, j) += amp * cplx(re, im);
        }
      }
    }
    EigenDecomposition es;
    try
    {
      es = eig_biorthogonal(g.entries);
    }
    catch (const Error &e)
    {
      notes[p] = "probe " + std::to_string(p) + " skipped: " + e.what();
      return;
    }
    ProbeEig pe;
    pe.probe = probes[p];
    pe.est = CVector(n);
    pe.vectors = es.right;
    pe.left = es.left;
    for (Eigen::Index i = 0; i < n; i++)
    {
      pe.est(i) = probes[p] - 1.0 / es.values(i);
    }
    slots[p] = std::move(pe);
  });

  Extraction out;
  std::vector<ProbeEig> used;
  for (std::size_t p = 0; p < probes.size(); p++)
  {
    if (!notes[p].empty())
    {
      out.warnings.push_back(notes[p]);
    }
    if (slots[p])
    {
      out.probes_used.push_back(probes[p]);
      used.push_back(std::move(*slots[p]));
    }
  }
  if (used.empty())
  {
    throw Error(ErrorCode::NoConvergence, "extract_from_greens: every probe was skipped");
  }

  // Cluster against the first usable probe, scoring with its left eigenvectors.
  const ProbeEig &ref = used.front();
  std::vector<std::vector<std::pair<std::size_t, ComplexEnergy>>> clusters(n);
  for (std::size_t p = 0; p < used.size(); p++)
  {
    const Eigen::MatrixXd ov = (ref.left.adjoint() * used[p].vectors).cwiseAbs();
    std::vector<char> taken(n, 0);
    for (Eigen::Index j = 0; j < n; j++)
    {
      Eigen::Index best = -1;
      double bo = -1.0;
      for (Eigen::Index r = 0; r < n; r++)
      {
        if (taken[r])
        {
          continue;
        }
        // Overlap first; estimated energy breaks near-ties.
        const double score = ov(r, j) - 1e-12 * std::abs(ref.est(r) - used[p].est(j));
        if (score > bo)
        {
          bo = score;
          best = r;
        }
      }
      if (best < 0)
      {
        throw Error(ErrorCode::NoConvergence, "extract_from_greens: non-finite eigenvector overlap");
      }
      taken[best] = 1;
      clusters[best].push_back({p, used[p].est(j)});
    }
  }
  out.vectors = ref.vectors;
  for (Eigen::Index r = 0; r < n; r++)
  {
    auto &c = clusters[r];
    const ComplexEnergy guess = ref.est(r);
    std::sort(c.begin(), c.end(), [&](const auto &a, const auto &b)
              { return std::abs(used[a.first].probe - guess) < std::abs(used[b.first].probe - guess); });
    const std::size_t take = std::min<std::size_t>(2, c.size());
    ComplexEnergy acc = 0.0;
    for (std::size_t i = 0; i < take; i++)
    {
      acc += c[i].second;
    }
    out.energies.push_back(acc / static_cast<double>(take));
  }
  return out;
}

std::vector<double> dos(const std::vector<ComplexEnergy> &eigenvalues, double im_line,
                        const std::vector<double> &re_grid, double exclusion, int norm_length)
{
  require(!eigenvalues.empty(), ErrorCode::InvalidArgument, "dos: empty eigenvalue list");
  const double l = norm_length > 0 ? norm_length : static_cast<double>(eigenvalues.size());
  std::vector<double> rho(re_grid.size());
  for (std::size_t i = 0; i < re_grid.size(); i++)
  {
    const ComplexEnergy e(re_grid[i], im_line);
    cplx acc = 0.0;
    bool undefined = false;
    for (const auto &ev : eigenvalues)
    {
      const cplx diff = e - ev;
      if (std::abs(diff) < exclusion)
      {
        undefined = true;
        break;
      }
      acc += 1.0 / diff;
    }
    rho[i] = undefined ? std::numeric_limits<double>::quiet_NaN() : acc.imag() / l;
  }
  return rho;
}

std::vector<std::size_t> dos_peaks(const std::vector<double> &rho)
{
  std::vector<std::size_t> peaks;
  for (std::size_t i = 1; i + 1 < rho.size(); i++)
  {
    const double v = std::abs(rho[i]);
    if (!std::isfinite(v))
    {
      continue;
    }
    const bool left = !(std::abs(rho[i - 1]) > v);
    const bool right = !(std::abs(rho[i + 1]) > v);
    if (left && right)
    {
      peaks.push_back(i);
    }
  }
  std::sort(peaks.begin(), peaks.end(),
            [&](std::size_t a, std::size_t b) { return std::abs(rho[a]) > std::abs(rho[b]); });
  return peaks;
}

std::size_t FltField::k_count() const
{
  std::size_t c = 1;
  for (int m = 0; m < dim; m++)
  {
    c *= k_axis.size();
  }
  return c;
}

RVec FltField::k_at(std::size_t idx) const
{
  RVec k(dim);
  for (int m = dim - 1; m >= 0; m--)
  {
    k[m] = k_axis[idx % k_axis.size()];
    idx /= k_axis.size();
  }
  return k;
}

RVec uniform_k_axis(int n)
{
  require(n >= 1, ErrorCode::InvalidArgument, "k axis: need at least one point");
  RVec k(n);
  for (int i = 0; i < n; i++)
  {
    k[i] = -kPi + kTwoPi * i / n;
  }
  return k;
}

FltField flt(const std::vector<IVec> &sites, const CVector &state, const std::vector<RVec> &s,
             const RVec &k_axis, bool normalize)
{
  require(!sites.empty(), ErrorCode::InvalidArgument, "flt: empty site list");
  require(state.size() == static_cast<Eigen::Index>(sites.size()), ErrorCode::DimensionMismatch,
          "flt: state length differs from the site count");
  require(!k_axis.empty() && !s.empty(), ErrorCode::InvalidArgument, "flt: empty grid");
  FltField f;
  f.dim = static_cast<int>(sites.front().size());
  f.s = s;
  f.k_axis = k_axis;
  for (const auto &sv : s)
  {
    require(static_cast<int>(sv.size()) == f.dim, ErrorCode::DimensionMismatch,
            "flt: s dimension differs from the lattice dimension");
  }
  const std::size_t nk = f.k_count();
  const auto ns = static_cast<Eigen::Index>(sites.size());

  // Plane-wave matrix e^{-i k.r}, shared by every s.
  CMatrix waves(static_cast<Eigen::Index>(nk), ns);
  parallel_for(nk, [&](std::size_t q)
  {
    const RVec k = f.k_at(q);
    for (Eigen::Index r = 0; r < ns; r++)
    {
      double ph = 0.0;
      for (int m = 0; m < f.dim; m++)
      {
        ph -= k[m] * sites[r][m];
      }
      waves(static_cast<Eigen::Index>(q), r) = std::polar(1.0, ph);
    }
  });

  f.values.resize(s.size());
  parallel_for(s.size(), [&](std::size_t i)
  {
    CVector u(ns);
    for (Eigen::Index r = 0; r < ns; r++)
    {
      double sr = 0.0;
      for (int m = 0; m < f.dim; m++)
      {
        sr += s[i][m] * sites[r][m];
      }
      u(r) = std::exp(-sr) * state(r);
    }
    if (normalize)
    {
      const double nu = u.norm();
      if (nu > 0.0)
      {
        u /= nu * std::sqrt(static_cast<double>(ns));
      }
    }
    f.values[i] = waves * u;
  });
  return f;
}

std::size_t argmax_s(const FltField &field)
{
  std::size_t best = 0;
  double bv = -1.0;
  for (std::size_t i = 0; i < field.values.size(); i++)
  {
    const double v = field.values[i].cwiseAbs().maxCoeff();
    if (v > bv)
    {
      bv = v;
      best = i;
    }
  }
  return best;
}

std::vector<Hotspot> hotspots(const FltField &field, double frac)
{
  std::vector<Hotspot> out;
  if (field.values.empty())
  {
    return out;
  }
  const std::size_t si = argmax_s(field);
  const Eigen::VectorXd a = field.values[si].cwiseAbs();
  const double top = a.maxCoeff(), bottom = a.minCoeff();
  if (!(top > 0.0) || top - bottom <= 1e-12 * top)
  {
    return out;
  }
  const int n = static_cast<int>(field.k_axis.size());
  const int d = field.dim;
  int neighbours = 1;
  for (int m = 0; m < d; m++)
  {
    neighbours *= 3;
  }
  for (std::size_t q = 0; q < field.k_count(); q++)
  {
    const double v = a(static_cast<Eigen::Index>(q));
    if (v < frac * top)
    {
      continue;
    }
    IVec idx(d);
    std::size_t r = q;
    for (int m = d - 1; m >= 0; m--)
    {
      idx[m] = static_cast<int>(r % n);
      r /= n;
    }
    bool is_max = true;
    for (int nb = 0; nb < neighbours && is_max; nb++)
    {
      int code = nb;
      std::size_t flat = 0;
      bool self = true;
      for (int m = 0; m < d; m++)
      {
        const int off = code % 3 - 1;
        code /= 3;
        self = self && off == 0;
        flat = flat * n + static_cast<std::size_t>((idx[m] + off + n) % n);
      }
      if (!self && a(static_cast<Eigen::Index>(flat)) > v)
      {
        is_max = false;
      }
    }
    if (is_max)
    {
      out.push_back({field.s[si], field.k_at(q), v});
    }
  }
  std::sort(out.begin(), out.end(), [](const Hotspot &x, const Hotspot &y) { return x.value > y.value; });
  return out;
}

std::vector<double> skin_profile(const FiniteLattice &lattice, const EigenDecomposition &eig)
{
  const int n = lattice.n_orb;
  require(eig.right.rows() == static_cast<Eigen::Index>(lattice.sites.size()) * n,
          ErrorCode::DimensionMismatch, "skin_profile: eigenvectors do not match the lattice");
  std::vector<double> out(lattice.sites.size(), 0.0);
  for (Eigen::Index v = 0; v < eig.right.cols(); v++)
  {
    const double nv = eig.right.col(v).norm();
    for (std::size_t r = 0; r < lattice.sites.size(); r++)
    {
      out[r] += eig.right.col(v).segment(static_cast<Eigen::Index>(r) * n, n).squaredNorm() / (nv * nv);
    }
  }
  return out;
}

}  // namespace nonbloch
