// Copyright The nonbloch Authors.
// SPDX-License-Identifier: Apache-2.0

#include "nonbloch/gbz.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <optional>

#include "nonbloch/parallel.hpp"

namespace nonbloch
{

std::string to_string(Verdict v)
{
  switch (v)
  {
  case Verdict::CuspObc:
    return "CUSP_OBC";
  case Verdict::PlateauExcluded:
    return "PLATEAU_EXCLUDED";
  default:
    return "INCONCLUSIVE";
  }
}

std::string to_string(Termination t)
{
  switch (t)
  {
  case Termination::Gradient:
    return "gradient";
  case Termination::Step:
    return "step";
  case Termination::MaxIter:
    return "max_iter";
  default:
    return "failure";
  }
}

namespace
{

double norm(const RVec &v)
{
  double s = 0.0;
  for (auto x : v)
  {
    s += x * x;
  }
  return std::sqrt(s);
}

double dot(const RVec &a, const RVec &b)
{
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); i++)
  {
    s += a[i] * b[i];
  }
  return s;
}

// Gradient with a few deterministic nudges when mu lands exactly on the spectrum.
std::optional<RVec> gradient_at(const LaurentModel &model, ComplexEnergy e, RVec &mu, int n_perp)
{
  GradientOptions go;
  go.n_perp = n_perp;
  for (int attempt = 0; attempt < 4; attempt++)
  {
    try
    {
      return potential_gradient(model, e, mu, go).g;
    }
    catch (const Error &err)
    {
      if (err.code() != ErrorCode::OnSpectrum)
      {
        throw;
      }
      for (std::size_t m = 0; m < mu.size(); m++)
      {
        mu[m] += 1e-9 * (attempt + 1) * (m % 2 ? -1.0 : 1.0);
      }
    }
  }
  return std::nullopt;
}

// Scalar winding in 1D; nullopt only when repeatedly on-spectrum.
std::optional<double> g1(const LaurentModel &model, ComplexEnergy e, double mu)
{
  RVec m{mu};
  auto g = gradient_at(model, e, m, 1);
  if (!g)
  {
    return std::nullopt;
  }
  return (*g)[0];
}

// Boundary of the monotone predicate `pred` between a (true) and b (false).
template <typename P>
double bisect(P &&pred, double a, double b)
{
  for (int it = 0; it < 200 && std::abs(b - a) > 1e-10; it++)
  {
    const double c = 0.5 * (a + b);
    (pred(c) ? a : b) = c;
  }
  return 0.5 * (a + b);
}

// 1D: [sup{g < 0}, inf{g > 0}] around x. Infinite ends when no bracket is found.
std::pair<double, double> flat_set_1d(const LaurentModel &model, ComplexEnergy e, double x,
                                      double probe)
{
  constexpr double inf = std::numeric_limits<double>::infinity();
  auto neg = [&](double m)
  {
    auto g = g1(model, e, m);
    return g && *g < -0.5;
  };
  auto nonpos = [&](double m)
  {
    auto g = g1(model, e, m);
    return g && *g < 0.5;
  };
  // sup{g < 0}: find a (neg) below and b (not neg) above.
  auto bracket = [&](auto &&pred, double start, bool want) -> std::optional<double>
  {
    // Walks from `start` in the direction that changes pred to `want`.
    double step = probe;
    for (int i = 0; i < 12; i++)
    {
      const double c = want ? start - step : start + step;
      if (pred(c) == want)
      {
        return c;
      }
      step *= 2.0;
    }
    return std::nullopt;
  };

  double lo, hi;
  if (neg(x))
  {
    auto b = bracket(neg, x, false);
    lo = b ? bisect(neg, x, *b) : inf;
  }
  else
  {
    auto a = bracket(neg, x, true);
    lo = a ? bisect(neg, *a, x) : -inf;
  }
  if (nonpos(x))
  {
    auto b = bracket(nonpos, x, false);
    hi = b ? bisect(nonpos, x, *b) : inf;
  }
  else
  {
    auto a = bracket(nonpos, x, true);
    hi = a ? bisect(nonpos, *a, x) : -inf;
  }
  return {lo, hi};
}

}  // namespace

double search_potential(const LaurentModel &model, ComplexEnergy e, const RVec &mu, int n_perp)
{
  return spectral_potential_line(model, e, mu, n_perp);
}

MuSearchResult minimize_potential(const LaurentModel &model, ComplexEnergy e, RVec mu0,
                                  const MuSearchOptions &opt)
{
  const int d = model.dim();
  if (mu0.empty())
  {
    mu0.assign(d, 0.0);
  }
  require(static_cast<int>(mu0.size()) == d, ErrorCode::DimensionMismatch,
          "minimize_potential: mu0 dimension differs from model dimension");
  require(is_finite(e), ErrorCode::InvalidArgument, "minimize_potential: non-finite energy");

  MuSearchResult res;
  res.energy = e;
  auto phi = [&](const RVec &mu) { return search_potential(model, e, mu, opt.n_perp); };

  RVec x = mu0;
  auto g0 = gradient_at(model, e, x, opt.n_perp);
  if (!g0)
  {
    res.mu_min = x;
    res.phi_min = phi(x);
    res.termination = Termination::Failure;
    return res;
  }
  RVec g = *g0;
  double f = phi(x);
  res.trajectory.push_back({x, f, g});
  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(d, d);
  res.termination = Termination::MaxIter;
  int failures = 0;

  for (int it = 0; it < opt.max_iter; it++)
  {
    if (norm(g) < opt.g_tol)
    {
      res.termination = Termination::Gradient;
      break;
    }
    Eigen::VectorXd gv = Eigen::Map<const Eigen::VectorXd>(g.data(), d);
    Eigen::VectorXd dir = -hinv * gv;
    if (dir.dot(gv) >= 0.0)
    {
      hinv.setIdentity();
      dir = -gv;
    }
    if (dir.norm() > opt.max_step)
    {
      dir *= opt.max_step / dir.norm();
    }
    const double slope = dir.dot(gv);

    double alpha = 1.0;
    bool accepted = false;
    RVec xn(d), gn;
    double fn = 0.0;
    while (alpha * dir.norm() >= 0.5 * opt.step_tol)
    {
      for (int m = 0; m < d; m++)
      {
        xn[m] = x[m] + alpha * dir(m);
      }
      fn = phi(xn);
      if (fn <= f + opt.armijo * alpha * slope)
      {
        auto gg = gradient_at(model, e, xn, opt.n_perp);
        if (!gg)
        {
          if (++failures >= 3)
          {
            break;
          }
          alpha *= 0.5;
          continue;
        }
        gn = *gg;
        fn = phi(xn);
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (failures >= 3)
    {
      res.termination = Termination::Failure;
      break;
    }
    if (!accepted)
    {
      res.termination = Termination::Step;
      break;
    }
    Eigen::VectorXd s(d), y(d);
    for (int m = 0; m < d; m++)
    {
      s(m) = xn[m] - x[m];
      y(m) = gn[m] - g[m];
    }
    x = xn;
    f = fn;
    g = gn;
    res.trajectory.push_back({x, f, g});
    if (s.norm() < opt.step_tol)
    {
      res.termination = Termination::Step;
      break;
    }
    const double ys = y.dot(s);
    if (ys > 1e-12)
    {
      const double rho = 1.0 / ys;
      const Eigen::MatrixXd i = Eigen::MatrixXd::Identity(d, d);
      hinv = (i - rho * s * y.transpose()) * hinv * (i - rho * y * s.transpose()) +
             rho * s * s.transpose();
    }
  }

  // Best accepted iterate (phi is non-increasing, but guard anyway).
  auto best = std::min_element(res.trajectory.begin(), res.trajectory.end(),
                               [](const TrajectoryPoint &a, const TrajectoryPoint &b)
                               { return a.phi < b.phi; });
  res.mu_min = best->mu;
  res.phi_min = best->phi;
  const RVec &gb = best->g;
  res.cusp_flag = res.termination == Termination::Step && norm(gb) >= opt.plateau_g_tol;

  if (d == 1 && opt.centre_flat_set && res.termination != Termination::Failure)
  {
    const auto [lo, hi] = flat_set_1d(model, e, res.mu_min[0], opt.probe);
    res.flat_extent = {{lo, hi}};
    if (std::isfinite(lo) && std::isfinite(hi))
    {
      res.mu_min[0] = 0.5 * (lo + hi);
      res.cusp_flag = hi - lo < 1e-8;
    }
    else if (std::isfinite(lo) || std::isfinite(hi))
    {
      // Unbounded flat set; stay at the best iterate.
      res.cusp_flag = false;
    }
    res.phi_min = phi(res.mu_min);
  }
  return res;
}

MuSearchResult classify_energy(const LaurentModel &model, ComplexEnergy e,
                               const MuSearchOptions &opt)
{
  MuSearchResult res = minimize_potential(model, e, {}, opt);
  if (res.termination == Termination::Failure)
  {
    res.verdict = Verdict::Inconclusive;
    return res;
  }
  const int d = model.dim();
  std::vector<RVec> ring;
  if (d == 1)
  {
    ring.push_back({res.mu_min[0] - opt.ring_radius});
    ring.push_back({res.mu_min[0] + opt.ring_radius});
  }
  else
  {
    for (int a = 0; a < d; a++)
    {
      for (int b = a + 1; b < d; b++)
      {
        for (int j = 0; j < 8; j++)
        {
          RVec p = res.mu_min;
          p[a] += opt.ring_radius * std::cos(kTwoPi * j / 8);
          p[b] += opt.ring_radius * std::sin(kTwoPi * j / 8);
          ring.push_back(p);
        }
      }
    }
  }
  bool all_steep = true;
  bool any_flat = false;
  for (auto p : ring)
  {
    auto g = gradient_at(model, e, p, opt.n_perp);
    if (!g)
    {
      all_steep = false;
      continue;
    }
    res.ring_gradients.push_back(*g);
    RVec out(d);
    for (int m = 0; m < d; m++)
    {
      out[m] = p[m] - res.mu_min[m];
    }
    const double gn = norm(*g);
    if (gn < opt.plateau_g_tol)
    {
      any_flat = true;
    }
    if (gn < opt.plateau_g_tol || dot(*g, out) <= 0.0)
    {
      all_steep = false;
    }
  }
  res.verdict = all_steep ? Verdict::CuspObc
              : any_flat  ? Verdict::PlateauExcluded
                          : Verdict::Inconclusive;
  return res;
}

std::vector<ComplexEnergy> candidate_grid(const LaurentModel &model, double spacing, double pad)
{
  require(spacing > 0.0, ErrorCode::InvalidArgument, "candidate_grid: spacing must be positive");
  const int d = model.dim();
  const int per_axis = d == 1 ? 512 : (d == 2 ? 64 : 16);
  int total = 1;
  for (int m = 0; m < d; m++)
  {
    total *= per_axis;
  }
  double re_lo = std::numeric_limits<double>::infinity(), re_hi = -re_lo;
  double im_lo = re_lo, im_hi = -re_lo;
  const RVec zero(d, 0.0);
  for (int idx = 0; idx < total; idx++)
  {
    RVec k(d);
    int r = idx;
    for (int m = d - 1; m >= 0; m--)
    {
      k[m] = -kPi + kTwoPi * (r % per_axis) / per_axis;
      r /= per_axis;
    }
    const CVector ev = eigenvalues(eval_bloch(model, MomentumPoint(k, zero)));
    for (Eigen::Index i = 0; i < ev.size(); i++)
    {
      re_lo = std::min(re_lo, ev(i).real());
      re_hi = std::max(re_hi, ev(i).real());
      im_lo = std::min(im_lo, ev(i).imag());
      im_hi = std::max(im_hi, ev(i).imag());
    }
  }
  re_lo -= pad;
  re_hi += pad;
  im_lo -= pad;
  im_hi += pad;
  std::vector<ComplexEnergy> out;
  const int nr = static_cast<int>(std::floor((re_hi - re_lo) / spacing)) + 1;
  const int ni = static_cast<int>(std::floor((im_hi - im_lo) / spacing)) + 1;
  for (int j = 0; j < ni; j++)
  {
    for (int i = 0; i < nr; i++)
    {
      out.emplace_back(re_lo + i * spacing, im_lo + j * spacing);
    }
  }
  return out;
}

namespace
{

struct RootPair
{
  cplx a, b;
};

std::vector<cplx> sorted_roots(const LaurentModel &model, ComplexEnergy e, int &p)
{
  const std::array<cplx, 1> z{cplx(0.0)};
  const auto poly = characteristic_along_axis(model, e, z, 0);
  auto r = poly.roots();
  std::sort(r.begin(), r.end(), [](cplx x, cplx y) { return std::abs(x) < std::abs(y); });
  p = -poly.lowest;
  return r;
}

cplx nearest(const std::vector<cplx> &roots, cplx target, cplx exclude)
{
  cplx best = roots.front();
  double bd = std::numeric_limits<double>::infinity();
  bool skipped = false;
  for (const auto &r : roots)
  {
    if (!skipped && r == exclude)
    {
      skipped = true;
      continue;
    }
    const double dd = std::abs(r - target);
    if (dd < bd)
    {
      bd = dd;
      best = r;
    }
  }
  return best;
}

// Newton on log|a| - log|b| = 0 for the tracked p-th and (p+1)-th roots.
std::optional<std::pair<ComplexEnergy, RootPair>> snap_1d(const LaurentModel &model,
                                                          ComplexEnergy e, double max_move)
{
  int p = 0;
  auto r = sorted_roots(model, e, p);
  if (p < 1 || p >= static_cast<int>(r.size()))
  {
    return std::nullopt;
  }
  RootPair tr{r[p - 1], r[p]};
  auto track = [&](ComplexEnergy at, RootPair prev)
  {
    int pp = 0;
    const auto rr = sorted_roots(model, at, pp);
    RootPair out;
    out.a = nearest(rr, prev.a, cplx(std::numeric_limits<double>::quiet_NaN()));
    out.b = nearest(rr, prev.b, out.a);
    return out;
  };
  auto h = [](const RootPair &x) { return std::log(std::abs(x.a)) - std::log(std::abs(x.b)); };

  const ComplexEnergy start = e;
  for (int it = 0; it < 40; it++)
  {
    const double hv = h(tr);
    if (std::abs(hv) < 1e-12)
    {
      break;
    }
    const double step = 1e-7;
    const double hx = h(track(e + step, tr));
    const double hy = h(track(e + cplx(0.0, step), tr));
    const double gx = (hx - hv) / step, gy = (hy - hv) / step;
    const double g2 = gx * gx + gy * gy;
    if (!(g2 > 0.0))
    {
      return std::nullopt;
    }
    e -= hv * cplx(gx, gy) / g2;
    if (std::abs(e - start) > max_move)
    {
      return std::nullopt;
    }
    tr = track(e, tr);
  }
  if (std::abs(h(tr)) > 1e-8)
  {
    return std::nullopt;
  }
  // The tracked pair must still occupy the p-th and (p+1)-th modulus slots.
  int pf = 0;
  const auto rf = sorted_roots(model, e, pf);
  if (pf != p)
  {
    return std::nullopt;
  }
  const double la = std::log(std::abs(tr.a));
  const double tol = 1e-7;
  if (p >= 2 && std::log(std::abs(rf[p - 2])) > la - tol)
  {
    return std::nullopt;
  }
  if (p + 1 < static_cast<int>(rf.size()) && std::log(std::abs(rf[p + 1])) < la + tol)
  {
    return std::nullopt;
  }
  return std::make_pair(e, tr);
}

}  // namespace

std::vector<GBZPoint> predict_obc_spectrum(const LaurentModel &model,
                                           const std::vector<ComplexEnergy> &candidates,
                                           const PredictOptions &opt)
{
  const int d = model.dim();
  std::vector<std::optional<GBZPoint>> slots(candidates.size());
  parallel_for(candidates.size(), [&](std::size_t i)
  {
    const ComplexEnergy e = candidates[i];
    const auto res = classify_energy(model, e, opt.search);
    if (res.verdict != Verdict::CuspObc)
    {
      return;
    }
    GBZPoint pt;
    pt.energy = e;
    pt.candidate = e;
    pt.mu = res.mu_min;
    if (d == 1 && opt.snap)
    {
      if (auto s = snap_1d(model, e, opt.snap_max_move))
      {
        pt.energy = s->first;
        pt.snapped = true;
        const double la = std::log(std::abs(s->second.a));
        const double lb = std::log(std::abs(s->second.b));
        pt.mu = {0.5 * (la + lb)};
        RVec ka{wrap_phase(std::arg(s->second.a))}, kb{wrap_phase(std::arg(s->second.b))};
        pt.k_points = {std::min(ka, kb), std::max(ka, kb)};
        slots[i] = pt;
        return;
      }
    }
    NbfOptions no;
    no.grid = opt.nbf_grid;
    if (d == 1 && !res.flat_extent.empty() && std::isfinite(res.flat_extent[0].first) &&
        std::isfinite(res.flat_extent[0].second))
    {
      no.log_modulus_tol =
          std::max(no.log_modulus_tol,
                   0.5 * (res.flat_extent[0].second - res.flat_extent[0].first) + 1e-9);
    }
    for (const auto &n : find_nbfs(model, e, pt.mu, no).points)
    {
      pt.k_points.push_back(n.k);
    }
    slots[i] = pt;
  });
  std::vector<GBZPoint> out;
  for (auto &s : slots)
  {
    if (s)
    {
      out.push_back(std::move(*s));
    }
  }
  return out;
}

std::vector<SaddlePoint> saddle_points(const LaurentModel &model, const std::vector<GBZPoint> &gbz,
                                       double radius)
{
  if (model.dim() != 1 || model.n_orb() != 1)
  {
    throw Error(ErrorCode::Unsupported,
                "saddle_points: only single-orbital 1D models are supported");
  }
  // beta H'(beta) = sum alpha c_alpha beta^alpha.
  LaurentPolynomial q;
  q.lowest = model.min_offset(0);
  q.coeffs.assign(model.max_offset(0) - model.min_offset(0) + 1, cplx(0.0));
  for (const auto &[alpha, c] : model.terms())
  {
    q.coeffs[alpha[0] - q.lowest] += static_cast<double>(alpha[0]) * c(0, 0);
  }
  q.trim();
  std::vector<SaddlePoint> out;
  if (q.is_zero())
  {
    return out;
  }
  for (const auto &bc : q.roots())
  {
    const std::array<cplx, 1> lb{std::log(bc)};
    const ComplexEnergy ec = model.at_log_beta(lb)(0, 0);
    int p = 0;
    const auto r = sorted_roots(model, ec, p);
    if (p < 1 || p >= static_cast<int>(r.size()))
    {
      continue;
    }
    const double l0 = std::log(std::abs(r[p - 1])), l1 = std::log(std::abs(r[p]));
    const double lc = std::log(std::abs(bc));
    const double tol = 1e-5;
    if (std::abs(l0 - l1) > tol || std::abs(0.5 * (l0 + l1) - lc) > tol)
    {
      continue;
    }
    if (std::any_of(out.begin(), out.end(),
                    [&](const SaddlePoint &s) { return std::abs(s.energy - ec) < 1e-9; }))
    {
      continue;
    }
    SaddlePoint s;
    s.energy = ec;
    s.k = {wrap_phase(std::arg(bc))};
    s.mu = {lc};
    cplx dir = 0.0;
    int count = 0;
    for (const auto &g : gbz)
    {
      const cplx v = g.energy - ec;
      if (std::abs(v) < radius && std::abs(v) > 0.0)
      {
        dir += v / std::abs(v);
        count++;
      }
    }
    s.near_gbz = count > 0;
    s.endpoint = count > 0 && std::abs(dir) / count > 0.7;
    out.push_back(s);
  }
  std::sort(out.begin(), out.end(), [](const SaddlePoint &a, const SaddlePoint &b)
            { return a.energy.real() < b.energy.real(); });
  return out;
}

}  // namespace nonbloch
