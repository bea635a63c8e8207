// Copyright The nonbloch Authors.
// SPDX-License-Identifier: Apache-2.0

#include "nonbloch/nonbloch.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "nonbloch/diagnostics.hpp"
#include "nonbloch/gbz.hpp"
#include "nonbloch/model.hpp"
#include "nonbloch/obc.hpp"
#include "nonbloch/parallel.hpp"
#include "nonbloch/supercell.hpp"
#include "nonbloch/table.hpp"

using namespace nonbloch;

struct nb_model
{
  LaurentModel m;
};

struct nb_table
{
  Table t;
};

struct nb_gbz
{
  int dim;
  std::vector<GBZPoint> points;
};

struct nb_lattice
{
  FiniteLattice lat;
};

struct nb_eigen
{
  EigenDecomposition eig;
};

namespace
{

thread_local std::string last_error;

template <typename F>
nb_status guard(F &&f)
{
  try
  {
    f();
    last_error.clear();
    return NB_OK;
  }
  catch (const Error &e)
  {
    last_error = e.what();
    return static_cast<nb_status>(static_cast<int>(e.code()));
  }
  catch (const std::bad_alloc &)
  {
    last_error = "out of memory";
    return NB_ERR_INTERNAL;
  }
  catch (const std::exception &e)
  {
    last_error = e.what();
    return NB_ERR_INTERNAL;
  }
  catch (...)
  {
    last_error = "unknown error";
    return NB_ERR_INTERNAL;
  }
}

void need(const void *p, const char *what)
{
  if (!p)
  {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " is null");
  }
}

cplx to_cplx(nb_complex z)
{
  return {z.re, z.im};
}

nb_complex from_cplx(cplx z)
{
  return {z.real(), z.imag()};
}

RVec vec(const double *p, int n)
{
  need(p, "vector argument");
  return RVec(p, p + n);
}

std::vector<std::string> axis_names(const char *stem, int d)
{
  std::vector<std::string> out;
  for (int m = 1; m <= d; m++)
  {
    out.push_back(std::string(stem) + "_" + std::to_string(m));
  }
  return out;
}

std::vector<std::string> concat(std::initializer_list<std::vector<std::string>> parts)
{
  std::vector<std::string> out;
  for (const auto &p : parts)
  {
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

template <typename T>
T *copy_out(const std::vector<T> &v)
{
  T *p = static_cast<T *>(std::malloc(sizeof(T) * std::max<std::size_t>(1, v.size())));
  if (!p)
  {
    throw std::bad_alloc();
  }
  std::copy(v.begin(), v.end(), p);
  return p;
}

MuSearchOptions search_options(const nb_search_options *o)
{
  MuSearchOptions s;
  if (o)
  {
    s.n_perp = o->n_perp;
    s.g_tol = o->g_tol;
    s.step_tol = o->step_tol;
    s.max_iter = o->max_iter;
    s.ring_radius = o->ring_radius;
    s.plateau_g_tol = o->plateau_g_tol;
  }
  return s;
}

nb_table *new_table(Table t)
{
  return new nb_table{std::move(t)};
}

}  // namespace

extern "C" {

const char *nb_version(void)
{
  return NONBLOCH_VERSION_STRING;
}

const char *nb_last_error(void)
{
  return last_error.c_str();
}

void nb_set_threads(int n)
{
  set_thread_count(n);
}

void nb_free(void *p)
{
  std::free(p);
}

nb_status nb_model_load(const char *source, nb_model **out)
{
  return guard([&] {
    need(source, "source");
    need(out, "out");
    *out = new nb_model{resolve_model(source)};
  });
}

nb_status nb_model_from_json(const char *text, nb_model **out)
{
  return guard([&] {
    need(text, "text");
    need(out, "out");
    *out = new nb_model{parse_model_json(text)};
  });
}

nb_status nb_model_to_json(const nb_model *m, char **out)
{
  return guard([&] {
    need(m, "model");
    need(out, "out");
    const std::string s = model_to_json(m->m);
    char *p = static_cast<char *>(std::malloc(s.size() + 1));
    if (!p)
    {
      throw std::bad_alloc();
    }
    std::memcpy(p, s.c_str(), s.size() + 1);
    *out = p;
  });
}

nb_status nb_model_gauge(const nb_model *m, const double *mu, nb_model **out)
{
  return guard([&] {
    need(m, "model");
    need(out, "out");
    const RVec v = vec(mu, m->m.dim());
    *out = new nb_model{gauge_transform(m->m, v)};
  });
}

void nb_model_free(nb_model *m)
{
  delete m;
}

int nb_model_dim(const nb_model *m)
{
  return m ? m->m.dim() : 0;
}

int nb_model_n_orb(const nb_model *m)
{
  return m ? m->m.n_orb() : 0;
}

double nb_model_scale(const nb_model *m)
{
  return m ? m->m.spectral_scale() : 0.0;
}

nb_status nb_eval_bloch(const nb_model *m, const double *k, const double *mu, nb_complex *out)
{
  return guard([&] {
    need(m, "model");
    need(out, "out");
    const int d = m->m.dim();
    const CMatrix h = eval_bloch(m->m, MomentumPoint(vec(k, d), vec(mu, d)));
    for (Eigen::Index j = 0; j < h.cols(); j++)
    {
      for (Eigen::Index i = 0; i < h.rows(); i++)
      {
        out[j * h.rows() + i] = from_cplx(h(i, j));
      }
    }
  });
}

size_t nb_table_rows(const nb_table *t)
{
  return t ? t->t.rows() : 0;
}

size_t nb_table_cols(const nb_table *t)
{
  return t ? t->t.cols() : 0;
}

const char *nb_table_column(const nb_table *t, size_t c)
{
  if (!t || c >= t->t.cols())
  {
    return nullptr;
  }
  return t->t.columns()[c].c_str();
}

double nb_table_value(const nb_table *t, size_t r, size_t c)
{
  if (!t || r >= t->t.rows() || c >= t->t.cols())
  {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return t->t.at(r, c);
}

nb_status nb_table_write_csv(const nb_table *t, const char *path)
{
  return guard([&] {
    need(t, "table");
    need(path, "path");
    t->t.write_csv(path);
  });
}

void nb_table_free(nb_table *t)
{
  delete t;
}

nb_status nb_sweep(const nb_model *m, const int *sizes, const double *mu, int twist_per_axis,
                   nb_table **out)
{
  return guard([&] {
    need(m, "model");
    need(sizes, "sizes");
    need(out, "out");
    const int d = m->m.dim();
    const IVec n(sizes, sizes + d);
    const auto samples = sweep_bz(m->m, n, vec(mu, d), uniform_twist_grid(d, twist_per_axis));
    Table t(concat({axis_names("k", d), axis_names("mu", d),
                    {"re_E", "im_E", "bloch_weight", "band_index"}}));
    for (const auto &s : samples)
    {
      for (std::size_t b = 0; b < s.energies.size(); b++)
      {
        std::vector<double> row(s.k.begin(), s.k.end());
        row.insert(row.end(), s.mu.begin(), s.mu.end());
        row.push_back(s.energies[b].real());
        row.push_back(s.energies[b].imag());
        row.push_back(s.bloch_weight[b]);
        row.push_back(static_cast<double>(b));
        t.add_row(std::move(row));
      }
    }
    *out = new_table(std::move(t));
  });
}

nb_status nb_supercell_spectrum(const nb_model *m, const int *sizes, const double *twist,
                                const double *mu, int mode, nb_complex *out)
{
  return guard([&] {
    need(m, "model");
    need(sizes, "sizes");
    need(out, "out");
    const int d = m->m.dim();
    require(mode == 0 || mode == 1, ErrorCode::InvalidArgument, "supercell: mode must be 0 or 1");
    const SupercellSpec spec(IVec(sizes, sizes + d), vec(twist, d), vec(mu, d),
                             mode == 0 ? TwistMode::Diluted : TwistMode::Boundary);
    const CVector ev = supercell_spectrum(m->m, spec);
    for (Eigen::Index i = 0; i < ev.size(); i++)
    {
      out[i] = from_cplx(ev(i));
    }
  });
}

nb_status nb_winding(const nb_model *m, nb_complex e, const double *mu, const double *n_hat,
                     const double *k_perp, int grid, int *out)
{
  return guard([&] {
    need(m, "model");
    need(out, "out");
    const int d = m->m.dim();
    const RVec kp = d > 1 ? vec(k_perp, d - 1) : RVec{};
    *out = winding(m->m, {to_cplx(e), vec(mu, d), vec(n_hat, d), kp, grid});
  });
}

nb_status nb_winding_map(const nb_model *m, double re_min, double re_max, int n_re,
                         double im_min, double im_max, int n_im, const double *mu,
                         const double *n_hat, const double *k_perp, int loop_grid,
                         nb_table **out)
{
  return guard([&] {
    need(m, "model");
    need(out, "out");
    const int d = m->m.dim();
    const RVec kp = d > 1 ? vec(k_perp, d - 1) : RVec{};
    EnergyGrid g{re_min, re_max, im_min, im_max, n_re, n_im};
    const auto w = winding_map(m->m, g, vec(mu, d), vec(n_hat, d), kp, loop_grid);
    Table t({"re_E", "im_E", "w"});
    for (std::size_t i = 0; i < w.size(); i++)
    {
      const cplx e = g.node(i);
      t.add_row({e.real(), e.imag(), w[i] ? static_cast<double>(*w[i]) : std::nan("")});
    }
    *out = new_table(std::move(t));
  });
}

nb_status nb_potential(const nb_model *m, nb_complex e, const double *mu, int n_perp,
                       double *phi, double *g)
{
  return guard([&] {
    need(m, "model");
    const int d = m->m.dim();
    const RVec v = vec(mu, d);
    if (phi)
    {
      *phi = spectral_potential_line(m->m, to_cplx(e), v, n_perp);
    }
    if (g)
    {
      GradientOptions go;
      go.n_perp = n_perp;
      const auto r = potential_gradient(m->m, to_cplx(e), v, go);
      std::copy(r.g.begin(), r.g.end(), g);
    }
  });
}

nb_status nb_potential_scan(const nb_model *m, nb_complex e, const double *mus, size_t count,
                            int n_perp, nb_table **out)
{
  return guard([&] {
    need(m, "model");
    need(mus, "mus");
    need(out, "out");
    const int d = m->m.dim();
    std::vector<std::vector<double>> rows(count);
    parallel_for(count, [&](std::size_t i)
    {
      RVec v(mus + i * d, mus + (i + 1) * d);
      std::vector<double> row = v;
      row.push_back(spectral_potential_line(m->m, to_cplx(e), v, n_perp));
      GradientOptions go;
      go.n_perp = n_perp;
      try
      {
        const auto r = potential_gradient(m->m, to_cplx(e), v, go);
        row.insert(row.end(), r.g.begin(), r.g.end());
      }
      catch (const Error &err)
      {
        if (err.code() != ErrorCode::OnSpectrum)
        {
          throw;
        }
        row.insert(row.end(), d, std::nan(""));
      }
      rows[i] = std::move(row);
    });
    Table t(concat({axis_names("mu", d), {"phi"}, axis_names("g", d)}));
    for (auto &r : rows)
    {
      t.add_row(std::move(r));
    }
    *out = new_table(std::move(t));
  });
}

nb_status nb_nbf_density(const nb_complex *eigenvalues, size_t count, double re_min,
                         double re_max, int n_re, double im_min, double im_max, int n_im,
                         nb_table **out, double *integral)
{
  return guard([&] {
    need(eigenvalues, "eigenvalues");
    need(out, "out");
    std::vector<ComplexEnergy> ev(count);
    for (std::size_t i = 0; i < count; i++)
    {
      ev[i] = to_cplx(eigenvalues[i]);
    }
    EnergyGrid g{re_min, re_max, im_min, im_max, n_re, n_im};
    const auto field = nbf_density(g, ev);
    Table t({"re_E", "im_E", "rho"});
    for (std::size_t i = 0; i < g.size(); i++)
    {
      const cplx e = g.node(i);
      t.add_row({e.real(), e.imag(), field.rho[i]});
    }
    if (integral)
    {
      *integral = field.integral;
    }
    *out = new_table(std::move(t));
  });
}

nb_status nb_find_nbfs(const nb_model *m, nb_complex e, const double *mu, nb_table **out)
{
  return guard([&] {
    need(m, "model");
    need(out, "out");
    const int d = m->m.dim();
    const auto r = find_nbfs(m->m, to_cplx(e), vec(mu, d));
    Table t(concat({axis_names("k", d), {"sign", "residual"}}));
    for (const auto &p : r.points)
    {
      std::vector<double> row = p.k;
      row.push_back(p.sign);
      row.push_back(p.residual);
      t.add_row(std::move(row));
    }
    *out = new_table(std::move(t));
  });
}

void nb_search_options_default(nb_search_options *opt)
{
  if (!opt)
  {
    return;
  }
  const MuSearchOptions s;
  opt->n_perp = s.n_perp;
  opt->g_tol = s.g_tol;
  opt->step_tol = s.step_tol;
  opt->max_iter = s.max_iter;
  opt->ring_radius = s.ring_radius;
  opt->plateau_g_tol = s.plateau_g_tol;
}

nb_status nb_classify(const nb_model *m, nb_complex e, const nb_search_options *opt,
                      nb_search_result *out, nb_table **trajectory)
{
  return guard([&] {
    need(m, "model");
    need(out, "out");
    const int d = m->m.dim();
    require(d <= 8, ErrorCode::Unsupported, "classify: at most 8 dimensions");
    const auto r = classify_energy(m->m, to_cplx(e), search_options(opt));
    out->verdict = static_cast<nb_verdict>(static_cast<int>(r.verdict));
    std::fill(std::begin(out->mu_min), std::end(out->mu_min), 0.0);
    std::copy(r.mu_min.begin(), r.mu_min.end(), out->mu_min);
    out->phi_min = r.phi_min;
    out->iterations = static_cast<int>(r.trajectory.size()) - 1;
    out->cusp_flag = r.cusp_flag ? 1 : 0;
    out->termination = static_cast<int>(r.termination);
    if (trajectory)
    {
      Table t(concat({axis_names("mu", d), {"phi"}, axis_names("g", d)}));
      for (const auto &p : r.trajectory)
      {
        std::vector<double> row = p.mu;
        row.push_back(p.phi);
        row.insert(row.end(), p.g.begin(), p.g.end());
        t.add_row(std::move(row));
      }
      *trajectory = new_table(std::move(t));
    }
  });
}

nb_status nb_candidate_grid(const nb_model *m, double spacing, double pad, nb_complex **out,
                            size_t *count)
{
  return guard([&] {
    need(m, "model");
    need(out, "out");
    need(count, "count");
    const auto g = candidate_grid(m->m, spacing, pad);
    std::vector<nb_complex> v(g.size());
    for (std::size_t i = 0; i < g.size(); i++)
    {
      v[i] = from_cplx(g[i]);
    }
    *out = copy_out(v);
    *count = v.size();
  });
}

nb_status nb_predict_obc(const nb_model *m, const nb_complex *candidates, size_t count,
                         const nb_search_options *opt, nb_gbz **out)
{
  return guard([&] {
    need(m, "model");
    need(candidates, "candidates");
    need(out, "out");
    std::vector<ComplexEnergy> c(count);
    for (std::size_t i = 0; i < count; i++)
    {
      c[i] = to_cplx(candidates[i]);
    }
    PredictOptions po;
    po.search = search_options(opt);
    *out = new nb_gbz{m->m.dim(), predict_obc_spectrum(m->m, c, po)};
  });
}

size_t nb_gbz_size(const nb_gbz *g)
{
  return g ? g->points.size() : 0;
}

nb_status nb_gbz_energy(const nb_gbz *g, size_t i, nb_complex *out)
{
  return guard([&] {
    need(g, "gbz");
    need(out, "out");
    require(i < g->points.size(), ErrorCode::InvalidArgument, "gbz: index out of range");
    *out = from_cplx(g->points[i].energy);
  });
}

nb_status nb_gbz_table(const nb_gbz *g, nb_table **out)
{
  return guard([&] {
    need(g, "gbz");
    need(out, "out");
    const int d = g->dim;
    Table t(concat({{"re_E", "im_E", "re_cand", "im_cand"}, axis_names("k", d), axis_names("mu", d)}));
    for (const auto &p : g->points)
    {
      auto emit = [&](const RVec &k)
      {
        std::vector<double> row{p.energy.real(), p.energy.imag(), p.candidate.real(),
                                p.candidate.imag()};
        row.insert(row.end(), k.begin(), k.end());
        row.insert(row.end(), p.mu.begin(), p.mu.end());
        t.add_row(std::move(row));
      };
      if (p.k_points.empty())
      {
        emit(RVec(d, std::nan("")));
      }
      for (const auto &k : p.k_points)
      {
        emit(k);
      }
    }
    *out = new_table(std::move(t));
  });
}

nb_status nb_saddle_points(const nb_model *m, const nb_gbz *g, double radius, nb_table **out)
{
  return guard([&] {
    need(m, "model");
    need(g, "gbz");
    need(out, "out");
    const auto s = saddle_points(m->m, g->points, radius);
    Table t({"re_E", "im_E", "k", "mu", "endpoint", "near_gbz"});
    for (const auto &p : s)
    {
      t.add_row({p.energy.real(), p.energy.imag(), p.k[0], p.mu[0], p.endpoint ? 1.0 : 0.0,
                 p.near_gbz ? 1.0 : 0.0});
    }
    *out = new_table(std::move(t));
  });
}

void nb_gbz_free(nb_gbz *g)
{
  delete g;
}

nb_status nb_lattice_chain(const nb_model *m, int length, nb_lattice **out)
{
  return guard([&] {
    need(m, "model");
    need(out, "out");
    require(m->m.dim() == 1, ErrorCode::DimensionMismatch, "chain geometry needs a 1D model");
    *out = new nb_lattice{build_finite(m->m, Chain{length})};
  });
}

nb_status nb_lattice_rect(const nb_model *m, int lx, int ly, nb_lattice **out)
{
  return guard([&] {
    need(m, "model");
    need(out, "out");
    require(m->m.dim() == 2, ErrorCode::DimensionMismatch, "rect geometry needs a 2D model");
    *out = new nb_lattice{build_finite(m->m, Rect{lx, ly})};
  });
}

nb_status nb_lattice_parallelogram(const nb_model *m, int a, int b, int offset,
                                   nb_lattice **out)
{
  return guard([&] {
    need(m, "model");
    need(out, "out");
    require(m->m.dim() == 2, ErrorCode::DimensionMismatch,
            "parallelogram geometry needs a 2D model");
    *out = new nb_lattice{build_finite(m->m, Parallelogram{a, b, offset})};
  });
}

nb_status nb_lattice_mask(const nb_model *m, const int *sites, size_t count, nb_lattice **out)
{
  return guard([&] {
    need(m, "model");
    need(sites, "sites");
    need(out, "out");
    const int d = m->m.dim();
    Mask mask;
    for (std::size_t i = 0; i < count; i++)
    {
      mask.sites.emplace_back(sites + i * d, sites + (i + 1) * d);
    }
    *out = new nb_lattice{build_finite(m->m, mask)};
  });
}

size_t nb_lattice_sites(const nb_lattice *l)
{
  return l ? l->lat.sites.size() : 0;
}

int nb_lattice_dim(const nb_lattice *l)
{
  return l ? l->lat.dim : 0;
}

nb_status nb_lattice_site(const nb_lattice *l, size_t i, int *out)
{
  return guard([&] {
    need(l, "lattice");
    need(out, "out");
    require(i < l->lat.sites.size(), ErrorCode::InvalidArgument, "lattice: site index out of range");
    std::copy(l->lat.sites[i].begin(), l->lat.sites[i].end(), out);
  });
}

size_t nb_lattice_warning_count(const nb_lattice *l)
{
  return l ? l->lat.warnings.size() : 0;
}

const char *nb_lattice_warning(const nb_lattice *l, size_t i)
{
  if (!l || i >= l->lat.warnings.size())
  {
    return nullptr;
  }
  return l->lat.warnings[i].c_str();
}

size_t nb_lattice_order(const nb_lattice *l)
{
  return l ? static_cast<size_t>(l->lat.hamiltonian.rows()) : 0;
}

nb_status nb_lattice_hamiltonian(const nb_lattice *l, nb_complex *out)
{
  return guard([&] {
    need(l, "lattice");
    need(out, "out");
    const auto &h = l->lat.hamiltonian;
    for (Eigen::Index j = 0; j < h.cols(); j++)
    {
      for (Eigen::Index i = 0; i < h.rows(); i++)
      {
        out[j * h.rows() + i] = from_cplx(h(i, j));
      }
    }
  });
}

void nb_lattice_free(nb_lattice *l)
{
  delete l;
}

nb_status nb_diagonalize(const nb_lattice *l, nb_eigen **out)
{
  return guard([&] {
    need(l, "lattice");
    need(out, "out");
    *out = new nb_eigen{diagonalize_obc(l->lat)};
  });
}

size_t nb_eigen_count(const nb_eigen *e)
{
  return e ? static_cast<size_t>(e->eig.values.size()) : 0;
}

nb_status nb_eigen_value(const nb_eigen *e, size_t i, nb_complex *out)
{
  return guard([&] {
    need(e, "eigen");
    need(out, "out");
    require(i < static_cast<size_t>(e->eig.values.size()), ErrorCode::InvalidArgument,
            "eigen: index out of range");
    *out = from_cplx(e->eig.values(static_cast<Eigen::Index>(i)));
  });
}

nb_status nb_eigen_right(const nb_eigen *e, size_t i, nb_complex *out)
{
  return guard([&] {
    need(e, "eigen");
    need(out, "out");
    require(i < static_cast<size_t>(e->eig.values.size()), ErrorCode::InvalidArgument,
            "eigen: index out of range");
    const auto c = e->eig.right.col(static_cast<Eigen::Index>(i));
    for (Eigen::Index r = 0; r < c.size(); r++)
    {
      out[r] = from_cplx(c(r));
    }
  });
}

nb_status nb_eigen_left(const nb_eigen *e, size_t i, nb_complex *out)
{
  return guard([&] {
    need(e, "eigen");
    need(out, "out");
    require(i < static_cast<size_t>(e->eig.values.size()), ErrorCode::InvalidArgument,
            "eigen: index out of range");
    const auto c = e->eig.left.col(static_cast<Eigen::Index>(i));
    for (Eigen::Index r = 0; r < c.size(); r++)
    {
      out[r] = from_cplx(c(r));
    }
  });
}

void nb_eigen_free(nb_eigen *e)
{
  delete e;
}

nb_status nb_stable_spectrum(const nb_model *m, const nb_lattice *l, const double *gauges,
                             size_t n_gauges, double kappa_max, nb_complex **out,
                             size_t *count)
{
  return guard([&] {
    need(m, "model");
    need(l, "lattice");
    need(gauges, "gauges");
    need(out, "out");
    need(count, "count");
    const int d = m->m.dim();
    std::vector<RVec> g;
    for (std::size_t i = 0; i < n_gauges; i++)
    {
      g.emplace_back(gauges + i * d, gauges + (i + 1) * d);
    }
    const auto s = stable_obc_spectrum(m->m, Mask{l->lat.sites}, g, kappa_max);
    std::vector<nb_complex> v(s.energies.size());
    for (std::size_t i = 0; i < v.size(); i++)
    {
      v[i] = from_cplx(s.energies[i]);
    }
    *out = copy_out(v);
    *count = v.size();
  });
}

nb_status nb_dos(const nb_complex *eigenvalues, size_t count, double im_line,
                 const double *re_grid, size_t n_re, double *out)
{
  return guard([&] {
    need(eigenvalues, "eigenvalues");
    need(re_grid, "re_grid");
    need(out, "out");
    std::vector<ComplexEnergy> ev(count);
    for (std::size_t i = 0; i < count; i++)
    {
      ev[i] = to_cplx(eigenvalues[i]);
    }
    const auto rho = dos(ev, im_line, std::vector<double>(re_grid, re_grid + n_re));
    std::copy(rho.begin(), rho.end(), out);
  });
}

nb_status nb_dos_peaks(const double *rho, size_t n, size_t *idx, size_t *count)
{
  return guard([&] {
    need(rho, "rho");
    need(idx, "idx");
    need(count, "count");
    const auto pk = dos_peaks(std::vector<double>(rho, rho + n));
    std::copy(pk.begin(), pk.end(), idx);
    *count = pk.size();
  });
}

nb_status nb_skin_profile(const nb_lattice *l, const nb_eigen *e, double *out)
{
  return guard([&] {
    need(l, "lattice");
    need(e, "eigen");
    need(out, "out");
    const auto p = skin_profile(l->lat, e->eig);
    std::copy(p.begin(), p.end(), out);
  });
}

nb_status nb_greens(const nb_lattice *l, nb_complex e, nb_complex *out, double *residual)
{
  return guard([&] {
    need(l, "lattice");
    need(out, "out");
    const auto g = greens(l->lat, to_cplx(e));
    const auto n = g.entries.rows();
    for (Eigen::Index j = 0; j < n; j++)
    {
      for (Eigen::Index i = 0; i < n; i++)
      {
        out[j * n + i] = from_cplx(g.entries(i, j));
      }
    }
    if (residual)
    {
      *residual = g.residual;
    }
  });
}

nb_status nb_extract_from_greens(const nb_lattice *l, const nb_complex *probes, size_t n_probes,
                                 double noise, uint64_t seed, nb_complex *out,
                                 size_t *probes_used)
{
  return guard([&] {
    need(l, "lattice");
    need(probes, "probes");
    need(out, "out");
    std::vector<ComplexEnergy> p(n_probes);
    for (std::size_t i = 0; i < n_probes; i++)
    {
      p[i] = to_cplx(probes[i]);
    }
    ExtractOptions eo;
    eo.noise = noise;
    eo.seed = seed;
    const auto r = extract_from_greens(l->lat, p, eo);
    for (std::size_t i = 0; i < r.energies.size(); i++)
    {
      out[i] = from_cplx(r.energies[i]);
    }
    if (probes_used)
    {
      *probes_used = r.probes_used.size();
    }
  });
}

namespace
{

FltField run_flt(const nb_lattice *l, const nb_complex *state, const double *s, size_t n_s,
                 int n_k, bool normalize)
{
  need(l, "lattice");
  need(state, "state");
  need(s, "s");
  require(l->lat.n_orb == 1, ErrorCode::Unsupported, "flt: single-orbital lattices only");
  const int d = l->lat.dim;
  CVector psi(static_cast<Eigen::Index>(l->lat.sites.size()));
  for (Eigen::Index i = 0; i < psi.size(); i++)
  {
    psi(i) = to_cplx(state[i]);
  }
  std::vector<RVec> sv;
  for (std::size_t i = 0; i < n_s; i++)
  {
    sv.emplace_back(s + i * d, s + (i + 1) * d);
  }
  return flt(l->lat.sites, psi, sv, uniform_k_axis(n_k), normalize);
}

}  // namespace

nb_status nb_flt(const nb_lattice *l, const nb_complex *state, const double *s, size_t n_s,
                 int n_k, int normalize, nb_table **out)
{
  return guard([&] {
    need(out, "out");
    const auto f = run_flt(l, state, s, n_s, n_k, normalize != 0);
    const int d = f.dim;
    Table t(concat({axis_names("s", d), axis_names("k", d), {"abs", "arg"}}));
    for (std::size_t i = 0; i < f.s.size(); i++)
    {
      for (std::size_t q = 0; q < f.k_count(); q++)
      {
        std::vector<double> row = f.s[i];
        const RVec k = f.k_at(q);
        row.insert(row.end(), k.begin(), k.end());
        const cplx v = f.values[i](static_cast<Eigen::Index>(q));
        row.push_back(std::abs(v));
        row.push_back(std::arg(v));
        t.add_row(std::move(row));
      }
    }
    *out = new_table(std::move(t));
  });
}

nb_status nb_flt_hotspots(const nb_lattice *l, const nb_complex *state, const double *s,
                          size_t n_s, int n_k, double frac, nb_table **out)
{
  return guard([&] {
    need(out, "out");
    const auto f = run_flt(l, state, s, n_s, n_k, true);
    const int d = f.dim;
    Table t(concat({axis_names("s", d), axis_names("k", d), {"value"}}));
    for (const auto &h : hotspots(f, frac))
    {
      std::vector<double> row = h.s;
      row.insert(row.end(), h.k.begin(), h.k.end());
      row.push_back(h.value);
      t.add_row(std::move(row));
    }
    *out = new_table(std::move(t));
  });
}

}  // extern "C"
