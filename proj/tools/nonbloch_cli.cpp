// Copyright The nonbloch Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Batch front end over the C interface. Every artifact gets a <name>.json sidecar
// holding the command line that produced it, so `nonbloch rerun <sidecar>` repeats it.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nonbloch/nonbloch.h"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace
{

constexpr const char *kMonomialConvention =
    "H(beta) = sum_alpha c_alpha beta^alpha, beta_m = exp(i k_m + mu_m); "
    "OBC entries H_ij = c_(R_j - R_i)";
constexpr const char *kNbfSignConvention =
    "sign = sign det d(Re f, Im f)/d(k_x, k_y), f = det[E - H_mu(k)]; "
    "+1 is counterclockwise phase circulation; 1D roots carry +1";

// Failures from the library: message plus its status as exit code.
struct LibraryError : std::runtime_error
{
  int status;
  LibraryError(int s, const std::string &what) : std::runtime_error(what), status(s) {}
};

void check(nb_status s)
{
  if (s != NB_OK)
  {
    throw LibraryError(static_cast<int>(s), nb_last_error());
  }
}

struct ModelDel
{
  void operator()(nb_model *p) const { nb_model_free(p); }
};
struct TableDel
{
  void operator()(nb_table *p) const { nb_table_free(p); }
};
struct GbzDel
{
  void operator()(nb_gbz *p) const { nb_gbz_free(p); }
};
struct LatticeDel
{
  void operator()(nb_lattice *p) const { nb_lattice_free(p); }
};
struct EigenDel
{
  void operator()(nb_eigen *p) const { nb_eigen_free(p); }
};
struct FreeDel
{
  void operator()(void *p) const { nb_free(p); }
};

using Model = std::unique_ptr<nb_model, ModelDel>;
using TablePtr = std::unique_ptr<nb_table, TableDel>;
using Gbz = std::unique_ptr<nb_gbz, GbzDel>;
using Lattice = std::unique_ptr<nb_lattice, LatticeDel>;
using Eigs = std::unique_ptr<nb_eigen, EigenDel>;

std::string fmt(double v)
{
  if (std::isnan(v))
  {
    return "nan";
  }
  if (std::isinf(v))
  {
    return v > 0 ? "inf" : "-inf";
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json num(double v)
{
  return std::isfinite(v) ? json(v) : json(fmt(v));
}

struct Csv
{
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

Csv from_table(const nb_table *t)
{
  Csv c;
  for (size_t j = 0; j < nb_table_cols(t); j++)
  {
    c.columns.emplace_back(nb_table_column(t, j));
  }
  for (size_t i = 0; i < nb_table_rows(t); i++)
  {
    std::vector<double> row;
    for (size_t j = 0; j < c.columns.size(); j++)
    {
      row.push_back(nb_table_value(t, i, j));
    }
    c.rows.push_back(std::move(row));
  }
  return c;
}

class Run
{
public:
  std::string command;
  std::vector<std::string> argv;  // global options plus the subcommand and its options
  fs::path out_dir;
  std::string model_source;
  json config = json::object();
  json model_json;

  void write_csv(const std::string &name, const Csv &csv)
  {
    std::ofstream f(path(name));
    for (size_t j = 0; j < csv.columns.size(); j++)
    {
      f << (j ? "," : "") << csv.columns[j];
    }
    f << "\n";
    for (const auto &r : csv.rows)
    {
      for (size_t j = 0; j < r.size(); j++)
      {
        f << (j ? "," : "") << fmt(r[j]);
      }
      f << "\n";
    }
    finish(f, name);
  }

  void write_json(const std::string &name, const json &body)
  {
    std::ofstream f(path(name));
    f << body.dump(2) << "\n";
    finish(f, name);
  }

private:
  fs::path path(const std::string &name) const { return out_dir / name; }

  void finish(std::ofstream &f, const std::string &name)
  {
    f.close();
    if (!f)
    {
      throw LibraryError(NB_ERR_IO, "cannot write " + path(name).string());
    }
    json meta;
    meta["artifact"] = name;
    meta["command"] = command;
    meta["argv"] = argv;
    meta["config"] = config;
    meta["version"] = nb_version();
    meta["model_source"] = model_source;
    meta["model"] = model_json;
    meta["conventions"] = {{"monomial", kMonomialConvention},
                           {"nbf_sign", kNbfSignConvention},
                           {"site_coordinates", "integer unit-cell indices"},
                           {"csv", "header row, %.17g doubles"}};
    std::ofstream m(path(name + ".json"));
    m << meta.dump(2) << "\n";
    if (!m)
    {
      throw LibraryError(NB_ERR_IO, "cannot write " + path(name + ".json").string());
    }
  }
};

// ----- option helpers ------------------------------------------------------------

void want_size(const std::vector<double> &v, size_t n, const std::string &field)
{
  if (v.size() != n)
  {
    throw CLI::ValidationError(field, "expected " + std::to_string(n) + " comma-separated values, got " +
                                          std::to_string(v.size()));
  }
}

nb_complex energy_of(const std::vector<double> &v, const std::string &field)
{
  want_size(v, 2, field);
  return {v[0], v[1]};
}

std::vector<double> per_axis(const std::vector<double> &v, int d, double fill,
                             const std::string &field)
{
  if (v.empty())
  {
    return std::vector<double>(d, fill);
  }
  if (v.size() == 1 && d > 1)
  {
    return std::vector<double>(d, v[0]);
  }
  want_size(v, d, field);
  return v;
}

std::vector<double> linspace(const std::vector<double> &spec, const std::string &field)
{
  want_size(spec, 3, field);
  const int n = static_cast<int>(spec[2]);
  if (n < 1 || spec[2] != n)
  {
    throw CLI::ValidationError(field, "point count must be a positive integer");
  }
  std::vector<double> x(n);
  for (int i = 0; i < n; i++)
  {
    x[i] = n == 1 ? spec[0] : spec[0] + (spec[1] - spec[0]) * i / (n - 1);
  }
  return x;
}

// Records every option of `app` (given or defaulted) in run.config and run.argv.
// Numbers and comma lists of numbers become JSON numbers and arrays.
json typed(std::string text)
{
  if (text.size() >= 2 && text.front() == '[' && text.back() == ']')
  {
    text = text.substr(1, text.size() - 2);
  }
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');)
  {
    parts.push_back(item);
  }
  json arr = json::array();
  for (const auto &p : parts)
  {
    char *end = nullptr;
    const double v = std::strtod(p.c_str(), &end);
    if (p.empty() || end != p.c_str() + p.size())
    {
      return text;
    }
    arr.push_back(v == static_cast<long long>(v) && p.find_first_of(".eE") == std::string::npos
                      ? json(static_cast<long long>(v))
                      : json(v));
  }
  return arr.size() == 1 ? arr[0] : arr;
}

void record(const CLI::App *app, Run &run, bool skip_out)
{
  for (const CLI::Option *o : app->get_options())
  {
    if (o->get_lnames().empty())
    {
      continue;
    }
    const std::string key = o->get_lnames().front();
    const std::string name = "--" + key;
    if (key == "help" || key == "version" || (skip_out && key == "out"))
    {
      continue;
    }
    if (o->count() > 0)
    {
      const auto &res = o->results();
      if (o->get_type_size() == 0)
      {
        run.config[key] = true;
        run.argv.push_back(name);
        continue;
      }
      std::string joined;
      for (size_t i = 0; i < res.size(); i++)
      {
        joined += (i ? "," : "") + res[i];
      }
      run.config[key] = typed(joined);
      run.argv.push_back(name);
      run.argv.push_back(joined);
    }
    else if (o->get_type_size() == 0)
    {
      run.config[key] = false;
    }
    else if (!o->get_default_str().empty())
    {
      run.config[key] = typed(o->get_default_str());
    }
    else
    {
      run.config[key] = nullptr;
    }
  }
  // option groups
  for (const CLI::App *g : app->get_subcommands([](const CLI::App *a) { return a->get_name().empty(); }))
  {
    record(g, run, skip_out);
  }
}

std::vector<nb_complex> eigenvalues_of(const nb_eigen *e)
{
  std::vector<nb_complex> v(nb_eigen_count(e));
  for (size_t i = 0; i < v.size(); i++)
  {
    check(nb_eigen_value(e, i, &v[i]));
  }
  return v;
}

// Sorted by (Re, Im).
Csv spectrum_csv(const std::vector<nb_complex> &v)
{
  Csv c{{"re_E", "im_E"}, {}};
  for (const auto &z : v)
  {
    c.rows.push_back({z.re, z.im});
  }
  std::sort(c.rows.begin(), c.rows.end());
  return c;
}

// ----- geometry -----------------------------------------------------------------

struct GeometryOpts
{
  int chain = 0;
  std::vector<double> rect;
  std::vector<double> parallelogram;
  std::string sites_file;

  void add(CLI::App *sub)
  {
    auto *g = sub->add_option_group("geometry", "finite lattice (default: chain 32 in 1D, "
                                                "parallelogram 10,16,0 in 2D)");
    g->add_option("--chain", chain, "chain length")->check(CLI::PositiveNumber);
    g->add_option("--rect", rect, "rectangle lx,ly")->delimiter(',');
    g->add_option("--parallelogram", parallelogram,
                  "a,b,offset: sites with 0<=i+j<a and 0<=i-j+offset<b")
        ->delimiter(',');
    g->add_option("--sites", sites_file, "JSON file {\"sites\": [[i, j], ...]}")
        ->check(CLI::ExistingFile);
    g->require_option(0, 1);
  }

  Lattice build(const nb_model *m) const
  {
    nb_lattice *l = nullptr;
    const int d = nb_model_dim(m);
    if (chain > 0)
    {
      check(nb_lattice_chain(m, chain, &l));
    }
    else if (!rect.empty())
    {
      want_size(rect, 2, "--rect");
      check(nb_lattice_rect(m, static_cast<int>(rect[0]), static_cast<int>(rect[1]), &l));
    }
    else if (!parallelogram.empty())
    {
      want_size(parallelogram, 3, "--parallelogram");
      check(nb_lattice_parallelogram(m, static_cast<int>(parallelogram[0]),
                                     static_cast<int>(parallelogram[1]),
                                     static_cast<int>(parallelogram[2]), &l));
    }
    else if (!sites_file.empty())
    {
      std::ifstream f(sites_file);
      json j;
      try
      {
        j = json::parse(f);
      }
      catch (const json::exception &e)
      {
        throw CLI::ValidationError("--sites", e.what());
      }
      if (!j.contains("sites") || !j["sites"].is_array())
      {
        throw CLI::ValidationError("--sites", "missing array field 'sites'");
      }
      std::vector<int> flat;
      for (const auto &s : j["sites"])
      {
        if (!s.is_array() || static_cast<int>(s.size()) != d)
        {
          throw CLI::ValidationError("--sites", "each site must hold " + std::to_string(d) +
                                                    " integers");
        }
        for (const auto &c : s)
        {
          flat.push_back(c.get<int>());
        }
      }
      check(nb_lattice_mask(m, flat.data(), flat.size() / d, &l));
    }
    else if (d == 1)
    {
      check(nb_lattice_chain(m, 32, &l));
    }
    else if (d == 2)
    {
      check(nb_lattice_parallelogram(m, 10, 16, 0, &l));
    }
    else
    {
      throw CLI::ValidationError("geometry", "no default geometry in " + std::to_string(d) +
                                                 " dimensions; pass --rect or --sites");
    }
    return Lattice(l);
  }
};

std::vector<std::vector<int>> sites_of(const nb_lattice *l)
{
  const int d = nb_lattice_dim(l);
  std::vector<std::vector<int>> s(nb_lattice_sites(l), std::vector<int>(d));
  for (size_t i = 0; i < s.size(); i++)
  {
    check(nb_lattice_site(l, i, s[i].data()));
  }
  return s;
}

void write_geometry(Run &run, const nb_lattice *l)
{
  json j;
  j["sites"] = sites_of(l);
  json w = json::array();
  for (size_t i = 0; i < nb_lattice_warning_count(l); i++)
  {
    w.push_back(nb_lattice_warning(l, i));
    std::cerr << "warning: " << nb_lattice_warning(l, i) << "\n";
  }
  j["warnings"] = w;
  run.write_json("geometry.json", j);
}

Csv site_field(const nb_lattice *l, const std::vector<double> &values, const std::string &name)
{
  const int d = nb_lattice_dim(l);
  Csv c;
  for (int m = 0; m < d; m++)
  {
    c.columns.push_back("r_" + std::to_string(m + 1));
  }
  c.columns.push_back(name);
  const auto sites = sites_of(l);
  for (size_t i = 0; i < sites.size(); i++)
  {
    std::vector<double> row(sites[i].begin(), sites[i].end());
    row.push_back(values[i]);
    c.rows.push_back(std::move(row));
  }
  return c;
}

// Bounding box of the mu = 0 Bloch spectrum (padded) from the candidate grid.
std::vector<double> spectral_box(const nb_model *m, double pad)
{
  nb_complex *c = nullptr;
  size_t n = 0;
  check(nb_candidate_grid(m, 0.25, pad, &c, &n));
  std::unique_ptr<nb_complex, FreeDel> hold(c);
  std::vector<double> box{INFINITY, -INFINITY, INFINITY, -INFINITY};
  for (size_t i = 0; i < n; i++)
  {
    box[0] = std::min(box[0], c[i].re);
    box[1] = std::max(box[1], c[i].re);
    box[2] = std::min(box[2], c[i].im);
    box[3] = std::max(box[3], c[i].im);
  }
  return box;
}

struct SearchOpts
{
  nb_search_options o{};

  void add(CLI::App *sub)
  {
    nb_search_options_default(&o);
    sub->add_option("--n-perp", o.n_perp, "transverse midpoints per axis")->capture_default_str();
    sub->add_option("--g-tol", o.g_tol, "gradient tolerance")->capture_default_str();
    sub->add_option("--step-tol", o.step_tol, "step tolerance")->capture_default_str();
    sub->add_option("--max-iter", o.max_iter, "iteration cap")->capture_default_str();
    sub->add_option("--ring-radius", o.ring_radius, "classification ring radius")
        ->capture_default_str();
    sub->add_option("--plateau-g-tol", o.plateau_g_tol, "plateau gradient tolerance")
        ->capture_default_str();
  }
};

const char *verdict_name(nb_verdict v)
{
  switch (v)
  {
  case NB_CUSP_OBC:
    return "CUSP_OBC";
  case NB_PLATEAU_EXCLUDED:
    return "PLATEAU_EXCLUDED";
  default:
    return "INCONCLUSIVE";
  }
}

const char *termination_name(int t)
{
  static const char *names[] = {"gradient", "step", "max_iter", "failure"};
  return t >= 0 && t < 4 ? names[t] : "unknown";
}

}  // namespace

int run_cli(std::vector<std::string> args);

int main(int argc, char **argv)
{
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(std::move(args));
}

int run_cli(std::vector<std::string> args)
{
  CLI::App app{"non-Bloch band analysis: spectra, spectral potential, GBZ and OBC diagnostics",
               "nonbloch"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(nb_version()));

  std::string model_source = "fig2-1d";
  std::string out_dir = ".";
  int threads = 0;
  app.add_option("--model", model_source, "built-in name (fig2-1d, fig3-2d) or JSON path")
      ->capture_default_str();
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_option("--threads", threads, "worker threads (0: NONBLOCH_THREADS or hardware)")
      ->capture_default_str();

  // sweep
  auto *sweep = app.add_subcommand("sweep", "supercell BZ sweep with Bloch unfolding");
  std::vector<double> sweep_sizes, sweep_mu;
  int sweep_twists = 16;
  sweep->add_option("--sizes", sweep_sizes, "supercell size per axis (default 8)")->delimiter(',');
  sweep->add_option("--mu", sweep_mu, "mu per axis (default 0)")->delimiter(',');
  sweep->add_option("--twists", sweep_twists, "twist points per axis")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  // winding-map
  auto *wmap = app.add_subcommand("winding-map", "winding number over a complex-energy grid");
  std::vector<double> wm_re, wm_im, wm_mu, wm_nhat, wm_kperp;
  std::vector<double> wm_n{101, 101};
  int wm_loop = 64;
  wmap->add_option("--re", wm_re, "lo,hi (default: spectral box)")->delimiter(',');
  wmap->add_option("--im", wm_im, "lo,hi (default: spectral box)")->delimiter(',');
  wmap->add_option("--n", wm_n, "n_re,n_im")->delimiter(',')->capture_default_str();
  wmap->add_option("--mu", wm_mu, "mu per axis")->delimiter(',');
  wmap->add_option("--n-hat", wm_nhat, "loop direction (default: last axis)")->delimiter(',');
  wmap->add_option("--k-perp", wm_kperp, "transverse momenta")->delimiter(',');
  wmap->add_option("--loop-grid", wm_loop, "initial loop samples")->capture_default_str();

  // potential
  auto *pot = app.add_subcommand("potential", "spectral potential and gradient over a mu grid");
  std::vector<double> pot_e, pot_range{-1.0, 1.0, 201};
  int pot_nperp = 64;
  pot->add_option("--energy", pot_e, "re,im")->delimiter(',')->required();
  pot->add_option("--mu-range", pot_range, "lo,hi,n per axis")->delimiter(',')->capture_default_str();
  pot->add_option("--n-perp", pot_nperp, "transverse midpoints")->capture_default_str();

  // nbf
  auto *nbf = app.add_subcommand("nbf", "non-Bloch Fermi points at (E, mu)");
  std::vector<double> nbf_e, nbf_mu;
  nbf->add_option("--energy", nbf_e, "re,im")->delimiter(',')->required();
  nbf->add_option("--mu", nbf_mu, "mu per axis (default: mu_min from the search)")->delimiter(',');

  // gbz
  auto *gbz = app.add_subcommand("gbz", "classification, GBZ assembly and saddle points");
  std::vector<double> gbz_e;
  double gbz_spacing = 0.25, gbz_pad = 1.0, gbz_saddle_radius = 1.0;
  SearchOpts gbz_search;
  gbz->add_option("--energy", gbz_e, "classify one energy re,im instead of assembling")
      ->delimiter(',');
  gbz->add_option("--spacing", gbz_spacing, "candidate grid spacing")->capture_default_str();
  gbz->add_option("--pad", gbz_pad, "candidate box padding")->capture_default_str();
  gbz->add_option("--saddle-radius", gbz_saddle_radius, "GBZ neighbourhood of saddle points")
      ->capture_default_str();
  gbz_search.add(gbz);

  // obc
  auto *obc = app.add_subcommand("obc", "finite-lattice spectrum, DOS and skin profile");
  GeometryOpts obc_geo;
  std::vector<double> obc_dos_im, obc_dos_re, obc_gauges;
  double obc_kappa = 1e4;
  obc_geo.add(obc);
  auto *dos_im_opt =
      obc->add_option("--dos-im", obc_dos_im, "Im E lines for the DOS")->delimiter(',');
  obc->add_option("--dos-re", obc_dos_re, "lo,hi,n along each line (default: spectrum +-1, 0.01)")
      ->delimiter(',')
      ->needs(dos_im_opt);
  obc->add_option("--gauges", obc_gauges, "lo,hi,n diagonal gauges for the stable spectrum")
      ->delimiter(',');
  obc->add_option("--kappa-max", obc_kappa, "condition bound for the stable spectrum")
      ->capture_default_str();

  // greens
  auto *grn = app.add_subcommand("greens", "resolvent synthesis and eigenvalue extraction");
  GeometryOpts grn_geo;
  std::vector<double> grn_n{4, 4};
  double grn_noise = 0.0, grn_pad = 1.0;
  std::uint64_t grn_seed = 0;
  grn_geo.add(grn);
  grn->add_option("--probes", grn_n, "n_re,n_im probe grid over the padded spectrum")
      ->delimiter(',')
      ->capture_default_str();
  grn->add_option("--probe-pad", grn_pad, "probe box padding")->capture_default_str();
  grn->add_option("--noise", grn_noise, "relative complex Gaussian noise")->capture_default_str();
  grn->add_option("--seed", grn_seed, "noise seed")->capture_default_str();

  // flt
  auto *fltc = app.add_subcommand("flt", "Fourier-Laplace transform of an OBC eigenstate");
  GeometryOpts flt_geo;
  std::vector<double> flt_e, flt_s{-1.0, 1.0, 201};
  int flt_index = -1, flt_nk = 64;
  double flt_frac = 0.5;
  bool flt_grid = false;
  flt_geo.add(fltc);
  auto *fe = fltc->add_option("--energy", flt_e, "pick the eigenstate nearest re,im")->delimiter(',');
  fltc->add_option("--index", flt_index, "eigenstate index")->excludes(fe);
  fltc->add_option("--s", flt_s, "lo,hi,n along the diagonal s = (v, ..., v)")
      ->delimiter(',')
      ->capture_default_str();
  fltc->add_flag("--s-grid", flt_grid, "tensor s grid instead of the diagonal");
  fltc->add_option("--nk", flt_nk, "k points per axis")->capture_default_str();
  fltc->add_option("--frac", flt_frac, "hotspot threshold relative to the maximum")
      ->capture_default_str();

  // rerun
  auto *rerun = app.add_subcommand("rerun", "repeat the run recorded in a sidecar");
  std::string sidecar;
  rerun->add_option("sidecar", sidecar, "artifact .json sidecar")->required()->check(
      CLI::ExistingFile);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try
  {
    app.parse(rev);
  }
  catch (const CLI::CallForHelp &e)
  {
    return app.exit(e);
  }
  catch (const CLI::CallForAllHelp &e)
  {
    return app.exit(e);
  }
  catch (const CLI::CallForVersion &e)
  {
    return app.exit(e);
  }
  catch (const CLI::ParseError &e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  if (rerun->parsed())
  {
    json meta;
    try
    {
      std::ifstream f(sidecar);
      meta = json::parse(f);
      std::vector<std::string> again = meta.at("argv").get<std::vector<std::string>>();
      const std::string dir = app.get_option("--out")->count() > 0
                                  ? out_dir
                                  : fs::absolute(sidecar).parent_path().string();
      again.insert(again.begin(), {"--out", dir});
      return run_cli(std::move(again));
    }
    catch (const json::exception &e)
    {
      std::cerr << "error: sidecar: " << e.what() << "\n";
      return 2;
    }
  }

  Run run;
  run.out_dir = out_dir;
  run.model_source = model_source;
  CLI::App *sub = app.get_subcommands().front();
  run.command = sub->get_name();
  record(&app, run, true);
  run.argv.push_back(run.command);
  {
    json global = run.config;
    run.config = json::object();
    record(sub, run, false);
    run.config["global"] = global;
  }

  try
  {
    std::error_code ec;
    fs::create_directories(run.out_dir, ec);
    if (ec)
    {
      throw LibraryError(NB_ERR_IO, "cannot create " + run.out_dir.string() + ": " + ec.message());
    }
    nb_set_threads(threads);

    nb_model *mp = nullptr;
    if (nb_model_load(model_source.c_str(), &mp) != NB_OK)
    {
      throw CLI::ValidationError("--model", nb_last_error());
    }
    Model model(mp);
    const nb_model *m = model.get();
    const int d = nb_model_dim(m);
    {
      char *txt = nullptr;
      check(nb_model_to_json(m, &txt));
      std::unique_ptr<char, FreeDel> hold(txt);
      run.model_json = json::parse(txt);
    }

    if (run.command == "sweep")
    {
      std::vector<int> sizes;
      for (double v : per_axis(sweep_sizes, d, 8.0, "--sizes"))
      {
        if (v < 1 || v != static_cast<int>(v))
        {
          throw CLI::ValidationError("--sizes", "sizes must be positive integers");
        }
        sizes.push_back(static_cast<int>(v));
      }
      const auto mu = per_axis(sweep_mu, d, 0.0, "--mu");
      nb_table *t = nullptr;
      check(nb_sweep(m, sizes.data(), mu.data(), sweep_twists, &t));
      TablePtr tp(t);
      run.write_csv("sweep.csv", from_table(t));
    }
    else if (run.command == "winding-map")
    {
      const auto box = spectral_box(m, 1.0);
      if (!wm_re.empty())
      {
        want_size(wm_re, 2, "--re");
      }
      if (!wm_im.empty())
      {
        want_size(wm_im, 2, "--im");
      }
      want_size(wm_n, 2, "--n");
      const auto re = wm_re.empty() ? std::vector<double>{box[0], box[1]} : wm_re;
      const auto im = wm_im.empty() ? std::vector<double>{box[2], box[3]} : wm_im;
      const auto mu = per_axis(wm_mu, d, 0.0, "--mu");
      std::vector<double> nhat(d, 0.0);
      nhat[d - 1] = 1.0;
      if (!wm_nhat.empty())
      {
        want_size(wm_nhat, d, "--n-hat");
        nhat = wm_nhat;
      }
      std::vector<double> kperp(std::max(d - 1, 1), 0.0);
      if (!wm_kperp.empty())
      {
        want_size(wm_kperp, d - 1, "--k-perp");
        kperp = wm_kperp;
      }
      nb_table *t = nullptr;
      check(nb_winding_map(m, re[0], re[1], static_cast<int>(wm_n[0]), im[0], im[1],
                           static_cast<int>(wm_n[1]), mu.data(), nhat.data(), kperp.data(),
                           wm_loop, &t));
      TablePtr tp(t);
      run.write_csv("winding_map.csv", from_table(t));
    }
    else if (run.command == "potential")
    {
      const nb_complex e = energy_of(pot_e, "--energy");
      const auto axis = linspace(pot_range, "--mu-range");
      size_t total = 1;
      for (int a = 0; a < d; a++)
      {
        total *= axis.size();
      }
      std::vector<double> mus;
      mus.reserve(total * d);
      for (size_t idx = 0; idx < total; idx++)
      {
        size_t r = idx;
        std::vector<double> mu(d);
        for (int a = d - 1; a >= 0; a--)
        {
          mu[a] = axis[r % axis.size()];
          r /= axis.size();
        }
        mus.insert(mus.end(), mu.begin(), mu.end());
      }
      nb_table *t = nullptr;
      check(nb_potential_scan(m, e, mus.data(), total, pot_nperp, &t));
      TablePtr tp(t);
      run.write_csv("potential.csv", from_table(t));
    }
    else if (run.command == "nbf")
    {
      const nb_complex e = energy_of(nbf_e, "--energy");
      std::vector<double> mu;
      if (nbf_mu.empty())
      {
        nb_search_result r{};
        check(nb_classify(m, e, nullptr, &r, nullptr));
        mu.assign(r.mu_min, r.mu_min + d);
      }
      else
      {
        mu = per_axis(nbf_mu, d, 0.0, "--mu");
      }
      nb_table *t = nullptr;
      check(nb_find_nbfs(m, e, mu.data(), &t));
      TablePtr tp(t);
      run.config["mu_used"] = mu;
      run.write_csv("nbf.csv", from_table(t));
    }
    else if (run.command == "gbz" && !gbz_e.empty())
    {
      const nb_complex e = energy_of(gbz_e, "--energy");
      nb_search_result r{};
      nb_table *traj = nullptr;
      check(nb_classify(m, e, &gbz_search.o, &r, &traj));
      TablePtr tp(traj);
      json j;
      j["energy"] = {e.re, e.im};
      j["verdict"] = verdict_name(r.verdict);
      j["mu_min"] = std::vector<double>(r.mu_min, r.mu_min + d);
      j["phi_min"] = num(r.phi_min);
      j["iterations"] = r.iterations;
      j["cusp_flag"] = r.cusp_flag != 0;
      j["termination"] = termination_name(r.termination);
      run.write_json("classify.json", j);
      run.write_csv("trajectory.csv", from_table(traj));
    }
    else if (run.command == "gbz")
    {
      nb_complex *c = nullptr;
      size_t n = 0;
      check(nb_candidate_grid(m, gbz_spacing, gbz_pad, &c, &n));
      std::unique_ptr<nb_complex, FreeDel> hold(c);
      nb_gbz *gp = nullptr;
      check(nb_predict_obc(m, c, n, &gbz_search.o, &gp));
      Gbz g(gp);
      nb_table *t = nullptr;
      check(nb_gbz_table(g.get(), &t));
      TablePtr tp(t);
      run.config["candidates"] = n;
      run.write_csv("gbz.csv", from_table(t));
      if (d == 1 && nb_model_n_orb(m) == 1)
      {
        nb_table *s = nullptr;
        check(nb_saddle_points(m, g.get(), gbz_saddle_radius, &s));
        TablePtr sp(s);
        run.write_csv("saddles.csv", from_table(s));
      }
    }
    else if (run.command == "obc")
    {
      Lattice lat = obc_geo.build(m);
      write_geometry(run, lat.get());
      nb_eigen *ep = nullptr;
      check(nb_diagonalize(lat.get(), &ep));
      Eigs eig(ep);
      const auto ev = eigenvalues_of(eig.get());
      run.write_csv("spectrum.csv", spectrum_csv(ev));
      std::vector<double> skin(nb_lattice_sites(lat.get()));
      check(nb_skin_profile(lat.get(), eig.get(), skin.data()));
      run.write_csv("skin.csv", site_field(lat.get(), skin, "weight"));
      if (!obc_gauges.empty())
      {
        const auto g = linspace(obc_gauges, "--gauges");
        std::vector<double> flat;
        for (double v : g)
        {
          flat.insert(flat.end(), d, v);
        }
        nb_complex *s = nullptr;
        size_t count = 0;
        check(nb_stable_spectrum(m, lat.get(), flat.data(), g.size(), obc_kappa, &s, &count));
        std::unique_ptr<nb_complex, FreeDel> hold(s);
        run.write_csv("spectrum_stable.csv", spectrum_csv(std::vector<nb_complex>(s, s + count)));
      }
      if (!obc_dos_im.empty())
      {
        std::vector<double> re;
        if (obc_dos_re.empty())
        {
          double lo = INFINITY, hi = -INFINITY;
          for (const auto &z : ev)
          {
            lo = std::min(lo, z.re);
            hi = std::max(hi, z.re);
          }
          const int n = static_cast<int>(std::round((hi - lo + 2.0) / 0.01)) + 1;
          re = linspace({lo - 1.0, hi + 1.0, static_cast<double>(n)}, "--dos-re");
        }
        else
        {
          re = linspace(obc_dos_re, "--dos-re");
        }
        Csv dos{{"im_line", "re_E", "rho"}, {}};
        Csv peaks{{"im_line", "re_E", "rho", "rank"}, {}};
        std::vector<double> rho(re.size());
        std::vector<size_t> idx(re.size());
        for (double line : obc_dos_im)
        {
          check(nb_dos(ev.data(), ev.size(), line, re.data(), re.size(), rho.data()));
          for (size_t i = 0; i < re.size(); i++)
          {
            dos.rows.push_back({line, re[i], rho[i]});
          }
          size_t count = 0;
          check(nb_dos_peaks(rho.data(), rho.size(), idx.data(), &count));
          for (size_t r = 0; r < count; r++)
          {
            peaks.rows.push_back({line, re[idx[r]], rho[idx[r]], static_cast<double>(r)});
          }
        }
        run.write_csv("dos.csv", dos);
        run.write_csv("dos_peaks.csv", peaks);
      }
    }
    else if (run.command == "greens")
    {
      Lattice lat = grn_geo.build(m);
      want_size(grn_n, 2, "--probes");
      nb_eigen *ep = nullptr;
      check(nb_diagonalize(lat.get(), &ep));
      Eigs eig(ep);
      const auto ev = eigenvalues_of(eig.get());
      double box[4] = {INFINITY, -INFINITY, INFINITY, -INFINITY};
      for (const auto &z : ev)
      {
        box[0] = std::min(box[0], z.re);
        box[1] = std::max(box[1], z.re);
        box[2] = std::min(box[2], z.im);
        box[3] = std::max(box[3], z.im);
      }
      const auto pr = linspace({box[0] - grn_pad, box[1] + grn_pad, grn_n[0]}, "--probes");
      const auto pi = linspace({box[2] - grn_pad, box[3] + grn_pad, grn_n[1]}, "--probes");
      std::vector<nb_complex> probes;
      for (double y : pi)
      {
        for (double x : pr)
        {
          probes.push_back({x, y});
        }
      }
      std::vector<nb_complex> got(nb_lattice_order(lat.get()));
      size_t used = 0;
      check(nb_extract_from_greens(lat.get(), probes.data(), probes.size(), grn_noise, grn_seed,
                                   got.data(), &used));
      run.config["probes_used"] = used;
      Csv pc{{"re_E", "im_E"}, {}};
      for (const auto &z : probes)
      {
        pc.rows.push_back({z.re, z.im});
      }
      run.write_csv("probes.csv", pc);
      run.write_csv("extracted.csv", spectrum_csv(got));
      run.write_csv("spectrum.csv", spectrum_csv(ev));
    }
    else if (run.command == "flt")
    {
      if (nb_model_n_orb(m) != 1)
      {
        throw LibraryError(NB_ERR_UNSUPPORTED, "flt: single-orbital models only");
      }
      Lattice lat = flt_geo.build(m);
      write_geometry(run, lat.get());
      nb_eigen *ep = nullptr;
      check(nb_diagonalize(lat.get(), &ep));
      Eigs eig(ep);
      const auto ev = eigenvalues_of(eig.get());
      size_t pick = 0;
      if (!flt_e.empty())
      {
        const nb_complex e = energy_of(flt_e, "--energy");
        auto dist = [&](const nb_complex &z) { return std::hypot(z.re - e.re, z.im - e.im); };
        for (size_t i = 1; i < ev.size(); i++)
        {
          if (dist(ev[i]) < dist(ev[pick]))
          {
            pick = i;
          }
        }
      }
      else if (flt_index >= 0)
      {
        if (static_cast<size_t>(flt_index) >= ev.size())
        {
          throw CLI::ValidationError("--index", "out of range");
        }
        pick = static_cast<size_t>(flt_index);
      }
      else
      {
        throw CLI::ValidationError("--energy", "pass --energy or --index");
      }
      std::vector<nb_complex> state(nb_lattice_order(lat.get()));
      check(nb_eigen_right(eig.get(), pick, state.data()));
      const auto axis = linspace(flt_s, "--s");
      std::vector<double> s;
      if (flt_grid)
      {
        size_t total = 1;
        for (int a = 0; a < d; a++)
        {
          total *= axis.size();
        }
        for (size_t idx = 0; idx < total; idx++)
        {
          size_t r = idx;
          std::vector<double> p(d);
          for (int a = d - 1; a >= 0; a--)
          {
            p[a] = axis[r % axis.size()];
            r /= axis.size();
          }
          s.insert(s.end(), p.begin(), p.end());
        }
      }
      else
      {
        for (double v : axis)
        {
          s.insert(s.end(), d, v);
        }
      }
      const size_t n_s = s.size() / d;
      nb_table *t = nullptr;
      check(nb_flt(lat.get(), state.data(), s.data(), n_s, flt_nk, 1, &t));
      TablePtr tp(t);
      nb_table *h = nullptr;
      check(nb_flt_hotspots(lat.get(), state.data(), s.data(), n_s, flt_nk, flt_frac, &h));
      TablePtr hp(h);
      run.config["state_index"] = pick;
      run.config["state_energy"] = {ev[pick].re, ev[pick].im};
      std::vector<double> amp(state.size());
      for (size_t i = 0; i < state.size(); i++)
      {
        amp[i] = std::hypot(state[i].re, state[i].im);
      }
      run.write_csv("state.csv", site_field(lat.get(), amp, "abs_psi"));
      run.write_csv("flt.csv", from_table(t));
      run.write_csv("hotspots.csv", from_table(h));
    }
  }
  catch (const CLI::ValidationError &e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  catch (const LibraryError &e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return 10 + e.status;
  }
  catch (const std::exception &e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
