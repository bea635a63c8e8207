// Copyright The nonbloch Authors.
// SPDX-License-Identifier: Apache-2.0

// Exercises the C interface only.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "nonbloch/nonbloch.h"

namespace
{

nb_model *load(const char *name)
{
  nb_model *m = nullptr;
  REQUIRE(nb_model_load(name, &m) == NB_OK);
  REQUIRE(m != nullptr);
  return m;
}

}  // namespace

TEST_SUITE("capi")
{
  TEST_CASE("version and errors")
  {
    CHECK(std::strlen(nb_version()) > 0);
    nb_model *m = nullptr;
    CHECK(nb_model_load("no-such-model", &m) != NB_OK);
    CHECK(m == nullptr);
    CHECK(std::strlen(nb_last_error()) > 0);
    CHECK(nb_model_load(nullptr, &m) == NB_ERR_INVALID_ARGUMENT);
    CHECK(nb_model_from_json("{", &m) == NB_ERR_INVALID_ARGUMENT);
    CHECK(std::string(nb_last_error()).size() > 0);
    nb_model_free(nullptr);
    nb_table_free(nullptr);
    nb_gbz_free(nullptr);
    nb_lattice_free(nullptr);
    nb_eigen_free(nullptr);
    nb_free(nullptr);
  }

  TEST_CASE("model round trip and evaluation")
  {
    nb_model *m = load("fig2-1d");
    CHECK(nb_model_dim(m) == 1);
    CHECK(nb_model_n_orb(m) == 1);
    CHECK(nb_model_scale(m) > 0.0);
    char *json = nullptr;
    REQUIRE(nb_model_to_json(m, &json) == NB_OK);
    nb_model *back = nullptr;
    REQUIRE(nb_model_from_json(json, &back) == NB_OK);
    nb_free(json);
    const double k = 0.4, mu = 0.1;
    nb_complex a, b;
    REQUIRE(nb_eval_bloch(m, &k, &mu, &a) == NB_OK);
    REQUIRE(nb_eval_bloch(back, &k, &mu, &b) == NB_OK);
    CHECK(a.re == doctest::Approx(b.re));
    CHECK(a.im == doctest::Approx(b.im));
    // gauge by mu, evaluate at zero
    nb_model *g = nullptr;
    REQUIRE(nb_model_gauge(m, &mu, &g) == NB_OK);
    const double zero = 0.0;
    REQUIRE(nb_eval_bloch(g, &k, &zero, &b) == NB_OK);
    CHECK(a.re == doctest::Approx(b.re));
    CHECK(a.im == doctest::Approx(b.im));
    CHECK(nb_eval_bloch(m, nullptr, &mu, &a) == NB_ERR_INVALID_ARGUMENT);
    nb_model_free(g);
    nb_model_free(back);
    nb_model_free(m);
  }

  TEST_CASE("sweep table accessors")
  {
    nb_model *m = load("fig2-1d");
    const int size = 4;
    const double mu = 0.1;
    nb_table *t = nullptr;
    REQUIRE(nb_sweep(m, &size, &mu, 3, &t) == NB_OK);
    CHECK(nb_table_rows(t) == 12u);
    REQUIRE(nb_table_cols(t) >= 4u);
    CHECK(std::string(nb_table_column(t, 0)) == "k_1");
    CHECK(nb_table_column(t, 999) == nullptr);
    CHECK(std::isnan(nb_table_value(t, 999, 0)));
    const std::string path = "capi_sweep.csv";
    REQUIRE(nb_table_write_csv(t, path.c_str()) == NB_OK);
    std::FILE *f = std::fopen(path.c_str(), "r");
    REQUIRE(f != nullptr);
    char line[256] = {};
    CHECK(std::fgets(line, sizeof line, f) != nullptr);
    CHECK(std::string(line).rfind("k_1", 0) == 0);
    std::fclose(f);
    std::remove(path.c_str());
    CHECK(nb_table_write_csv(t, "/no/such/dir/x.csv") == NB_ERR_IO);
    nb_table_free(t);
    const int bad = 0;
    CHECK(nb_sweep(m, &bad, &mu, 3, &t) == NB_ERR_INVALID_ARGUMENT);
    nb_model_free(m);
  }

  TEST_CASE("winding and classification")
  {
    nb_model *m = load("fig2-1d");
    const double mu = 0.1, n_hat = 1.0;
    int w = 7;
    REQUIRE(nb_winding(m, {1039.2, -4.4}, &mu, &n_hat, nullptr, 64, &w) == NB_OK);
    CHECK(std::abs(w) <= 2);
    nb_search_options opt;
    nb_search_options_default(&opt);
    CHECK(opt.max_iter > 0);
    nb_search_result r;
    nb_table *traj = nullptr;
    REQUIRE(nb_classify(m, {1039.2, -4.4}, &opt, &r, &traj) == NB_OK);
    CHECK(r.verdict == NB_CUSP_OBC);
    CHECK(r.mu_min[0] == doctest::Approx(0.1).epsilon(0.2));
    CHECK(nb_table_rows(traj) >= 1u);
    nb_table_free(traj);
    REQUIRE(nb_classify(m, {1e6, 0.0}, nullptr, &r, nullptr) == NB_OK);
    CHECK(r.verdict == NB_PLATEAU_EXCLUDED);
    nb_model_free(m);
  }

  TEST_CASE("lattice, eigenpairs and resolvent")
  {
    nb_model *m = load("fig2-1d");
    nb_lattice *l = nullptr;
    REQUIRE(nb_lattice_chain(m, 12, &l) == NB_OK);
    CHECK(nb_lattice_sites(l) == 12u);
    CHECK(nb_lattice_order(l) == 12u);
    int site = -1;
    REQUIRE(nb_lattice_site(l, 3, &site) == NB_OK);
    CHECK(site == 3);
    CHECK(nb_lattice_site(l, 12, &site) == NB_ERR_INVALID_ARGUMENT);
    nb_eigen *e = nullptr;
    REQUIRE(nb_diagonalize(l, &e) == NB_OK);
    CHECK(nb_eigen_count(e) == 12u);
    nb_complex ev;
    REQUIRE(nb_eigen_value(e, 0, &ev) == NB_OK);
    std::vector<nb_complex> g(144);
    double residual = 1.0;
    REQUIRE(nb_greens(l, {ev.re + 0.5, ev.im + 0.5}, g.data(), &residual) == NB_OK);
    CHECK(residual < 1e-8);
    CHECK(nb_greens(l, ev, g.data(), &residual) == NB_ERR_ON_SPECTRUM);
    std::vector<double> w(12);
    REQUIRE(nb_skin_profile(l, e, w.data()) == NB_OK);
    double total = 0.0;
    for (double x : w)
    {
      total += x;
    }
    CHECK(total == doctest::Approx(12.0));
    nb_eigen_free(e);
    nb_lattice_free(l);
    const int dup[] = {0, 0};
    CHECK(nb_lattice_mask(m, dup, 2, &l) == NB_ERR_INVALID_ARGUMENT);
    CHECK(nb_lattice_rect(m, 2, 2, &l) == NB_ERR_DIMENSION);
    nb_model_free(m);
  }

  TEST_CASE("dos peaks")
  {
    const double rho[] = {0.0, 1.0, 3.0, 1.0, 2.0, 0.5, 0.0};
    size_t idx[7];
    size_t count = 0;
    REQUIRE(nb_dos_peaks(rho, 7, idx, &count) == NB_OK);
    REQUIRE(count == 2u);
    CHECK(idx[0] == 2u);
    CHECK(idx[1] == 4u);
    CHECK(nb_dos_peaks(nullptr, 7, idx, &count) == NB_ERR_INVALID_ARGUMENT);
  }
}
