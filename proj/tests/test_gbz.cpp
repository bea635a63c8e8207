// Copyright The nonbloch Authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "nonbloch/diagnostics.hpp"
#include "nonbloch/gbz.hpp"
#include "oracles.hpp"

using namespace nonbloch;

TEST_SUITE("gbz")
{
  TEST_CASE("1D minimum matches a dense scan of the potential")
  {
    const auto m = builtin_1d();
    for (cplx e : {cplx(1039.2, -4.4), cplx(1045.0, -3.0), cplx(1034.0, -6.5)})
    {
      const auto r = minimize_potential(m, e);
      REQUIRE(r.mu_min.size() == 1u);
      double best = 1e300;
      for (int i = 0; i <= 400; i++)
      {
        best = std::min(best, oracle::potential_1d(m, e, -1.0 + 0.005 * i, 2048));
      }
      // quadrature error grows where a root nears the circle
      CHECK(r.phi_min <= best + 1e-4);
      CHECK(oracle::potential_1d(m, e, r.mu_min[0], 2048) == doctest::Approx(r.phi_min).epsilon(1e-6));
      REQUIRE(r.flat_extent.size() == 1u);
      CHECK(r.flat_extent[0].first <= r.mu_min[0] + 1e-9);
      CHECK(r.mu_min[0] <= r.flat_extent[0].second + 1e-9);
      CHECK(r.trajectory.front().mu == RVec{0.0});
    }
  }

  TEST_CASE("classification")
  {
    const auto m = builtin_1d();
    const auto e1 = classify_energy(m, cplx(1039.2, -4.4));
    CHECK(e1.verdict == Verdict::CuspObc);
    CHECK(e1.mu_min[0] == doctest::Approx(0.1).epsilon(0.2));
    // far from the spectrum the winding vanishes over a wide mu range
    CHECK(classify_energy(m, cplx(1e6, 0.0)).verdict == Verdict::PlateauExcluded);
    CHECK(to_string(Verdict::CuspObc) == "CUSP_OBC");
    CHECK(to_string(Verdict::PlateauExcluded) == "PLATEAU_EXCLUDED");
    CHECK(to_string(Verdict::Inconclusive) == "INCONCLUSIVE");
    CHECK_THROWS_AS(minimize_potential(m, cplx(1039.2, -4.4), {0.0, 0.0}), Error);
  }

  TEST_CASE("2D minimum is a stationary point on the diagonal")
  {
    const auto m = builtin_2d();
    const auto r = minimize_potential(m, cplx(1045.1, -6.0));
    REQUIRE(r.mu_min.size() == 2u);
    CHECK(std::abs(r.mu_min[0] - r.mu_min[1]) < 1e-3);
    const auto g = potential_gradient(m, cplx(1045.1, -6.0), r.mu_min);
    CHECK(std::hypot(g.g[0], g.g[1]) < 0.05);
    // lower than every neighbour at distance 0.05
    for (int q = 0; q < 8; q++)
    {
      const double t = oracle::pi * q / 4;
      const RVec p{r.mu_min[0] + 0.05 * std::cos(t), r.mu_min[1] + 0.05 * std::sin(t)};
      CHECK(search_potential(m, cplx(1045.1, -6.0), p, 64) >= r.phi_min - 1e-9);
    }
  }

  TEST_CASE("predicted 1D spectrum satisfies the modulus-ordered root condition")
  {
    const auto m = builtin_1d();
    const auto gbz = predict_obc_spectrum(m, candidate_grid(m, 0.5, 1.0));
    REQUIRE(gbz.size() > 20u);
    for (const auto &p : gbz)
    {
      const auto ref = oracle::gbz_condition_1d(m, p.energy);
      if (!p.snapped)
      {
        continue;
      }
      CHECK(std::abs(ref.log_mod_p - ref.log_mod_p1) < 1e-6);
      CHECK(std::abs(p.mu[0] - ref.log_mod_p) < 0.02);
      REQUIRE(p.k_points.size() == 2u);
      for (const auto &k : p.k_points)
      {
        const double d = std::min(std::abs(std::remainder(k[0] - ref.k_p, 2 * oracle::pi)),
                                  std::abs(std::remainder(k[0] - ref.k_p1, 2 * oracle::pi)));
        CHECK(d < 0.05);
      }
    }
  }

  TEST_CASE("saddle points are critical points of H on the GBZ")
  {
    const auto m = builtin_1d();
    const auto gbz = predict_obc_spectrum(m, candidate_grid(m, 0.5, 1.0));
    const auto s = saddle_points(m, gbz);
    CHECK(s.size() >= 2u);
    for (const auto &p : s)
    {
      const cplx beta = std::exp(cplx(p.mu[0], p.k[0]));
      cplx h = 0.0, dh = 0.0;
      for (const auto &[alpha, c] : m.terms())
      {
        h += c(0, 0) * std::pow(beta, alpha[0]);
        dh += static_cast<double>(alpha[0]) * c(0, 0) * std::pow(beta, alpha[0] - 1);
      }
      CHECK(std::abs(dh) < 1e-8 * m.spectral_scale());
      CHECK(std::abs(h - p.energy) < 1e-8 * m.spectral_scale());
      const auto ref = oracle::gbz_condition_1d(m, p.energy);
      CHECK(std::abs(ref.log_mod_p - ref.log_mod_p1) < 1e-4);
    }
    CHECK_THROWS_AS(saddle_points(builtin_2d(), {}), Error);
  }

  TEST_CASE("candidate grid covers the Bloch spectrum")
  {
    const auto m = builtin_1d();
    const auto c = candidate_grid(m, 0.25, 1.0);
    double re_lo = 1e300, re_hi = -1e300;
    for (auto z : c)
    {
      re_lo = std::min(re_lo, z.real());
      re_hi = std::max(re_hi, z.real());
    }
    for (int j = 0; j < 64; j++)
    {
      const double k = 2 * oracle::pi * j / 64;
      const cplx e = oracle::symbol(m, {k}, {0.0})(0, 0);
      CHECK(e.real() >= re_lo);
      CHECK(e.real() <= re_hi);
    }
    CHECK_THROWS_AS(candidate_grid(m, 0.0, 1.0), Error);
  }
}
