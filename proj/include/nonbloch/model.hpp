// Copyright The nonbloch Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef NONBLOCH_MODEL_HPP
#define NONBLOCH_MODEL_HPP

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nonbloch/linalg.hpp"
#include "nonbloch/types.hpp"

namespace nonbloch
{

// Real Bloch momentum k (reduced into (-pi, pi]) and imaginary part mu, so that the
// Bloch factor is beta_m = exp(i k_m + mu_m).
struct MomentumPoint
{
  RVec k;
  RVec mu;

  MomentumPoint() = default;
  MomentumPoint(RVec k_, RVec mu_);
  std::size_t dim() const { return k.size(); }
};

// Lattice Hamiltonian stored as a Laurent polynomial in the Bloch factors,
//
//   H(beta) = sum_alpha c_alpha prod_m beta_m^{alpha_m},
//
// with n_orb x n_orb complex coefficient blocks in Hz. The real-space hopping for
// displacement delta = R_i - R_j is t_delta = c_{-delta}. Immutable once built.
class LaurentModel
{
public:
  using TermMap = std::map<IVec, CMatrix>;

  LaurentModel(int dim, int n_orb, TermMap terms);

  // Convenience for single-orbital models.
  static LaurentModel scalar(int dim, const std::vector<std::pair<IVec, cplx>> &terms);

  int dim() const { return dim_; }
  int n_orb() const { return n_orb_; }
  const TermMap &terms() const { return terms_; }

  // Zero block when the offset is not in the support.
  CMatrix coefficient(const IVec &offset) const;

  // Smallest and largest exponent of beta_axis over the support.
  int min_offset(int axis) const { return min_[axis]; }
  int max_offset(int axis) const { return max_[axis]; }

  // max |c_alpha| times the support size; sets the scale of on-spectrum tolerances.
  double spectral_scale() const { return scale_; }

  // H evaluated at explicit Bloch factors.
  CMatrix at_beta(std::span<const cplx> beta) const;

  // H evaluated at log Bloch factors z_m = i k_m + mu_m (no reduction of k).
  CMatrix at_log_beta(std::span<const cplx> log_beta) const;

private:
  int dim_;
  int n_orb_;
  TermMap terms_;
  IVec min_;
  IVec max_;
  double scale_ = 0.0;
};

// H_mu(k) = H(beta) with beta = exp(i k + mu).
CMatrix eval_bloch(const LaurentModel &model, const MomentumPoint &p);

// det[E - H_mu(k)] at unreduced (k, mu).
cplx characteristic(const LaurentModel &model, cplx energy, std::span<const double> k,
                    std::span<const double> mu);

// Rescales c_alpha -> c_alpha e^{mu . alpha}, so that
// eval_bloch(gauge_transform(m, mu), (k, 0)) == eval_bloch(m, (k, mu)).
LaurentModel gauge_transform(const LaurentModel &model, std::span<const double> mu);

// H_1D = w0 + kappa (beta + 1/beta) + kappa_+ beta^-2 + kappa_- beta^2 with
// w0 = 1038 - 4i, kappa = 4, kappa_+ = 2, kappa_- = 0.4 (Hz).
LaurentModel builtin_1d();

// H_2D = w0 + kappa_+ (1/bx + 1/by) + kappa_- (bx + by)
//      + kappa' (bx by + by/bx + bx/by + 1/(bx by))
// with w0 = 1040 - 6i, kappa_+ = 2.72, kappa_- = 0.48, kappa' = 0.64 (Hz).
LaurentModel builtin_2d();

// "fig2-1d" or "fig3-2d".
LaurentModel builtin_model(std::string_view name);
std::vector<std::string> builtin_model_names();

// det[E - H] restricted to a line: all coordinates fixed except `axis`, whose Bloch
// factor is the polynomial variable z. `log_beta` supplies i k_m + mu_m for the fixed
// axes (the entry at `axis` is ignored). The result is trimmed.
LaurentPolynomial characteristic_along_axis(const LaurentModel &model, cplx energy,
                                            std::span<const cplx> log_beta, int axis);

// JSON model config:
// {"dim": d, "n_orb": n, "coeffs": [{"alpha": [..], "matrix": [[{"re":..,"im":..},..],..]},..]}
LaurentModel parse_model_json(std::string_view text);
LaurentModel load_model_json(const std::string &path);
std::string model_to_json(const LaurentModel &model);

// Built-in name or path to a JSON config.
LaurentModel resolve_model(const std::string &source);

}  // namespace nonbloch

#endif  // NONBLOCH_MODEL_HPP
